#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "wavemix/coeffs.hpp"

namespace wavemix::dwt {

/// Daubechies extremal-phase lowpass filter. Highpass taps are the quadrature
/// mirror g[m] = (-1)^m h[L-1-m].
struct WaveletFilter {
    int vanishing_moments = 1;
    std::vector<double> lowpass;

    std::vector<double> highpass() const;

    /// Checks sum(h) = sqrt(2) and the double-shift orthonormality conditions.
    /// Throws std::invalid_argument beyond `tol`.
    void validate(double tol = 1e-12) const;
};

/// Embedded filters for 1, 2, 5 and 7 vanishing moments (validated constants).
WaveletFilter daubechies(int vanishing_moments);

/// Parses "d1", "d2", "d5", "d7" (case-insensitive).
WaveletFilter filter_by_name(std::string_view name);

/// Orthonormal periodized pyramid transform, decomposed fully to one scaling
/// coefficient. Length must be a power of two; entries must be finite.
CoefficientTree forward(std::span<const double> signal, const WaveletFilter& filter);

/// Exact inverse of forward (transpose of the orthogonal analysis matrix).
std::vector<double> inverse(const CoefficientTree& tree, const WaveletFilter& filter);

}  // namespace wavemix::dwt

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wavemix {

// Ragged (level, position) array congruent with a dyadic detail layout:
// field[j] has 2^j entries for j = 0..J-1.
using RaggedField = std::vector<std::vector<double>>;

RaggedField make_ragged(std::size_t levels, double fill = 0.0);

// Shape equality (level count and per-level sizes).
bool congruent(const RaggedField& a, const RaggedField& b);

/// Full dyadic decomposition of a length-M = 2^J signal: one scaling
/// coefficient plus detail levels j = 0..J-1 of 2^j entries each.
struct CoefficientTree {
    double scaling = 0.0;
    RaggedField details;

    std::size_t levels() const { return details.size(); }
    std::size_t signal_length() const { return std::size_t{1} << details.size(); }

    static CoefficientTree zeros(std::size_t levels);

    /// Throws std::invalid_argument if any level has the wrong size or a
    /// non-finite entry.
    void validate() const;
};

/// Elementwise mean of trees sharing one layout.
CoefficientTree mean_tree(std::span<const CoefficientTree> trees);

}  // namespace wavemix

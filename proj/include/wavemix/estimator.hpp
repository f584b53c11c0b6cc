#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "wavemix/coeffs.hpp"
#include "wavemix/dwt.hpp"
#include "wavemix/threshold.hpp"

namespace wavemix::estimator {

/// N replicate curves on a common dyadic grid t_j = (j - 1/2)/M, row-major.
struct CurvePanel {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    static CurvePanel from_rows(const std::vector<std::vector<double>>& rows);

    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }

    /// rows >= 1, cols a power of two >= 2, finite entries.
    void validate() const;
};

enum class VarianceMode { Heteroscedastic, HomoscedasticMad };

VarianceMode variance_mode_by_name(std::string_view name);
std::string_view name(VarianceMode mode);

struct LevelDiagnostics {
    std::size_t level = 0;
    std::size_t kept = 0;    // nonzero after shrinkage
    std::size_t killed = 0;  // shrunk to exactly zero
    threshold::LevelBranch branch = threshold::LevelBranch::Untouched;
};

struct Diagnostics {
    std::vector<LevelDiagnostics> levels;
    std::size_t zero_variance_positions = 0;
};

struct EstimateResult {
    std::vector<double> mu_hat;
    CoefficientTree tree_hat;
    threshold::VarianceField variances;  // per-sample coefficient scale
    RaggedField thresholds;
    Diagnostics diagnostics;
};

/// Unbiased per-position sample variances across replicates (Eq.-style
/// 1/(N-1) sum (d_ijk - mean)^2), in the per-sample coefficient scale.
/// Requires N >= 2; with a single replicate use the MAD path instead.
threshold::VarianceField estimate_variances(std::span<const CoefficientTree> trees);

/// Robust homoscedastic scale: mean over samples of
/// median(|finest-level details|) / 0.6745.
double estimate_sigma_mad(std::span<const CoefficientTree> trees);

/// Average the replicate coefficient trees, threshold the averaged details
/// per `policy` (scaling and levels below j0 untouched), invert.
EstimateResult average_then_shrink(const CurvePanel& panel, const dwt::WaveletFilter& filter,
                                   const threshold::ThresholdPolicy& policy, VarianceMode mode);

/// Denoise each row independently (per-row MAD scale) and average the
/// reconstructed curves.
EstimateResult shrink_then_average(const CurvePanel& panel, const dwt::WaveletFilter& filter,
                                   const threshold::ThresholdPolicy& policy);

/// Plain pointwise mean across replicates; no shrinkage.
EstimateResult pointwise_average(const CurvePanel& panel, const dwt::WaveletFilter& filter);

}  // namespace wavemix::estimator

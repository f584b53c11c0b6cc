#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "wavemix/coeffs.hpp"
#include "wavemix/shrinkage.hpp"

namespace wavemix::threshold {

enum class Selector { Universal, Sure, Hybrid };

Selector selector_by_name(std::string_view name);
std::string_view name(Selector s);

/// Which noise scale the universal rate sqrt(2 ln M) multiplies. The averaged
/// coefficient d_jk has standard error se_jk = sigma_jk / sqrt(MN); the three
/// readings of the threshold formula differ by a factor applied to se:
///   SqrtMN:         lambda = scale * sqrt(2 ln M) * se                (default)
///   SqrtM:          lambda = scale * sqrt(2 ln M) * se * sqrt(N)
///   SqrtMModelScale:lambda = scale * sqrt(2 ln M) * se * sqrt(N)/M^(1/4)
enum class UniversalDenominator { SqrtMN, SqrtM, SqrtMModelScale };

UniversalDenominator denominator_by_name(std::string_view name);
std::string_view name(UniversalDenominator d);

struct ThresholdPolicy {
    shrinkage::ShrinkageRule rule;
    Selector selector = Selector::Universal;
    std::size_t j0 = 3;    // first shrunk level
    double scale = 1.0;    // multiplier on the universal threshold
    UniversalDenominator denominator = UniversalDenominator::SqrtMN;

    /// j0 < J and scale > 0; throws std::invalid_argument.
    void validate(std::size_t levels) const;
};

/// Coefficient-domain noise variances: sigma2_c for the scaling coefficient
/// and one entry per detail position. The scale of the entries is set by the
/// producer; estimator::estimate_variances reports Var(d_ijk) per sample,
/// while universal_thresholds expects the model scale sigma^2_jk = M * v_jk
/// under which the N-sample average has sd sigma_jk / sqrt(MN).
struct VarianceField {
    double sigma2_c = 0.0;
    RaggedField sigma2;

    std::size_t levels() const { return sigma2.size(); }
    void validate() const;                    // finite, >= 0, dyadic layout
    VarianceField scaled(double factor) const;
};

/// Position-dependent universal thresholds for the averaged coefficients,
/// lambda_jk = scale * sigma_jk * sqrt(2 ln M) / sqrt(M N),
/// with `variances` in the model scale (see VarianceField).
RaggedField universal_thresholds(const VarianceField& variances, std::size_t M,
                                 std::size_t N, double scale);

/// Stein unbiased risk estimate for soft thresholding on standardized data
/// (unit noise variance): l - 2 #{|d| <= lambda} + sum min(d^2, lambda^2).
/// At lambda = 0 the perturbation g vanishes identically and the value is l.
double sure_criterion_soft(double lambda, std::span<const double> standardized);

/// SURE for SCAD thresholding, assembled from g = delta - d and its weak
/// derivative. Middle-branch term is (|d| - a lambda)^2 / (a-2)^2; the sign
/// is fixed by the Stein identity (checked by Monte Carlo in the tests).
double sure_criterion_scad(double lambda, std::span<const double> standardized, double a);

double sure_criterion(const shrinkage::ShrinkageRule& rule, double lambda,
                      std::span<const double> standardized);

/// argmin of the SURE criterion over [0, cap]. The criterion is piecewise
/// monotone between indicator breakpoints, so the exact minimizer lies in
/// {|d|} (plus {|d|/2, |d|/a} for SCAD) union {0, cap}; ties resolve to the
/// smallest lambda.
double sure_threshold_level(std::span<const double> standardized,
                            const shrinkage::ShrinkageRule& rule, double cap);

/// Per-level outcome of threshold construction.
enum class LevelBranch { Untouched, Universal, Sure };

struct ThresholdPlan {
    RaggedField lambdas;                    // zeros below j0
    std::vector<LevelBranch> branches;      // one per level
    std::size_t zero_variance_positions = 0;
};

/// Builds the threshold field for an averaged tree under `policy`.
///
/// `variances` are per-sample coefficient variances (estimate_variances
/// scale); the standard error of an averaged coefficient is sqrt(v/N).
///
/// Universal selector: lambda_jk = scale * sqrt(2 ln M) * boost * se_jk.
/// Sure: per level j >= j0, the (variance-weighted) SURE argmin over
/// [0, sqrt(2 ln 2^j)], rescaled by se_jk. Hybrid: the DJ95 scheme --
/// universal on sparse levels (sum d~^2 <= 2^j + 2^{j/2} j^{3/2}), on levels
/// with fewer than 32 coefficients, and wherever a zero variance meets a
/// nonzero coefficient; otherwise the weighted SURE argmin, adopted only when
/// it undercuts the universal candidate by more than the estimate's own noise
/// scale. Weighting by se^2 makes the criterion an unbiased estimate of the
/// raw-risk contribution of the level; it reduces to the standardized
/// criterion when the level variance is constant.
ThresholdPlan build_thresholds(const CoefficientTree& averaged,
                               const VarianceField& variances, std::size_t N,
                               const ThresholdPolicy& policy);

}  // namespace wavemix::threshold

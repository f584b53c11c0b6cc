#include "wavemix/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wavemix::estimator {

namespace {

constexpr double kMadToSigma = 0.6745;

double median_abs(std::vector<double> values) {
    for (double& v : values) v = std::abs(v);
    const std::size_t n = values.size();
    const std::size_t half = n / 2;
    std::nth_element(values.begin(), values.begin() + half, values.end());
    double hi = values[half];
    if (n % 2 == 1) return hi;
    std::nth_element(values.begin(), values.begin() + half - 1, values.begin() + half);
    return 0.5 * (hi + values[half - 1]);
}

Diagnostics diagnostics_from(const CoefficientTree& before, const CoefficientTree& after,
                             const threshold::ThresholdPlan& plan) {
    Diagnostics diag;
    diag.zero_variance_positions = plan.zero_variance_positions;
    diag.levels.resize(before.levels());
    for (std::size_t j = 0; j < before.levels(); ++j) {
        auto& lv = diag.levels[j];
        lv.level = j;
        lv.branch = plan.branches[j];
        for (std::size_t k = 0; k < before.details[j].size(); ++k) {
            if (before.details[j][k] != 0.0 && after.details[j][k] == 0.0) {
                ++lv.killed;
            } else {
                ++lv.kept;
            }
        }
    }
    return diag;
}

threshold::VarianceField constant_field(std::size_t levels, double value) {
    threshold::VarianceField field;
    field.sigma2_c = value;
    field.sigma2 = make_ragged(levels, value);
    return field;
}

}  // namespace

CurvePanel CurvePanel::from_rows(const std::vector<std::vector<double>>& rows) {
    CurvePanel panel;
    panel.rows = rows.size();
    panel.cols = rows.empty() ? 0 : rows.front().size();
    panel.data.reserve(panel.rows * panel.cols);
    for (const auto& r : rows) {
        if (r.size() != panel.cols) {
            throw std::invalid_argument("curve panel: rows have unequal lengths");
        }
        panel.data.insert(panel.data.end(), r.begin(), r.end());
    }
    panel.validate();
    return panel;
}

void CurvePanel::validate() const {
    if (rows < 1) {
        throw std::invalid_argument("curve panel: at least one replicate required");
    }
    if (cols < 2 || (cols & (cols - 1)) != 0) {
        throw std::invalid_argument("curve panel: grid length " + std::to_string(cols) +
                                    " is not a power of two >= 2");
    }
    if (data.size() != rows * cols) {
        throw std::invalid_argument("curve panel: storage size mismatch");
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("curve panel: non-finite sample");
        }
    }
}

VarianceMode variance_mode_by_name(std::string_view n) {
    if (n == "het" || n == "heteroscedastic") return VarianceMode::Heteroscedastic;
    if (n == "mad" || n == "homoscedastic" || n == "homoscedastic-mad") {
        return VarianceMode::HomoscedasticMad;
    }
    throw std::invalid_argument("unknown variance mode '" + std::string(n) +
                                "' (expected het or mad)");
}

std::string_view name(VarianceMode mode) {
    return mode == VarianceMode::Heteroscedastic ? "het" : "mad";
}

threshold::VarianceField estimate_variances(std::span<const CoefficientTree> trees) {
    const std::size_t n = trees.size();
    if (n < 2) {
        throw std::invalid_argument(
            "estimate_variances: needs at least 2 replicates; "
            "use the MAD variance mode for a single curve");
    }
    const std::size_t levels = trees.front().levels();
    const CoefficientTree mean = mean_tree(trees);

    threshold::VarianceField field;
    field.sigma2 = make_ragged(levels, 0.0);
    const double inv = 1.0 / static_cast<double>(n - 1);
    for (const auto& t : trees) {
        const double dc = t.scaling - mean.scaling;
        field.sigma2_c += dc * dc * inv;
        for (std::size_t j = 0; j < levels; ++j) {
            for (std::size_t k = 0; k < t.details[j].size(); ++k) {
                const double d = t.details[j][k] - mean.details[j][k];
                field.sigma2[j][k] += d * d * inv;
            }
        }
    }
    return field;
}

double estimate_sigma_mad(std::span<const CoefficientTree> trees) {
    if (trees.empty()) {
        throw std::invalid_argument("estimate_sigma_mad: no trees");
    }
    double acc = 0.0;
    for (const auto& t : trees) {
        if (t.levels() == 0) {
            throw std::invalid_argument("estimate_sigma_mad: tree has no detail levels");
        }
        acc += median_abs(t.details[t.levels() - 1]) / kMadToSigma;
    }
    return acc / static_cast<double>(trees.size());
}

EstimateResult average_then_shrink(const CurvePanel& panel, const dwt::WaveletFilter& filter,
                                   const threshold::ThresholdPolicy& policy, VarianceMode mode) {
    panel.validate();
    std::vector<CoefficientTree> trees;
    trees.reserve(panel.rows);
    for (std::size_t i = 0; i < panel.rows; ++i) {
        trees.push_back(dwt::forward(panel.row(i), filter));
    }
    const CoefficientTree averaged = mean_tree(trees);
    policy.validate(averaged.levels());

    threshold::VarianceField variances;
    if (mode == VarianceMode::Heteroscedastic) {
        variances = estimate_variances(trees);
    } else {
        const double sigma = estimate_sigma_mad(trees);
        variances = constant_field(averaged.levels(), sigma * sigma);
    }

    const auto plan = threshold::build_thresholds(averaged, variances, panel.rows, policy);
    const CoefficientTree shrunk =
        shrinkage::apply_vector(policy.rule, averaged, plan.lambdas, policy.j0);

    EstimateResult result;
    result.mu_hat = dwt::inverse(shrunk, filter);
    result.tree_hat = shrunk;
    result.variances = variances;
    result.thresholds = plan.lambdas;
    result.diagnostics = diagnostics_from(averaged, shrunk, plan);
    return result;
}

EstimateResult shrink_then_average(const CurvePanel& panel, const dwt::WaveletFilter& filter,
                                   const threshold::ThresholdPolicy& policy) {
    panel.validate();
    const std::size_t n = panel.rows;

    std::vector<double> mean_curve(panel.cols, 0.0);
    RaggedField mean_lambdas;
    double mean_mad2 = 0.0;
    Diagnostics diag;
    std::size_t levels = 0;

    for (std::size_t i = 0; i < n; ++i) {
        CoefficientTree tree = dwt::forward(panel.row(i), filter);
        if (i == 0) {
            levels = tree.levels();
            policy.validate(levels);
            mean_lambdas = make_ragged(levels, 0.0);
            diag.levels.resize(levels);
            for (std::size_t j = 0; j < levels; ++j) diag.levels[j].level = j;
        }
        // Per-row denoising has no replicates, so each row gets its own
        // homoscedastic MAD scale.
        const double sigma = estimate_sigma_mad({&tree, 1});
        const auto field = constant_field(levels, sigma * sigma);
        mean_mad2 += sigma * sigma / static_cast<double>(n);

        const auto plan = threshold::build_thresholds(tree, field, 1, policy);
        const CoefficientTree shrunk =
            shrinkage::apply_vector(policy.rule, tree, plan.lambdas, policy.j0);

        const auto curve = dwt::inverse(shrunk, filter);
        for (std::size_t t = 0; t < curve.size(); ++t) {
            mean_curve[t] += curve[t] / static_cast<double>(n);
        }
        diag.zero_variance_positions += plan.zero_variance_positions;
        for (std::size_t j = 0; j < levels; ++j) {
            diag.levels[j].branch = plan.branches[j];
            for (std::size_t k = 0; k < tree.details[j].size(); ++k) {
                mean_lambdas[j][k] += plan.lambdas[j][k] / static_cast<double>(n);
                if (tree.details[j][k] != 0.0 && shrunk.details[j][k] == 0.0) {
                    ++diag.levels[j].killed;
                } else {
                    ++diag.levels[j].kept;
                }
            }
        }
    }

    EstimateResult result;
    result.mu_hat = mean_curve;
    result.tree_hat = dwt::forward(mean_curve, filter);
    result.variances = constant_field(levels, mean_mad2);
    result.thresholds = mean_lambdas;
    result.diagnostics = diag;
    return result;
}

EstimateResult pointwise_average(const CurvePanel& panel, const dwt::WaveletFilter& filter) {
    panel.validate();
    std::vector<double> mean_curve(panel.cols, 0.0);
    for (std::size_t i = 0; i < panel.rows; ++i) {
        const auto r = panel.row(i);
        for (std::size_t t = 0; t < panel.cols; ++t) {
            mean_curve[t] += r[t] / static_cast<double>(panel.rows);
        }
    }
    EstimateResult result;
    result.mu_hat = mean_curve;
    result.tree_hat = dwt::forward(mean_curve, filter);
    const std::size_t levels = result.tree_hat.levels();
    result.variances = constant_field(levels, 0.0);
    result.thresholds = make_ragged(levels, 0.0);
    result.diagnostics.levels.resize(levels);
    for (std::size_t j = 0; j < levels; ++j) {
        result.diagnostics.levels[j].level = j;
        result.diagnostics.levels[j].kept = result.tree_hat.details[j].size();
    }
    return result;
}

}  // namespace wavemix::estimator

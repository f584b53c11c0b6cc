#include "wavemix/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wavemix::threshold {

namespace {

// SURE levels need enough coefficients for the risk estimate to rank
// thresholds; below this the hybrid scheme stays on the universal branch.
constexpr std::size_t kSureMinLevelSize = 32;

// A SURE argmin replaces the universal branch only when it beats the
// universal candidate's estimate by this many noise-scale units.
constexpr double kSureMarginFactor = 4.0;

// Per-coefficient Stein term on standardized data; the criterion is the sum.
// At lambda = 0 the perturbation g vanishes identically, so the term is 1.
double stein_term(const shrinkage::ShrinkageRule& rule, double d, double lambda) {
    if (lambda == 0.0) return 1.0;
    const double ad = std::abs(d);
    if (rule.kind == shrinkage::RuleKind::Soft) {
        double t = 1.0 + std::min(d * d, lambda * lambda);
        if (ad <= lambda) t -= 2.0;
        return t;
    }
    // SCAD
    const double a = rule.scad_a;
    double t = 1.0;
    if (ad <= lambda) {
        t += d * d - 2.0;
    } else if (ad <= 2.0 * lambda) {
        t += lambda * lambda;
    } else if (ad <= a * lambda) {
        const double r = ad - a * lambda;
        t += r * r / ((a - 2.0) * (a - 2.0)) + 2.0 / (a - 2.0);
    }
    return t;
}

void check_sure_rule(const shrinkage::ShrinkageRule& rule) {
    if (rule.kind == shrinkage::RuleKind::Hard) {
        throw std::invalid_argument("SURE is defined for soft and scad rules only");
    }
    rule.validate();
}

// Candidate thresholds in [0, cap]: the criterion is piecewise monotone
// between indicator breakpoints, so the argmin is attained on this set.
std::vector<double> sure_candidates(std::span<const double> standardized,
                                    const shrinkage::ShrinkageRule& rule, double cap,
                                    std::span<const double> extra) {
    std::vector<double> c;
    c.reserve(3 * standardized.size() + 2 + extra.size());
    c.push_back(0.0);
    c.push_back(cap);
    for (double e : extra) {
        if (e >= 0.0 && e <= cap) c.push_back(e);
    }
    const bool scad = rule.kind == shrinkage::RuleKind::Scad;
    for (double d : standardized) {
        const double ad = std::abs(d);
        if (ad <= cap) c.push_back(ad);
        if (scad) {
            if (ad / 2.0 <= cap) c.push_back(ad / 2.0);
            if (ad / rule.scad_a <= cap) c.push_back(ad / rule.scad_a);
        }
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

// Weighted criterion sum(w_k * stein_term_k); with w == 1 this is the plain
// SURE criterion. Returns the smallest lambda attaining the minimum.
double weighted_sure_argmin(std::span<const double> standardized,
                            std::span<const double> weights,
                            const shrinkage::ShrinkageRule& rule, double cap,
                            std::span<const double> extra, double* min_value) {
    const auto cands = sure_candidates(standardized, rule, cap, extra);
    double best = 0.0;
    double best_val = 0.0;
    bool first = true;
    for (double lambda : cands) {
        double v = 0.0;
        for (std::size_t k = 0; k < standardized.size(); ++k) {
            const double w = weights.empty() ? 1.0 : weights[k];
            v += w * stein_term(rule, standardized[k], lambda);
        }
        if (first || v < best_val) {
            best = lambda;
            best_val = v;
            first = false;
        }
    }
    if (min_value != nullptr) *min_value = best_val;
    return best;
}

}  // namespace

Selector selector_by_name(std::string_view n) {
    if (n == "universal") return Selector::Universal;
    if (n == "sure") return Selector::Sure;
    if (n == "hybrid") return Selector::Hybrid;
    throw std::invalid_argument("unknown selector '" + std::string(n) +
                                "' (expected universal, sure or hybrid)");
}

std::string_view name(Selector s) {
    switch (s) {
        case Selector::Universal: return "universal";
        case Selector::Sure: return "sure";
        case Selector::Hybrid: return "hybrid";
    }
    return "?";
}

UniversalDenominator denominator_by_name(std::string_view n) {
    if (n == "mn" || n == "sqrt-mn") return UniversalDenominator::SqrtMN;
    if (n == "m" || n == "sqrt-m") return UniversalDenominator::SqrtM;
    if (n == "m-model" || n == "sqrt-m-model") return UniversalDenominator::SqrtMModelScale;
    throw std::invalid_argument("unknown threshold denominator '" + std::string(n) +
                                "' (expected mn, m or m-model)");
}

std::string_view name(UniversalDenominator d) {
    switch (d) {
        case UniversalDenominator::SqrtMN: return "mn";
        case UniversalDenominator::SqrtM: return "m";
        case UniversalDenominator::SqrtMModelScale: return "m-model";
    }
    return "?";
}

void ThresholdPolicy::validate(std::size_t levels) const {
    rule.validate();
    if (j0 >= levels) {
        throw std::invalid_argument("threshold policy: j0 = " + std::to_string(j0) +
                                    " must be below the decomposition depth " +
                                    std::to_string(levels));
    }
    if (!(scale > 0.0)) {
        throw std::invalid_argument("threshold policy: scale must be > 0");
    }
}

void VarianceField::validate() const {
    if (!(sigma2_c >= 0.0) || !std::isfinite(sigma2_c)) {
        throw std::invalid_argument("variance field: sigma2_c must be finite and >= 0");
    }
    for (std::size_t j = 0; j < sigma2.size(); ++j) {
        if (sigma2[j].size() != (std::size_t{1} << j)) {
            throw std::invalid_argument("variance field: level " + std::to_string(j) +
                                        " has the wrong size");
        }
        for (double v : sigma2[j]) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("variance field: entries must be finite and >= 0");
            }
        }
    }
}

VarianceField VarianceField::scaled(double factor) const {
    VarianceField out = *this;
    out.sigma2_c *= factor;
    for (auto& level : out.sigma2) {
        for (double& v : level) v *= factor;
    }
    return out;
}

RaggedField universal_thresholds(const VarianceField& variances, std::size_t M,
                                 std::size_t N, double scale) {
    if (M < 2) {
        throw std::invalid_argument("universal_thresholds: M must be >= 2");
    }
    if (N < 1) {
        throw std::invalid_argument("universal_thresholds: N must be >= 1");
    }
    variances.validate();
    const double rate = scale * std::sqrt(2.0 * std::log(static_cast<double>(M))) /
                        std::sqrt(static_cast<double>(M) * static_cast<double>(N));
    RaggedField lambdas(variances.sigma2.size());
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        lambdas[j].resize(variances.sigma2[j].size());
        for (std::size_t k = 0; k < lambdas[j].size(); ++k) {
            lambdas[j][k] = rate * std::sqrt(variances.sigma2[j][k]);
        }
    }
    return lambdas;
}

double sure_criterion_soft(double lambda, std::span<const double> standardized) {
    const shrinkage::ShrinkageRule rule{shrinkage::RuleKind::Soft, 3.7};
    return sure_criterion(rule, lambda, standardized);
}

double sure_criterion_scad(double lambda, std::span<const double> standardized, double a) {
    const shrinkage::ShrinkageRule rule{shrinkage::RuleKind::Scad, a};
    return sure_criterion(rule, lambda, standardized);
}

double sure_criterion(const shrinkage::ShrinkageRule& rule, double lambda,
                      std::span<const double> standardized) {
    check_sure_rule(rule);
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("sure_criterion: lambda must be >= 0");
    }
    double v = 0.0;
    for (double d : standardized) v += stein_term(rule, d, lambda);
    return v;
}

double sure_threshold_level(std::span<const double> standardized,
                            const shrinkage::ShrinkageRule& rule, double cap) {
    check_sure_rule(rule);
    if (standardized.empty()) {
        throw std::invalid_argument("sure_threshold_level: empty level");
    }
    if (!(cap >= 0.0)) {
        throw std::invalid_argument("sure_threshold_level: cap must be >= 0");
    }
    return weighted_sure_argmin(standardized, {}, rule, cap, {}, nullptr);
}

ThresholdPlan build_thresholds(const CoefficientTree& averaged,
                               const VarianceField& variances, std::size_t N,
                               const ThresholdPolicy& policy) {
    averaged.validate();
    variances.validate();
    const std::size_t levels = averaged.levels();
    policy.validate(levels);
    if (variances.levels() != levels) {
        throw std::invalid_argument("build_thresholds: variance field depth mismatch");
    }
    const std::size_t M = averaged.signal_length();

    double boost = 1.0;
    switch (policy.denominator) {
        case UniversalDenominator::SqrtMN: boost = 1.0; break;
        case UniversalDenominator::SqrtM: boost = std::sqrt(static_cast<double>(N)); break;
        case UniversalDenominator::SqrtMModelScale:
            boost = std::sqrt(static_cast<double>(N)) /
                    std::pow(static_cast<double>(M), 0.25);
            break;
    }

    // Universal field: the Eq.-(5)-style op on the model-scale variances
    // (sigma^2 = M v) equals scale * sqrt(2 ln M) * se_jk; the denominator
    // reading enters as a pure factor.
    RaggedField uni = universal_thresholds(variances.scaled(static_cast<double>(M)), M, N,
                                           policy.scale);
    if (boost != 1.0) {
        for (auto& level : uni) {
            for (double& v : level) v *= boost;
        }
    }
    const double lt_uni = policy.scale * boost * std::sqrt(2.0 * std::log(static_cast<double>(M)));

    ThresholdPlan plan;
    plan.lambdas = make_ragged(levels, 0.0);
    plan.branches.assign(levels, LevelBranch::Untouched);

    std::vector<double> se;
    std::vector<double> dt;
    std::vector<double> w;
    for (std::size_t j = policy.j0; j < levels; ++j) {
        const std::size_t l = std::size_t{1} << j;
        const auto& d = averaged.details[j];

        se.assign(l, 0.0);
        bool degenerate = false;
        for (std::size_t k = 0; k < l; ++k) {
            se[k] = std::sqrt(variances.sigma2[j][k] / static_cast<double>(N));
            if (se[k] == 0.0) {
                degenerate = true;
                if (d[k] != 0.0) ++plan.zero_variance_positions;
            }
        }

        const bool universal_only = policy.selector == Selector::Universal || degenerate ||
                                    (policy.selector == Selector::Hybrid && l < kSureMinLevelSize);
        if (universal_only) {
            plan.lambdas[j] = uni[j];
            plan.branches[j] = LevelBranch::Universal;
            continue;
        }

        dt.resize(l);
        w.resize(l);
        double energy = 0.0;
        double w2 = 0.0;
        for (std::size_t k = 0; k < l; ++k) {
            dt[k] = d[k] / se[k];
            w[k] = se[k] * se[k];
            energy += dt[k] * dt[k];
            w2 += w[k] * w[k];
        }

        const double dj = static_cast<double>(j);
        const double sparse_bound =
            static_cast<double>(l) + std::sqrt(static_cast<double>(l)) * std::pow(dj, 1.5);
        if (policy.selector == Selector::Hybrid && energy <= sparse_bound) {
            plan.lambdas[j] = uni[j];
            plan.branches[j] = LevelBranch::Universal;
            continue;
        }

        const double level_cap = std::sqrt(2.0 * std::log(static_cast<double>(l)));
        double lt = 0.0;
        if (policy.selector == Selector::Sure) {
            lt = weighted_sure_argmin(dt, w, policy.rule, level_cap, {}, nullptr);
            plan.branches[j] = LevelBranch::Sure;
        } else {
            const double cap = std::max(level_cap, lt_uni);
            const double extra[] = {lt_uni};
            double est_min = 0.0;
            const double cand = weighted_sure_argmin(dt, w, policy.rule, cap, extra, &est_min);
            double est_uni = 0.0;
            for (std::size_t k = 0; k < l; ++k) {
                est_uni += w[k] * stein_term(policy.rule, dt[k], lt_uni);
            }
            const double margin = kSureMarginFactor * std::sqrt(2.0 * w2);
            if (est_min < est_uni - margin) {
                lt = cand;
                plan.branches[j] = LevelBranch::Sure;
            } else {
                lt = lt_uni;
                plan.branches[j] = LevelBranch::Universal;
            }
        }
        for (std::size_t k = 0; k < l; ++k) {
            plan.lambdas[j][k] = lt * se[k];
        }
    }
    return plan;
}

}  // namespace wavemix::threshold

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wavemix/rng.hpp"
#include "wavemix/shrinkage.hpp"
#include "wavemix/threshold.hpp"

namespace th = wavemix::threshold;
namespace shrink = wavemix::shrinkage;
using shrink::RuleKind;
using shrink::ShrinkageRule;

namespace {

const ShrinkageRule kSoft{RuleKind::Soft, 3.7};
const ShrinkageRule kScad{RuleKind::Scad, 3.7};

th::VarianceField unit_field(std::size_t levels, double value = 1.0) {
    th::VarianceField f;
    f.sigma2_c = value;
    f.sigma2 = wavemix::make_ragged(levels, value);
    return f;
}

// dense-grid argmin oracle, resolution cap/steps, smallest-lambda tie rule
double grid_argmin(std::span<const double> data, const ShrinkageRule& rule, double cap,
                   int steps = 10000) {
    double best = 0.0;
    double best_val = th::sure_criterion(rule, 0.0, data);
    for (int i = 1; i <= steps; ++i) {
        const double lambda = cap * double(i) / double(steps);
        const double v = th::sure_criterion(rule, lambda, data);
        if (v < best_val) {
            best_val = v;
            best = lambda;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("universal threshold formula") {
    const std::size_t levels = 10;  // M = 1024
    const auto field = unit_field(levels);

    SUBCASE("paper example: sigma 1, M 1024, N 1") {
        const auto lam = th::universal_thresholds(field, 1024, 1, 1.0);
        const double want = std::sqrt(2.0 * std::log(1024.0)) / 32.0;
        CHECK(lam[3][0] == doctest::Approx(want).epsilon(1e-12));
        CHECK(want == doctest::Approx(0.116353).epsilon(1e-4));
        for (const auto& level : lam) {
            for (double v : level) CHECK(v == doctest::Approx(want));
        }
    }
    SUBCASE("sqrt(N) scaling") {
        const auto lam1 = th::universal_thresholds(field, 1024, 1, 1.0);
        const auto lam100 = th::universal_thresholds(field, 1024, 100, 1.0);
        CHECK(lam100[5][7] == doctest::Approx(lam1[5][7] / 10.0).epsilon(1e-12));
    }
    SUBCASE("zero variance gives zero threshold") {
        auto f0 = field;
        f0.sigma2[4][2] = 0.0;
        const auto lam = th::universal_thresholds(f0, 1024, 1, 1.0);
        CHECK(lam[4][2] == 0.0);
        CHECK(lam[4][3] > 0.0);
    }
    SUBCASE("positively homogeneous of degree 1 in sigma") {
        const auto lam = th::universal_thresholds(field, 1024, 4, 0.5);
        const auto lam9 = th::universal_thresholds(field.scaled(9.0), 1024, 4, 0.5);
        CHECK(lam9[6][13] == doctest::Approx(3.0 * lam[6][13]).epsilon(1e-12));
    }
    SUBCASE("M < 2 rejected") {
        CHECK_THROWS_AS(th::universal_thresholds(unit_field(0), 1, 1, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("sure criterion, soft") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    std::vector<double> data(40);
    for (double& v : data) v = nd(gen) + 0.5;

    SUBCASE("lambda = 0 returns l for any data") {
        CHECK(th::sure_criterion_soft(0.0, data) == doctest::Approx(40.0));
        data[0] = 0.0;
        CHECK(th::sure_criterion_soft(0.0, data) == 40.0);
    }
    SUBCASE("all zeros, lambda > 0 returns -l") {
        const std::vector<double> zeros(17, 0.0);
        CHECK(th::sure_criterion_soft(0.7, zeros) == doctest::Approx(-17.0));
    }
    SUBCASE("hand value") {
        // single coefficient 2, lambda 1: 1 + min(4,1) - 0 = 2
        const std::vector<double> one = {2.0};
        CHECK(th::sure_criterion_soft(1.0, one) == doctest::Approx(2.0));
    }
}

TEST_CASE("sure criterion, scad") {
    SUBCASE("single coefficient in the keep-nothing branch") {
        const std::vector<double> one = {0.5};
        CHECK(th::sure_criterion_scad(1.0, one, 3.7) == doctest::Approx(1.0 + (0.25 - 2.0)));
    }
    SUBCASE("lambda = 0 returns 2^j exactly") {
        std::mt19937_64 gen(4);
        std::normal_distribution<double> nd;
        std::vector<double> data(64);
        for (double& v : data) v = nd(gen) + 1.0;
        CHECK(th::sure_criterion_scad(0.0, data, 3.7) == 64.0);
    }
    SUBCASE("a <= 2 rejected") {
        const std::vector<double> one = {0.5};
        CHECK_THROWS_AS(th::sure_criterion_scad(1.0, one, 2.0), std::invalid_argument);
    }
}

TEST_CASE("sure unbiasedness, reduced monte carlo") {
    // E[SURE] = E||delta(d) - beta||^2 for d ~ N(beta, I); full-scale version
    // runs in the acceptance suite.
    wavemix::rng::Stream stream(2024);
    const std::size_t l = 32;
    std::vector<double> beta(l, 0.0);
    beta[0] = 5.0;
    beta[1] = 3.0;
    beta[2] = 1.5;

    for (const auto& rule : {kSoft, kScad}) {
        for (double lambda : {0.5, 2.0}) {
            const int reps = 20000;
            double mean_diff = 0.0;
            double m2 = 0.0;
            std::vector<double> d(l);
            for (int r = 1; r <= reps; ++r) {
                double loss = 0.0;
                for (std::size_t k = 0; k < l; ++k) {
                    d[k] = beta[k] + stream.normal();
                    const double err = shrink::apply(rule, d[k], lambda) - beta[k];
                    loss += err * err;
                }
                const double diff = th::sure_criterion(rule, lambda, d) - loss;
                const double delta = diff - mean_diff;
                mean_diff += delta / r;
                m2 += delta * (diff - mean_diff);
            }
            const double se = std::sqrt(m2 / (reps - 1.0) / reps);
            INFO("rule ", shrink::name(rule.kind), " lambda ", lambda);
            CHECK(std::abs(mean_diff) < 4.0 * se);
        }
    }
}

TEST_CASE("sure_threshold_level contract") {
    SUBCASE("huge coefficients: no shrinkage is optimal") {
        std::vector<double> data(16, 50.0);
        CHECK(th::sure_threshold_level(data, kScad, 3.0) == 0.0);
        CHECK(th::sure_threshold_level(data, kSoft, 3.0) == 0.0);
    }
    SUBCASE("pure zeros: maximal shrinkage") {
        std::vector<double> data(16, 0.0);
        CHECK(th::sure_threshold_level(data, kScad, 3.0) == 3.0);
        CHECK(th::sure_threshold_level(data, kSoft, 3.0) == 3.0);
    }
    SUBCASE("empty level is a structural error") {
        CHECK_THROWS_AS(th::sure_threshold_level({}, kSoft, 3.0), std::invalid_argument);
    }
    SUBCASE("hard rule has no SURE") {
        std::vector<double> data(4, 1.0);
        CHECK_THROWS_AS(
            th::sure_threshold_level(data, ShrinkageRule{RuleKind::Hard, 3.7}, 3.0),
            std::invalid_argument);
    }
}

TEST_CASE("candidate argmin agrees with a dense grid") {
    wavemix::rng::Stream stream(555);
    const double cap = std::sqrt(2.0 * std::log(64.0));
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> data(64);
        for (double& v : data) {
            v = stream.normal();
            if (stream.bernoulli(0.2)) v += 4.0 * stream.normal();
        }
        for (const auto& rule : {kSoft, kScad}) {
            const double cand = th::sure_threshold_level(data, rule, cap);
            const double grid = grid_argmin(data, rule, cap);
            const double vc = th::sure_criterion(rule, cand, data);
            const double vg = th::sure_criterion(rule, grid, data);
            REQUIRE(vc <= vg + 1e-9);
            const bool close = std::abs(cand - grid) <= cap / 10000.0 + 1e-12;
            const bool same_value = std::abs(vc - vg) <= 1e-9;
            REQUIRE((close || same_value));
        }
    }
}

TEST_CASE("sure threshold never exceeds its cap") {
    wavemix::rng::Stream stream(77);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> data(32);
        for (double& v : data) v = 3.0 * stream.normal();
        const double cap = 0.5 + 2.0 * stream.uniform();
        for (const auto& rule : {kSoft, kScad}) {
            const double lam = th::sure_threshold_level(data, rule, cap);
            CHECK(lam >= 0.0);
            CHECK(lam <= cap);
        }
    }
}

TEST_CASE("build_thresholds: universal selector matches the op route") {
    // dual route: build_thresholds with per-sample variances == the literal
    // universal_thresholds op on the model-scale field
    wavemix::rng::Stream stream(31);
    const std::size_t levels = 6;  // M = 64
    auto tree = wavemix::CoefficientTree::zeros(levels);
    auto vf = unit_field(levels, 0.0);
    for (std::size_t j = 0; j < levels; ++j) {
        for (std::size_t k = 0; k < tree.details[j].size(); ++k) {
            tree.details[j][k] = stream.normal();
            vf.sigma2[j][k] = 0.5 + stream.uniform();
        }
    }
    th::ThresholdPolicy policy;
    policy.rule = kScad;
    policy.selector = th::Selector::Universal;
    policy.j0 = 2;
    policy.scale = 0.5;

    const std::size_t M = 64;
    const std::size_t N = 10;
    const auto plan = th::build_thresholds(tree, vf, N, policy);
    const auto direct = th::universal_thresholds(vf.scaled(double(M)), M, N, policy.scale);
    for (std::size_t j = 0; j < levels; ++j) {
        if (j < policy.j0) {
            CHECK(plan.branches[j] == th::LevelBranch::Untouched);
            for (double v : plan.lambdas[j]) CHECK(v == 0.0);
        } else {
            CHECK(plan.branches[j] == th::LevelBranch::Universal);
            for (std::size_t k = 0; k < plan.lambdas[j].size(); ++k) {
                CHECK(plan.lambdas[j][k] == doctest::Approx(direct[j][k]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("build_thresholds: denominator boosts") {
    const std::size_t levels = 10;  // M = 1024
    auto tree = wavemix::CoefficientTree::zeros(levels);
    tree.details[9][0] = 1.0;
    const auto vf = unit_field(levels);
    th::ThresholdPolicy policy;
    policy.selector = th::Selector::Universal;
    policy.scale = 1.0;
    policy.j0 = 3;
    const std::size_t N = 100;

    policy.denominator = th::UniversalDenominator::SqrtMN;
    const double base = th::build_thresholds(tree, vf, N, policy).lambdas[9][0];
    policy.denominator = th::UniversalDenominator::SqrtM;
    const double m = th::build_thresholds(tree, vf, N, policy).lambdas[9][0];
    policy.denominator = th::UniversalDenominator::SqrtMModelScale;
    const double mm = th::build_thresholds(tree, vf, N, policy).lambdas[9][0];

    CHECK(m == doctest::Approx(base * 10.0).epsilon(1e-12));
    CHECK(mm == doctest::Approx(base * 10.0 / std::pow(1024.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("hybrid branch selection") {
    const std::size_t levels = 10;  // M = 1024
    const std::size_t N = 1;
    th::ThresholdPolicy policy;
    policy.rule = kScad;
    policy.selector = th::Selector::Hybrid;
    policy.j0 = 3;
    policy.scale = 1.0;

    SUBCASE("standardized noise level is routed to universal with high probability") {
        int universal = 0;
        const int draws = 200;
        for (int rep = 0; rep < draws; ++rep) {
            wavemix::rng::Stream stream(1000 + rep);
            auto tree = wavemix::CoefficientTree::zeros(levels);
            for (std::size_t j = 0; j < levels; ++j) {
                for (auto& d : tree.details[j]) d = stream.normal();
            }
            const auto plan = th::build_thresholds(tree, unit_field(levels), N, policy);
            if (plan.branches[9] == th::LevelBranch::Universal) ++universal;
        }
        CHECK(universal >= 190);
    }

    SUBCASE("level dominated by mid-size signal adopts the SURE threshold") {
        wavemix::rng::Stream stream(5);
        auto tree = wavemix::CoefficientTree::zeros(levels);
        for (std::size_t j = 0; j < levels; ++j) {
            for (auto& d : tree.details[j]) d = stream.normal();
        }
        for (auto& d : tree.details[9]) d = 3.0;  // far denser than the sparsity bound
        const auto plan = th::build_thresholds(tree, unit_field(levels), N, policy);
        CHECK(plan.branches[9] == th::LevelBranch::Sure);
        // adopted threshold below the uniform universal value
        CHECK(plan.lambdas[9][0] < plan.lambdas[8][0]);
    }

    SUBCASE("small levels always take the universal branch") {
        wavemix::rng::Stream stream(6);
        auto tree = wavemix::CoefficientTree::zeros(levels);
        for (auto& d : tree.details[3]) d = 40.0;  // dense but only 8 coefficients
        const auto plan = th::build_thresholds(tree, unit_field(levels), N, policy);
        CHECK(plan.branches[3] == th::LevelBranch::Universal);
        CHECK(plan.branches[4] == th::LevelBranch::Universal);
    }

    SUBCASE("zero variance with nonzero coefficient falls back to universal") {
        auto tree = wavemix::CoefficientTree::zeros(levels);
        for (auto& d : tree.details[9]) d = 2.0;
        auto vf = unit_field(levels);
        vf.sigma2[9][5] = 0.0;
        const auto plan = th::build_thresholds(tree, vf, N, policy);
        CHECK(plan.branches[9] == th::LevelBranch::Universal);
        CHECK(plan.zero_variance_positions == 1);
        CHECK(plan.lambdas[9][5] == 0.0);  // no shrinkage at the degenerate position
        CHECK(plan.lambdas[9][6] > 0.0);
    }
}

TEST_CASE("policy validation") {
    th::ThresholdPolicy policy;
    policy.j0 = 10;
    CHECK_THROWS_AS(policy.validate(10), std::invalid_argument);
    policy.j0 = 3;
    policy.scale = 0.0;
    CHECK_THROWS_AS(policy.validate(10), std::invalid_argument);
    CHECK_THROWS_AS(th::selector_by_name("cv"), std::invalid_argument);
    CHECK_THROWS_AS(th::denominator_by_name("n"), std::invalid_argument);
}

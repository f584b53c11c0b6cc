#include <doctest.h>

#include <limits>
#include <stdexcept>

#include <cmath>
#include <vector>

#include "wavemix/dwt.hpp"
#include "wavemix/rng.hpp"
#include "wavemix/simgen.hpp"

namespace simgen = wavemix::simgen;
namespace dwt = wavemix::dwt;
using simgen::SimulationConfig;
using simgen::TestFunction;
using wavemix::CoefficientTree;

TEST_CASE("test function hand values") {
    CHECK(simgen::evaluate(TestFunction::Heavisine, 0.5) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(std::abs(simgen::evaluate(TestFunction::Doppler, 1e-9)) < 1e-4);
    CHECK(simgen::evaluate(TestFunction::Blocks, 0.05) == doctest::Approx(0.0));
    // after the first two jumps: 4 - 5
    CHECK(simgen::evaluate(TestFunction::Blocks, 0.14) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(simgen::function_by_name("spikes"), std::invalid_argument);
}

TEST_CASE("designated filters follow the function pairing") {
    CHECK(simgen::designated_filter(TestFunction::Blocks).vanishing_moments == 1);
    CHECK(simgen::designated_filter(TestFunction::Bumps).vanishing_moments == 2);
    CHECK(simgen::designated_filter(TestFunction::Heavisine).vanishing_moments == 5);
    CHECK(simgen::designated_filter(TestFunction::Doppler).vanishing_moments == 7);
}

TEST_CASE("blocks is sparse under haar") {
    const auto mu = simgen::sample(TestFunction::Blocks, 1024);
    const auto tree = dwt::forward(mu, dwt::daubechies(1));
    std::size_t nonzero = 0;
    for (const auto& level : tree.details) {
        for (double d : level) {
            if (std::abs(d) > 1e-12) ++nonzero;
        }
    }
    // one coefficient per jump per level, at most (11 jumps, 10 levels)
    CHECK(nonzero <= 11 * 10 + 22);
    CHECK(nonzero >= 10);
}

TEST_CASE("sampling grid avoids the doppler endpoint") {
    const auto mu = simgen::sample(TestFunction::Doppler, 64);
    CHECK(mu.front() == simgen::evaluate(TestFunction::Doppler, 0.5 / 64.0));
    CHECK(std::isfinite(mu.front()));
    CHECK_THROWS_AS(simgen::sample(TestFunction::Doppler, 100), std::invalid_argument);
}

TEST_CASE("calibration algebra") {
    SimulationConfig cfg;
    cfg.test_function = TestFunction::Blocks;
    cfg.M = 1024;
    cfg.N = 10;
    cfg.snr = 5.0;
    cfg.tau = 0.1;
    cfg.zero_tol = 1e-8;
    cfg.seed = 42;
    const auto filter = simgen::designated_filter(cfg.test_function);
    const auto mu = simgen::sample(cfg.test_function, cfg.M);
    const auto mu_tree = dwt::forward(mu, filter);
    const auto model = simgen::calibrate(cfg, mu_tree);

    SUBCASE("sigma matches the sd convention") {
        double mean = 0.0;
        for (double v : mu) mean += v / double(cfg.M);
        double var = 0.0;
        for (double v : mu) var += (v - mean) * (v - mean) / double(cfg.M - 1);
        CHECK(model.sigma2 == doctest::Approx(var / 25.0).epsilon(1e-10));
    }
    SUBCASE("rms convention uses the signal power") {
        auto cfg2 = cfg;
        cfg2.snr_convention = simgen::SnrConvention::Rms;
        const auto model2 = simgen::calibrate(cfg2, mu_tree);
        double power = 0.0;
        for (double v : mu) power += v * v / double(cfg.M);
        CHECK(model2.sigma2 == doctest::Approx(power / 25.0).epsilon(1e-10));
    }
    SUBCASE("gamma2_ref solves the tau equation over the masked set") {
        double decay_sum = 0.0;
        for (std::size_t j = 0; j < model.mask.size(); ++j) {
            for (double m : model.mask[j]) {
                if (m != 0.0) decay_sum += std::pow(2.0, -cfg.eta * double(j));
            }
        }
        CHECK(model.gamma2_ref ==
              doctest::Approx(1024.0 * model.sigma2 / (0.1 * decay_sum)).epsilon(1e-10));
    }
    SUBCASE("realized field is baseline plus masked decay") {
        for (std::size_t j = 0; j < model.mask.size(); ++j) {
            const double decay = std::pow(2.0, -cfg.eta * double(j));
            for (std::size_t k = 0; k < model.mask[j].size(); ++k) {
                const double want =
                    model.sigma2 + model.mask[j][k] * decay * model.gamma2[j][k];
                CHECK(model.sigma2_jk[j][k] == doctest::Approx(want).epsilon(1e-12));
                CHECK(model.sigma2_jk[j][k] >= model.sigma2);
            }
        }
    }
}

TEST_CASE("tau to infinity degenerates to homoscedastic") {
    SimulationConfig cfg;
    cfg.test_function = TestFunction::Blocks;
    cfg.M = 256;
    cfg.tau = std::numeric_limits<double>::infinity();
    cfg.zero_tol = 1e-8;
    const auto filter = simgen::designated_filter(cfg.test_function);
    const auto mu_tree = dwt::forward(simgen::sample(cfg.test_function, cfg.M), filter);
    const auto model = simgen::calibrate(cfg, mu_tree);
    CHECK(model.gamma2_ref == 0.0);
    for (std::size_t j = 0; j < model.sigma2_jk.size(); ++j) {
        for (double v : model.sigma2_jk[j]) CHECK(v == model.sigma2);
    }
}

TEST_CASE("mask law none is exactly homoscedastic") {
    SimulationConfig cfg;
    cfg.test_function = TestFunction::Heavisine;
    cfg.M = 256;
    cfg.structure = simgen::MaskLaw::None;
    cfg.tau = 0.1;
    const auto filter = simgen::designated_filter(cfg.test_function);
    const auto mu_tree = dwt::forward(simgen::sample(cfg.test_function, cfg.M), filter);
    const auto model = simgen::calibrate(cfg, mu_tree);
    CHECK(model.gamma2_ref == 0.0);
    for (const auto& level : model.mask) {
        for (double v : level) CHECK(v == 0.0);
    }
}

TEST_CASE("empty zero set is a calibration error") {
    SimulationConfig cfg;
    cfg.test_function = TestFunction::Heavisine;
    cfg.M = 64;
    cfg.zero_tol = 1e-12;
    const auto filter = simgen::designated_filter(cfg.test_function);
    const auto mu_tree = dwt::forward(simgen::sample(cfg.test_function, cfg.M), filter);
    CHECK_THROWS_AS(simgen::calibrate(cfg, mu_tree), std::invalid_argument);
}

TEST_CASE("gamma sampler mean, law of large numbers") {
    // gamma2_ref = 4: shape 2, scale 2, mean 4
    wavemix::rng::Stream stream(11);
    double mean = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) mean += stream.gamma(2.0, 2.0) / n;
    CHECK(mean > 3.8);
    CHECK(mean < 4.2);
}

TEST_CASE("panel generation") {
    SimulationConfig cfg;
    cfg.test_function = TestFunction::Bumps;
    cfg.M = 64;
    cfg.N = 5;
    cfg.snr = 2.0;
    cfg.tau = 0.5;
    cfg.structure = simgen::MaskLaw::Bernoulli;
    cfg.seed = 77;
    const auto filter = simgen::designated_filter(cfg.test_function);
    const auto mu_tree = dwt::forward(simgen::sample(cfg.test_function, cfg.M), filter);
    const auto model = simgen::calibrate(cfg, mu_tree);

    SUBCASE("same seed, identical panels bit for bit") {
        auto s1 = simgen::repetition_stream(cfg, 0);
        auto s2 = simgen::repetition_stream(cfg, 0);
        const auto a = simgen::generate_panel(cfg, model, mu_tree, s1);
        const auto b = simgen::generate_panel(cfg, model, mu_tree, s2);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].scaling == b[i].scaling);
            CHECK(a[i].details == b[i].details);
        }
    }
    SUBCASE("different repetitions differ") {
        auto s1 = simgen::repetition_stream(cfg, 0);
        auto s2 = simgen::repetition_stream(cfg, 1);
        const auto a = simgen::generate_panel(cfg, model, mu_tree, s1);
        const auto b = simgen::generate_panel(cfg, model, mu_tree, s2);
        CHECK(a[0].details[5] != b[0].details[5]);
    }
    SUBCASE("mask and gamma frozen across calibrations") {
        const auto again = simgen::calibrate(cfg, mu_tree);
        CHECK(again.mask == model.mask);
        CHECK(again.gamma2 == model.gamma2);
    }
}

TEST_CASE("per-position variances match the noise model") {
    SimulationConfig cfg;
    cfg.test_function = TestFunction::Blocks;
    cfg.M = 64;
    cfg.N = 20000;
    cfg.snr = 2.0;
    cfg.tau = 0.25;
    cfg.zero_tol = 1e-8;
    cfg.seed = 5;
    const auto filter = simgen::designated_filter(cfg.test_function);
    const auto mu_tree = dwt::forward(simgen::sample(cfg.test_function, cfg.M), filter);
    const auto model = simgen::calibrate(cfg, mu_tree);
    auto stream = simgen::repetition_stream(cfg, 0);
    const auto panel = simgen::generate_panel(cfg, model, mu_tree, stream);

    for (std::size_t j = 0; j < mu_tree.levels(); ++j) {
        for (std::size_t k = 0; k < mu_tree.details[j].size(); ++k) {
            double mean = 0.0;
            for (const auto& t : panel) mean += t.details[j][k] / double(cfg.N);
            double var = 0.0;
            for (const auto& t : panel) {
                const double d = t.details[j][k] - mean;
                var += d * d / double(cfg.N - 1);
            }
            REQUIRE(var == doctest::Approx(model.sigma2_jk[j][k]).epsilon(0.03));
        }
    }
}

TEST_CASE("noise is independent across replicates") {
    SimulationConfig cfg;
    cfg.test_function = TestFunction::Blocks;
    cfg.M = 32;
    cfg.N = 4000;
    cfg.snr = 1.0;
    cfg.tau = 1.0;
    cfg.zero_tol = 1e-8;
    cfg.seed = 13;
    const auto filter = simgen::designated_filter(cfg.test_function);
    const auto mu_tree = dwt::forward(simgen::sample(cfg.test_function, cfg.M), filter);
    const auto model = simgen::calibrate(cfg, mu_tree);
    auto stream = simgen::repetition_stream(cfg, 0);
    const auto panel = simgen::generate_panel(cfg, model, mu_tree, stream);

    // lag-1 correlation across replicates at a fixed position
    const std::size_t j = 4;
    const std::size_t k = 7;
    double mean = 0.0;
    for (const auto& t : panel) mean += t.details[j][k] / double(cfg.N);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < panel.size(); ++i) {
        num += (panel[i].details[j][k] - mean) * (panel[i + 1].details[j][k] - mean);
    }
    for (const auto& t : panel) {
        const double d = t.details[j][k] - mean;
        den += d * d;
    }
    CHECK(std::abs(num / den) < 3.0 / std::sqrt(double(cfg.N)));
}

TEST_CASE("config validation") {
    SimulationConfig cfg;
    cfg.M = 100;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.M = 64;
    cfg.snr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.snr = 1.0;
    cfg.bernoulli_p = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

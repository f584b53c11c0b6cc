#include "wavemix/simgen.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wavemix::simgen {

namespace {

constexpr std::uint64_t kMaskStream = 0x6d61736bULL;   // "mask"
constexpr std::uint64_t kGammaStream = 0x67616d61ULL;  // "gama"
constexpr std::uint64_t kRepStream = 0x72657073ULL;    // "reps"

constexpr std::array<double, 11> kPositions = {0.1,  0.13, 0.15, 0.23, 0.25, 0.40,
                                               0.44, 0.65, 0.76, 0.78, 0.81};
constexpr std::array<double, 11> kBlockHeights = {4.0, -5.0, 3.0, -4.0, 5.0, -4.2,
                                                  2.1, 4.3,  -3.1, 2.1, -4.2};
constexpr std::array<double, 11> kBumpHeights = {4.0, 5.0, 3.0, 4.0, 5.0, 4.2,
                                                 2.1, 4.3, 3.1, 5.1, 4.2};
constexpr std::array<double, 11> kBumpWidths = {0.005, 0.005, 0.006, 0.01,  0.01, 0.03,
                                                0.01,  0.01,  0.005, 0.008, 0.005};

double sign(double x) {
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

}  // namespace

TestFunction function_by_name(std::string_view n) {
    if (n == "blocks") return TestFunction::Blocks;
    if (n == "bumps") return TestFunction::Bumps;
    if (n == "heavisine") return TestFunction::Heavisine;
    if (n == "doppler") return TestFunction::Doppler;
    throw std::invalid_argument("unknown test function '" + std::string(n) +
                                "' (expected blocks, bumps, heavisine or doppler)");
}

std::string_view name(TestFunction f) {
    switch (f) {
        case TestFunction::Blocks: return "blocks";
        case TestFunction::Bumps: return "bumps";
        case TestFunction::Heavisine: return "heavisine";
        case TestFunction::Doppler: return "doppler";
    }
    return "?";
}

dwt::WaveletFilter designated_filter(TestFunction f) {
    switch (f) {
        case TestFunction::Blocks: return dwt::daubechies(1);
        case TestFunction::Bumps: return dwt::daubechies(2);
        case TestFunction::Heavisine: return dwt::daubechies(5);
        case TestFunction::Doppler: return dwt::daubechies(7);
    }
    throw std::invalid_argument("bad test function");
}

MaskLaw mask_by_name(std::string_view n) {
    if (n == "zeros" || n == "zero-coeffs-only") return MaskLaw::ZeroCoefficients;
    if (n == "bernoulli" || n == "bernoulli-mask") return MaskLaw::Bernoulli;
    if (n == "none") return MaskLaw::None;
    throw std::invalid_argument("unknown mask law '" + std::string(n) +
                                "' (expected zeros, bernoulli or none)");
}

std::string_view name(MaskLaw law) {
    switch (law) {
        case MaskLaw::ZeroCoefficients: return "zeros";
        case MaskLaw::Bernoulli: return "bernoulli";
        case MaskLaw::None: return "none";
    }
    return "?";
}

SnrConvention snr_convention_by_name(std::string_view n) {
    if (n == "sd") return SnrConvention::Sd;
    if (n == "rms") return SnrConvention::Rms;
    throw std::invalid_argument("unknown snr convention '" + std::string(n) +
                                "' (expected sd or rms)");
}

std::string_view name(SnrConvention c) {
    return c == SnrConvention::Sd ? "sd" : "rms";
}

double evaluate(TestFunction f, double t) {
    switch (f) {
        case TestFunction::Blocks: {
            double v = 0.0;
            for (std::size_t i = 0; i < kPositions.size(); ++i) {
                v += kBlockHeights[i] * (1.0 + sign(t - kPositions[i])) / 2.0;
            }
            return v;
        }
        case TestFunction::Bumps: {
            double v = 0.0;
            for (std::size_t i = 0; i < kPositions.size(); ++i) {
                const double u = std::abs((t - kPositions[i]) / kBumpWidths[i]);
                const double b = 1.0 + u;
                v += kBumpHeights[i] / (b * b * b * b);
            }
            return v;
        }
        case TestFunction::Heavisine:
            return 4.0 * std::sin(4.0 * M_PI * t) - sign(t - 0.3) - sign(0.72 - t);
        case TestFunction::Doppler: {
            const double amp = std::sqrt(std::max(t * (1.0 - t), 0.0));
            return amp * std::sin(2.0 * M_PI * 1.05 / (t + 0.05));
        }
    }
    throw std::invalid_argument("bad test function");
}

std::vector<double> sample(TestFunction f, std::size_t M) {
    if (M < 2 || (M & (M - 1)) != 0) {
        throw std::invalid_argument("sample: M must be a power of two >= 2");
    }
    std::vector<double> out(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(M);
        out[j] = evaluate(f, t);
    }
    return out;
}

void SimulationConfig::validate() const {
    if (M < 8 || (M & (M - 1)) != 0) {
        throw std::invalid_argument("simulation: M must be a power of two >= 8");
    }
    if (N < 1) throw std::invalid_argument("simulation: N must be >= 1");
    if (!(snr > 0.0)) throw std::invalid_argument("simulation: snr must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("simulation: tau must be > 0");
    if (!std::isfinite(eta)) throw std::invalid_argument("simulation: eta must be finite");
    if (!(bernoulli_p >= 0.0 && bernoulli_p <= 1.0)) {
        throw std::invalid_argument("simulation: p must lie in [0, 1]");
    }
    if (!(zero_tol >= 0.0)) throw std::invalid_argument("simulation: zero_tol must be >= 0");
    if (repetitions < 1) throw std::invalid_argument("simulation: repetitions must be >= 1");
}

NoiseModel calibrate(const SimulationConfig& cfg, const CoefficientTree& mu_tree) {
    cfg.validate();
    mu_tree.validate();
    if (mu_tree.signal_length() != cfg.M) {
        throw std::invalid_argument("calibrate: mu tree does not match M");
    }
    const std::size_t levels = mu_tree.levels();

    // sd and rms of the sampled mu via Parseval: sum(mu^2) = alpha^2 + sum(beta^2),
    // mean(mu) = alpha / sqrt(M).
    double detail_energy = 0.0;
    for (const auto& level : mu_tree.details) {
        for (double b : level) detail_energy += b * b;
    }
    if (detail_energy == 0.0) {
        throw std::invalid_argument("calibrate: mu is constant; SNR is undefined");
    }
    const double m = static_cast<double>(cfg.M);
    double base = 0.0;
    if (cfg.snr_convention == SnrConvention::Sd) {
        base = std::sqrt(detail_energy / (m - 1.0));
    } else {
        base = std::sqrt((mu_tree.scaling * mu_tree.scaling + detail_energy) / m);
    }
    const double sigma = base / cfg.snr;

    NoiseModel model;
    model.sigma2 = sigma * sigma;
    model.mask = make_ragged(levels, 0.0);
    model.gamma2 = make_ragged(levels, 0.0);
    model.sigma2_jk = make_ragged(levels, model.sigma2);

    // Mask and gamma draws hang off cfg.seed only, so the pairing stays
    // frozen across repetitions.
    rng::Stream mask_stream(rng::derive_seed(cfg.seed, {kMaskStream}));
    double masked_decay_sum = 0.0;
    std::size_t masked_count = 0;
    for (std::size_t j = 0; j < levels; ++j) {
        const double decay = std::pow(2.0, -cfg.eta * static_cast<double>(j));
        for (std::size_t k = 0; k < mu_tree.details[j].size(); ++k) {
            bool on = false;
            switch (cfg.structure) {
                case MaskLaw::ZeroCoefficients:
                    on = std::abs(mu_tree.details[j][k]) < cfg.zero_tol;
                    break;
                case MaskLaw::Bernoulli:
                    on = mask_stream.bernoulli(cfg.bernoulli_p);
                    break;
                case MaskLaw::None:
                    on = false;
                    break;
            }
            if (on) {
                model.mask[j][k] = 1.0;
                masked_decay_sum += decay;
                ++masked_count;
            }
        }
    }
    if (cfg.structure == MaskLaw::ZeroCoefficients && masked_count == 0) {
        std::ostringstream msg;
        msg << "calibrate: no zero coefficients below zero_tol = " << cfg.zero_tol
            << "; raise zero_tol or use the bernoulli mask";
        throw std::invalid_argument(msg.str());
    }

    if (masked_count > 0 && std::isfinite(cfg.tau)) {
        model.gamma2_ref = m * model.sigma2 / (cfg.tau * masked_decay_sum);
    } else {
        model.gamma2_ref = 0.0;  // tau -> inf or empty mask: homoscedastic
    }

    if (model.gamma2_ref > 0.0) {
        rng::Stream gamma_stream(rng::derive_seed(cfg.seed, {kGammaStream}));
        for (std::size_t j = 0; j < levels; ++j) {
            const double decay = std::pow(2.0, -cfg.eta * static_cast<double>(j));
            for (std::size_t k = 0; k < model.mask[j].size(); ++k) {
                if (model.mask[j][k] != 0.0) {
                    model.gamma2[j][k] = gamma_stream.gamma(model.gamma2_ref / 2.0, 2.0);
                    model.sigma2_jk[j][k] = model.sigma2 + decay * model.gamma2[j][k];
                }
            }
        }
    }
    return model;
}

rng::Stream repetition_stream(const SimulationConfig& cfg, std::size_t repetition) {
    return rng::Stream(rng::derive_seed(cfg.seed, {kRepStream, repetition}));
}

std::vector<CoefficientTree> generate_panel(const SimulationConfig& cfg,
                                            const NoiseModel& noise,
                                            const CoefficientTree& mu_tree,
                                            rng::Stream& stream) {
    const std::size_t levels = mu_tree.levels();
    const double sigma_c = std::sqrt(noise.sigma2);
    std::vector<CoefficientTree> panel;
    panel.reserve(cfg.N);
    for (std::size_t i = 0; i < cfg.N; ++i) {
        CoefficientTree t = mu_tree;
        t.scaling += sigma_c * stream.normal();
        for (std::size_t j = 0; j < levels; ++j) {
            for (std::size_t k = 0; k < t.details[j].size(); ++k) {
                t.details[j][k] += std::sqrt(noise.sigma2_jk[j][k]) * stream.normal();
            }
        }
        panel.push_back(std::move(t));
    }
    return panel;
}

}  // namespace wavemix::simgen

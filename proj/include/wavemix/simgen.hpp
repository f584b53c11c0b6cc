#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "wavemix/coeffs.hpp"
#include "wavemix/dwt.hpp"
#include "wavemix/rng.hpp"

namespace wavemix::simgen {

enum class TestFunction { Blocks, Bumps, Heavisine, Doppler };

TestFunction function_by_name(std::string_view name);
std::string_view name(TestFunction f);

/// The wavelet each test function is conventionally processed with:
/// D1, D2, D5, D7 for Blocks, Bumps, Heavisine, Doppler.
dwt::WaveletFilter designated_filter(TestFunction f);

/// Pointwise Donoho-Johnstone formulas, raw amplitude (no renormalization).
double evaluate(TestFunction f, double t);

/// Samples on the midpoint grid t_j = (j - 1/2)/M, j = 1..M.
std::vector<double> sample(TestFunction f, std::size_t M);

enum class MaskLaw { ZeroCoefficients, Bernoulli, None };

MaskLaw mask_by_name(std::string_view name);
std::string_view name(MaskLaw law);

/// How sigma is derived from the SNR knob: sigma = sd(mu)/SNR (sample sd,
/// the DJ convention) or sigma = rms(mu)/SNR (signal power).
enum class SnrConvention { Sd, Rms };

SnrConvention snr_convention_by_name(std::string_view name);
std::string_view name(SnrConvention c);

struct SimulationConfig {
    TestFunction test_function = TestFunction::Blocks;
    std::size_t M = 1024;
    std::size_t N = 100;
    double snr = 5.0;
    double tau = 1.0;           // +inf degenerates to homoscedastic
    double eta = 1.5;
    MaskLaw structure = MaskLaw::ZeroCoefficients;
    double bernoulli_p = 0.3;
    double zero_tol = 1e-12;    // |beta| below this marks a Lambda_0 position
    SnrConvention snr_convention = SnrConvention::Sd;
    std::size_t repetitions = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Frozen per-study noise structure: the realized variance field
/// sigma2_jk = sigma2 + mask_jk 2^{-j eta} gamma2_jk, plus its ingredients.
struct NoiseModel {
    double sigma2 = 0.0;
    double gamma2_ref = 0.0;
    RaggedField gamma2;     // zero off-mask
    RaggedField mask;       // 0/1
    RaggedField sigma2_jk;  // realized field
};

/// Derives sigma from the SNR, the mask from the structure law, gamma2_ref
/// from tau (gamma2_ref = M sigma^2 / (tau * sum over masked 2^{-j eta})) and
/// draws gamma2_jk ~ Gamma(shape gamma2_ref/2, scale 2). Mask and gamma draws
/// depend only on cfg.seed, so they stay fixed across repetitions.
NoiseModel calibrate(const SimulationConfig& cfg, const CoefficientTree& mu_tree);

/// The RNG substream for one repetition of this configuration.
rng::Stream repetition_stream(const SimulationConfig& cfg, std::size_t repetition);

/// One panel in the coefficient domain: d_ijk = beta_jk + N(0, sigma2_jk),
/// c_i = alpha + N(0, sigma2), independent across replicates and positions.
std::vector<CoefficientTree> generate_panel(const SimulationConfig& cfg,
                                            const NoiseModel& noise,
                                            const CoefficientTree& mu_tree,
                                            rng::Stream& stream);

}  // namespace wavemix::simgen

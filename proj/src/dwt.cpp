#include "wavemix/dwt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wavemix::dwt {

namespace {

// Daubechies extremal-phase lowpass taps, spectral factorization at 60-digit
// precision, rounded to double. Orthonormality is asserted by validate().
const std::vector<double>& taps(int p) {
    static const std::vector<double> d1 = {
        0.70710678118654752, 0.70710678118654752};
    static const std::vector<double> d2 = {
        0.48296291314453414, 0.83651630373780791,
        0.22414386804201338, -0.12940952255126038};
    static const std::vector<double> d5 = {
        0.16010239797419291,   0.60382926979718967,  0.72430852843777293,
        0.13842814590132073,   -0.24229488706638203, -0.032244869584638375,
        0.077571493840045714,  -0.0062414902127982743,
        -0.012580751999081999, 0.0033357252854737713};
    static const std::vector<double> d7 = {
        0.077852054085009179,  0.39653931948191731,   0.72913209084623512,
        0.46978228740519312,   -0.14390600392856498,  -0.22403618499387498,
        0.071309219266830265,  0.080612609151083072,  -0.038029936935014414,
        -0.016574541630666881, 0.012550998556099841,  0.00042957797292136652,
        -0.0018016407040474909, 0.00035371379997452025};
    switch (p) {
        case 1: return d1;
        case 2: return d2;
        case 5: return d5;
        case 7: return d7;
        default:
            throw std::invalid_argument("daubechies: unsupported vanishing moments " +
                                        std::to_string(p) + " (supported: 1, 2, 5, 7)");
    }
}

bool is_power_of_two(std::size_t n) {
    return n >= 2 && (n & (n - 1)) == 0;
}

// One periodized analysis step: input length n (even) -> approx/detail n/2.
void analysis_step(std::span<const double> a, std::span<const double> h,
                   std::span<const double> g, std::span<double> approx,
                   std::span<double> detail) {
    const std::size_t n = a.size();
    const std::size_t half = n / 2;
    const std::size_t L = h.size();
    for (std::size_t k = 0; k < half; ++k) {
        double s = 0.0;
        double d = 0.0;
        for (std::size_t m = 0; m < L; ++m) {
            const double v = a[(2 * k + m) % n];
            s += h[m] * v;
            d += g[m] * v;
        }
        approx[k] = s;
        detail[k] = d;
    }
}

// Transpose of analysis_step (synthesis by scattering).
void synthesis_step(std::span<const double> approx, std::span<const double> detail,
                    std::span<const double> h, std::span<const double> g,
                    std::span<double> out) {
    const std::size_t n = out.size();
    const std::size_t L = h.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < approx.size(); ++k) {
        for (std::size_t m = 0; m < L; ++m) {
            out[(2 * k + m) % n] += h[m] * approx[k] + g[m] * detail[k];
        }
    }
}

}  // namespace

std::vector<double> WaveletFilter::highpass() const {
    const std::size_t L = lowpass.size();
    std::vector<double> g(L);
    for (std::size_t m = 0; m < L; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        g[m] = sign * lowpass[L - 1 - m];
    }
    return g;
}

void WaveletFilter::validate(double tol) const {
    const std::size_t L = lowpass.size();
    if (L == 0 || L % 2 != 0 || L != 2 * static_cast<std::size_t>(vanishing_moments)) {
        throw std::invalid_argument("wavelet filter: tap count must equal 2 * vanishing_moments");
    }
    double sum = 0.0;
    for (double h : lowpass) sum += h;
    if (std::abs(sum - std::sqrt(2.0)) > tol) {
        throw std::invalid_argument("wavelet filter: taps do not sum to sqrt(2)");
    }
    for (std::size_t shift = 0; shift < L / 2; ++shift) {
        double acc = 0.0;
        for (std::size_t m = 0; m + 2 * shift < L; ++m) {
            acc += lowpass[m] * lowpass[m + 2 * shift];
        }
        const double want = (shift == 0) ? 1.0 : 0.0;
        if (std::abs(acc - want) > tol) {
            throw std::invalid_argument("wavelet filter: double-shift orthogonality violated");
        }
    }
}

WaveletFilter daubechies(int vanishing_moments) {
    WaveletFilter f{vanishing_moments, taps(vanishing_moments)};
    f.validate();
    return f;
}

WaveletFilter filter_by_name(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "d1" || s == "haar") return daubechies(1);
    if (s == "d2") return daubechies(2);
    if (s == "d5") return daubechies(5);
    if (s == "d7") return daubechies(7);
    throw std::invalid_argument("unknown wavelet filter '" + std::string(name) +
                                "' (expected d1, d2, d5 or d7)");
}

CoefficientTree forward(std::span<const double> signal, const WaveletFilter& filter) {
    const std::size_t M = signal.size();
    if (!is_power_of_two(M)) {
        throw std::invalid_argument("forward: signal length " + std::to_string(M) +
                                    " is not a power of two >= 2");
    }
    for (double v : signal) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("forward: non-finite sample in signal");
        }
    }
    const std::vector<double> g = filter.highpass();
    std::size_t levels = 0;
    for (std::size_t n = M; n > 1; n >>= 1) ++levels;

    CoefficientTree tree = CoefficientTree::zeros(levels);
    std::vector<double> approx(signal.begin(), signal.end());
    std::vector<double> next(M / 2);
    for (std::size_t j = levels; j-- > 0;) {
        next.resize(approx.size() / 2);
        analysis_step(approx, filter.lowpass, g, next, tree.details[j]);
        approx = next;
    }
    tree.scaling = approx[0];
    return tree;
}

std::vector<double> inverse(const CoefficientTree& tree, const WaveletFilter& filter) {
    tree.validate();
    const std::vector<double> g = filter.highpass();
    std::vector<double> a = {tree.scaling};
    std::vector<double> out;
    for (std::size_t j = 0; j < tree.levels(); ++j) {
        out.assign(2 * a.size(), 0.0);
        synthesis_step(a, tree.details[j], filter.lowpass, g, out);
        a = out;
    }
    return a;
}

}  // namespace wavemix::dwt

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wavemix::rng {

// SplitMix64 step; also used to chain seeds for substreams.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic substream seed from a master seed and a path of ids,
// e.g. derive_seed(master, {cell_index, repetition}). Order-sensitive.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Random stream with hand-rolled samplers on top of mt19937_64.
///
/// The standard library distributions are implementation-defined, so studies
/// would not be reproducible across toolchains; the engine itself is fully
/// specified. Box-Muller for normals, Marsaglia-Tsang for gammas.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    double uniform();                           // [0, 1)
    double normal();                            // N(0, 1)
    double gamma(double shape, double scale);   // shape > 0, scale > 0
    bool bernoulli(double p);

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace wavemix::rng

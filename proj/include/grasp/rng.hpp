#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace grasp {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of stream `stream` under master seed `seed`: seed XOR mix64(stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/**
 * Seedable generator with output that is identical on every platform.
 *
 * Wraps std::mt19937_64, whose output sequence the standard fixes. The
 * standard distributions are implementation-defined, so uniforms use the top
 * 53 bits of each draw and normals use the basic Box-Muller transform,
 * two uniforms per normal (the sine branch is discarded).
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    /// Standard normal via Box-Muller.
    double normal();
    /// Uniform integer in [0, bound); bound > 0.
    std::uint64_t below(std::uint64_t bound);
    bool bernoulli(double prob_one) { return uniform() < prob_one; }
    /// Uniform random k-subset of [0, n), sorted ascending.
    std::vector<long> subset(long n, long k);

private:
    std::mt19937_64 engine_;
};

}  // namespace grasp

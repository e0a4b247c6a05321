#pragma once

#include "stoptree/normal.hpp"

#include <cstdint>

namespace stoptree {

/// Counter-based pseudo random generator built on the SplitMix64 output
/// function.
///
/// Draw i of the stream with key K is mix64(K + (i+1) * GOLDEN), so any
/// draw can be computed from (key, i) alone. Substreams follow the fixed
/// rule
///
///     key(base, s) = mix64(base ^ mix64(s + GOLDEN)),
///
/// which the simulation experiments use to give every replication its own
/// stream: aggregate results are identical for any execution order or
/// thread count.
///
/// Uniforms are ((bits >> 11) + 0.5) * 2^-53, strictly inside (0,1).
/// Normal variates are produced by inversion, Phi^{-1}(uniform).
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t substream_key(std::uint64_t base_seed, std::uint64_t stream) {
        return mix64(base_seed ^ mix64(stream + kGolden));
    }

    static CounterRng substream(std::uint64_t base_seed, std::uint64_t stream) {
        return CounterRng(substream_key(base_seed, stream));
    }

    std::uint64_t next_u64() {
        counter_ += kGolden;
        return mix64(key_ + counter_);
    }

    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() {
        return std_normal_quantile(next_uniform());
    }

    double next_normal(double mean, double sd) {
        return mean + sd * next_normal();
    }

    /// Uniform integer in [0, bound), bound > 0, unbiased via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace stoptree

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ipcw {

// Counter-based generator: the k-th draw is a pure function of (key, k), and
// the key is derived from (seed, replication, variable tag). Streams for
// different replications or variables never share state, so a simulation
// gives the same numbers however its replications are scheduled.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t replication, std::uint64_t tag)
        : key_(mix(mix(mix(seed) ^ replication) + tag * 0x9E3779B97F4A7C15ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

    // Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t draws() const noexcept { return counter_; }

    // SplitMix64 finalizer.
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ipcw

#pragma once

#include <cstdint>
#include <span>

namespace herdsim {

namespace detail {

// SplitMix64 finalizer. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Counter-based stream: output k is mix64(key + k * gamma), so the state is
// just (key, counter) and streams can be split by key without touching each
// other. Simulations derive one stream per trial from (master_seed, trial
// index); draws inside a trial are consumed in a fixed documented order, which
// makes every result bitwise reproducible for any worker count.
class Stream {
public:
    Stream() : Stream(0) {}
    explicit Stream(std::uint64_t key) : key_(key), counter_(0) {}

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return detail::mix64(key_ + counter_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // P(true) = p for p in [0, 1]; p <= 0 never fires, p >= 1 always does.
    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n), n > 0. Lemire's debiased multiply-shift.
    std::uint64_t below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Index into a nonnegative weight sequence, proportional to weight.
    // total must be the sum of the weights.
    std::size_t weighted_index(std::span<const double> weights, double total) {
        const double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

// Stream key for a given substream index (trial id, graph generation, ...).
// Distinct (seed, index) pairs give well-separated keys.
inline Stream derive_stream(std::uint64_t master_seed, std::uint64_t index) {
    const std::uint64_t key =
        detail::mix64(master_seed ^ 0xA0761D6478BD642FULL) ^
        detail::mix64(index + 0xE7037ED1A0B428DBULL);
    return Stream(detail::mix64(key));
}

} // namespace herdsim

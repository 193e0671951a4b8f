#pragma once

#include <cstdint>

namespace bootperc {

// Counter-based stream RNG: output i of a stream is mix(key + i*gamma),
// the splitmix64 construction. Streams are derived from (master seed,
// stream index) only, so trial substreams are reproducible under any
// scheduling and there is no global state.
class CounterRng {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    static CounterRng for_stream(std::uint64_t master_seed, std::uint64_t stream) {
        CounterRng rng;
        rng.key_ = mix(mix(master_seed + kGamma) ^ mix(stream * kGamma + 1));
        return rng;
    }

    std::uint64_t next_u64() { return mix(key_ + ++counter_ * kGamma); }

    double next_unit() {  // uniform in [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double prob) { return next_unit() < prob; }

    // Uniform in [0, bound); bound > 0. Rejection-free modulo is fine for
    // the small bounds used by the randomized tests.
    std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace bootperc

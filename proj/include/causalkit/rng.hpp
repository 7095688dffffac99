#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace causalkit {

// Deterministic pseudo-random generator (xoshiro256++) with explicit seeding
// and labeled stream derivation.  Every stochastic routine in the library
// takes a seed and derives its own stream, so results are reproducible
// bit-for-bit regardless of call order or platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform double in the open interval (0, 1): 53 random bits plus a
    // half-ulp offset, so 0 and 1 are never returned.
    double next_unit();

    // Standard normal deviate via the inverse-CDF transform.
    double next_gaussian();

    // Uniform integer in [0, bound), unbiased via rejection.  bound > 0.
    std::uint64_t next_below(std::uint64_t bound);

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t s_[4];
};

// Mixes a master seed with a label (or integer index) into an independent
// stream seed.  Labels are hashed with FNV-1a and both halves pass through
// the splitmix64 finalizer, so distinct labels yield uncorrelated streams
// and the same (master, label) pair always maps to the same seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace causalkit

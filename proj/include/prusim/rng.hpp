#pragma once

#include <cstdint>
#include <random>

namespace prusim {

// Deterministic per-(seed, index) stream so that parallel or reordered
// consumers of sample i always see the same numbers.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32), 0x5eedu};
        eng_.seed(seq);
    }

    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace prusim

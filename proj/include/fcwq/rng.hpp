#pragma once

#include <cstdint>
#include <random>

namespace fcwq {

// Derives per-task seeds from a base seed and structural indices (window,
// model, level). Inputs are indices only, never data values, so reseeding is
// immune to look-ahead through the data.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on the open interval (0,1); safe as inverse-CDF input.
    double uniform();
    double uniform(double lo, double hi);

private:
    std::mt19937_64 gen_;
};

}  // namespace fcwq

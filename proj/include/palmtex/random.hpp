#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace palmtex {

// All stochastic steps draw from std::mt19937_64, whose output sequence is
// fixed by the C++ standard. The helpers below avoid the <random>
// distributions, whose algorithms are implementation-defined, so that a
// seed reproduces the same partitions and images on every toolchain.
using Rng = std::mt19937_64;

//! splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0);

//! Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

//! Uniform real in [0, 1) built from the top 53 bits of one draw.
double uniform_unit(Rng& rng);

//! Standard normal deviate (Box-Muller, one value per two draws).
double standard_normal(Rng& rng);

//! In-place Fisher-Yates shuffle driven by uniform_below.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace palmtex

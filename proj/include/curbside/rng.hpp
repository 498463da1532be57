#pragma once
// Seed derivation for named random streams. Every random decision in the
// project draws from a stream derived from (root seed, purpose string,
// optional index), so one stage can be replayed without replaying the rest.

#include <cstdint>
#include <random>
#include <string_view>

namespace curbside {

// splitmix64 finalizer; full-avalanche mixing for seed material.
std::uint64_t mix_bits(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index);

std::mt19937_64 make_rng(std::uint64_t root, std::string_view stream);
std::mt19937_64 make_rng(std::uint64_t root, std::string_view stream,
                         std::uint64_t index);

}  // namespace curbside

#include "curbside/rng.hpp"

namespace curbside {

std::uint64_t mix_bits(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

// FNV-1a over the stream name, folded into the root seed.
std::uint64_t hash_stream(std::uint64_t root, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix_bits(root ^ mix_bits(h));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
  return hash_stream(root, stream);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index) {
  return mix_bits(hash_stream(root, stream) ^ mix_bits(index + 1));
}

std::mt19937_64 make_rng(std::uint64_t root, std::string_view stream) {
  return std::mt19937_64(derive_seed(root, stream));
}

std::mt19937_64 make_rng(std::uint64_t root, std::string_view stream,
                         std::uint64_t index) {
  return std::mt19937_64(derive_seed(root, stream, index));
}

}  // namespace curbside

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace graphforge {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; a cheap bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a(std::string_view bytes,
                              std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Named sub-seed of a root seed. Streams for different component names are
/// independent of each other and of the order components are created in.
std::uint64_t derive_seed(std::uint64_t root, std::string_view component);

inline Rng make_rng(std::uint64_t root, std::string_view component) {
  return Rng(derive_seed(root, component));
}

}  // namespace graphforge

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qas {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a substream seed from a root seed and a path of identifiers
/// (iteration, slot, ...). Streams with different paths are independent, so
/// results do not depend on the order in which work items are scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(root);
  for (std::uint64_t id : path) h = mix64(h ^ mix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t root,
                       std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(root, path));
}

/// FNV-1a over raw bytes; used for content fingerprints.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace qas

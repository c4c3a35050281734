#pragma once

#include <cstdint>

namespace eigenopt {

/// Independent 64-bit stream seed for item `index` of a run seeded with
/// `base` (splitmix64 finalizer over the pair).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace eigenopt

#pragma once

#include <cstdint>
#include <string_view>

namespace idsbench {

/// FNV-1a; stable across platforms, used wherever reruns must reproduce.
constexpr std::uint64_t fnv1a(std::string_view data,
                              std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Maps a hash to [0, 1).
constexpr double unit_interval(std::uint64_t h) {
  // splitmix finalizer spreads low-entropy FNV outputs
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace idsbench

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace navcurate {

/// FNV-1a 64-bit hash, used to fold string identifiers into RNG keys.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Counter-based random stream: the i-th output is a pure function of (key, i),
/// so streams keyed by work-item identity give the same values under any
/// scheduling.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  /// Key derived from an ordered list of components.
  static constexpr CounterRng keyed(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t k = 0x6a09e667f3bcc909ull;
    for (std::uint64_t p : parts) k = splitmix64(k ^ splitmix64(p));
    return CounterRng(k);
  }

  constexpr std::uint64_t next() noexcept { return splitmix64(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

  /// Uniform in [0, 1).
  constexpr double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi]; requires lo <= hi.
  constexpr std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next());
    const std::uint64_t threshold = (0 - range) % range;
    std::uint64_t x = next();
    while (x < threshold) x = next();
    return lo + static_cast<std::int64_t>(x % range);
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace navcurate

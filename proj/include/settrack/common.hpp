#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace settrack {

// Structurally unusable input: too few points, malformed files, missing data.
class data_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A computation produced non-finite values (signals pathological inputs).
class numeric_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = kFnvOffset) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) noexcept {
    return fnv1a64(s.data(), s.size());
}

// splitmix64 finalizer; decorrelates derived seeds.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace detail

// All randomness flows from one master seed. Sub-streams are derived as
// splitmix64(seed ^ fnv1a64(tag)) with tags like "basis", "noise/Shift_1/3".
// Deriving by tag (not list position) keeps per-step streams order-insensitive.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept {
    return detail::splitmix64(seed ^ detail::fnv1a64(tag));
}

// 17 significant digits: round-trip exact for IEEE-754 doubles.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace settrack

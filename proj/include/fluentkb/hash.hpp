#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace fluentkb {

// 64-bit FNV-1a. Used only for deterministic node ids, never for security.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Hash of several fields joined with a unit separator so that ("ab","c")
// and ("a","bc") differ.
inline std::string key_hash(std::initializer_list<std::string_view> parts) {
  std::string joined;
  for (auto p : parts) {
    joined.append(p);
    joined.push_back('\x1f');
  }
  return hex64(fnv1a64(joined));
}

}  // namespace fluentkb

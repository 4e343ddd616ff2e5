#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string_view>

namespace vlg {

// 64-bit FNV-1a, incremental.
class Fnv1a {
 public:
  Fnv1a& add_bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a& add(std::uint64_t v) { return add_bytes(&v, sizeof v); }
  Fnv1a& add(double v) { return add(std::bit_cast<std::uint64_t>(v)); }
  Fnv1a& add(std::string_view s) { return add_bytes(s.data(), s.size()); }
  template <class T>
  Fnv1a& add_span(std::span<const T> values) {
    return add_bytes(values.data(), values.size_bytes());
  }

  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace vlg

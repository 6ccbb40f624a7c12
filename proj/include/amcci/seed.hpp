#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <type_traits>

namespace amcci {

/// Engine used by every sampler and simulation in the library.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a hash of a label string.
std::uint64_t label_hash(std::string_view label) noexcept;

namespace detail {
inline std::uint64_t as_label(std::string_view s) noexcept { return label_hash(s); }
inline std::uint64_t as_label(const char* s) noexcept { return label_hash(s); }
template <class T>
  requires std::is_integral_v<T>
inline std::uint64_t as_label(T v) noexcept {
  return static_cast<std::uint64_t>(v);
}
inline std::uint64_t absorb(std::uint64_t state, std::uint64_t label) noexcept {
  return mix64(state ^ mix64(label + 0x9e3779b97f4a7c15ULL));
}
}  // namespace detail

/// Deterministically derives a stream seed from a base seed and a chain of
/// labels (integers or strings). Each absorption step is a bijection in the
/// running state, so for fixed labels the result is a bijection of the base
/// seed and for a fixed prefix it is a bijection of the last integer label.
template <class... Labels>
std::uint64_t derive_seed(std::uint64_t base, const Labels&... labels) noexcept {
  std::uint64_t state = mix64(base);
  ((state = detail::absorb(state, detail::as_label(labels))), ...);
  return state;
}

}  // namespace amcci

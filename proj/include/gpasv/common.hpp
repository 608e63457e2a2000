// Copyright 2026 The GPASV Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GPASV_COMMON_HPP
#define GPASV_COMMON_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace gpasv {

/// Coalition encoding shared by every module: bit i set means player i is in the set.
using Mask = std::uint64_t;

/// Hard ceiling on the player count imposed by the 64-bit mask encoding.
inline constexpr int kMaxPlayers = 64;

enum class ErrorKind {
  kInvalidArgument,  ///< a documented precondition or invariant was violated
  kParse,            ///< malformed input file
  kLimitExceeded,    ///< instance too large for an exact routine
  kMissingUtility,   ///< utility table has no row for a queried coalition
  kIo,               ///< file could not be opened or written
};

/// Single exception type thrown by the library; `kind()` drives the C API status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::kInvalidArgument, what);
}

inline constexpr Mask full_mask(int n) noexcept {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}
inline constexpr Mask bit(int i) noexcept { return Mask{1} << i; }
inline constexpr bool contains(Mask s, int i) noexcept { return ((s >> i) & 1U) != 0; }
inline constexpr int cardinality(Mask s) noexcept { return std::popcount(s); }

/// Calls `f(i)` for each member of `s` in increasing order.
template <class F>
inline void for_each_member(Mask s, F&& f) {
  while (s != 0) {
    f(std::countr_zero(s));
    s &= s - 1;
  }
}

/// Numerically stable log(sum(exp(x))). Returns -inf for an empty span.
double log_sum_exp(std::span<const double> x);

/// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic random source; all transforms are written out so streams are
/// reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n must be positive.
  std::size_t below(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gpasv

#endif  // GPASV_COMMON_HPP

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

#ifndef GPASV_EXACT_HPP
#define GPASV_EXACT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "gpasv/games.hpp"
#include "gpasv/priority_model.hpp"

namespace gpasv {

inline constexpr int kMaxEnumeratePlayers = 10;
inline constexpr int kMaxDpPlayers = 24;

/// Fully normalized distribution over all n! orderings, in lexicographic order.
class EnumeratedPmf {
 public:
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return prob_.size(); }
  [[nodiscard]] double prob(std::size_t k) const { return prob_[k]; }
  [[nodiscard]] std::span<const double> probs() const noexcept { return prob_; }
  [[nodiscard]] std::span<const std::int8_t> order(std::size_t k) const {
    return {orders_.data() + k * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  [[nodiscard]] Permutation permutation(std::size_t k) const;
  /// log of the sum of unnormalized masses.
  [[nodiscard]] double log_normalizer() const noexcept { return log_z_; }
  /// Probability of a given ordering (binary search over the lexicographic table).
  [[nodiscard]] double prob_of(const Permutation& pi) const;

  friend EnumeratedPmf enumerate_pmf(const GpasvParams& params);

 private:
  int n_ = 0;
  std::vector<std::int8_t> orders_;
  std::vector<double> prob_;
  double log_z_ = 0.0;
};

/// Brute-force normalization over all n! orderings. Throws kLimitExceeded for n > 10.
EnumeratedPmf enumerate_pmf(const GpasvParams& params);

/// psi_i = E[U(pre(i) + i) - U(pre(i))] by exact enumeration (n <= 10).
std::vector<double> exact_value(const GpasvParams& params, const UtilityOracle& oracle);
std::vector<double> exact_value(const EnumeratedPmf& pmf, const UtilityOracle& oracle);

/// p(i, j) = P(i precedes j); zero diagonal.
struct PairwiseMatrix {
  Matrix p;
  /// max |p(i,j) + p(j,i) - 1| before complementary pairs were rescaled.
  double max_asymmetry = 0.0;
};

/// Pairwise-order probabilities from an enumerated pmf (no rescaling needed).
PairwiseMatrix pairwise_from_pmf(const EnumeratedPmf& pmf);

/// Forward/backward subset recursion over the 2^n coalitions in log space;
/// O(n^2 2^n) time, two tables of 2^n doubles. Throws kLimitExceeded for n > 24.
PairwiseMatrix dp_pairwise_probs(const GpasvParams& params);

/// log of the normalizer, sum over all orderings of the unnormalized mass.
double dp_normalizer(const GpasvParams& params);

}  // namespace gpasv

#endif  // GPASV_EXACT_HPP

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

#ifndef GPASV_GAMES_HPP
#define GPASV_GAMES_HPP

#include <atomic>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpasv/common.hpp"
#include "gpasv/priority_model.hpp"

namespace gpasv {

/// Black-box coalition utility with U(empty) = 0. Implementations must be
/// deterministic and safe to call concurrently.
class UtilityOracle {
 public:
  virtual ~UtilityOracle() = default;

  [[nodiscard]] virtual int n() const = 0;

  /// Checks that `s` only holds players in [0, n) and returns U(s).
  [[nodiscard]] double evaluate(Mask s) const {
    if ((s & ~full_mask(n())) != 0) {
      fail(ErrorKind::kInvalidArgument, "subset mask " + std::to_string(s) + " holds a player outside [0, " +
                                            std::to_string(n()) + ")");
    }
    return evaluate_unchecked(s);
  }

 protected:
  [[nodiscard]] virtual double evaluate_unchecked(Mask s) const = 0;
};

using OraclePtr = std::shared_ptr<const UtilityOracle>;

/// One term c * 1{...} of a sum-of-unanimity or sum-of-race game.
struct GameTerm {
  Mask members = 0;
  double coeff = 0.0;
};

/// U(S) = sum_k c_k 1{T_k subset of S}; rewards the last arrival of each T_k.
class SumOfUnanimityGame final : public UtilityOracle {
 public:
  SumOfUnanimityGame(int n, std::vector<GameTerm> terms);
  [[nodiscard]] int n() const override { return n_; }
  [[nodiscard]] const std::vector<GameTerm>& terms() const noexcept { return terms_; }

 protected:
  [[nodiscard]] double evaluate_unchecked(Mask s) const override;

 private:
  int n_;
  std::vector<GameTerm> terms_;
};

/// U(S) = sum_k c_k 1{T_k intersects S}; rewards the first arrival of each T_k.
class SumOfRaceGame final : public UtilityOracle {
 public:
  SumOfRaceGame(int n, std::vector<GameTerm> terms);
  [[nodiscard]] int n() const override { return n_; }
  [[nodiscard]] const std::vector<GameTerm>& terms() const noexcept { return terms_; }

 protected:
  [[nodiscard]] double evaluate_unchecked(Mask s) const override;

 private:
  int n_;
  std::vector<GameTerm> terms_;
};

/// Adapts a callable; the callable must return 0 for the empty set.
class FunctionOracle final : public UtilityOracle {
 public:
  FunctionOracle(int n, std::function<double(Mask)> fn) : n_(n), fn_(std::move(fn)) {}
  [[nodiscard]] int n() const override { return n_; }

 protected:
  [[nodiscard]] double evaluate_unchecked(Mask s) const override { return fn_(s); }

 private:
  int n_;
  std::function<double(Mask)> fn_;
};

/// Lookup table parsed from CSV rows `mask,value` (decimal mask, bit i = player i).
/// A queried mask absent from the table raises kMissingUtility.
class TableOracle final : public UtilityOracle {
 public:
  static TableOracle parse(std::istream& in, int n, const std::string& source = "<stream>");
  static TableOracle load(const std::string& path, int n);

  [[nodiscard]] int n() const override { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return table_.size(); }

 protected:
  [[nodiscard]] double evaluate_unchecked(Mask s) const override;

 private:
  TableOracle(int n, std::unordered_map<Mask, double> table) : n_(n), table_(std::move(table)) {}

  int n_;
  std::unordered_map<Mask, double> table_;
};

/// Memoizing wrapper: each distinct mask reaches the inner oracle at most once.
/// Concurrent callers asking for the same missing mask wait for a single evaluation.
/// Optionally backed by a CSV file (same schema as TableOracle) that is loaded at
/// construction and appended on every new evaluation.
class CachedOracle final : public UtilityOracle {
 public:
  explicit CachedOracle(OraclePtr inner);
  CachedOracle(OraclePtr inner, const std::string& persist_path);
  ~CachedOracle() override;

  CachedOracle(const CachedOracle&) = delete;
  CachedOracle& operator=(const CachedOracle&) = delete;

  [[nodiscard]] int n() const override { return inner_->n(); }
  /// Inner evaluations performed by this object (excludes rows loaded from file).
  [[nodiscard]] std::int64_t distinct_evals() const noexcept { return distinct_evals_.load(); }
  /// All evaluate() calls, hits included.
  [[nodiscard]] std::int64_t total_calls() const noexcept { return total_calls_.load(); }
  /// Rows loaded from the persisted file.
  [[nodiscard]] std::int64_t loaded() const noexcept { return loaded_; }
  /// Number of stored masks (loaded + distinct_evals).
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] const UtilityOracle& inner() const noexcept { return *inner_; }

 protected:
  [[nodiscard]] double evaluate_unchecked(Mask s) const override;

 private:
  struct InFlight;

  OraclePtr inner_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Mask, double> store_;
  mutable std::unordered_map<Mask, std::shared_ptr<InFlight>> in_flight_;
  mutable std::atomic<std::int64_t> distinct_evals_{0};
  mutable std::atomic<std::int64_t> total_calls_{0};
  std::int64_t loaded_ = 0;
  mutable std::ofstream persist_;
};

std::shared_ptr<CachedOracle> wrap_cached(OraclePtr inner);

// ---------------------------------------------------------------------------
// Synthetic benchmark families with closed-form values.

enum class RegimeCase { kCase1 = 1, kCase2 = 2, kCase3 = 3, kCase4 = 4 };

RegimeCase regime_case_from_int(int c);

/// Instance bundle: distribution params, the game, and its exact value vector.
struct BenchmarkInstance {
  GpasvParams params;
  std::shared_ptr<SumOfUnanimityGame> game;
  std::vector<double> target;
};

/// Line order 0 < 1 < ... < n-1 with multiplicative weight omega0 on every pair i < j,
/// expressed additively as omega_ij = -log(omega0) with beta = 1.
GpasvParams scenario1_params(int n, std::vector<double> lambda, double omega0_mult);

/// Closed-form value for contiguous-interval unanimity terms on the line order.
/// Throws if a term is not a contiguous interval.
std::vector<double> scenario1_closed_form(int n, std::span<const double> lambda, double omega0_mult,
                                          std::span<const GameTerm> intervals);

/// Closed-form value c_j / |B_j| for block-completion games. Throws on a malformed partition.
std::vector<double> scenario2_closed_form(const std::vector<std::vector<int>>& blocks,
                                          std::span<const double> coeffs);

/// Block-structured params: each block a directed cycle with one common weight, each
/// present block pair (k < l, kept with probability `edge_prob`) a common weight, lambda
/// constant per block. Weights are multiplicative and converted with beta = 1.
struct BlockWeights {
  std::vector<double> lambda_per_block;
  std::vector<double> cycle_mult;                 // per block
  std::vector<std::vector<double>> between_mult;  // [k][l] for k < l; 1 means absent
};
GpasvParams scenario2_params(int n, int block_size, const BlockWeights& weights);

/// Seeded Case 1-4 generators: n^2 intervals (Scenario 1) or n / block_size blocks
/// (Scenario 2), coefficients Unif(0.5, 1.5).
BenchmarkInstance make_scenario1(int n, RegimeCase regime, std::uint64_t seed);
BenchmarkInstance make_scenario2(int n, int block_size, RegimeCase regime, std::uint64_t seed);

/// d terms with members drawn uniformly from the nonempty subsets of [n] and
/// coefficients Unif(0.5, 1.5).
std::vector<GameTerm> random_subset_terms(int n, int d, Rng& rng);

}  // namespace gpasv

#endif  // GPASV_GAMES_HPP

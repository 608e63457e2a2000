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

#ifndef GPASV_PRIORITY_MODEL_HPP
#define GPASV_PRIORITY_MODEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpasv/common.hpp"

namespace gpasv {

/// Dense row-major n x n matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  [[nodiscard]] std::span<const double> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Weighted pairwise priorities: omega(i, j) is the strength of "i should precede j".
class PriorityGraph {
 public:
  /// Validates and builds a graph. Throws kInvalidArgument naming the offending entry.
  static PriorityGraph create(Matrix omega, double beta);

  [[nodiscard]] int n() const noexcept { return omega_.rows(); }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] double omega(int i, int j) const { return omega_(i, j); }
  [[nodiscard]] const Matrix& omega() const noexcept { return omega_; }
  /// Column j of omega, i.e. omega(., j), stored contiguously.
  [[nodiscard]] std::span<const double> column(int j) const { return omega_t_.row(j); }

  [[nodiscard]] PriorityGraph with_beta(double beta) const;

 private:
  PriorityGraph(Matrix omega, Matrix omega_t, double beta)
      : omega_(std::move(omega)), omega_t_(std::move(omega_t)), beta_(beta) {}

  Matrix omega_;
  Matrix omega_t_;
  double beta_ = 0.0;
};

/// Soft priority as supplied by a caller: either explicit weights or latent scores
/// expanded as lambda_i = exp(-alpha * z_i).
struct SoftPriority {
  struct Latent {
    std::vector<double> z;
    double alpha = 0.0;
  };

  std::optional<std::vector<double>> lambda;
  std::optional<Latent> latent;

  static SoftPriority weights(std::vector<double> lambda);
  static SoftPriority latent_scores(std::vector<double> z, double alpha);
  static SoftPriority uniform(int n);
};

/// Unvalidated parameter bundle as parsed from files or handed over the C API.
struct RawParams {
  Matrix omega;
  double beta = 0.0;
  SoftPriority soft;
};

/// Validated GPASV distribution specification. Immutable; the latent soft-priority
/// form is expanded to lambda at construction.
class GpasvParams {
 public:
  [[nodiscard]] int n() const noexcept { return graph_.n(); }
  [[nodiscard]] const PriorityGraph& graph() const noexcept { return graph_; }
  [[nodiscard]] double beta() const noexcept { return graph_.beta(); }
  [[nodiscard]] double omega(int i, int j) const { return graph_.omega(i, j); }
  [[nodiscard]] std::span<const double> lambda() const noexcept { return lambda_; }
  [[nodiscard]] std::span<const double> log_lambda() const noexcept { return log_lambda_; }
  /// Hash of (n, omega, beta, lambda); batches carry it to detect mismatched reuse.
  [[nodiscard]] std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  [[nodiscard]] GpasvParams with_beta(double beta) const;
  [[nodiscard]] GpasvParams with_lambda(std::vector<double> lambda) const;

  friend GpasvParams validate(const RawParams& raw);
  friend GpasvParams make_params(PriorityGraph graph, std::vector<double> lambda);

 private:
  GpasvParams(PriorityGraph graph, std::vector<double> lambda);

  PriorityGraph graph_;
  std::vector<double> lambda_;
  std::vector<double> log_lambda_;
  std::uint64_t fingerprint_ = 0;
};

GpasvParams validate(const RawParams& raw);
/// Builds params from an already-validated graph; lambda is checked.
GpasvParams make_params(PriorityGraph graph, std::vector<double> lambda);

/// An ordering of the players; construction checks that it is a bijection on [0, n).
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> order);
  static Permutation identity(int n);

  [[nodiscard]] int size() const noexcept { return static_cast<int>(order_.size()); }
  int operator[](int t) const { return order_[static_cast<std::size_t>(t)]; }
  [[nodiscard]] std::span<const int> order() const noexcept { return order_; }
  /// positions()[i] is the 0-based position of player i.
  [[nodiscard]] std::vector<int> positions() const;
  /// Set of players strictly before `player`.
  [[nodiscard]] Mask predecessors(int player) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  struct Trusted {};
  Permutation(std::vector<int> order, Trusted) : order_(std::move(order)) {}
  friend class PermutationBuilder;

  std::vector<int> order_;
};

/// Skips the bijection check for orders produced inside the library.
class PermutationBuilder {
 public:
  static Permutation adopt(std::vector<int> order) {
    return Permutation(std::move(order), Permutation::Trusted{});
  }
};

/// V(k; S) = sum over j in S of omega(k, j).
double stage_violation(const GpasvParams& params, int k, Mask s);

/// V(pi) = sum over i != j of omega(i, j) * [j before i].
double total_violation(const GpasvParams& params, const Permutation& pi);

/// log of the unnormalized stage-wise GPASV mass of `pi`.
double log_unnormalized_pmf(const GpasvParams& params, const Permutation& pi);

struct GscfFactors {
  double choice = 0.0;  ///< conditional probability of placing i last within S
  double state = 0.0;   ///< sum over k in S of exp(-beta V(k; S))
};

/// State/choice factorisation of the stage factor at (i, S). Requires i in S.
GscfFactors gscf_factors(const GpasvParams& params, int i, Mask s);

/// Entrywise exp(-beta * omega); the multiplicative view of the graph.
Matrix to_multiplicative(const PriorityGraph& graph);

/// log zeta(S): log of sum_k lambda_k exp(-beta V(k;S)) / sum_k exp(-beta V(k;S)).
double log_zeta(const GpasvParams& params, Mask s);

}  // namespace gpasv

#endif  // GPASV_PRIORITY_MODEL_HPP

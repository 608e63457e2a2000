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

#ifndef GPASV_ESTIMATORS_HPP
#define GPASV_ESTIMATORS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gpasv/games.hpp"
#include "gpasv/priority_model.hpp"
#include "gpasv/sampler.hpp"

namespace gpasv {

struct EstimateMeta {
  std::int64_t n_samples = 0;  ///< permutations (or residual subsets) that entered the estimate
  std::int64_t n_reused = 0;
  std::int64_t n_fresh = 0;
  double ess = 0.0;
  std::int64_t distinct_evals = -1;  ///< -1 when no cache was attached
  std::uint64_t params_fingerprint = 0;
};

struct ValueEstimate {
  std::vector<double> values;
  std::vector<double> std;  ///< across replicates; empty for a single run
  EstimateMeta meta;
};

/// Delta_i = U(pre(i) + i) - U(pre(i)) along one ordering; n + 1 oracle calls.
std::vector<double> marginal_contributions(const Permutation& pi, const UtilityOracle& oracle);
void marginal_contributions(std::span<const int> order, const UtilityOracle& oracle, std::span<double> out);

/// Row-major N x n table of marginal contributions for a batch.
std::vector<double> delta_table(const SampleBatch& batch, const UtilityOracle& oracle, int threads = 1);
/// sum_m w_m Delta_m / sum_m w_m over a delta table, accumulated in sample order.
std::vector<double> weighted_delta_mean(std::span<const double> table, std::span<const double> weights, int n);

/// Mean marginal contribution over the batch.
ValueEstimate direct_mc(const SampleBatch& batch, const UtilityOracle& oracle, int threads = 1);

/// log p~'(pi) - log p~(pi), shifted so the largest entry is 0.
std::vector<double> snis_log_weights(const GpasvParams& old_params, const GpasvParams& new_params,
                                     const SampleBatch& batch, int threads = 1);
/// exp of snis_log_weights; identical params give all ones.
std::vector<double> snis_weights(const GpasvParams& old_params, const GpasvParams& new_params,
                                 const SampleBatch& batch, int threads = 1);

/// (sum w)^2 / sum w^2.
double ess(std::span<const double> weights);

/// Self-normalized weighted mean of Delta.
ValueEstimate snis_estimate(std::span<const double> weights, const SampleBatch& batch, const UtilityOracle& oracle,
                            int threads = 1);

/// ESS/(ESS + N_new) * SNIS + N_new/(ESS + N_new) * direct MC on the fresh batch.
ValueEstimate hybrid_estimate(std::span<const double> weights, const SampleBatch& reused, const SampleBatch& fresh,
                              const UtilityOracle& oracle, int threads = 1);

/// Per-coordinate mean and sample standard deviation over replicate estimates.
ValueEstimate combine_replicates(const std::vector<ValueEstimate>& replicates);

/// ||estimate - target||_2 / ||target||_2.
double are(std::span<const double> estimate, std::span<const double> target);

/// ARE and distinct evaluations of the running direct estimate every `every` samples.
struct ConvergenceTrace {
  std::vector<std::int64_t> m;
  std::vector<double> are;
  std::vector<std::int64_t> distinct_evals;
  /// Mean of the recorded ARE values.
  [[nodiscard]] double aucc() const;
  [[nodiscard]] double final_are() const { return are.empty() ? 0.0 : are.back(); }
};
ConvergenceTrace direct_mc_trace(const SampleBatch& batch, const CachedOracle& oracle, std::span<const double> target,
                                 std::int64_t every = 100);

// ---------------------------------------------------------------------------
// Subset-coefficient view and the surrogate-adjusted estimator.

struct RhoEntry {
  int player = 0;
  double value = 0.0;
};

/// Empirical signed subset coefficients, the subset proposal built from them, and
/// pairwise-order frequencies, all from utility-free permutations.
class CoefficientEstimates {
 public:
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] std::int64_t m() const noexcept { return m_; }
  /// Observed subsets, ascending by mask.
  [[nodiscard]] std::span<const Mask> support() const noexcept { return support_; }
  [[nodiscard]] std::size_t support_size() const noexcept { return support_.size(); }
  [[nodiscard]] std::optional<std::size_t> find(Mask s) const;
  [[nodiscard]] double q(std::size_t k) const { return q_[k]; }
  [[nodiscard]] std::span<const RhoEntry> rho(std::size_t k) const {
    return {entries_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
  }
  /// Zero outside the support.
  [[nodiscard]] double rho(int player, Mask s) const;
  [[nodiscard]] double q_of(Mask s) const;
  /// sum_i rho_i(S)^2 / q(S)^2 at support index k.
  [[nodiscard]] double wls_weight(std::size_t k) const;
  /// eta(i, j) = estimated P(i precedes j).
  [[nodiscard]] const Matrix& eta() const noexcept { return eta_; }
  void set_eta(Matrix eta);

  /// One draw from the subset proposal.
  [[nodiscard]] Mask sample(Rng& rng) const;

  friend CoefficientEstimates estimate_coefficients(std::span<const Permutation> perms);

 private:
  int n_ = 0;
  std::int64_t m_ = 0;
  std::vector<Mask> support_;
  std::vector<double> q_;
  std::vector<double> cumulative_;
  std::vector<std::size_t> offsets_;
  std::vector<RhoEntry> entries_;
  Matrix eta_;
};

CoefficientEstimates estimate_coefficients(std::span<const Permutation> perms);
inline CoefficientEstimates estimate_coefficients(const SampleBatch& batch) {
  return estimate_coefficients(std::span<const Permutation>(batch.samples));
}

enum class SurrogateKind { kLinear, kQuadratic };

struct Interaction {
  int i = 0;
  int j = 0;
  double b = 0.0;
};

struct FitDiagnostics {
  std::size_t rows = 0;
  std::size_t distinct_rows = 0;
  int parameters = 0;
  int rank = 0;
  double ridge = 0.0;
  bool degenerate = false;
};

/// h(S) = intercept + sum_{k in S} a_k + sum_{(k,l) in I, k,l in S} b_kl.
struct SurrogateModel {
  SurrogateKind kind = SurrogateKind::kLinear;
  double intercept = 0.0;
  std::vector<double> a;
  std::vector<Interaction> interactions;
  FitDiagnostics fit;

  [[nodiscard]] int n() const noexcept { return static_cast<int>(a.size()); }
  [[nodiscard]] double b(int i, int j) const;
  [[nodiscard]] double evaluate(Mask s) const;
};

struct TrainingPoint {
  Mask s = 0;
  double u = 0.0;
};

/// round(fraction * n(n-1)/2) distinct pairs i < j, sampled without replacement.
std::vector<std::pair<int, int>> select_interactions(int n, double fraction, Rng& rng);

/// Weighted least squares with weights sum_i rho_i(S)^2 / q(S)^2 and the intercept
/// pinned. A ridge of 1e-10 times the mean diagonal is always added; rank deficiency is
/// flagged in `fit.degenerate`. Training subsets must lie in the proposal support.
SurrogateModel fit_surrogate(std::span<const TrainingPoint> train, const CoefficientEstimates& coeffs,
                             SurrogateKind kind, std::span<const std::pair<int, int>> interactions,
                             double intercept = 0.0);

/// Value of the surrogate game: a_i + sum_j eta(j, i) b_ij.
std::vector<double> surrogate_gpasv(const SurrogateModel& model, const Matrix& eta);
std::vector<double> surrogate_gpasv(const SurrogateModel& model, const CoefficientEstimates& coeffs);

/// surrogate_gpasv + mean over residual subsets of rho_i(S)/q(S) * (U(S) - h(S)).
ValueEstimate two_stage_estimate(const SurrogateModel& model, const CoefficientEstimates& coeffs,
                                 std::span<const Mask> residual_subsets, const UtilityOracle& oracle);

struct MatchedBudgetConfig {
  double train_fraction = 0.2;
  std::int64_t train_cap = 200000;
  double interaction_fraction = 0.10;
  /// Proposal draws allowed per budgeted distinct evaluation before giving up.
  std::int64_t max_draw_factor = 100;
  std::uint64_t seed = 0;
};

struct MatchedBudgetResult {
  ValueEstimate direct;
  ValueEstimate linear;
  ValueEstimate quadratic;
  std::int64_t k_eval = 0;
  std::int64_t k_train = 0;
  std::int64_t k_adjust = 0;
};

/// Direct MC on `batch` fixes the distinct-evaluation budget K_eval; both surrogates
/// then spend K_train distinct evaluations on fitting and the rest on the residual
/// correction, sharing one cache. `free_perms` only feed the coefficient estimates.
MatchedBudgetResult run_matched_budget(const SampleBatch& batch, std::span<const Permutation> free_perms,
                                       const OraclePtr& oracle, const MatchedBudgetConfig& config);

}  // namespace gpasv

#endif  // GPASV_ESTIMATORS_HPP

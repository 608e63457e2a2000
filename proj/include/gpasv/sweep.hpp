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

#ifndef GPASV_SWEEP_HPP
#define GPASV_SWEEP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpasv/estimators.hpp"
#include "gpasv/games.hpp"
#include "gpasv/priority_model.hpp"

namespace gpasv {

enum class SweepAxis { kAlphaOnly, kBetaOnly, kJoint };

SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

/// One-dimensional walk through (alpha, beta): lambda_i = exp(-alpha * z_i), graph
/// temperature beta. The coordinate not on the axis stays at its fixed value.
struct SweepPlan {
  SweepAxis axis = SweepAxis::kJoint;
  std::vector<double> temps{0, 1, 2, 4, 8, 16, 32};
  Matrix omega;
  std::vector<double> latent;  ///< z >= 0, one per player
  double fixed_alpha = 0.0;
  double fixed_beta = 0.0;
  std::int64_t budget = 1000;
  bool reuse = true;
  std::int64_t refresh_floor = 500;
  std::optional<std::vector<int>> group;
  std::uint64_t seed = 0;
  /// Chain settings for fresh draws; burn-in defaults to ceil(n^2.5) when unset.
  std::optional<std::int64_t> burn_in;
  std::int64_t thinning = 1000;
  double lazy_prob = 0.5;
  int threads = 1;

  [[nodiscard]] int n() const noexcept { return omega.rows(); }
  void check() const;
  /// (alpha, beta) at a temperature.
  [[nodiscard]] std::pair<double, double> coordinates(double temp) const;
  [[nodiscard]] GpasvParams params_at(double temp) const;
};

struct SweepSetting {
  double temp = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t params_fingerprint = 0;
  ValueEstimate estimate;
  double ess_in = 0.0;              ///< ESS of the carried pool under this target (0 at the start)
  std::int64_t n_new = 0;           ///< fresh permutations drawn here
  std::int64_t n_reused = 0;        ///< pool particles reweighted here
  bool full_refresh = true;
  std::int64_t distinct_evals = -1; ///< cumulative; -1 without a cache
  std::int64_t oracle_calls = 0;    ///< cumulative evaluations an uncached run would make
  std::vector<double> mean_position;  ///< per player, 1-indexed, weighted over the pool
};

struct SweepReport {
  SweepAxis axis = SweepAxis::kJoint;
  std::vector<SweepSetting> settings;
  bool complete = true;
  std::string error;
  ErrorKind error_kind = ErrorKind::kInvalidArgument;

  [[nodiscard]] std::int64_t total_fresh() const;
};

/// Runs the settings in order, reweighting the carried pool into each new target and
/// topping it up with min(N, max(floor, ceil(N - ESS))) fresh draws. A top-up of N (or
/// reuse off) is a full refresh: plain direct MC and a new pool. Oracle failures stop
/// the walk and return the settings finished so far with `complete = false`.
SweepReport run_sweep(const SweepPlan& plan, const UtilityOracle& oracle);

/// Alpha-only, beta-only and joint slices from the shared (0, 0) baseline.
struct ThreeSliceReport {
  SweepReport alpha;
  SweepReport beta;
  SweepReport joint;
  /// Fresh permutations over all slices with the shared baseline counted once.
  [[nodiscard]] std::int64_t total_fresh() const;
};
ThreeSliceReport run_three_slices(const SweepPlan& base, const UtilityOracle& oracle);

struct GroupPoint {
  double temp = 0.0;
  double group_sum = 0.0;
  double mean_position = 0.0;
};

std::vector<GroupPoint> group_summary(const SweepReport& report, const std::vector<int>& group);

}  // namespace gpasv

#endif  // GPASV_SWEEP_HPP

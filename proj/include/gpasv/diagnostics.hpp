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

#ifndef GPASV_DIAGNOSTICS_HPP
#define GPASV_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpasv/exact.hpp"
#include "gpasv/priority_model.hpp"
#include "gpasv/sampler.hpp"

namespace gpasv {

/// max over i != j of |empirical(i, j) - reference(i, j)|.
double pairwise_deviation(const PairwiseMatrix& empirical, const PairwiseMatrix& reference);

/// Fraction of orderings with i before j.
PairwiseMatrix empirical_pairwise(std::span<const Permutation> perms);

enum class InitScheme { kGreedy, kRandom };
InitScheme parse_init_scheme(const std::string& name);
std::string to_string(InitScheme init);

struct MixingConfig {
  int n_chains = 1000;
  double epsilon = 0.25;
  double guard = 0.02;
  InitScheme init = InitScheme::kGreedy;
  std::uint64_t seed = 0;
  double lazy_prob = 0.5;
  int threads = 1;
  /// Keep evaluating checkpoints up to the horizon after the crossing.
  bool full_curve = false;
  /// Defaults to ceil(n^3 ln n).
  std::optional<std::int64_t> horizon;
};

struct MixingPoint {
  std::int64_t t = 0;
  double deviation = 0.0;
};

struct MixingResult {
  /// First certified step with deviation <= epsilon - guard; empty when not mixed.
  std::optional<std::int64_t> crossing;
  std::vector<MixingPoint> checkpoints;
  std::vector<MixingPoint> probes;
  std::int64_t horizon = 0;
  Permutation start;
};

/// ceil(n^3 ln n), at least 1.
std::int64_t mixing_horizon(int n);

/// All chains share one start (greedy or uniform, drawn from the seed) and use
/// independent seeds. Deviation is measured at doubling checkpoints; the first crossing
/// is localized by binary search, re-running fresh chains from the start at each probe.
MixingResult practical_mixing_time(const GpasvParams& params, const PairwiseMatrix& reference,
                                   const MixingConfig& config);
/// Same, with the reference from the exact dynamic program (n <= 24).
MixingResult practical_mixing_time(const GpasvParams& params, const MixingConfig& config);

}  // namespace gpasv

#endif  // GPASV_DIAGNOSTICS_HPP

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

#ifndef GPASV_SAMPLER_HPP
#define GPASV_SAMPLER_HPP

#include <cstdint>
#include <vector>

#include "gpasv/common.hpp"
#include "gpasv/priority_model.hpp"

namespace gpasv {

/// Settings of the lazy adjacent-swap Metropolis-Hastings chain.
struct ChainConfig {
  std::int64_t burn_in = 0;
  std::int64_t thinning = 1000;
  double lazy_prob = 0.5;
  std::int64_t n_samples = 1000;
  std::uint64_t seed = 0;

  /// burn-in ceil(n^2.5), thinning 1000, lazy probability 1/2.
  static ChainConfig defaults(int n, std::int64_t n_samples, std::uint64_t seed);
  void check() const;
  /// Total number of chain iterations, B + tau * (N - 1) + 1.
  [[nodiscard]] std::int64_t total_steps() const { return burn_in + thinning * (n_samples - 1) + 1; }
};

enum class Provenance : std::uint8_t { kFresh, kReused };

/// Draws from one target distribution, tagged with the fingerprint of its params.
struct SampleBatch {
  std::uint64_t params_fingerprint = 0;
  int n = 0;
  std::vector<Permutation> samples;
  std::vector<Provenance> provenance;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
  void push_back(Permutation pi, Provenance tag) {
    samples.push_back(std::move(pi));
    provenance.push_back(tag);
  }
};

/// Backward stage-wise construction: position n first, each player drawn with
/// probability proportional to lambda_i * exp(-beta V(i; R)) over the remaining set R.
Permutation greedy_init(const GpasvParams& params, Rng& rng);

/// Uniformly random permutation (Fisher-Yates).
Permutation uniform_permutation(int n, Rng& rng);

/// Exact iid draw at beta = 0 (Plackett-Luce with worths lambda). Rejects beta > 0.
Permutation exact_backward_sample(const GpasvParams& params, Rng& rng);

/// log p(pi') - log p(pi) for the swap of positions (i, i + 1), via the local ratio
/// exp(-beta (w_ab - w_ba)) * zeta(S_i) / zeta(S_i').
double swap_log_ratio(const GpasvParams& params, const Permutation& pi, int i);

/// One adjacent-swap chain with per-prefix violation rows cached, so a proposal
/// costs O(n) regardless of which position is swapped.
class MhChain {
 public:
  MhChain(const GpasvParams& params, const Permutation& start, double lazy_prob);

  /// One lazy iteration.
  void step(Rng& rng);
  void advance(std::int64_t steps, Rng& rng) {
    for (std::int64_t s = 0; s < steps; ++s) step(rng);
  }

  [[nodiscard]] std::span<const int> order() const noexcept { return order_; }
  [[nodiscard]] Permutation permutation() const { return PermutationBuilder::adopt(order_); }
  /// Local log ratio for swapping positions (pos, pos + 1) of the current state.
  [[nodiscard]] double proposal_log_ratio(int pos) const;
  [[nodiscard]] std::int64_t accepted() const noexcept { return accepted_; }
  [[nodiscard]] std::int64_t proposed() const noexcept { return proposed_; }

 private:
  double candidate_log_zeta(int pos, std::vector<double>& row) const;

  const GpasvParams* params_;
  int n_;
  double lazy_prob_;
  std::vector<int> order_;
  std::vector<double> rows_;      // (n + 1) x n: rows_[L][k] = V(k; first L players)
  std::vector<double> log_zeta_;  // log zeta of each prefix, indexed by length
  mutable std::vector<double> scratch_;
  std::int64_t accepted_ = 0;
  std::int64_t proposed_ = 0;
};

/// Runs one chain and collects samples at iterations B+1, B+1+tau, ...
/// Dispatches to exact_backward_sample when beta = 0.
SampleBatch run_chain(const GpasvParams& params, const ChainConfig& config, Rng& rng);
SampleBatch run_chain(const GpasvParams& params, const ChainConfig& config);

/// Independent chains with seeds derived from (config.seed, chain index).
std::vector<SampleBatch> run_chains(const GpasvParams& params, const ChainConfig& config,
                                    int n_chains, int threads = 1);

/// Concatenates batches drawn under the same params.
SampleBatch merge_batches(const std::vector<SampleBatch>& batches);

}  // namespace gpasv

#endif  // GPASV_SAMPLER_HPP

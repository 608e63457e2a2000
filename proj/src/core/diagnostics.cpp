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

#include "gpasv/diagnostics.hpp"

#include <cmath>

#include "gpasv/parallel.hpp"

namespace gpasv {
namespace {

class ChainEnsemble {
 public:
  ChainEnsemble(const GpasvParams& params, const Permutation& start, const MixingConfig& config, std::uint64_t seed)
      : threads_(config.threads) {
    chains_.reserve(static_cast<std::size_t>(config.n_chains));
    rngs_.reserve(static_cast<std::size_t>(config.n_chains));
    for (int c = 0; c < config.n_chains; ++c) {
      chains_.emplace_back(params, start, config.lazy_prob);
      rngs_.emplace_back(derive_seed(seed, static_cast<std::uint64_t>(c)));
    }
  }

  void advance(std::int64_t steps) {
    parallel_for(chains_.size(), threads_, [&](std::size_t c) { chains_[c].advance(steps, rngs_[c]); });
  }

  [[nodiscard]] PairwiseMatrix pairwise() const {
    std::vector<Permutation> states;
    states.reserve(chains_.size());
    for (const auto& ch : chains_) states.push_back(ch.permutation());
    return empirical_pairwise(states);
  }

 private:
  int threads_;
  std::vector<MhChain> chains_;
  std::vector<Rng> rngs_;
};

}  // namespace

double pairwise_deviation(const PairwiseMatrix& empirical, const PairwiseMatrix& reference) {
  const int n = empirical.p.rows();
  require(n == reference.p.rows() && empirical.p.cols() == n && reference.p.cols() == n,
          "dimension mismatch between pairwise matrices");
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) d = std::max(d, std::abs(empirical.p(i, j) - reference.p(i, j)));
    }
  }
  return d;
}

PairwiseMatrix empirical_pairwise(std::span<const Permutation> perms) {
  require(!perms.empty(), "no permutations");
  const int n = perms.front().size();
  std::vector<std::int64_t> count(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  for (const auto& pi : perms) {
    require(pi.size() == n, "permutations of different sizes");
    const auto o = pi.order();
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) ++count[static_cast<std::size_t>(o[static_cast<std::size_t>(a)]) * n + o[static_cast<std::size_t>(b)]];
    }
  }
  PairwiseMatrix out{Matrix(n, n), 0.0};
  const double inv = 1.0 / static_cast<double>(perms.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.p(i, j) = static_cast<double>(count[static_cast<std::size_t>(i) * n + j]) * inv;
  }
  return out;
}

InitScheme parse_init_scheme(const std::string& name) {
  if (name == "greedy") return InitScheme::kGreedy;
  if (name == "random") return InitScheme::kRandom;
  fail(ErrorKind::kInvalidArgument, "unknown init scheme `" + name + "` (expected greedy or random)");
}

std::string to_string(InitScheme init) { return init == InitScheme::kGreedy ? "greedy" : "random"; }

std::int64_t mixing_horizon(int n) {
  const double nd = n;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(nd * nd * nd * std::log(nd))));
}

MixingResult practical_mixing_time(const GpasvParams& params, const PairwiseMatrix& reference,
                                   const MixingConfig& config) {
  const int n = params.n();
  require(reference.p.rows() == n, "reference matrix does not match the player count");
  require(config.n_chains >= 1, "need at least one chain");
  require(config.guard >= 0.0 && config.epsilon > config.guard, "threshold must exceed the guard band");
  require(config.lazy_prob >= 0.0 && config.lazy_prob < 1.0, "lazy probability must lie in [0, 1)");
  const double threshold = config.epsilon - config.guard;

  MixingResult out;
  out.horizon = config.horizon.value_or(mixing_horizon(n));
  require(out.horizon >= 1, "horizon must be positive");
  Rng init_rng(derive_seed(config.seed, 0));
  out.start = config.init == InitScheme::kGreedy ? greedy_init(params, init_rng) : uniform_permutation(n, init_rng);

  ChainEnsemble main(params, out.start, config, derive_seed(config.seed, 1));
  std::int64_t t = 0;
  std::int64_t last_miss = 0;
  std::optional<std::int64_t> first_hit;
  for (std::int64_t next = 1;; next = std::min(next * 2, out.horizon)) {
    main.advance(next - t);
    t = next;
    const double d = pairwise_deviation(main.pairwise(), reference);
    out.checkpoints.push_back({t, d});
    if (!first_hit) {
      if (d <= threshold) first_hit = t;
      else last_miss = t;
    }
    if ((first_hit && !config.full_curve) || t == out.horizon) break;
  }
  if (!first_hit) return out;

  std::int64_t lo = last_miss;
  std::int64_t hi = *first_hit;
  std::uint64_t probe = 0;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    ChainEnsemble replay(params, out.start, config, derive_seed(config.seed, 2 + probe++));
    replay.advance(mid);
    const double d = pairwise_deviation(replay.pairwise(), reference);
    out.probes.push_back({mid, d});
    // Anything above the certified threshold, including the guard band, counts as not crossed.
    if (d <= threshold) hi = mid;
    else lo = mid;
  }
  out.crossing = hi;
  return out;
}

MixingResult practical_mixing_time(const GpasvParams& params, const MixingConfig& config) {
  return practical_mixing_time(params, dp_pairwise_probs(params), config);
}

}  // namespace gpasv

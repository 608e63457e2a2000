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

#include "gpasv/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gpasv/parallel.hpp"

namespace gpasv {

ChainConfig ChainConfig::defaults(int n, std::int64_t n_samples, std::uint64_t seed) {
  ChainConfig c;
  c.burn_in = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(n), 2.5)));
  c.thinning = 1000;
  c.lazy_prob = 0.5;
  c.n_samples = n_samples;
  c.seed = seed;
  return c;
}

void ChainConfig::check() const {
  require(burn_in >= 0, "burn-in must be non-negative");
  require(thinning >= 1, "thinning must be at least 1");
  require(lazy_prob >= 0.0 && lazy_prob < 1.0, "lazy probability must lie in [0, 1)");
  require(n_samples >= 1, "sample count must be positive");
}

Permutation greedy_init(const GpasvParams& params, Rng& rng) {
  const int n = params.n();
  const double beta = params.beta();
  const auto lambda = params.lambda();
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);  // V(i; R)
  for (int i = 0; i < n; ++i) {
    const auto row = params.graph().omega().row(i);
    v[static_cast<std::size_t>(i)] = std::accumulate(row.begin(), row.end(), 0.0);
  }
  std::vector<int> remaining(static_cast<std::size_t>(n));
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int t = n - 1; t >= 0; --t) {
    const std::size_t m = remaining.size();
    double vmin = v[static_cast<std::size_t>(remaining[0])];
    for (int k : remaining) vmin = std::min(vmin, v[static_cast<std::size_t>(k)]);
    double total = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const int k = remaining[r];
      w[r] = lambda[static_cast<std::size_t>(k)] * std::exp(-beta * (v[static_cast<std::size_t>(k)] - vmin));
      total += w[r];
    }
    const double u = rng.uniform() * total;
    std::size_t pick = m - 1;
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      acc += w[r];
      if (u < acc) {
        pick = r;
        break;
      }
    }
    const int chosen = remaining[pick];
    order[static_cast<std::size_t>(t)] = chosen;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    const auto col = params.graph().column(chosen);
    for (int k : remaining) v[static_cast<std::size_t>(k)] -= col[static_cast<std::size_t>(k)];
  }
  return PermutationBuilder::adopt(std::move(order));
}

Permutation uniform_permutation(int n, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = rng.below(static_cast<std::size_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[j]);
  }
  return PermutationBuilder::adopt(std::move(order));
}

Permutation exact_backward_sample(const GpasvParams& params, Rng& rng) {
  require(params.beta() == 0.0,
          "exact backward sampling requires beta = 0 (the state factor depends on the prefix otherwise)");
  return greedy_init(params, rng);
}

double swap_log_ratio(const GpasvParams& params, const Permutation& pi, int i) {
  const int n = params.n();
  require(pi.size() == n, "permutation length does not match player count");
  require(i >= 0 && i < n - 1, "swap position " + std::to_string(i) + " out of range");
  Mask prefix = 0;
  for (int t = 0; t < i; ++t) prefix |= bit(pi[t]);
  const int a = pi[i];
  const int b = pi[i + 1];
  return -params.beta() * (params.omega(a, b) - params.omega(b, a)) + log_zeta(params, prefix | bit(a)) -
         log_zeta(params, prefix | bit(b));
}

MhChain::MhChain(const GpasvParams& params, const Permutation& start, double lazy_prob)
    : params_(&params), n_(params.n()), lazy_prob_(lazy_prob) {
  require(start.size() == n_, "start permutation length does not match player count");
  require(lazy_prob >= 0.0 && lazy_prob < 1.0, "lazy probability must lie in [0, 1)");
  order_.assign(start.order().begin(), start.order().end());
  const auto nn = static_cast<std::size_t>(n_);
  rows_.assign((nn + 1) * nn, 0.0);
  log_zeta_.assign(nn + 1, 0.0);
  scratch_.resize(nn);
  for (int len = 1; len <= n_; ++len) {
    const auto col = params.graph().column(order_[static_cast<std::size_t>(len - 1)]);
    double* row = &rows_[static_cast<std::size_t>(len) * nn];
    const double* prev = &rows_[static_cast<std::size_t>(len - 1) * nn];
    for (std::size_t k = 0; k < nn; ++k) row[k] = prev[k] + col[k];
  }
  for (int len = 1; len <= n_; ++len) {
    Mask s = 0;
    for (int t = 0; t < len; ++t) s |= bit(order_[static_cast<std::size_t>(t)]);
    log_zeta_[static_cast<std::size_t>(len)] = log_zeta(params, s);
  }
}

double MhChain::candidate_log_zeta(int pos, std::vector<double>& row) const {
  // Prefix of length pos + 1 with order_[pos + 1] in place of order_[pos].
  const auto nn = static_cast<std::size_t>(n_);
  const int b = order_[static_cast<std::size_t>(pos) + 1];
  const auto col = params_->graph().column(b);
  const double* prev = &rows_[static_cast<std::size_t>(pos) * nn];
  for (std::size_t k = 0; k < nn; ++k) row[k] = prev[k] + col[k];
  const auto lambda = params_->lambda();
  const double beta = params_->beta();
  double vmin = row[static_cast<std::size_t>(b)];
  for (int t = 0; t < pos; ++t) vmin = std::min(vmin, row[static_cast<std::size_t>(order_[static_cast<std::size_t>(t)])]);
  double weighted = 0.0;
  double plain = 0.0;
  auto add = [&](int k) {
    const double e = std::exp(-beta * (row[static_cast<std::size_t>(k)] - vmin));
    plain += e;
    weighted += lambda[static_cast<std::size_t>(k)] * e;
  };
  for (int t = 0; t < pos; ++t) add(order_[static_cast<std::size_t>(t)]);
  add(b);
  return std::log(weighted) - std::log(plain);
}

double MhChain::proposal_log_ratio(int pos) const {
  const int a = order_[static_cast<std::size_t>(pos)];
  const int b = order_[static_cast<std::size_t>(pos) + 1];
  const double lz = candidate_log_zeta(pos, scratch_);
  return -params_->beta() * (params_->omega(a, b) - params_->omega(b, a)) +
         log_zeta_[static_cast<std::size_t>(pos) + 1] - lz;
}

void MhChain::step(Rng& rng) {
  if (n_ < 2) return;
  if (rng.uniform() < lazy_prob_) return;
  const int pos = static_cast<int>(rng.below(static_cast<std::size_t>(n_ - 1)));
  ++proposed_;
  const int a = order_[static_cast<std::size_t>(pos)];
  const int b = order_[static_cast<std::size_t>(pos) + 1];
  const double lz = candidate_log_zeta(pos, scratch_);
  const double ratio = -params_->beta() * (params_->omega(a, b) - params_->omega(b, a)) +
                       log_zeta_[static_cast<std::size_t>(pos) + 1] - lz;
  if (ratio >= 0.0 || std::log(rng.uniform_open()) < ratio) {
    ++accepted_;
    std::swap(order_[static_cast<std::size_t>(pos)], order_[static_cast<std::size_t>(pos) + 1]);
    const auto nn = static_cast<std::size_t>(n_);
    std::copy(scratch_.begin(), scratch_.end(), rows_.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(pos) + 1) * nn));
    log_zeta_[static_cast<std::size_t>(pos) + 1] = lz;
  }
}

SampleBatch run_chain(const GpasvParams& params, const ChainConfig& config, Rng& rng) {
  config.check();
  SampleBatch batch;
  batch.params_fingerprint = params.fingerprint();
  batch.n = params.n();
  batch.samples.reserve(static_cast<std::size_t>(config.n_samples));
  batch.provenance.reserve(static_cast<std::size_t>(config.n_samples));
  if (params.beta() == 0.0) {
    for (std::int64_t m = 0; m < config.n_samples; ++m) batch.push_back(exact_backward_sample(params, rng), Provenance::kFresh);
    return batch;
  }
  MhChain chain(params, greedy_init(params, rng), config.lazy_prob);
  const std::int64_t total = config.total_steps();
  for (std::int64_t t = 1; t <= total; ++t) {
    chain.step(rng);
    if (t > config.burn_in && (t - config.burn_in - 1) % config.thinning == 0) {
      batch.push_back(chain.permutation(), Provenance::kFresh);
    }
  }
  return batch;
}

SampleBatch run_chain(const GpasvParams& params, const ChainConfig& config) {
  Rng rng(config.seed);
  return run_chain(params, config, rng);
}

std::vector<SampleBatch> run_chains(const GpasvParams& params, const ChainConfig& config, int n_chains,
                                    int threads) {
  require(n_chains >= 1, "chain count must be positive");
  std::vector<SampleBatch> out(static_cast<std::size_t>(n_chains));
  parallel_for(out.size(), threads, [&](std::size_t c) {
    Rng rng(derive_seed(config.seed, c));
    out[c] = run_chain(params, config, rng);
  });
  return out;
}

SampleBatch merge_batches(const std::vector<SampleBatch>& batches) {
  SampleBatch merged;
  for (const auto& b : batches) {
    if (merged.n == 0) {
      merged.n = b.n;
      merged.params_fingerprint = b.params_fingerprint;
    }
    require(b.params_fingerprint == merged.params_fingerprint, "cannot merge batches drawn under different params");
    merged.samples.insert(merged.samples.end(), b.samples.begin(), b.samples.end());
    merged.provenance.insert(merged.provenance.end(), b.provenance.begin(), b.provenance.end());
  }
  return merged;
}

}  // namespace gpasv

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

#include "gpasv/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gpasv {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void guard(int n, int limit, const char* what) {
  require(n >= 1, "player count must be positive");
  if (n > limit) {
    fail(ErrorKind::kLimitExceeded, std::string(what) + " supports at most " + std::to_string(limit) +
                                        " players, got " + std::to_string(n));
  }
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

/// Fills log_stage[i] = log l(i; s) for every member i of s; other entries untouched.
class StageFactors {
 public:
  explicit StageFactors(const GpasvParams& params)
      : params_(params), n_(params.n()), members_(n_), viol_(n_), a_(n_), b_(n_), log_stage_(n_) {}

  /// Returns the member list; log_stage(k) aligns with it.
  std::span<const int> compute(Mask s) {
    std::size_t m = 0;
    for_each_member(s, [&](int k) { members_[m++] = k; });
    const double beta = params_.beta();
    const auto loglam = params_.log_lambda();
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < m; ++a) {
      const auto row = params_.graph().omega().row(members_[a]);
      double v = 0.0;
      for (std::size_t b = 0; b < m; ++b) v += row[static_cast<std::size_t>(members_[b])];
      viol_[a] = -beta * v;
      vmin = std::min(vmin, v);
    }
    // log zeta = LSE(log lambda - beta V) - LSE(-beta V)
    for (std::size_t a = 0; a < m; ++a) {
      a_[a] = loglam[static_cast<std::size_t>(members_[a])] + viol_[a];
      b_[a] = viol_[a];
    }
    const double log_zeta = log_sum_exp(std::span<const double>(a_.data(), m)) -
                            log_sum_exp(std::span<const double>(b_.data(), m));
    for (std::size_t a = 0; a < m; ++a) log_stage_[a] = a_[a] - log_zeta;
    return {members_.data(), m};
  }
  [[nodiscard]] double log_stage(std::size_t a) const { return log_stage_[a]; }

 private:
  const GpasvParams& params_;
  int n_;
  std::vector<int> members_;
  std::vector<double> viol_, a_, b_, log_stage_;
};

std::vector<double> forward_table(const GpasvParams& params) {
  const int n = params.n();
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> log_a(size, kNegInf);
  log_a[0] = 0.0;
  StageFactors stage(params);
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (Mask s = 1; s < size; ++s) {
    const auto members = stage.compute(s);
    for (std::size_t a = 0; a < members.size(); ++a) {
      terms[a] = log_a[s & ~bit(members[a])] + stage.log_stage(a);
    }
    log_a[s] = log_sum_exp(std::span<const double>(terms.data(), members.size()));
  }
  return log_a;
}

}  // namespace

Permutation EnumeratedPmf::permutation(std::size_t k) const {
  const auto o = order(k);
  return PermutationBuilder::adopt(std::vector<int>(o.begin(), o.end()));
}

double EnumeratedPmf::prob_of(const Permutation& pi) const {
  require(pi.size() == n_, "permutation size does not match the enumerated distribution");
  std::size_t lo = 0, hi = size();
  const auto key = pi.order();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto o = order(mid);
    const bool less = std::lexicographical_compare(o.begin(), o.end(), key.begin(), key.end(),
                                                   [](int a, int b) { return a < b; });
    if (less) lo = mid + 1; else hi = mid;
  }
  return prob_[lo];
}

EnumeratedPmf enumerate_pmf(const GpasvParams& params) {
  const int n = params.n();
  guard(n, kMaxEnumeratePlayers, "enumeration");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  EnumeratedPmf pmf;
  pmf.n_ = n;
  std::size_t count = 1;
  for (int k = 2; k <= n; ++k) count *= static_cast<std::size_t>(k);
  pmf.orders_.reserve(count * static_cast<std::size_t>(n));
  pmf.prob_.reserve(count);
  do {
    const Permutation pi = PermutationBuilder::adopt(order);
    pmf.prob_.push_back(log_unnormalized_pmf(params, pi));
    for (int v : order) pmf.orders_.push_back(static_cast<std::int8_t>(v));
  } while (std::next_permutation(order.begin(), order.end()));
  pmf.log_z_ = log_sum_exp(pmf.prob_);
  for (double& p : pmf.prob_) p = std::exp(p - pmf.log_z_);
  return pmf;
}

std::vector<double> exact_value(const EnumeratedPmf& pmf, const UtilityOracle& oracle) {
  const int n = pmf.n();
  require(oracle.n() == n, "oracle player count does not match the distribution");
  std::vector<double> u(std::size_t{1} << n);
  for (Mask s = 0; s < u.size(); ++s) u[s] = oracle.evaluate(s);
  std::vector<double> psi(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double p = pmf.prob(k);
    Mask s = 0;
    for (const int i : pmf.order(k)) {
      const Mask next = s | bit(i);
      psi[static_cast<std::size_t>(i)] += p * (u[next] - u[s]);
      s = next;
    }
  }
  return psi;
}

std::vector<double> exact_value(const GpasvParams& params, const UtilityOracle& oracle) {
  return exact_value(enumerate_pmf(params), oracle);
}

PairwiseMatrix pairwise_from_pmf(const EnumeratedPmf& pmf) {
  const int n = pmf.n();
  PairwiseMatrix out{Matrix(n, n), 0.0};
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double p = pmf.prob(k);
    const auto o = pmf.order(k);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) out.p(o[static_cast<std::size_t>(a)], o[static_cast<std::size_t>(b)]) += p;
    }
  }
  return out;
}

PairwiseMatrix dp_pairwise_probs(const GpasvParams& params) {
  const int n = params.n();
  guard(n, kMaxDpPlayers, "pairwise dynamic program");
  const std::vector<double> log_a = forward_table(params);
  const Mask all = full_mask(n);
  const double log_z = log_a[all];

  std::vector<double> log_b(log_a.size(), kNegInf);
  log_b[all] = 0.0;
  Matrix p(n, n);
  StageFactors stage(params);
  // Decreasing order: every superset of s is finished before s is read.
  for (Mask t = all; t != 0; --t) {
    const double lb = log_b[t];
    const auto members = stage.compute(t);
    for (std::size_t a = 0; a < members.size(); ++a) {
      const int j = members[a];
      const Mask prefix = t & ~bit(j);
      const double step = stage.log_stage(a) + lb;
      log_b[prefix] = log_add(log_b[prefix], step);
      // Mass of orderings that place j right after `prefix`.
      const double w = std::exp(log_a[prefix] + step - log_z);
      if (w == 0.0) continue;
      for_each_member(prefix, [&](int i) { p(i, j) += w; });
    }
  }
  PairwiseMatrix out{std::move(p), 0.0};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double sum = out.p(i, j) + out.p(j, i);
      out.max_asymmetry = std::max(out.max_asymmetry, std::abs(sum - 1.0));
      out.p(i, j) /= sum;
      out.p(j, i) = 1.0 - out.p(i, j);
    }
  }
  return out;
}

double dp_normalizer(const GpasvParams& params) {
  guard(params.n(), kMaxDpPlayers, "pairwise dynamic program");
  return forward_table(params)[full_mask(params.n())];
}

}  // namespace gpasv

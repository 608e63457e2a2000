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

#include "gpasv/priority_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

namespace gpasv {
namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string pair_str(int i, int j) {
  std::ostringstream os;
  os << "(" << i << ", " << j << ")";
  return os.str();
}

void check_lambda(const std::vector<double>& lambda, int n) {
  require(static_cast<int>(lambda.size()) == n,
          "dimension mismatch: soft priority has " + std::to_string(lambda.size()) +
              " entries, graph has " + std::to_string(n) + " players");
  for (int i = 0; i < n; ++i) {
    if (!(lambda[static_cast<std::size_t>(i)] > 0.0) ||
        !std::isfinite(lambda[static_cast<std::size_t>(i)])) {
      fail(ErrorKind::kInvalidArgument, "non-positive soft priority at index " + std::to_string(i));
    }
  }
}

}  // namespace

PriorityGraph PriorityGraph::create(Matrix omega, double beta) {
  const int n = omega.rows();
  require(n >= 1, "player count must be positive");
  require(n <= kMaxPlayers, "player count " + std::to_string(n) + " exceeds the limit of " +
                                std::to_string(kMaxPlayers));
  require(omega.cols() == n, "dimension mismatch: omega is " + std::to_string(omega.rows()) + "x" +
                                 std::to_string(omega.cols()));
  require(std::isfinite(beta) && beta >= 0.0, "beta must be a finite non-negative number");
  Matrix omega_t(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = omega(i, j);
      if (i == j && w != 0.0) {
        fail(ErrorKind::kInvalidArgument, "nonzero diagonal at index " + std::to_string(i));
      }
      if (!std::isfinite(w)) {
        fail(ErrorKind::kInvalidArgument, "non-finite edge weight at " + pair_str(i, j));
      }
      if (w < 0.0) fail(ErrorKind::kInvalidArgument, "negative edge weight at " + pair_str(i, j));
      omega_t(j, i) = w;
    }
  }
  return PriorityGraph(std::move(omega), std::move(omega_t), beta);
}

PriorityGraph PriorityGraph::with_beta(double beta) const {
  require(std::isfinite(beta) && beta >= 0.0, "beta must be a finite non-negative number");
  PriorityGraph g = *this;
  g.beta_ = beta;
  return g;
}

SoftPriority SoftPriority::weights(std::vector<double> lambda) {
  SoftPriority s;
  s.lambda = std::move(lambda);
  return s;
}

SoftPriority SoftPriority::latent_scores(std::vector<double> z, double alpha) {
  SoftPriority s;
  s.latent = Latent{std::move(z), alpha};
  return s;
}

SoftPriority SoftPriority::uniform(int n) {
  return weights(std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

GpasvParams::GpasvParams(PriorityGraph graph, std::vector<double> lambda)
    : graph_(std::move(graph)), lambda_(std::move(lambda)) {
  const int n = graph_.n();
  check_lambda(lambda_, n);
  log_lambda_.resize(lambda_.size());
  std::transform(lambda_.begin(), lambda_.end(), log_lambda_.begin(),
                 [](double l) { return std::log(l); });
  std::uint64_t h = 0xCBF29CE484222325ULL;
  h = fnv1a(h, &n, sizeof n);
  const double beta = graph_.beta();
  h = fnv1a(h, &beta, sizeof beta);
  h = fnv1a(h, graph_.omega().data().data(), graph_.omega().data().size() * sizeof(double));
  h = fnv1a(h, lambda_.data(), lambda_.size() * sizeof(double));
  fingerprint_ = h;
}

GpasvParams GpasvParams::with_beta(double beta) const {
  return GpasvParams(graph_.with_beta(beta), lambda_);
}

GpasvParams GpasvParams::with_lambda(std::vector<double> lambda) const {
  return GpasvParams(graph_, std::move(lambda));
}

GpasvParams make_params(PriorityGraph graph, std::vector<double> lambda) {
  return GpasvParams(std::move(graph), std::move(lambda));
}

GpasvParams validate(const RawParams& raw) {
  PriorityGraph graph = PriorityGraph::create(raw.omega, raw.beta);
  const int n = graph.n();
  const bool has_lambda = raw.soft.lambda.has_value();
  const bool has_latent = raw.soft.latent.has_value();
  require(has_lambda != has_latent, "exactly one of lambda or latent soft priority must be given");
  if (has_lambda) return GpasvParams(std::move(graph), *raw.soft.lambda);

  const auto& latent = *raw.soft.latent;
  require(static_cast<int>(latent.z.size()) == n,
          "dimension mismatch: latent scores have " + std::to_string(latent.z.size()) +
              " entries, graph has " + std::to_string(n) + " players");
  require(std::isfinite(latent.alpha) && latent.alpha >= 0.0,
          "alpha must be a finite non-negative number");
  std::vector<double> lambda(latent.z.size());
  for (std::size_t i = 0; i < latent.z.size(); ++i) {
    if (!(latent.z[i] >= 0.0) || !std::isfinite(latent.z[i])) {
      fail(ErrorKind::kInvalidArgument, "negative latent score at index " + std::to_string(i));
    }
    lambda[i] = latent.alpha == 0.0 ? 1.0 : std::exp(-latent.alpha * latent.z[i]);
  }
  return GpasvParams(std::move(graph), std::move(lambda));
}

Permutation::Permutation(std::vector<int> order) : order_(std::move(order)) {
  const int n = static_cast<int>(order_.size());
  require(n >= 1 && n <= kMaxPlayers, "permutation length " + std::to_string(n) + " out of range");
  Mask seen = 0;
  for (int t = 0; t < n; ++t) {
    const int p = order_[static_cast<std::size_t>(t)];
    require(p >= 0 && p < n, "permutation entry " + std::to_string(p) + " out of range at position " +
                                 std::to_string(t));
    require(!contains(seen, p), "player " + std::to_string(p) + " repeated in permutation");
    seen |= bit(p);
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  return Permutation(std::move(order));
}

std::vector<int> Permutation::positions() const {
  std::vector<int> pos(order_.size());
  for (std::size_t t = 0; t < order_.size(); ++t) pos[static_cast<std::size_t>(order_[t])] = static_cast<int>(t);
  return pos;
}

Mask Permutation::predecessors(int player) const {
  Mask s = 0;
  for (int p : order_) {
    if (p == player) return s;
    s |= bit(p);
  }
  fail(ErrorKind::kInvalidArgument, "player " + std::to_string(player) + " not in permutation");
}

double stage_violation(const GpasvParams& params, int k, Mask s) {
  require(k >= 0 && k < params.n(), "player " + std::to_string(k) + " out of range");
  require((s & ~full_mask(params.n())) == 0, "subset contains a player out of range");
  double v = 0.0;
  for_each_member(s, [&](int j) { v += params.omega(k, j); });
  return v;
}

double total_violation(const GpasvParams& params, const Permutation& pi) {
  require(pi.size() == params.n(), "permutation length does not match player count");
  double v = 0.0;
  const auto order = pi.order();
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      // order[a] is before order[b]: the edge order[b] -> order[a] is violated.
      v += params.omega(order[b], order[a]);
    }
  }
  return v;
}

double log_unnormalized_pmf(const GpasvParams& params, const Permutation& pi) {
  const int n = params.n();
  require(pi.size() == n, "permutation length does not match player count");
  const double beta = params.beta();
  const auto log_lambda = params.log_lambda();
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);  // V(k; S_t) for every k
  std::vector<double> weighted(static_cast<std::size_t>(n));
  std::vector<double> plain(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int t = 0; t < n; ++t) {
    const int placed = pi[t];
    const auto col = params.graph().column(placed);
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] += col[static_cast<std::size_t>(k)];
    for (int u = 0; u <= t; ++u) {
      const int k = pi[u];
      const double e = -beta * v[static_cast<std::size_t>(k)];
      plain[static_cast<std::size_t>(u)] = e;
      weighted[static_cast<std::size_t>(u)] = log_lambda[static_cast<std::size_t>(k)] + e;
    }
    const auto len = static_cast<std::size_t>(t + 1);
    total += log_lambda[static_cast<std::size_t>(placed)] - beta * v[static_cast<std::size_t>(placed)] -
             log_sum_exp({weighted.data(), len}) + log_sum_exp({plain.data(), len});
  }
  return total;
}

namespace {

struct StageSums {
  double log_weighted = 0.0;  // log sum lambda_k exp(-beta V_k)
  double log_plain = 0.0;     // log sum exp(-beta V_k)
};

StageSums stage_sums(const GpasvParams& params, Mask s) {
  std::vector<double> weighted;
  std::vector<double> plain;
  weighted.reserve(static_cast<std::size_t>(cardinality(s)));
  plain.reserve(static_cast<std::size_t>(cardinality(s)));
  for_each_member(s, [&](int k) {
    const double e = -params.beta() * stage_violation(params, k, s);
    plain.push_back(e);
    weighted.push_back(params.log_lambda()[static_cast<std::size_t>(k)] + e);
  });
  return {log_sum_exp(weighted), log_sum_exp(plain)};
}

}  // namespace

GscfFactors gscf_factors(const GpasvParams& params, int i, Mask s) {
  require(i >= 0 && i < params.n(), "player " + std::to_string(i) + " out of range");
  require(contains(s, i), "player " + std::to_string(i) + " is not a member of the subset");
  const StageSums sums = stage_sums(params, s);
  const double log_choice = params.log_lambda()[static_cast<std::size_t>(i)] -
                            params.beta() * stage_violation(params, i, s) - sums.log_weighted;
  return {std::exp(log_choice), std::exp(sums.log_plain)};
}

double log_zeta(const GpasvParams& params, Mask s) {
  require(s != 0, "zeta is defined for nonempty subsets only");
  const StageSums sums = stage_sums(params, s);
  return sums.log_weighted - sums.log_plain;
}

Matrix to_multiplicative(const PriorityGraph& graph) {
  const int n = graph.n();
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = std::exp(-graph.beta() * graph.omega(i, j));
  }
  return m;
}

}  // namespace gpasv

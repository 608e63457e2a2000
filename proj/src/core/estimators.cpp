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

#include "gpasv/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "gpasv/parallel.hpp"

namespace gpasv {
namespace {

void check_batch(const SampleBatch& batch, const UtilityOracle& oracle) {
  require(!batch.empty(), "empty sample batch");
  require(batch.n == oracle.n(), "batch player count " + std::to_string(batch.n) +
                                     " does not match oracle player count " + std::to_string(oracle.n()));
}

std::int64_t cache_count(const UtilityOracle& oracle) {
  if (const auto* cached = dynamic_cast<const CachedOracle*>(&oracle)) return cached->distinct_evals();
  return -1;
}

std::vector<double> weighted_mean(const std::vector<double>& table, std::span<const double> w, std::size_t n) {
  return weighted_delta_mean(table, w, static_cast<int>(n));
}

}  // namespace

std::vector<double> delta_table(const SampleBatch& batch, const UtilityOracle& oracle, int threads) {
  const auto n = static_cast<std::size_t>(batch.n);
  std::vector<double> table(batch.size() * n);
  parallel_for(batch.size(), threads, [&](std::size_t m) {
    marginal_contributions(batch.samples[m].order(), oracle, std::span<double>(table.data() + m * n, n));
  });
  return table;
}

std::vector<double> weighted_delta_mean(std::span<const double> table, std::span<const double> weights, int n) {
  const auto nn = static_cast<std::size_t>(n);
  require(table.size() == weights.size() * nn, "delta table does not match the weight count");
  std::vector<double> acc(nn, 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    const double wm = weights[m];
    total += wm;
    for (std::size_t i = 0; i < nn; ++i) acc[i] += wm * table[m * nn + i];
  }
  require(total > 0.0, "all weights are zero");
  for (double& a : acc) a /= total;
  return acc;
}

void marginal_contributions(std::span<const int> order, const UtilityOracle& oracle, std::span<double> out) {
  require(static_cast<int>(order.size()) == oracle.n() && out.size() == order.size(),
          "dimension mismatch between permutation and oracle");
  Mask s = 0;
  double prev = oracle.evaluate(0);
  for (const int i : order) {
    s |= bit(i);
    const double cur = oracle.evaluate(s);
    out[static_cast<std::size_t>(i)] = cur - prev;
    prev = cur;
  }
}

std::vector<double> marginal_contributions(const Permutation& pi, const UtilityOracle& oracle) {
  std::vector<double> out(static_cast<std::size_t>(pi.size()));
  marginal_contributions(pi.order(), oracle, out);
  return out;
}

ValueEstimate direct_mc(const SampleBatch& batch, const UtilityOracle& oracle, int threads) {
  check_batch(batch, oracle);
  const auto table = delta_table(batch, oracle, threads);
  const std::vector<double> ones(batch.size(), 1.0);
  ValueEstimate est;
  est.values = weighted_mean(table, ones, static_cast<std::size_t>(batch.n));
  est.meta.n_samples = est.meta.n_fresh = static_cast<std::int64_t>(batch.size());
  est.meta.ess = static_cast<double>(batch.size());
  est.meta.distinct_evals = cache_count(oracle);
  est.meta.params_fingerprint = batch.params_fingerprint;
  return est;
}

std::vector<double> snis_log_weights(const GpasvParams& old_params, const GpasvParams& new_params,
                                     const SampleBatch& batch, int threads) {
  require(old_params.n() == new_params.n(), "dimension mismatch between parameter sets");
  require(batch.n == old_params.n(), "batch player count does not match the parameters");
  require(batch.params_fingerprint == 0 || batch.params_fingerprint == old_params.fingerprint(),
          "batch was not drawn under the given source parameters");
  std::vector<double> lw(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t m) {
    const auto& pi = batch.samples[m];
    lw[m] = log_unnormalized_pmf(new_params, pi) - log_unnormalized_pmf(old_params, pi);
  });
  if (!lw.empty()) {
    const double top = *std::max_element(lw.begin(), lw.end());
    require(std::isfinite(top), "importance weights are not finite");
    for (double& x : lw) x -= top;
  }
  return lw;
}

std::vector<double> snis_weights(const GpasvParams& old_params, const GpasvParams& new_params,
                                 const SampleBatch& batch, int threads) {
  auto w = snis_log_weights(old_params, new_params, batch, threads);
  for (double& x : w) x = std::exp(x);
  return w;
}

double ess(std::span<const double> weights) {
  double s = 0.0, s2 = 0.0;
  for (const double w : weights) {
    require(w >= 0.0 && std::isfinite(w), "weights must be finite and non-negative");
    s += w;
    s2 += w * w;
  }
  require(s > 0.0, "all weights are zero");
  return s * s / s2;
}

ValueEstimate snis_estimate(std::span<const double> weights, const SampleBatch& batch, const UtilityOracle& oracle,
                            int threads) {
  check_batch(batch, oracle);
  require(weights.size() == batch.size(), "weight count " + std::to_string(weights.size()) +
                                              " does not match batch size " + std::to_string(batch.size()));
  const double e = ess(weights);
  const auto table = delta_table(batch, oracle, threads);
  ValueEstimate est;
  est.values = weighted_mean(table, weights, static_cast<std::size_t>(batch.n));
  est.meta.n_samples = est.meta.n_reused = static_cast<std::int64_t>(batch.size());
  est.meta.ess = e;
  est.meta.distinct_evals = cache_count(oracle);
  est.meta.params_fingerprint = batch.params_fingerprint;
  return est;
}

ValueEstimate hybrid_estimate(std::span<const double> weights, const SampleBatch& reused, const SampleBatch& fresh,
                              const UtilityOracle& oracle, int threads) {
  require(!reused.empty() || !fresh.empty(), "hybrid estimate needs at least one nonempty batch");
  if (fresh.empty()) return snis_estimate(weights, reused, oracle, threads);
  if (reused.empty()) return direct_mc(fresh, oracle, threads);
  const auto snis = snis_estimate(weights, reused, oracle, threads);
  const auto mc = direct_mc(fresh, oracle, threads);
  const double e = snis.meta.ess;
  const auto n_new = static_cast<double>(fresh.size());
  const double a = e / (e + n_new);
  ValueEstimate est;
  est.values.resize(snis.values.size());
  for (std::size_t i = 0; i < est.values.size(); ++i) est.values[i] = a * snis.values[i] + (1.0 - a) * mc.values[i];
  est.meta.n_reused = static_cast<std::int64_t>(reused.size());
  est.meta.n_fresh = static_cast<std::int64_t>(fresh.size());
  est.meta.n_samples = est.meta.n_reused + est.meta.n_fresh;
  est.meta.ess = e;
  est.meta.distinct_evals = cache_count(oracle);
  est.meta.params_fingerprint = fresh.params_fingerprint;
  return est;
}

ValueEstimate combine_replicates(const std::vector<ValueEstimate>& replicates) {
  require(!replicates.empty(), "no replicates to combine");
  const std::size_t n = replicates.front().values.size();
  const auto r = static_cast<double>(replicates.size());
  ValueEstimate out;
  out.values.assign(n, 0.0);
  out.std.assign(n, 0.0);
  for (const auto& rep : replicates) {
    require(rep.values.size() == n, "replicates disagree on the player count");
    for (std::size_t i = 0; i < n; ++i) out.values[i] += rep.values[i] / r;
    out.meta.n_samples += rep.meta.n_samples;
  }
  if (replicates.size() > 1) {
    for (const auto& rep : replicates) {
      for (std::size_t i = 0; i < n; ++i) out.std[i] += (rep.values[i] - out.values[i]) * (rep.values[i] - out.values[i]);
    }
    for (double& s : out.std) s = std::sqrt(s / (r - 1.0));
  }
  out.meta.params_fingerprint = replicates.front().meta.params_fingerprint;
  return out;
}

double are(std::span<const double> estimate, std::span<const double> target) {
  require(estimate.size() == target.size(), "dimension mismatch between estimate and target");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    num += (estimate[i] - target[i]) * (estimate[i] - target[i]);
    den += target[i] * target[i];
  }
  require(den > 0.0, "target vector is zero");
  return std::sqrt(num / den);
}

double ConvergenceTrace::aucc() const {
  if (are.empty()) return 0.0;
  return std::accumulate(are.begin(), are.end(), 0.0) / static_cast<double>(are.size());
}

ConvergenceTrace direct_mc_trace(const SampleBatch& batch, const CachedOracle& oracle, std::span<const double> target,
                                 std::int64_t every) {
  check_batch(batch, oracle);
  require(every >= 1, "trace interval must be positive");
  const auto n = static_cast<std::size_t>(batch.n);
  std::vector<double> sum(n, 0.0), delta(n), mean(n);
  ConvergenceTrace trace;
  for (std::size_t m = 0; m < batch.size(); ++m) {
    marginal_contributions(batch.samples[m].order(), oracle, delta);
    for (std::size_t i = 0; i < n; ++i) sum[i] += delta[i];
    const auto count = static_cast<std::int64_t>(m + 1);
    if (count % every == 0 || m + 1 == batch.size()) {
      for (std::size_t i = 0; i < n; ++i) mean[i] = sum[i] / static_cast<double>(count);
      trace.m.push_back(count);
      trace.are.push_back(are(mean, target));
      trace.distinct_evals.push_back(oracle.distinct_evals());
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> CoefficientEstimates::find(Mask s) const {
  const auto it = std::lower_bound(support_.begin(), support_.end(), s);
  if (it == support_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - support_.begin());
}

double CoefficientEstimates::rho(int player, Mask s) const {
  const auto k = find(s);
  if (!k) return 0.0;
  for (const auto& e : rho(*k)) {
    if (e.player == player) return e.value;
  }
  return 0.0;
}

double CoefficientEstimates::q_of(Mask s) const {
  const auto k = find(s);
  return k ? q_[*k] : 0.0;
}

double CoefficientEstimates::wls_weight(std::size_t k) const {
  double w = 0.0;
  for (const auto& e : rho(k)) w += e.value * e.value;
  return w / (q_[k] * q_[k]);
}

void CoefficientEstimates::set_eta(Matrix eta) {
  require(eta.rows() == n_ && eta.cols() == n_, "pairwise matrix has the wrong dimension");
  eta_ = std::move(eta);
}

Mask CoefficientEstimates::sample(Rng& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return support_[static_cast<std::size_t>(it - cumulative_.begin())];
}

CoefficientEstimates estimate_coefficients(std::span<const Permutation> perms) {
  require(!perms.empty(), "coefficient estimation needs at least one permutation");
  const int n = perms.front().size();
  std::unordered_map<Mask, std::uint32_t> index;
  std::vector<std::vector<std::pair<int, std::int64_t>>> counts;
  std::vector<std::int64_t> before(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  auto add = [&](Mask s, int player, std::int64_t sign) {
    const auto [it, inserted] = index.try_emplace(s, static_cast<std::uint32_t>(counts.size()));
    if (inserted) counts.emplace_back();
    auto& row = counts[it->second];
    for (auto& [p, c] : row) {
      if (p == player) {
        c += sign;
        return;
      }
    }
    row.emplace_back(player, sign);
  };
  for (const auto& pi : perms) {
    require(pi.size() == n, "permutations of different sizes");
    Mask s = 0;
    for (const int i : pi.order()) {
      add(s, i, -1);
      for_each_member(s, [&](int j) { ++before[static_cast<std::size_t>(j) * n + i]; });
      s |= bit(i);
      add(s, i, +1);
    }
  }
  CoefficientEstimates out;
  out.n_ = n;
  out.m_ = static_cast<std::int64_t>(perms.size());
  const double inv_m = 1.0 / static_cast<double>(perms.size());
  std::vector<std::pair<Mask, std::uint32_t>> order(index.begin(), index.end());
  std::sort(order.begin(), order.end());
  out.support_.reserve(order.size());
  out.q_.reserve(order.size());
  out.offsets_.reserve(order.size() + 1);
  out.offsets_.push_back(0);
  double total = 0.0;
  for (const auto& [s, k] : order) {
    auto& row = counts[k];
    std::sort(row.begin(), row.end());
    double a = 0.0;
    for (const auto& [p, c] : row) {
      const double v = static_cast<double>(c) * inv_m;
      out.entries_.push_back({p, v});
      a += std::abs(v);
    }
    out.support_.push_back(s);
    out.q_.push_back(a);
    out.offsets_.push_back(out.entries_.size());
    total += a;
  }
  double run = 0.0;
  out.cumulative_.reserve(out.q_.size());
  for (double& q : out.q_) {
    q /= total;
    run += q;
    out.cumulative_.push_back(run);
  }
  out.eta_ = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) out.eta_(i, j) = static_cast<double>(before[static_cast<std::size_t>(i) * n + j]) * inv_m;
    }
  }
  return out;
}

double SurrogateModel::b(int i, int j) const {
  for (const auto& t : interactions) {
    if ((t.i == i && t.j == j) || (t.i == j && t.j == i)) return t.b;
  }
  return 0.0;
}

double SurrogateModel::evaluate(Mask s) const {
  double h = intercept;
  for_each_member(s, [&](int k) { h += a[static_cast<std::size_t>(k)]; });
  for (const auto& t : interactions) {
    if (contains(s, t.i) && contains(s, t.j)) h += t.b;
  }
  return h;
}

std::vector<std::pair<int, int>> select_interactions(int n, double fraction, Rng& rng) {
  require(fraction >= 0.0 && fraction <= 1.0, "interaction fraction must lie in [0, 1]");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pairs.size())));
  for (std::size_t k = 0; k < keep; ++k) {
    const std::size_t r = k + rng.below(pairs.size() - k);
    std::swap(pairs[k], pairs[r]);
  }
  pairs.resize(keep);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

SurrogateModel fit_surrogate(std::span<const TrainingPoint> train, const CoefficientEstimates& coeffs,
                             SurrogateKind kind, std::span<const std::pair<int, int>> interactions, double intercept) {
  const int n = coeffs.n();
  require(!train.empty(), "surrogate fit needs training subsets");
  const std::size_t n_pairs = kind == SurrogateKind::kQuadratic ? interactions.size() : 0;
  for (std::size_t r = 0; r < n_pairs; ++r) {
    const auto [i, j] = interactions[r];
    require(i >= 0 && j >= 0 && i < n && j < n && i != j, "interaction pair out of range");
  }
  const int p = n + static_cast<int>(n_pairs);

  // Repeated subsets collapse into one row with summed weight.
  std::unordered_map<Mask, std::pair<double, double>> rows;
  for (const auto& t : train) {
    const auto k = coeffs.find(t.s);
    require(k.has_value(), "training subset " + std::to_string(t.s) + " lies outside the proposal support");
    auto [it, inserted] = rows.try_emplace(t.s, 0.0, t.u);
    it->second.first += coeffs.wls_weight(*k);
  }
  std::vector<std::pair<Mask, std::pair<double, double>>> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  std::vector<int> active;
  for (const auto& [s, wu] : sorted) {
    const auto [w, u] = wu;
    active.clear();
    for_each_member(s, [&](int k) { active.push_back(k); });
    for (std::size_t r = 0; r < n_pairs; ++r) {
      if (contains(s, interactions[r].first) && contains(s, interactions[r].second)) active.push_back(n + static_cast<int>(r));
    }
    const double y = u - intercept;
    for (std::size_t a = 0; a < active.size(); ++a) {
      rhs(active[a]) += w * y;
      for (std::size_t b = a; b < active.size(); ++b) gram(active[a], active[b]) += w;
    }
  }
  gram.triangularView<Eigen::StrictlyLower>() = gram.transpose().triangularView<Eigen::StrictlyLower>();

  SurrogateModel model;
  model.kind = kind;
  model.intercept = intercept;
  model.fit.rows = train.size();
  model.fit.distinct_rows = sorted.size();
  model.fit.parameters = p;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double tol = top * static_cast<double>(p) * std::numeric_limits<double>::epsilon();
  model.fit.rank = static_cast<int>((eig.eigenvalues().array() > tol).count());
  model.fit.degenerate = model.fit.rank < p;

  const double trace = gram.trace();
  model.fit.ridge = 1e-10 * (trace > 0.0 ? trace / p : 1.0);
  gram.diagonal().array() += model.fit.ridge;
  const Eigen::VectorXd theta = gram.ldlt().solve(rhs);

  model.a.assign(theta.data(), theta.data() + n);
  for (std::size_t r = 0; r < n_pairs; ++r) {
    model.interactions.push_back({interactions[r].first, interactions[r].second, theta(n + static_cast<int>(r))});
  }
  return model;
}

std::vector<double> surrogate_gpasv(const SurrogateModel& model, const Matrix& eta) {
  const int n = model.n();
  std::vector<double> psi(model.a);
  if (model.interactions.empty()) return psi;
  require(eta.rows() == n && eta.cols() == n, "pairwise-order probabilities are required for a quadratic surrogate");
  for (const auto& t : model.interactions) {
    psi[static_cast<std::size_t>(t.i)] += eta(t.j, t.i) * t.b;
    psi[static_cast<std::size_t>(t.j)] += eta(t.i, t.j) * t.b;
  }
  return psi;
}

std::vector<double> surrogate_gpasv(const SurrogateModel& model, const CoefficientEstimates& coeffs) {
  return surrogate_gpasv(model, coeffs.eta());
}

ValueEstimate two_stage_estimate(const SurrogateModel& model, const CoefficientEstimates& coeffs,
                                 std::span<const Mask> residual_subsets, const UtilityOracle& oracle) {
  require(model.n() == coeffs.n() && oracle.n() == coeffs.n(), "dimension mismatch between model, coefficients and oracle");
  ValueEstimate est;
  est.values = surrogate_gpasv(model, coeffs);
  if (!residual_subsets.empty()) {
    std::vector<double> corr(est.values.size(), 0.0);
    for (const Mask s : residual_subsets) {
      const auto k = coeffs.find(s);
      require(k.has_value(), "residual subset " + std::to_string(s) + " lies outside the proposal support");
      const double resid = oracle.evaluate(s) - model.evaluate(s);
      const double scale = resid / coeffs.q(*k);
      for (const auto& e : coeffs.rho(*k)) corr[static_cast<std::size_t>(e.player)] += e.value * scale;
    }
    const auto count = static_cast<double>(residual_subsets.size());
    for (std::size_t i = 0; i < corr.size(); ++i) est.values[i] += corr[i] / count;
  }
  est.meta.n_samples = static_cast<std::int64_t>(residual_subsets.size());
  est.meta.distinct_evals = cache_count(oracle);
  return est;
}

MatchedBudgetResult run_matched_budget(const SampleBatch& batch, std::span<const Permutation> free_perms,
                                       const OraclePtr& oracle, const MatchedBudgetConfig& config) {
  require(oracle != nullptr, "matched budget needs an oracle");
  require(config.train_fraction >= 0.0 && config.train_fraction <= 1.0, "train fraction must lie in [0, 1]");
  MatchedBudgetResult out;
  {
    CachedOracle direct_cache(oracle);
    out.direct = direct_mc(batch, direct_cache);
    out.k_eval = direct_cache.distinct_evals();
  }
  out.k_train = std::min(static_cast<std::int64_t>(std::floor(config.train_fraction * static_cast<double>(out.k_eval))),
                         config.train_cap);
  out.k_adjust = out.k_eval - out.k_train;

  const auto coeffs = estimate_coefficients(free_perms);
  CachedOracle cache(oracle);
  Rng draw_rng(derive_seed(config.seed, 0));
  // Draws until the shared cache has performed `target` distinct evaluations.
  auto draw_until = [&](std::int64_t target, std::int64_t budget) {
    std::vector<Mask> draws;
    const std::int64_t cap = std::max<std::int64_t>(1, budget) * config.max_draw_factor;
    while (cache.distinct_evals() < target && static_cast<std::int64_t>(draws.size()) < cap) {
      const Mask s = coeffs.sample(draw_rng);
      (void)cache.evaluate(s);
      draws.push_back(s);
    }
    return draws;
  };
  // U(empty) pins the intercept; it is part of the budget, as in direct MC.
  const double u0 = cache.evaluate(0);
  const auto train_masks = draw_until(out.k_train, out.k_train);
  std::vector<TrainingPoint> train;
  train.reserve(train_masks.size());
  for (const Mask s : train_masks) train.push_back({s, cache.evaluate(s)});
  const auto adjust = draw_until(out.k_eval, out.k_adjust);

  Rng pair_rng(derive_seed(config.seed, 1));
  const auto pairs = select_interactions(coeffs.n(), config.interaction_fraction, pair_rng);
  if (train.empty()) train.push_back({0, u0});
  const auto lin = fit_surrogate(train, coeffs, SurrogateKind::kLinear, {}, u0);
  const auto quad = fit_surrogate(train, coeffs, SurrogateKind::kQuadratic, pairs, u0);
  out.linear = two_stage_estimate(lin, coeffs, adjust, cache);
  out.quadratic = two_stage_estimate(quad, coeffs, adjust, cache);
  out.linear.meta.params_fingerprint = out.quadratic.meta.params_fingerprint = batch.params_fingerprint;
  return out;
}

}  // namespace gpasv

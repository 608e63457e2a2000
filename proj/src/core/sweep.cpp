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

#include "gpasv/sweep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "gpasv/parallel.hpp"
#include "gpasv/sampler.hpp"

namespace gpasv {
namespace {

/// Weighted particle set targeting the current setting.
struct Pool {
  std::vector<Permutation> particles;
  std::vector<double> weights;  // sum to 1
  std::vector<double> deltas;   // row-major particles x n
};

std::int64_t cached_count(const UtilityOracle& oracle) {
  if (const auto* c = dynamic_cast<const CachedOracle*>(&oracle)) return c->distinct_evals();
  return -1;
}

std::vector<double> mean_positions(const Pool& pool, int n) {
  std::vector<double> pos(static_cast<std::size_t>(n), 0.0);
  for (std::size_t m = 0; m < pool.particles.size(); ++m) {
    const auto order = pool.particles[m].order();
    for (int t = 0; t < n; ++t) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] += pool.weights[m] * (t + 1);
  }
  return pos;
}

}  // namespace

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "alpha_only" || name == "alpha") return SweepAxis::kAlphaOnly;
  if (name == "beta_only" || name == "beta") return SweepAxis::kBetaOnly;
  if (name == "joint") return SweepAxis::kJoint;
  fail(ErrorKind::kInvalidArgument, "unknown sweep axis `" + name + "` (expected alpha_only, beta_only or joint)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kAlphaOnly: return "alpha_only";
    case SweepAxis::kBetaOnly: return "beta_only";
    case SweepAxis::kJoint: return "joint";
  }
  return "joint";
}

void SweepPlan::check() const {
  const int n = omega.rows();
  require(n >= 1 && omega.cols() == n, "sweep graph must be square and nonempty");
  require(static_cast<int>(latent.size()) == n, "latent score count does not match the player count");
  require(!temps.empty(), "sweep needs at least one temperature");
  for (std::size_t k = 0; k < temps.size(); ++k) {
    require(std::isfinite(temps[k]) && temps[k] >= 0.0, "temperatures must be finite and non-negative");
    require(k == 0 || temps[k] >= temps[k - 1], "temperatures must be non-decreasing");
  }
  require(fixed_alpha >= 0.0 && fixed_beta >= 0.0, "fixed temperatures must be non-negative");
  require(budget >= 1, "sample budget must be positive");
  require(refresh_floor >= 0, "refresh floor must be non-negative");
  require(thinning >= 1 && lazy_prob >= 0.0 && lazy_prob < 1.0, "invalid chain settings");
  require(!burn_in || *burn_in >= 0, "burn-in must be non-negative");
  if (group) {
    require(!group->empty(), "group must be nonempty");
    for (int i : *group) require(i >= 0 && i < n, "group member " + std::to_string(i) + " out of range");
  }
}

std::pair<double, double> SweepPlan::coordinates(double temp) const {
  switch (axis) {
    case SweepAxis::kAlphaOnly: return {temp, fixed_beta};
    case SweepAxis::kBetaOnly: return {fixed_alpha, temp};
    case SweepAxis::kJoint: return {temp, temp};
  }
  return {temp, temp};
}

GpasvParams SweepPlan::params_at(double temp) const {
  const auto [alpha, beta] = coordinates(temp);
  RawParams raw{omega, beta, SoftPriority::latent_scores(latent, alpha)};
  return validate(raw);
}

std::int64_t SweepReport::total_fresh() const {
  std::int64_t total = 0;
  for (const auto& s : settings) total += s.n_new;
  return total;
}

SweepReport run_sweep(const SweepPlan& plan, const UtilityOracle& oracle) {
  plan.check();
  const int n = plan.n();
  require(oracle.n() == n, "oracle player count does not match the sweep graph");
  const auto nn = static_cast<std::size_t>(n);
  const std::int64_t big_n = plan.budget;

  SweepReport report;
  report.axis = plan.axis;
  Pool pool;
  std::optional<GpasvParams> prev;
  std::int64_t calls = 0;
  std::uint64_t last_stream = 0;
  std::uint64_t repeat = 0;

  for (const double temp : plan.temps) {
    try {
      const GpasvParams params = plan.params_at(temp);
      SweepSetting setting;
      setting.temp = temp;
      std::tie(setting.alpha, setting.beta) = plan.coordinates(temp);
      setting.params_fingerprint = params.fingerprint();

      // Fresh draws are keyed by the setting's coordinates (and repeat count), so
      // settings shared between plans or inserted later see the same stream.
      std::uint64_t stream = derive_seed(std::bit_cast<std::uint64_t>(setting.alpha),
                                         std::bit_cast<std::uint64_t>(setting.beta));
      repeat = (prev && stream == last_stream) ? repeat + 1 : 0;
      last_stream = stream;
      stream = derive_seed(stream, repeat);

      std::vector<double> carried;  // normalized incremental weights of the pool
      std::int64_t n_new = big_n;
      if (plan.reuse && prev) {
        std::vector<double> lw(pool.particles.size());
        parallel_for(pool.particles.size(), plan.threads, [&](std::size_t m) {
          const auto& pi = pool.particles[m];
          lw[m] = std::log(pool.weights[m]) + log_unnormalized_pmf(params, pi) - log_unnormalized_pmf(*prev, pi);
        });
        const double top = *std::max_element(lw.begin(), lw.end());
        carried.resize(lw.size());
        double total = 0.0;
        for (std::size_t m = 0; m < lw.size(); ++m) total += carried[m] = std::exp(lw[m] - top);
        for (double& w : carried) w /= total;
        setting.ess_in = ess(carried);
        n_new = std::min(big_n, std::max(plan.refresh_floor,
                                         static_cast<std::int64_t>(std::ceil(static_cast<double>(big_n) - setting.ess_in))));
      }

      ChainConfig config = ChainConfig::defaults(n, std::max<std::int64_t>(n_new, 1), derive_seed(plan.seed, stream));
      if (plan.burn_in) config.burn_in = *plan.burn_in;
      config.thinning = plan.thinning;
      config.lazy_prob = plan.lazy_prob;
      SampleBatch fresh;
      if (n_new > 0) fresh = run_chain(params, config);
      const auto fresh_deltas = fresh.empty() ? std::vector<double>{} : delta_table(fresh, oracle, plan.threads);
      calls += static_cast<std::int64_t>(fresh.size()) * (n + 1);

      if (n_new >= big_n || carried.empty()) {
        const std::vector<double> ones(fresh.size(), 1.0);
        setting.estimate.values = weighted_delta_mean(fresh_deltas, ones, n);
        setting.estimate.meta.n_fresh = setting.estimate.meta.n_samples = static_cast<std::int64_t>(fresh.size());
        setting.estimate.meta.ess = static_cast<double>(fresh.size());
        setting.full_refresh = true;
        pool.particles = std::move(fresh.samples);
        pool.weights.assign(pool.particles.size(), 1.0 / static_cast<double>(pool.particles.size()));
        pool.deltas = fresh_deltas;
      } else {
        setting.full_refresh = false;
        const double e = setting.ess_in;
        const auto fresh_count = static_cast<double>(fresh.size());
        const double a = e / (e + fresh_count);
        const auto snis = weighted_delta_mean(pool.deltas, carried, n);
        std::vector<double> values(snis);
        if (!fresh.empty()) {
          const std::vector<double> ones(fresh.size(), 1.0);
          const auto mc = weighted_delta_mean(fresh_deltas, ones, n);
          for (std::size_t i = 0; i < nn; ++i) values[i] = a * snis[i] + (1.0 - a) * mc[i];
        }
        setting.estimate.values = std::move(values);
        setting.estimate.meta.n_reused = setting.n_reused = static_cast<std::int64_t>(pool.particles.size());
        setting.estimate.meta.n_fresh = static_cast<std::int64_t>(fresh.size());
        setting.estimate.meta.n_samples = setting.estimate.meta.n_reused + setting.estimate.meta.n_fresh;
        setting.estimate.meta.ess = e;

        // New pool: reused particles carry mass a, fresh ones 1 - a; zero-mass particles drop out.
        Pool next;
        for (std::size_t m = 0; m < pool.particles.size(); ++m) {
          const double w = a * carried[m];
          if (w <= 0.0) continue;
          next.particles.push_back(std::move(pool.particles[m]));
          next.weights.push_back(w);
          next.deltas.insert(next.deltas.end(), pool.deltas.begin() + static_cast<std::ptrdiff_t>(m * nn),
                             pool.deltas.begin() + static_cast<std::ptrdiff_t>((m + 1) * nn));
        }
        for (std::size_t m = 0; m < fresh.size(); ++m) {
          next.particles.push_back(std::move(fresh.samples[m]));
          next.weights.push_back((1.0 - a) / fresh_count);
        }
        next.deltas.insert(next.deltas.end(), fresh_deltas.begin(), fresh_deltas.end());
        pool = std::move(next);
      }
      setting.n_new = static_cast<std::int64_t>(setting.estimate.meta.n_fresh);
      setting.estimate.meta.params_fingerprint = setting.params_fingerprint;
      setting.distinct_evals = setting.estimate.meta.distinct_evals = cached_count(oracle);
      setting.oracle_calls = calls;
      setting.mean_position = mean_positions(pool, n);
      report.settings.push_back(std::move(setting));
      prev = params;
    } catch (const Error& e) {
      report.complete = false;
      report.error = e.what();
      report.error_kind = e.kind();
      return report;
    }
  }
  return report;
}

std::int64_t ThreeSliceReport::total_fresh() const {
  std::int64_t total = alpha.total_fresh() + beta.total_fresh() + joint.total_fresh();
  // Later slices redraw the identical baseline stream; count it once.
  for (const auto* r : {&beta, &joint}) {
    if (!r->settings.empty() && r->settings.front().alpha == 0.0 && r->settings.front().beta == 0.0) {
      total -= r->settings.front().n_new;
    }
  }
  return total;
}

ThreeSliceReport run_three_slices(const SweepPlan& base, const UtilityOracle& oracle) {
  require(!base.temps.empty() && base.temps.front() == 0.0, "three-slice sweeps start at temperature 0");
  ThreeSliceReport out;
  SweepPlan plan = base;
  plan.fixed_alpha = plan.fixed_beta = 0.0;
  plan.axis = SweepAxis::kAlphaOnly;
  out.alpha = run_sweep(plan, oracle);
  plan.axis = SweepAxis::kBetaOnly;
  out.beta = run_sweep(plan, oracle);
  plan.axis = SweepAxis::kJoint;
  out.joint = run_sweep(plan, oracle);
  return out;
}

std::vector<GroupPoint> group_summary(const SweepReport& report, const std::vector<int>& group) {
  require(!group.empty(), "group must be nonempty");
  std::vector<GroupPoint> out;
  for (const auto& s : report.settings) {
    GroupPoint g;
    g.temp = s.temp;
    for (int i : group) {
      require(i >= 0 && static_cast<std::size_t>(i) < s.estimate.values.size(),
              "group member " + std::to_string(i) + " out of range");
      g.group_sum += s.estimate.values[static_cast<std::size_t>(i)];
      g.mean_position += s.mean_position[static_cast<std::size_t>(i)];
    }
    g.mean_position /= static_cast<double>(group.size());
    out.push_back(g);
  }
  return out;
}

}  // namespace gpasv

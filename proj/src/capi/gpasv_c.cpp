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

#include "gpasv/gpasv.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <string>

#include "gpasv/diagnostics.hpp"
#include "gpasv/estimators.hpp"
#include "gpasv/exact.hpp"
#include "gpasv/io.hpp"
#include "gpasv/parallel.hpp"
#include "gpasv/sampler.hpp"
#include "gpasv/sweep.hpp"

struct gpasv_params {
  gpasv::RawParams raw;
  gpasv::GpasvParams params;
  std::vector<std::string> labels;
};

struct gpasv_oracle {
  gpasv::OraclePtr oracle;
  std::shared_ptr<const gpasv::CachedOracle> cached;
};

struct gpasv_game {
  gpasv::GameSpec spec;
};

struct gpasv_batch {
  gpasv::SampleBatch batch;
};

struct gpasv_sweep_report {
  gpasv::SweepReport report;
  std::optional<std::vector<int>> group;
};

struct gpasv_mixing_result {
  gpasv::MixingResult result;
};

namespace {

using gpasv::ErrorKind;
using gpasv::require;

thread_local std::string last_error;

gpasv_status to_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return GPASV_E_INVALID_ARGUMENT;
    case ErrorKind::kParse: return GPASV_E_PARSE;
    case ErrorKind::kLimitExceeded: return GPASV_E_LIMIT_EXCEEDED;
    case ErrorKind::kMissingUtility: return GPASV_E_MISSING_UTILITY;
    case ErrorKind::kIo: return GPASV_E_IO;
  }
  return GPASV_E_INTERNAL;
}

template <class F>
gpasv_status guarded(F&& f) noexcept {
  try {
    f();
    return GPASV_OK;
  } catch (const gpasv::Error& e) {
    last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return GPASV_E_INTERNAL;
}

template <class T>
void not_null(const T* p, const char* name) {
  require(p != nullptr, std::string("null argument `") + name + "`");
}

gpasv::Matrix copy_matrix(int n, const double* data) {
  require(n >= 1 && n <= gpasv::kMaxPlayers, "player count " + std::to_string(n) + " out of range [1, 64]");
  not_null(data, "omega");
  gpasv::Matrix m(n, n);
  std::copy(data, data + static_cast<std::size_t>(n) * n, m.data().begin());
  return m;
}

gpasv_params* make_handle(gpasv::RawParams raw, std::vector<std::string> labels = {}) {
  auto validated = gpasv::validate(raw);
  return new gpasv_params{std::move(raw), std::move(validated), std::move(labels)};
}

gpasv::ChainConfig chain_config(int n, const gpasv_chain_options* o) {
  not_null(o, "options");
  auto c = gpasv::ChainConfig::defaults(n, o->n_samples, o->seed);
  if (o->burn_in >= 0) c.burn_in = o->burn_in;
  c.thinning = o->thinning;
  c.lazy_prob = o->lazy_prob;
  c.check();
  return c;
}

void fill_info(const gpasv::EstimateMeta& m, gpasv_estimate_info* info) {
  if (info == nullptr) return;
  info->n_samples = m.n_samples;
  info->n_reused = m.n_reused;
  info->n_fresh = m.n_fresh;
  info->ess = m.ess;
  info->distinct_evals = m.distinct_evals;
  info->params_fingerprint = m.params_fingerprint;
}

void copy_out(const std::vector<double>& v, double* out, const char* name) {
  not_null(out, name);
  std::copy(v.begin(), v.end(), out);
}

gpasv_status oracle_from_terms(bool unanimity, int n, int n_terms, const uint64_t* masks, const double* coeffs,
                               gpasv_oracle** out) {
  return guarded([&] {
    not_null(out, "out");
    require(n_terms >= 0, "term count must be non-negative");
    if (n_terms > 0) {
      not_null(masks, "masks");
      not_null(coeffs, "coeffs");
    }
    std::vector<gpasv::GameTerm> terms(static_cast<std::size_t>(n_terms));
    for (int k = 0; k < n_terms; ++k) terms[static_cast<std::size_t>(k)] = {masks[k], coeffs[k]};
    gpasv::OraclePtr o;
    if (unanimity) o = std::make_shared<gpasv::SumOfUnanimityGame>(n, std::move(terms));
    else o = std::make_shared<gpasv::SumOfRaceGame>(n, std::move(terms));
    *out = new gpasv_oracle{std::move(o), nullptr};
  });
}

class CallbackOracle final : public gpasv::UtilityOracle {
 public:
  CallbackOracle(int n, gpasv_utility_fn fn, void* user) : n_(n), fn_(fn), user_(user) {}
  [[nodiscard]] int n() const override { return n_; }

 protected:
  [[nodiscard]] double evaluate_unchecked(gpasv::Mask s) const override {
    double v = 0.0;
    if (fn_(s, &v, user_) != 0) {
      gpasv::fail(ErrorKind::kMissingUtility, "utility callback has no value for mask " + std::to_string(s));
    }
    return v;
  }

 private:
  int n_;
  gpasv_utility_fn fn_;
  void* user_;
};

}  // namespace

extern "C" {

const char* gpasv_version(void) { return "1.0.0"; }
const char* gpasv_last_error(void) { return last_error.c_str(); }

const char* gpasv_status_name(gpasv_status status) {
  switch (status) {
    case GPASV_OK: return "ok";
    case GPASV_E_INVALID_ARGUMENT: return "invalid argument";
    case GPASV_E_PARSE: return "parse error";
    case GPASV_E_LIMIT_EXCEEDED: return "limit exceeded";
    case GPASV_E_MISSING_UTILITY: return "missing utility";
    case GPASV_E_IO: return "i/o error";
    case GPASV_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void gpasv_free_string(char* s) { delete[] s; }

gpasv_status gpasv_params_create(int n, const double* omega, double beta, const double* lambda, gpasv_params** out) {
  return guarded([&] {
    not_null(out, "out");
    not_null(lambda, "lambda");
    gpasv::RawParams raw{copy_matrix(n, omega), beta,
                         gpasv::SoftPriority::weights(std::vector<double>(lambda, lambda + n))};
    *out = make_handle(std::move(raw));
  });
}

gpasv_status gpasv_params_create_latent(int n, const double* omega, double beta, const double* z, double alpha,
                                        gpasv_params** out) {
  return guarded([&] {
    not_null(out, "out");
    not_null(z, "z");
    gpasv::RawParams raw{copy_matrix(n, omega), beta,
                         gpasv::SoftPriority::latent_scores(std::vector<double>(z, z + n), alpha)};
    *out = make_handle(std::move(raw));
  });
}

gpasv_status gpasv_params_load_json(const char* path, gpasv_params** out) {
  return guarded([&] {
    not_null(path, "path");
    not_null(out, "out");
    auto spec = gpasv::load_graph_json(path);
    *out = make_handle(std::move(spec.raw), std::move(spec.players));
  });
}

void gpasv_params_destroy(gpasv_params* params) { delete params; }
int gpasv_params_n(const gpasv_params* params) { return params ? params->params.n() : 0; }
double gpasv_params_beta(const gpasv_params* params) {
  return params ? params->params.beta() : std::numeric_limits<double>::quiet_NaN();
}

gpasv_status gpasv_params_lambda(const gpasv_params* params, double* out) {
  return guarded([&] {
    not_null(params, "params");
    not_null(out, "out");
    const auto l = params->params.lambda();
    std::copy(l.begin(), l.end(), out);
  });
}

const char* gpasv_params_player_label(const gpasv_params* params, int i) {
  if (params == nullptr || i < 0 || static_cast<std::size_t>(i) >= params->labels.size()) return nullptr;
  return params->labels[static_cast<std::size_t>(i)].c_str();
}

gpasv_status gpasv_params_log_pmf(const gpasv_params* params, const int* order, double* out) {
  return guarded([&] {
    not_null(params, "params");
    not_null(order, "order");
    not_null(out, "out");
    const gpasv::Permutation pi(std::vector<int>(order, order + params->params.n()));
    *out = gpasv::log_unnormalized_pmf(params->params, pi);
  });
}

gpasv_status gpasv_oracle_sou(int n, int n_terms, const uint64_t* masks, const double* coeffs, gpasv_oracle** out) {
  return oracle_from_terms(true, n, n_terms, masks, coeffs, out);
}

gpasv_status gpasv_oracle_sor(int n, int n_terms, const uint64_t* masks, const double* coeffs, gpasv_oracle** out) {
  return oracle_from_terms(false, n, n_terms, masks, coeffs, out);
}

gpasv_status gpasv_oracle_table_load(const char* path, int n, gpasv_oracle** out) {
  return guarded([&] {
    not_null(path, "path");
    not_null(out, "out");
    *out = new gpasv_oracle{std::make_shared<gpasv::TableOracle>(gpasv::TableOracle::load(path, n)), nullptr};
  });
}

gpasv_status gpasv_oracle_callback(int n, gpasv_utility_fn fn, void* user, gpasv_oracle** out) {
  return guarded([&] {
    not_null(out, "out");
    require(fn != nullptr, "null argument `fn`");
    require(n >= 1 && n <= gpasv::kMaxPlayers, "player count out of range [1, 64]");
    *out = new gpasv_oracle{std::make_shared<CallbackOracle>(n, fn, user), nullptr};
  });
}

gpasv_status gpasv_oracle_cached(const gpasv_oracle* inner, const char* persist_path, gpasv_oracle** out) {
  return guarded([&] {
    not_null(inner, "inner");
    not_null(out, "out");
    auto cached = persist_path ? std::make_shared<gpasv::CachedOracle>(inner->oracle, persist_path)
                               : std::make_shared<gpasv::CachedOracle>(inner->oracle);
    *out = new gpasv_oracle{cached, cached};
  });
}

gpasv_status gpasv_oracle_cache_stats(const gpasv_oracle* oracle, int64_t* distinct_evals, int64_t* total_calls,
                                      int64_t* loaded) {
  return guarded([&] {
    not_null(oracle, "oracle");
    require(oracle->cached != nullptr, "oracle is not a cached oracle");
    if (distinct_evals) *distinct_evals = oracle->cached->distinct_evals();
    if (total_calls) *total_calls = oracle->cached->total_calls();
    if (loaded) *loaded = oracle->cached->loaded();
  });
}

gpasv_status gpasv_oracle_evaluate(const gpasv_oracle* oracle, uint64_t mask, double* out) {
  return guarded([&] {
    not_null(oracle, "oracle");
    not_null(out, "out");
    *out = oracle->oracle->evaluate(mask);
  });
}

int gpasv_oracle_n(const gpasv_oracle* oracle) { return oracle ? oracle->oracle->n() : 0; }
void gpasv_oracle_destroy(gpasv_oracle* oracle) { delete oracle; }

gpasv_status gpasv_game_load_json(const char* path, int n, gpasv_game** out) {
  return guarded([&] {
    not_null(path, "path");
    not_null(out, "out");
    *out = new gpasv_game{gpasv::load_game_json(path, n > 0 ? std::optional<int>(n) : std::nullopt)};
  });
}

int gpasv_game_n(const gpasv_game* game) { return game ? game->spec.oracle->n() : 0; }

gpasv_status gpasv_game_oracle(const gpasv_game* game, gpasv_oracle** out) {
  return guarded([&] {
    not_null(game, "game");
    not_null(out, "out");
    *out = new gpasv_oracle{game->spec.oracle, nullptr};
  });
}

int gpasv_game_has_params(const gpasv_game* game) { return game && game->spec.params ? 1 : 0; }

gpasv_status gpasv_game_params(const gpasv_game* game, gpasv_params** out) {
  return guarded([&] {
    not_null(game, "game");
    not_null(out, "out");
    require(game->spec.params.has_value(), "game spec carries no parameters");
    const auto& p = *game->spec.params;
    gpasv::RawParams raw{p.graph().omega(), p.beta(),
                         gpasv::SoftPriority::weights(std::vector<double>(p.lambda().begin(), p.lambda().end()))};
    *out = new gpasv_params{std::move(raw), p, {}};
  });
}

int gpasv_game_has_target(const gpasv_game* game) { return game && !game->spec.target.empty() ? 1 : 0; }

gpasv_status gpasv_game_target(const gpasv_game* game, double* out) {
  return guarded([&] {
    not_null(game, "game");
    require(!game->spec.target.empty(), "game spec carries no closed-form target");
    copy_out(game->spec.target, out, "out");
  });
}

void gpasv_game_destroy(gpasv_game* game) { delete game; }

void gpasv_chain_options_init(gpasv_chain_options* options) {
  if (options == nullptr) return;
  options->n_samples = 1000;
  options->burn_in = -1;
  options->thinning = 1000;
  options->lazy_prob = 0.5;
  options->seed = 0;
}

gpasv_status gpasv_sample(const gpasv_params* params, const gpasv_chain_options* options, gpasv_batch** out) {
  return guarded([&] {
    not_null(params, "params");
    not_null(out, "out");
    const auto config = chain_config(params->params.n(), options);
    *out = new gpasv_batch{gpasv::run_chain(params->params, config)};
  });
}

int64_t gpasv_batch_size(const gpasv_batch* batch) { return batch ? static_cast<int64_t>(batch->batch.size()) : 0; }
int gpasv_batch_n(const gpasv_batch* batch) { return batch ? batch->batch.n : 0; }

gpasv_status gpasv_batch_get(const gpasv_batch* batch, int64_t k, int* order) {
  return guarded([&] {
    not_null(batch, "batch");
    not_null(order, "order");
    require(k >= 0 && k < static_cast<int64_t>(batch->batch.size()), "sample index out of range");
    const auto o = batch->batch.samples[static_cast<std::size_t>(k)].order();
    std::copy(o.begin(), o.end(), order);
  });
}

gpasv_status gpasv_batch_save(const gpasv_batch* batch, const char* path) {
  return guarded([&] {
    not_null(batch, "batch");
    not_null(path, "path");
    std::ofstream f(path);
    if (!f) gpasv::fail(ErrorKind::kIo, std::string("cannot write ") + path);
    gpasv::write_batch(f, batch->batch);
  });
}

gpasv_status gpasv_batch_load(const char* path, const gpasv_params* params, gpasv_batch** out) {
  return guarded([&] {
    not_null(path, "path");
    not_null(params, "params");
    not_null(out, "out");
    std::ifstream f(path);
    if (!f) gpasv::fail(ErrorKind::kIo, std::string("cannot open ") + path);
    auto batch = gpasv::read_batch(f, params->params.n());
    batch.params_fingerprint = params->params.fingerprint();
    *out = new gpasv_batch{std::move(batch)};
  });
}

void gpasv_batch_destroy(gpasv_batch* batch) { delete batch; }

gpasv_status gpasv_direct_mc(const gpasv_batch* batch, const gpasv_oracle* oracle, int threads, double* values,
                             gpasv_estimate_info* info) {
  return guarded([&] {
    not_null(batch, "batch");
    not_null(oracle, "oracle");
    const auto est = gpasv::direct_mc(batch->batch, *oracle->oracle, threads);
    copy_out(est.values, values, "values");
    fill_info(est.meta, info);
  });
}

gpasv_status gpasv_estimate_value(const gpasv_params* params, const gpasv_oracle* oracle,
                                  const gpasv_chain_options* options, int replicates, int threads, double* values,
                                  double* std, gpasv_estimate_info* info) {
  return guarded([&] {
    not_null(params, "params");
    not_null(oracle, "oracle");
    require(replicates >= 1, "replicate count must be positive");
    require(oracle->oracle->n() == params->params.n(), "oracle player count does not match the graph");
    const auto base = chain_config(params->params.n(), options);
    std::vector<gpasv::SampleBatch> batches(static_cast<std::size_t>(replicates));
    gpasv::parallel_for(batches.size(), threads, [&](std::size_t r) {
      auto config = base;
      if (replicates > 1) config.seed = gpasv::derive_seed(base.seed, r);
      batches[r] = gpasv::run_chain(params->params, config);
    });
    std::vector<gpasv::ValueEstimate> reps;
    for (const auto& b : batches) reps.push_back(gpasv::direct_mc(b, *oracle->oracle, threads));
    auto est = gpasv::combine_replicates(reps);
    est.meta.n_fresh = est.meta.n_samples;
    est.meta.ess = static_cast<double>(est.meta.n_samples);
    if (oracle->cached) est.meta.distinct_evals = oracle->cached->distinct_evals();
    copy_out(est.values, values, "values");
    if (std) {
      for (std::size_t i = 0; i < est.values.size(); ++i) {
        std[i] = est.std.empty() || replicates < 2 ? std::numeric_limits<double>::quiet_NaN() : est.std[i];
      }
    }
    fill_info(est.meta, info);
  });
}

gpasv_status gpasv_snis_weights(const gpasv_params* old_params, const gpasv_params* new_params,
                                const gpasv_batch* batch, double* weights) {
  return guarded([&] {
    not_null(old_params, "old_params");
    not_null(new_params, "new_params");
    not_null(batch, "batch");
    copy_out(gpasv::snis_weights(old_params->params, new_params->params, batch->batch), weights, "weights");
  });
}

gpasv_status gpasv_ess(const double* weights, int64_t count, double* out) {
  return guarded([&] {
    not_null(weights, "weights");
    not_null(out, "out");
    require(count >= 1, "weight count must be positive");
    *out = gpasv::ess(std::span<const double>(weights, static_cast<std::size_t>(count)));
  });
}

gpasv_status gpasv_snis_estimate(const double* weights, const gpasv_batch* batch, const gpasv_oracle* oracle,
                                 double* values, gpasv_estimate_info* info) {
  return guarded([&] {
    not_null(weights, "weights");
    not_null(batch, "batch");
    not_null(oracle, "oracle");
    const auto est = gpasv::snis_estimate(std::span<const double>(weights, batch->batch.size()), batch->batch,
                                          *oracle->oracle);
    copy_out(est.values, values, "values");
    fill_info(est.meta, info);
  });
}

gpasv_status gpasv_hybrid_estimate(const double* weights, const gpasv_batch* reused, const gpasv_batch* fresh,
                                   const gpasv_oracle* oracle, double* values, gpasv_estimate_info* info) {
  return guarded([&] {
    not_null(oracle, "oracle");
    const gpasv::SampleBatch empty;
    const auto& r = reused ? reused->batch : empty;
    const auto& f = fresh ? fresh->batch : empty;
    if (!r.empty()) not_null(weights, "weights");
    const auto est = gpasv::hybrid_estimate(std::span<const double>(weights, r.size()), r, f, *oracle->oracle);
    copy_out(est.values, values, "values");
    fill_info(est.meta, info);
  });
}

void gpasv_surrogate_options_init(gpasv_surrogate_options* options) {
  if (options == nullptr) return;
  options->free_samples = 100000;
  options->train_fraction = 0.2;
  options->train_cap = 200000;
  options->interaction_fraction = 0.1;
  options->seed = 0;
}

gpasv_status gpasv_matched_budget(const gpasv_params* params, const gpasv_oracle* oracle,
                                  const gpasv_chain_options* chain, const gpasv_surrogate_options* options,
                                  double* direct, double* linear, double* quadratic, int64_t* k_eval,
                                  int64_t* k_train) {
  return guarded([&] {
    not_null(params, "params");
    not_null(oracle, "oracle");
    not_null(options, "options");
    require(options->free_samples >= 1, "utility-free sample count must be positive");
    const auto config = chain_config(params->params.n(), chain);
    const auto batch = gpasv::run_chain(params->params, config);
    auto free_config = config;
    free_config.n_samples = options->free_samples;
    free_config.seed = gpasv::derive_seed(config.seed, 1);
    const auto free_batch = gpasv::run_chain(params->params, free_config);
    gpasv::MatchedBudgetConfig mb;
    mb.train_fraction = options->train_fraction;
    mb.train_cap = options->train_cap;
    mb.interaction_fraction = options->interaction_fraction;
    mb.seed = options->seed;
    const auto res = gpasv::run_matched_budget(batch, free_batch.samples, oracle->oracle, mb);
    copy_out(res.direct.values, direct, "direct");
    copy_out(res.linear.values, linear, "linear");
    copy_out(res.quadratic.values, quadratic, "quadratic");
    if (k_eval) *k_eval = res.k_eval;
    if (k_train) *k_train = res.k_train;
  });
}

gpasv_status gpasv_exact_values(const gpasv_params* params, const gpasv_oracle* oracle, double* values) {
  return guarded([&] {
    not_null(params, "params");
    not_null(oracle, "oracle");
    copy_out(gpasv::exact_value(params->params, *oracle->oracle), values, "values");
  });
}

gpasv_status gpasv_exact_pairwise(const gpasv_params* params, double* p, double* max_asymmetry) {
  return guarded([&] {
    not_null(params, "params");
    not_null(p, "p");
    const auto pw = gpasv::dp_pairwise_probs(params->params);
    std::copy(pw.p.data().begin(), pw.p.data().end(), p);
    if (max_asymmetry) *max_asymmetry = pw.max_asymmetry;
  });
}

gpasv_status gpasv_exact_log_normalizer(const gpasv_params* params, double* out) {
  return guarded([&] {
    not_null(params, "params");
    not_null(out, "out");
    *out = gpasv::dp_normalizer(params->params);
  });
}

void gpasv_sweep_options_init(gpasv_sweep_options* options) {
  if (options == nullptr) return;
  *options = gpasv_sweep_options{};
  options->axis = GPASV_AXIS_JOINT;
  options->budget = 1000;
  options->reuse = 1;
  options->refresh_floor = 500;
  options->burn_in = -1;
  options->thinning = 1000;
  options->lazy_prob = 0.5;
  options->threads = 1;
}

gpasv_status gpasv_sweep_run(const gpasv_params* params, const gpasv_oracle* oracle,
                             const gpasv_sweep_options* options, gpasv_sweep_report** out) {
  gpasv_sweep_report* report = nullptr;
  const gpasv_status built = guarded([&] {
    not_null(params, "params");
    not_null(oracle, "oracle");
    not_null(options, "options");
    not_null(out, "out");
    *out = nullptr;
    gpasv::SweepPlan plan;
    switch (options->axis) {
      case GPASV_AXIS_ALPHA: plan.axis = gpasv::SweepAxis::kAlphaOnly; break;
      case GPASV_AXIS_BETA: plan.axis = gpasv::SweepAxis::kBetaOnly; break;
      case GPASV_AXIS_JOINT: plan.axis = gpasv::SweepAxis::kJoint; break;
      default: gpasv::fail(ErrorKind::kInvalidArgument, "unknown sweep axis");
    }
    if (options->temps != nullptr) {
      require(options->n_temps >= 1, "temperature count must be positive");
      plan.temps.assign(options->temps, options->temps + options->n_temps);
    }
    const int n = params->params.n();
    plan.omega = params->raw.omega;
    plan.latent = options->latent ? std::vector<double>(options->latent, options->latent + n)
                                  : gpasv::sweep_latent(params->raw);
    plan.fixed_alpha = options->fixed_alpha;
    plan.fixed_beta = options->fixed_beta;
    plan.budget = options->budget;
    plan.reuse = options->reuse != 0;
    plan.refresh_floor = options->refresh_floor;
    plan.seed = options->seed;
    if (options->burn_in >= 0) plan.burn_in = options->burn_in;
    plan.thinning = options->thinning;
    plan.lazy_prob = options->lazy_prob;
    plan.threads = options->threads;
    if (options->group != nullptr) {
      require(options->group_size >= 1, "group must be nonempty");
      plan.group = std::vector<int>(options->group, options->group + options->group_size);
    }
    report = new gpasv_sweep_report{gpasv::run_sweep(plan, *oracle->oracle), plan.group};
    *out = report;
  });
  if (built != GPASV_OK) return built;
  if (!report->report.complete) {
    last_error = report->report.error;
    return to_status(report->report.error_kind);
  }
  return GPASV_OK;
}

int gpasv_sweep_report_size(const gpasv_sweep_report* report) {
  return report ? static_cast<int>(report->report.settings.size()) : 0;
}
int gpasv_sweep_report_complete(const gpasv_sweep_report* report) { return report && report->report.complete ? 1 : 0; }
int64_t gpasv_sweep_report_total_fresh(const gpasv_sweep_report* report) {
  return report ? report->report.total_fresh() : 0;
}

gpasv_status gpasv_sweep_report_setting(const gpasv_sweep_report* report, int k, gpasv_sweep_setting_info* info,
                                        double* values, double* mean_position) {
  return guarded([&] {
    not_null(report, "report");
    const auto& settings = report->report.settings;
    require(k >= 0 && static_cast<std::size_t>(k) < settings.size(), "setting index out of range");
    const auto& s = settings[static_cast<std::size_t>(k)];
    if (info) {
      info->temp = s.temp;
      info->alpha = s.alpha;
      info->beta = s.beta;
      info->ess_in = s.ess_in;
      info->n_new = s.n_new;
      info->n_reused = s.n_reused;
      info->full_refresh = s.full_refresh ? 1 : 0;
      info->distinct_evals = s.distinct_evals;
      info->oracle_calls = s.oracle_calls;
      info->group_sum = info->group_mean_position = std::numeric_limits<double>::quiet_NaN();
      if (report->group) {
        const auto g = gpasv::group_summary(report->report, *report->group)[static_cast<std::size_t>(k)];
        info->group_sum = g.group_sum;
        info->group_mean_position = g.mean_position;
      }
    }
    if (values) std::copy(s.estimate.values.begin(), s.estimate.values.end(), values);
    if (mean_position) std::copy(s.mean_position.begin(), s.mean_position.end(), mean_position);
  });
}

gpasv_status gpasv_sweep_report_json(const gpasv_sweep_report* report, char** out) {
  return guarded([&] {
    not_null(report, "report");
    not_null(out, "out");
    const std::string text = gpasv::sweep_report_json(report->report, report->group);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void gpasv_sweep_report_destroy(gpasv_sweep_report* report) { delete report; }

void gpasv_mixing_options_init(gpasv_mixing_options* options) {
  if (options == nullptr) return;
  *options = gpasv_mixing_options{};
  options->n_chains = 1000;
  options->epsilon = 0.25;
  options->guard = 0.02;
  options->init = GPASV_INIT_GREEDY;
  options->lazy_prob = 0.5;
  options->threads = 1;
}

gpasv_status gpasv_mixing_run(const gpasv_params* params, const gpasv_mixing_options* options,
                              gpasv_mixing_result** out) {
  return guarded([&] {
    not_null(params, "params");
    not_null(options, "options");
    not_null(out, "out");
    gpasv::MixingConfig c;
    c.n_chains = options->n_chains;
    c.epsilon = options->epsilon;
    c.guard = options->guard;
    require(options->init == GPASV_INIT_GREEDY || options->init == GPASV_INIT_RANDOM, "unknown init scheme");
    c.init = options->init == GPASV_INIT_GREEDY ? gpasv::InitScheme::kGreedy : gpasv::InitScheme::kRandom;
    c.seed = options->seed;
    c.lazy_prob = options->lazy_prob;
    c.threads = options->threads;
    c.full_curve = options->full_curve != 0;
    if (options->horizon > 0) c.horizon = options->horizon;
    *out = new gpasv_mixing_result{gpasv::practical_mixing_time(params->params, c)};
  });
}

int gpasv_mixing_crossing(const gpasv_mixing_result* result, int64_t* t) {
  if (result == nullptr || !result->result.crossing) return 0;
  if (t) *t = *result->result.crossing;
  return 1;
}

int64_t gpasv_mixing_horizon(const gpasv_mixing_result* result) { return result ? result->result.horizon : 0; }

int gpasv_mixing_point_count(const gpasv_mixing_result* result) {
  return result ? static_cast<int>(result->result.checkpoints.size() + result->result.probes.size()) : 0;
}

gpasv_status gpasv_mixing_point(const gpasv_mixing_result* result, int k, int64_t* t, double* deviation,
                                int* is_probe) {
  return guarded([&] {
    not_null(result, "result");
    const auto& cps = result->result.checkpoints;
    const auto& probes = result->result.probes;
    require(k >= 0 && static_cast<std::size_t>(k) < cps.size() + probes.size(), "point index out of range");
    const bool probe = static_cast<std::size_t>(k) >= cps.size();
    const auto& p = probe ? probes[static_cast<std::size_t>(k) - cps.size()] : cps[static_cast<std::size_t>(k)];
    if (t) *t = p.t;
    if (deviation) *deviation = p.deviation;
    if (is_probe) *is_probe = probe ? 1 : 0;
  });
}

void gpasv_mixing_result_destroy(gpasv_mixing_result* result) { delete result; }

}  // extern "C"

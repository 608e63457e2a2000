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

// Exercises the shared library through its C header only.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "gpasv/gpasv.h"

namespace fs = std::filesystem;

namespace {

// Owns a C handle for the duration of a test.
template <class T, void (*Destroy)(T*)>
struct Owned {
  T* p = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Destroy(p); }
  T** out() { return &p; }
  operator T*() const { return p; }
};
using Params = Owned<gpasv_params, gpasv_params_destroy>;
using Oracle = Owned<gpasv_oracle, gpasv_oracle_destroy>;
using Batch = Owned<gpasv_batch, gpasv_batch_destroy>;
using Report = Owned<gpasv_sweep_report, gpasv_sweep_report_destroy>;
using Mixing = Owned<gpasv_mixing_result, gpasv_mixing_result_destroy>;
using Game = Owned<gpasv_game, gpasv_game_destroy>;

// The 5-player cyclic instance used across the suite.
const std::vector<double> kOmega = [] {
  std::vector<double> w(25, 0.0);
  w[0 * 5 + 1] = 3;
  w[1 * 5 + 2] = 4;
  w[2 * 5 + 0] = 1;
  w[2 * 5 + 3] = 6;
  return w;
}();
const std::vector<double> kLambda{1, 2, 3, 4, 5};

void make_params(Params& p, double beta = 1.0) {
  REQUIRE(gpasv_params_create(5, kOmega.data(), beta, kLambda.data(), p.out()) == GPASV_OK);
}

// Unanimity terms {0,1}, {2,3,4} and {4}.
void make_game(Oracle& o) {
  const std::vector<uint64_t> masks{0b00011, 0b11100, 0b10000};
  const std::vector<double> coeffs{1.0, 2.0, 0.5};
  REQUIRE(gpasv_oracle_sou(5, 3, masks.data(), coeffs.data(), o.out()) == GPASV_OK);
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::string last_error() { return gpasv_last_error(); }

int cardinality_fn(uint64_t mask, double* value, void* user) {
  static_cast<std::atomic<int>*>(user)->fetch_add(1);
  *value = static_cast<double>(__builtin_popcountll(mask));
  return 0;
}

int refuse_pairs(uint64_t mask, double* value, void*) {
  if (__builtin_popcountll(mask) == 2) return 1;
  *value = 1.0;
  return 0;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(gpasv_version()) == "1.0.0");
  CHECK(std::string(gpasv_status_name(GPASV_E_LIMIT_EXCEEDED)) == "limit exceeded");
  CHECK(std::string(gpasv_status_name(static_cast<gpasv_status>(42))) == "unknown status");
}

TEST_CASE("parameter handles") {
  Params p;
  make_params(p);
  CHECK(gpasv_params_n(p) == 5);
  CHECK(gpasv_params_beta(p) == 1.0);
  std::vector<double> lambda(5);
  CHECK(gpasv_params_lambda(p, lambda.data()) == GPASV_OK);
  CHECK(lambda == kLambda);
  CHECK(gpasv_params_player_label(p, 0) == nullptr);
  const int identity[] = {0, 1, 2, 3, 4};
  double lp = 0.0;
  CHECK(gpasv_params_log_pmf(p, identity, &lp) == GPASV_OK);
  CHECK(std::isfinite(lp));
  CHECK(lp < 0.0);
  const int repeated[] = {0, 0, 2, 3, 4};
  CHECK(gpasv_params_log_pmf(p, repeated, &lp) == GPASV_E_INVALID_ARGUMENT);
  CHECK(!last_error().empty());

  Params bad;
  std::vector<double> negative = kOmega;
  negative[1] = -1.0;
  CHECK(gpasv_params_create(5, negative.data(), 1.0, kLambda.data(), bad.out()) == GPASV_E_INVALID_ARGUMENT);
  CHECK(bad.p == nullptr);
  CHECK(gpasv_params_create(5, kOmega.data(), 1.0, nullptr, bad.out()) == GPASV_E_INVALID_ARGUMENT);
  CHECK(last_error().find("lambda") != std::string::npos);
  CHECK(gpasv_params_create(5, kOmega.data(), -1.0, kLambda.data(), bad.out()) == GPASV_E_INVALID_ARGUMENT);
  CHECK(gpasv_params_create(0, kOmega.data(), 1.0, kLambda.data(), bad.out()) == GPASV_E_INVALID_ARGUMENT);

  Params latent;
  const double z[] = {0, 1, 0, 1, 0};
  REQUIRE(gpasv_params_create_latent(5, kOmega.data(), 1.0, z, std::log(2.0), latent.out()) == GPASV_OK);
  CHECK(gpasv_params_lambda(latent, lambda.data()) == GPASV_OK);
  CHECK(lambda[1] == doctest::Approx(0.5));

  const auto dir = fs::temp_directory_path() / "gpasv_capi_params";
  fs::create_directories(dir);
  std::ofstream(dir / "g.json") << R"({"n": 2, "beta": 1, "edges": [[0, 1, 2]], "lambda": [1, 3], "players": ["ann", "bo"]})";
  std::ofstream(dir / "broken.json") << "{\"n\": ";
  Params loaded;
  REQUIRE(gpasv_params_load_json((dir / "g.json").c_str(), loaded.out()) == GPASV_OK);
  CHECK(std::string(gpasv_params_player_label(loaded, 1)) == "bo");
  CHECK(gpasv_params_player_label(loaded, 2) == nullptr);
  Params broken;
  CHECK(gpasv_params_load_json((dir / "broken.json").c_str(), broken.out()) == GPASV_E_PARSE);
  CHECK(gpasv_params_load_json((dir / "none.json").c_str(), broken.out()) == GPASV_E_IO);
  fs::remove_all(dir);
}

TEST_CASE("errors are reported per thread") {
  Params bad;
  CHECK(gpasv_params_create(0, nullptr, 1.0, kLambda.data(), bad.out()) != GPASV_OK);
  const std::string mine = last_error();
  std::string theirs = "unset";
  std::thread([&] { theirs = last_error(); }).join();
  CHECK(!mine.empty());
  CHECK(theirs.empty());
}

TEST_CASE("oracles") {
  Oracle g;
  make_game(g);
  CHECK(gpasv_oracle_n(g) == 5);
  double v = 0.0;
  CHECK(gpasv_oracle_evaluate(g, 0b11111, &v) == GPASV_OK);
  CHECK(v == 3.5);
  CHECK(gpasv_oracle_evaluate(g, uint64_t{1} << 5, &v) == GPASV_E_INVALID_ARGUMENT);
  const uint64_t outside[] = {uint64_t{1} << 7};
  const double c[] = {1.0};
  Oracle bad;
  CHECK(gpasv_oracle_sou(5, 1, outside, c, bad.out()) == GPASV_E_INVALID_ARGUMENT);

  std::atomic<int> calls{0};
  Oracle cb;
  REQUIRE(gpasv_oracle_callback(5, cardinality_fn, &calls, cb.out()) == GPASV_OK);
  Oracle cached;
  REQUIRE(gpasv_oracle_cached(cb, nullptr, cached.out()) == GPASV_OK);
  for (int k = 0; k < 3; ++k) CHECK(gpasv_oracle_evaluate(cached, 0b101, &v) == GPASV_OK);
  CHECK(v == 2.0);
  int64_t distinct = 0, total_calls = 0, loaded = 0;
  CHECK(gpasv_oracle_cache_stats(cached, &distinct, &total_calls, &loaded) == GPASV_OK);
  CHECK(distinct == 1);
  CHECK(total_calls == 3);
  CHECK(loaded == 0);
  CHECK(calls.load() == 1);
  CHECK(gpasv_oracle_cache_stats(g, &distinct, &total_calls, &loaded) == GPASV_E_INVALID_ARGUMENT);

  Oracle picky;
  REQUIRE(gpasv_oracle_callback(3, refuse_pairs, nullptr, picky.out()) == GPASV_OK);
  CHECK(gpasv_oracle_evaluate(picky, 0b011, &v) == GPASV_E_MISSING_UTILITY);
  CHECK(last_error().find("mask 3") != std::string::npos);
}

TEST_CASE("sampling and batches") {
  Params p;
  make_params(p);
  gpasv_chain_options opt;
  gpasv_chain_options_init(&opt);
  CHECK(opt.n_samples == 1000);
  CHECK(opt.thinning == 1000);
  opt.n_samples = 40;
  opt.burn_in = 50;
  opt.thinning = 5;
  opt.seed = 3;
  Batch b;
  REQUIRE(gpasv_sample(p, &opt, b.out()) == GPASV_OK);
  CHECK(gpasv_batch_size(b) == 40);
  CHECK(gpasv_batch_n(b) == 5);
  std::vector<int> order(5);
  CHECK(gpasv_batch_get(b, 39, order.data()) == GPASV_OK);
  CHECK(gpasv_batch_get(b, 40, order.data()) == GPASV_E_INVALID_ARGUMENT);

  const auto path = fs::temp_directory_path() / "gpasv_capi_batch.txt";
  REQUIRE(gpasv_batch_save(b, path.c_str()) == GPASV_OK);
  Batch back;
  REQUIRE(gpasv_batch_load(path.c_str(), p, back.out()) == GPASV_OK);
  std::vector<int> again(5);
  for (int64_t k = 0; k < 40; ++k) {
    gpasv_batch_get(b, k, order.data());
    gpasv_batch_get(back, k, again.data());
    CHECK(order == again);
  }
  fs::remove(path);
  opt.thinning = 0;
  Batch none;
  CHECK(gpasv_sample(p, &opt, none.out()) == GPASV_E_INVALID_ARGUMENT);
}

TEST_CASE("estimators through the C interface") {
  Params p, q;
  make_params(p, 1.0);
  make_params(q, 1.2);
  Oracle g;
  make_game(g);
  gpasv_chain_options opt;
  gpasv_chain_options_init(&opt);
  opt.n_samples = 300;
  opt.burn_in = 100;
  opt.thinning = 10;
  opt.seed = 9;
  Batch b;
  REQUIRE(gpasv_sample(p, &opt, b.out()) == GPASV_OK);

  std::vector<double> direct(5), via_value(5), sd(5), snis(5), hybrid(5);
  gpasv_estimate_info info{};
  REQUIRE(gpasv_direct_mc(b, g, 2, direct.data(), &info) == GPASV_OK);
  CHECK(total(direct) == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(info.n_samples == 300);
  CHECK(info.distinct_evals == -1);
  REQUIRE(gpasv_estimate_value(p, g, &opt, 1, 2, via_value.data(), sd.data(), &info) == GPASV_OK);
  CHECK(via_value == direct);
  CHECK(std::isnan(sd[0]));
  REQUIRE(gpasv_estimate_value(p, g, &opt, 4, 2, via_value.data(), sd.data(), &info) == GPASV_OK);
  CHECK(info.n_samples == 1200);
  CHECK(sd[4] > 0.0);

  std::vector<double> w(300);
  REQUIRE(gpasv_snis_weights(p, p, b, w.data()) == GPASV_OK);
  for (double x : w) CHECK(x == 1.0);
  double e = 0.0;
  CHECK(gpasv_ess(w.data(), 300, &e) == GPASV_OK);
  CHECK(e == 300.0);
  REQUIRE(gpasv_snis_weights(p, q, b, w.data()) == GPASV_OK);
  REQUIRE(gpasv_snis_estimate(w.data(), b, g, snis.data(), &info) == GPASV_OK);
  CHECK(total(snis) == doctest::Approx(3.5).epsilon(1e-12));
  REQUIRE(gpasv_hybrid_estimate(nullptr, nullptr, b, g, hybrid.data(), &info) == GPASV_OK);
  CHECK(hybrid == direct);
  CHECK(gpasv_hybrid_estimate(nullptr, nullptr, nullptr, g, hybrid.data(), &info) == GPASV_E_INVALID_ARGUMENT);
  const double zeros[] = {0.0, 0.0};
  CHECK(gpasv_ess(zeros, 2, &e) == GPASV_E_INVALID_ARGUMENT);

  Params other;
  std::vector<double> omega6(36, 0.0);
  std::vector<double> lambda6(6, 1.0);
  REQUIRE(gpasv_params_create(6, omega6.data(), 0.0, lambda6.data(), other.out()) == GPASV_OK);
  CHECK(gpasv_snis_weights(p, other, b, w.data()) == GPASV_E_INVALID_ARGUMENT);
}

TEST_CASE("exact routines and their limits") {
  Params p;
  make_params(p, 50.0);
  Oracle g;
  make_game(g);
  std::vector<double> v(5), pw(25);
  REQUIRE(gpasv_exact_values(p, g, v.data()) == GPASV_OK);
  CHECK(total(v) == doctest::Approx(3.5).epsilon(1e-12));
  double asym = -1.0;
  REQUIRE(gpasv_exact_pairwise(p, pw.data(), &asym) == GPASV_OK);
  CHECK(asym >= 0.0);
  CHECK(pw[0 * 5 + 1] + pw[1 * 5 + 0] == 1.0);
  double lz = 0.0;
  CHECK(gpasv_exact_log_normalizer(p, &lz) == GPASV_OK);
  CHECK(std::isfinite(lz));

  for (const int n : {11, 25}) {
    Params big;
    std::vector<double> omega(static_cast<std::size_t>(n * n), 0.0);
    std::vector<double> lambda(static_cast<std::size_t>(n), 1.0);
    REQUIRE(gpasv_params_create(n, omega.data(), 0.0, lambda.data(), big.out()) == GPASV_OK);
    Oracle game;
    const uint64_t m[] = {1};
    const double c[] = {1.0};
    REQUIRE(gpasv_oracle_sou(n, 1, m, c, game.out()) == GPASV_OK);
    std::vector<double> out(static_cast<std::size_t>(n * n));
    CHECK(gpasv_exact_values(big, game, out.data()) == GPASV_E_LIMIT_EXCEEDED);
    CHECK(gpasv_exact_pairwise(big, out.data(), nullptr) == (n == 11 ? GPASV_OK : GPASV_E_LIMIT_EXCEEDED));
  }
}

TEST_CASE("persisted cache makes reruns free") {
  Params p;
  make_params(p);
  Oracle g;
  make_game(g);
  const auto path = fs::temp_directory_path() / "gpasv_capi_cache.csv";
  fs::remove(path);
  gpasv_chain_options opt;
  gpasv_chain_options_init(&opt);
  opt.n_samples = 200;
  opt.burn_in = 50;
  opt.thinning = 5;
  std::vector<double> first(5), second(5);
  int64_t distinct = 0, calls = 0, loaded = 0;
  {
    Oracle cached;
    REQUIRE(gpasv_oracle_cached(g, path.c_str(), cached.out()) == GPASV_OK);
    REQUIRE(gpasv_estimate_value(p, cached, &opt, 2, 2, first.data(), nullptr, nullptr) == GPASV_OK);
    gpasv_oracle_cache_stats(cached, &distinct, &calls, &loaded);
    CHECK(distinct > 0);
    CHECK(loaded == 0);
  }
  const int64_t paid = distinct;
  Oracle cached;
  REQUIRE(gpasv_oracle_cached(g, path.c_str(), cached.out()) == GPASV_OK);
  gpasv_estimate_info info{};
  REQUIRE(gpasv_estimate_value(p, cached, &opt, 2, 2, second.data(), nullptr, &info) == GPASV_OK);
  gpasv_oracle_cache_stats(cached, &distinct, &calls, &loaded);
  CHECK(distinct == 0);
  CHECK(loaded == paid);
  CHECK(info.distinct_evals == 0);
  CHECK(first == second);
  fs::remove(path);
}

TEST_CASE("sweeps through the C interface") {
  Params p;
  make_params(p);
  Oracle g;
  make_game(g);
  gpasv_sweep_options opt;
  gpasv_sweep_options_init(&opt);
  CHECK(opt.budget == 1000);
  CHECK(opt.refresh_floor == 500);
  CHECK(opt.reuse == 1);
  const double temps[] = {0, 1, 2};
  const int group[] = {2, 3, 4};
  opt.temps = temps;
  opt.n_temps = 3;
  opt.budget = 200;
  opt.refresh_floor = 20;
  opt.thinning = 10;
  opt.burn_in = 100;
  opt.group = group;
  opt.group_size = 3;
  Report r;
  REQUIRE(gpasv_sweep_run(p, g, &opt, r.out()) == GPASV_OK);
  CHECK(gpasv_sweep_report_size(r) == 3);
  CHECK(gpasv_sweep_report_complete(r) == 1);
  gpasv_sweep_setting_info info{};
  std::vector<double> values(5), pos(5);
  REQUIRE(gpasv_sweep_report_setting(r, 0, &info, values.data(), pos.data()) == GPASV_OK);
  CHECK(info.n_new == 200);
  CHECK(info.full_refresh == 1);
  CHECK(info.group_sum == doctest::Approx(values[2] + values[3] + values[4]));
  CHECK(total(pos) == doctest::Approx(15.0));
  CHECK(gpasv_sweep_report_setting(r, 3, &info, nullptr, nullptr) == GPASV_E_INVALID_ARGUMENT);
  char* json = nullptr;
  REQUIRE(gpasv_sweep_report_json(r, &json) == GPASV_OK);
  CHECK(std::string(json).find("\"group_sum\"") != std::string::npos);
  gpasv_free_string(json);

  opt.group = nullptr;
  opt.group_size = 0;
  Report plain;
  REQUIRE(gpasv_sweep_run(p, g, &opt, plain.out()) == GPASV_OK);
  gpasv_sweep_report_setting(plain, 1, &info, nullptr, nullptr);
  CHECK(std::isnan(info.group_sum));

  // An oracle failing partway still hands back the finished settings.
  Oracle picky;
  REQUIRE(gpasv_oracle_callback(5, refuse_pairs, nullptr, picky.out()) == GPASV_OK);
  Report partial;
  CHECK(gpasv_sweep_run(p, picky, &opt, partial.out()) == GPASV_E_MISSING_UTILITY);
  REQUIRE(partial.p != nullptr);
  CHECK(gpasv_sweep_report_complete(partial) == 0);
  CHECK(gpasv_sweep_report_size(partial) == 0);

  const double decreasing[] = {1, 0};
  opt.temps = decreasing;
  opt.n_temps = 2;
  Report invalid;
  CHECK(gpasv_sweep_run(p, g, &opt, invalid.out()) == GPASV_E_INVALID_ARGUMENT);
  CHECK(invalid.p == nullptr);
}

TEST_CASE("mixing through the C interface") {
  Params p;
  make_params(p, 2.0);
  gpasv_mixing_options opt;
  gpasv_mixing_options_init(&opt);
  CHECK(opt.n_chains == 1000);
  CHECK(opt.epsilon == 0.25);
  opt.n_chains = 200;
  opt.seed = 4;
  Mixing m;
  REQUIRE(gpasv_mixing_run(p, &opt, m.out()) == GPASV_OK);
  int64_t t = 0;
  CHECK(gpasv_mixing_crossing(m, &t) == 1);
  CHECK(t >= 1);
  CHECK(gpasv_mixing_horizon(m) == static_cast<int64_t>(std::ceil(125 * std::log(5.0))));
  const int count = gpasv_mixing_point_count(m);
  CHECK(count >= 1);
  double d = 0.0;
  int probe = -1;
  REQUIRE(gpasv_mixing_point(m, 0, &t, &d, &probe) == GPASV_OK);
  CHECK(t == 1);
  CHECK(probe == 0);
  CHECK(gpasv_mixing_point(m, count, &t, &d, &probe) == GPASV_E_INVALID_ARGUMENT);
  opt.init = 7;
  Mixing bad;
  CHECK(gpasv_mixing_run(p, &opt, bad.out()) == GPASV_E_INVALID_ARGUMENT);
}

TEST_CASE("matched budget through the C interface") {
  Game game;
  const auto path = fs::temp_directory_path() / "gpasv_capi_game.json";
  std::ofstream(path) << R"({"type": "scenario1", "n": 10, "case": 2, "seed": 1})";
  REQUIRE(gpasv_game_load_json(path.c_str(), 0, game.out()) == GPASV_OK);
  fs::remove(path);
  REQUIRE(gpasv_game_has_params(game) == 1);
  REQUIRE(gpasv_game_has_target(game) == 1);
  Params p;
  Oracle g;
  REQUIRE(gpasv_game_params(game, p.out()) == GPASV_OK);
  REQUIRE(gpasv_game_oracle(game, g.out()) == GPASV_OK);
  std::vector<double> target(10);
  REQUIRE(gpasv_game_target(game, target.data()) == GPASV_OK);

  gpasv_chain_options chain;
  gpasv_chain_options_init(&chain);
  chain.n_samples = 200;
  chain.thinning = 20;
  gpasv_surrogate_options so;
  gpasv_surrogate_options_init(&so);
  CHECK(so.free_samples == 100000);
  CHECK(so.train_fraction == 0.2);
  CHECK(so.train_cap == 200000);
  CHECK(so.interaction_fraction == 0.1);
  so.free_samples = 2000;
  std::vector<double> direct(10), linear(10), quadratic(10);
  int64_t k_eval = 0, k_train = 0;
  REQUIRE(gpasv_matched_budget(p, g, &chain, &so, direct.data(), linear.data(), quadratic.data(), &k_eval,
                               &k_train) == GPASV_OK);
  CHECK(k_eval > 0);
  CHECK(k_train == static_cast<int64_t>(std::floor(0.2 * static_cast<double>(k_eval))));
  CHECK(total(direct) == doctest::Approx(total(target)).epsilon(1e-9));
  for (double x : quadratic) CHECK(std::isfinite(x));
}

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

// Command-line front end. Links only the C API.

#include <gpasv/gpasv.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

// Exit codes: 1 for unreadable or malformed input, 2 for contract violations.
struct CliFailure {
  int code;
  std::string message;
};

int exit_code(gpasv_status s) {
  switch (s) {
    case GPASV_OK: return 0;
    case GPASV_E_PARSE:
    case GPASV_E_IO: return 1;
    case GPASV_E_INTERNAL: return 3;
    default: return 2;
  }
}

void check(gpasv_status s) {
  if (s != GPASV_OK) throw CliFailure{exit_code(s), gpasv_last_error()};
}

[[noreturn]] void contract(const std::string& what) { throw CliFailure{2, what}; }

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using ParamsPtr = std::unique_ptr<gpasv_params, Deleter<gpasv_params, gpasv_params_destroy>>;
using OraclePtr = std::unique_ptr<gpasv_oracle, Deleter<gpasv_oracle, gpasv_oracle_destroy>>;
using GamePtr = std::unique_ptr<gpasv_game, Deleter<gpasv_game, gpasv_game_destroy>>;
using BatchPtr = std::unique_ptr<gpasv_batch, Deleter<gpasv_batch, gpasv_batch_destroy>>;
using SweepPtr = std::unique_ptr<gpasv_sweep_report, Deleter<gpasv_sweep_report, gpasv_sweep_report_destroy>>;
using MixingPtr = std::unique_ptr<gpasv_mixing_result, Deleter<gpasv_mixing_result, gpasv_mixing_result_destroy>>;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  for (char* c = buf; *c; ++c) {
    if (*c == ',') *c = '.';
  }
  return buf;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliFailure{1, "cannot write " + path};
  return f;
}

// Graph from --graph, or from a preset game when no graph is given.
struct Problem {
  ParamsPtr params;
  GamePtr game;
  OraclePtr oracle;
  int n = 0;
};

Problem load_problem(const std::string& graph, const std::string& game, bool need_game) {
  Problem p;
  if (!graph.empty()) {
    gpasv_params* raw = nullptr;
    check(gpasv_params_load_json(graph.c_str(), &raw));
    p.params.reset(raw);
    p.n = gpasv_params_n(raw);
  }
  if (!game.empty()) {
    gpasv_game* g = nullptr;
    check(gpasv_game_load_json(game.c_str(), p.n, &g));
    p.game.reset(g);
    if (p.n == 0) p.n = gpasv_game_n(g);
    if (gpasv_game_n(g) != p.n) contract("game has " + std::to_string(gpasv_game_n(g)) + " players, graph has " +
                                         std::to_string(p.n));
    gpasv_oracle* o = nullptr;
    check(gpasv_game_oracle(g, &o));
    p.oracle.reset(o);
    if (!p.params) {
      if (!gpasv_game_has_params(g)) contract("--graph is required for this game type");
      gpasv_params* raw = nullptr;
      check(gpasv_game_params(g, &raw));
      p.params.reset(raw);
    }
  } else if (need_game) {
    contract("--game is required");
  }
  if (!p.params) contract("--graph is required");
  return p;
}

OraclePtr wrap_cache(const gpasv_oracle* inner, const std::string& path) {
  gpasv_oracle* c = nullptr;
  check(gpasv_oracle_cached(inner, path.empty() ? nullptr : path.c_str(), &c));
  return OraclePtr(c);
}

std::string label(const gpasv_params* params, int i) {
  const char* l = gpasv_params_player_label(params, i);
  return l ? std::string(l) : std::to_string(i);
}

void write_values(const std::string& path, const gpasv_params* params, const std::vector<double>& values,
                  const std::vector<double>* std_dev) {
  auto f = open_out(path);
  f << "player,value,std\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    f << label(params, static_cast<int>(i)) << ',' << fmt(values[i]) << ',';
    if (std_dev && !std::isnan((*std_dev)[i])) f << fmt((*std_dev)[i]);
    f << '\n';
  }
}

struct ChainFlags {
  int64_t samples = 1000;
  int64_t burnin = -1;
  int64_t thin = 1000;
  double lazy = 0.5;
  uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--samples", samples, "post-burn-in samples per chain")->check(CLI::PositiveNumber);
    app->add_option("--burnin", burnin, "burn-in steps (default ceil(n^2.5))");
    app->add_option("--thin", thin, "steps between retained samples")->check(CLI::PositiveNumber);
    app->add_option("--lazy", lazy, "lazy (hold) probability")->check(CLI::Range(0.0, 1.0));
    app->add_option("--seed", seed, "root seed; every sub-seed is derived from it");
  }

  [[nodiscard]] gpasv_chain_options options() const {
    gpasv_chain_options o;
    gpasv_chain_options_init(&o);
    o.n_samples = samples;
    o.burn_in = burnin;
    o.thinning = thin;
    o.lazy_prob = lazy;
    o.seed = seed;
    return o;
  }
};

struct ValueCmd {
  std::string graph, game, cache, out;
  ChainFlags chain;
  int replicates = 1;
  int threads = 1;

  int run() const {
    auto p = load_problem(graph, game, true);
    auto oracle = wrap_cache(p.oracle.get(), cache);
    const auto opts = chain.options();
    std::vector<double> values(static_cast<std::size_t>(p.n)), sd(values.size());
    gpasv_estimate_info info{};
    check(gpasv_estimate_value(p.params.get(), oracle.get(), &opts, replicates, threads, values.data(), sd.data(),
                               &info));
    write_values(out, p.params.get(), values, &sd);
    nlohmann::json meta = {
        {"command", "value"},
        {"version", gpasv_version()},
        {"graph", graph},
        {"game", game},
        {"n", p.n},
        {"samples", chain.samples},
        {"burnin", chain.burnin},
        {"thin", chain.thin},
        {"lazy", chain.lazy},
        {"seed", chain.seed},
        {"replicates", replicates},
        {"threads", threads},
        {"n_samples", info.n_samples},
        {"distinct_evals", info.distinct_evals},
        {"params_fingerprint", info.params_fingerprint},
        {"timestamp", timestamp()},
    };
    if (!cache.empty()) meta["cache"] = cache;
    if (p.game && gpasv_game_has_target(p.game.get())) {
      std::vector<double> target(values.size());
      check(gpasv_game_target(p.game.get(), target.data()));
      meta["closed_form_target"] = target;
    }
    open_out(out + ".json") << meta.dump(2) << '\n';
    return 0;
  }
};

struct ExactCmd {
  std::string graph, game, mode = "values", out;

  int run() const {
    auto p = load_problem(graph, game, mode == "values");
    auto f = open_out(out);
    if (mode == "pairwise") {
      const auto n = static_cast<std::size_t>(p.n);
      std::vector<double> pw(n * n);
      double asym = 0.0;
      check(gpasv_exact_pairwise(p.params.get(), pw.data(), &asym));
      f << "i,j,p\n";
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i != j) f << i << ',' << j << ',' << fmt(pw[i * n + j]) << '\n';
        }
      }
    } else {
      std::vector<double> values(static_cast<std::size_t>(p.n));
      check(gpasv_exact_values(p.params.get(), p.oracle.get(), values.data()));
      f.close();
      write_values(out, p.params.get(), values, nullptr);
    }
    return 0;
  }
};

struct SampleCmd {
  std::string graph, out;
  ChainFlags chain;

  int run() const {
    auto p = load_problem(graph, "", false);
    const auto opts = chain.options();
    gpasv_batch* b = nullptr;
    check(gpasv_sample(p.params.get(), &opts, &b));
    BatchPtr batch(b);
    if (auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
    check(gpasv_batch_save(batch.get(), out.c_str()));
    return 0;
  }
};

struct SweepCmd {
  std::string graph, game, axis = "joint", out_dir, cache;
  std::vector<double> temps{0, 1, 2, 4, 8, 16, 32};
  std::vector<int> group;
  int64_t budget = 1000;
  int64_t refresh_floor = 500;
  bool no_reuse = false;
  double fixed_alpha = 0.0;
  double fixed_beta = 0.0;
  int64_t burnin = -1;
  int64_t thin = 1000;
  double lazy = 0.5;
  uint64_t seed = 0;
  int threads = 1;

  int run() const {
    auto p = load_problem(graph, game, true);
    auto oracle = wrap_cache(p.oracle.get(), cache);
    gpasv_sweep_options o;
    gpasv_sweep_options_init(&o);
    if (axis == "alpha" || axis == "alpha_only") o.axis = GPASV_AXIS_ALPHA;
    else if (axis == "beta" || axis == "beta_only") o.axis = GPASV_AXIS_BETA;
    else if (axis == "joint") o.axis = GPASV_AXIS_JOINT;
    else contract("unknown axis '" + axis + "'");
    o.temps = temps.data();
    o.n_temps = static_cast<int>(temps.size());
    o.budget = budget;
    o.reuse = no_reuse ? 0 : 1;
    o.refresh_floor = refresh_floor;
    o.fixed_alpha = fixed_alpha;
    o.fixed_beta = fixed_beta;
    o.seed = seed;
    o.burn_in = burnin;
    o.thinning = thin;
    o.lazy_prob = lazy;
    o.threads = threads;
    if (!group.empty()) {
      o.group = group.data();
      o.group_size = static_cast<int>(group.size());
    }
    gpasv_sweep_report* r = nullptr;
    const gpasv_status status = gpasv_sweep_run(p.params.get(), oracle.get(), &o, &r);
    SweepPtr report(r);
    if (!report) check(status);
    const std::string error = status == GPASV_OK ? "" : gpasv_last_error();

    fs::create_directories(out_dir);
    const auto n = static_cast<std::size_t>(p.n);
    const bool grouped = !group.empty();
    auto summary = open_out((fs::path(out_dir) / "summary.csv").string());
    summary << "setting,temp,alpha,beta,ess_in,n_new,n_reused,full_refresh,distinct_evals,oracle_calls";
    if (grouped) summary << ",group_sum,mean_position";
    summary << '\n';
    for (int k = 0; k < gpasv_sweep_report_size(report.get()); ++k) {
      gpasv_sweep_setting_info info{};
      std::vector<double> values(n), pos(n);
      check(gpasv_sweep_report_setting(report.get(), k, &info, values.data(), pos.data()));
      summary << k << ',' << fmt(info.temp) << ',' << fmt(info.alpha) << ',' << fmt(info.beta) << ','
              << fmt(info.ess_in) << ',' << info.n_new << ',' << info.n_reused << ',' << info.full_refresh << ','
              << info.distinct_evals << ',' << info.oracle_calls;
      if (grouped) summary << ',' << fmt(info.group_sum) << ',' << fmt(info.group_mean_position);
      summary << '\n';
      char name[32];
      std::snprintf(name, sizeof name, "setting_%02d.csv", k);
      auto f = open_out((fs::path(out_dir) / name).string());
      f << "player,value,mean_position\n";
      for (std::size_t i = 0; i < n; ++i) {
        f << label(p.params.get(), static_cast<int>(i)) << ',' << fmt(values[i]) << ',' << fmt(pos[i]) << '\n';
      }
    }
    char* json = nullptr;
    check(gpasv_sweep_report_json(report.get(), &json));
    open_out((fs::path(out_dir) / "report.json").string()) << json << '\n';
    gpasv_free_string(json);
    if (status != GPASV_OK) throw CliFailure{exit_code(status), error + " (partial report written)"};
    return 0;
  }
};

struct MixingCmd {
  std::string graph, init = "greedy", out;
  int chains = 1000;
  double epsilon = 0.25;
  double guard = 0.02;
  double lazy = 0.5;
  uint64_t seed = 0;
  int threads = 1;
  bool full_curve = false;
  int64_t horizon = 0;

  int run() const {
    auto p = load_problem(graph, "", false);
    std::vector<std::pair<std::string, int>> schemes;
    if (init == "greedy" || init == "both") schemes.emplace_back("greedy", GPASV_INIT_GREEDY);
    if (init == "random" || init == "both") schemes.emplace_back("random", GPASV_INIT_RANDOM);
    if (schemes.empty()) contract("unknown init scheme '" + init + "'");
    std::ostringstream csv;
    csv << "init,t,deviation,kind\n";
    for (const auto& [name, scheme] : schemes) {
      gpasv_mixing_options o;
      gpasv_mixing_options_init(&o);
      o.n_chains = chains;
      o.epsilon = epsilon;
      o.guard = guard;
      o.init = scheme;
      o.seed = seed;
      o.lazy_prob = lazy;
      o.threads = threads;
      o.full_curve = full_curve ? 1 : 0;
      o.horizon = horizon;
      gpasv_mixing_result* r = nullptr;
      check(gpasv_mixing_run(p.params.get(), &o, &r));
      MixingPtr result(r);
      for (int k = 0; k < gpasv_mixing_point_count(result.get()); ++k) {
        int64_t t = 0;
        double d = 0.0;
        int probe = 0;
        check(gpasv_mixing_point(result.get(), k, &t, &d, &probe));
        csv << name << ',' << t << ',' << fmt(d) << ',' << (probe ? "probe" : "checkpoint") << '\n';
      }
      int64_t t = 0;
      if (gpasv_mixing_crossing(result.get(), &t)) std::cout << name << " crossing " << t << '\n';
      else std::cout << name << " NotMixed horizon " << gpasv_mixing_horizon(result.get()) << '\n';
    }
    open_out(out) << csv.str();
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Priority-aware Shapley value estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gpasv_version()));

  ValueCmd value;
  auto* v = app.add_subcommand("value", "estimate values by MCMC");
  v->add_option("--graph", value.graph, "priority graph JSON (optional for preset games)");
  v->add_option("--game", value.game, "game spec JSON")->required();
  value.chain.add(v);
  v->add_option("--cache", value.cache, "persisted utility cache CSV");
  v->add_option("--replicates", value.replicates, "independent chains")->check(CLI::PositiveNumber);
  v->add_option("--threads", value.threads, "worker threads")->check(CLI::PositiveNumber);
  v->add_option("--out", value.out, "values CSV; metadata goes to <out>.json")->required();

  ExactCmd exact;
  auto* e = app.add_subcommand("exact", "exact values (n <= 10) or pairwise precedence (n <= 24)");
  e->add_option("--graph", exact.graph, "priority graph JSON");
  e->add_option("--game", exact.game, "game spec JSON (values mode)");
  e->add_option("--mode", exact.mode, "values or pairwise")->check(CLI::IsMember({"values", "pairwise"}));
  e->add_option("--out", exact.out, "output CSV")->required();

  SampleCmd sample;
  auto* s = app.add_subcommand("sample", "write a replayable permutation batch");
  s->add_option("--graph", sample.graph, "priority graph JSON")->required();
  sample.chain.add(s);
  s->add_option("--out", sample.out, "batch file, one permutation per line")->required();

  SweepCmd sweep;
  auto* w = app.add_subcommand(
      "sweep",
      "sweep priority temperature with sample reuse; lambda_i = exp(-alpha z_i), so raising alpha moves players "
      "with larger z earlier in the order");
  w->add_option("--graph", sweep.graph, "priority graph JSON");
  w->add_option("--game", sweep.game, "game spec JSON")->required();
  w->add_option("--axis", sweep.axis, "temperature axis")->check(CLI::IsMember({"alpha", "alpha_only", "beta", "beta_only", "joint"}));
  w->add_option("--temps", sweep.temps, "non-decreasing temperatures")->delimiter(',');
  w->add_option("--budget", sweep.budget, "permutations per setting")->check(CLI::PositiveNumber);
  w->add_flag("--no-reuse", sweep.no_reuse, "draw every setting fresh");
  w->add_option("--refresh-floor", sweep.refresh_floor, "minimum fresh draws per setting");
  w->add_option("--group", sweep.group, "players summarised as a group")->delimiter(',');
  w->add_option("--fixed-alpha", sweep.fixed_alpha, "alpha held on the beta axis");
  w->add_option("--fixed-beta", sweep.fixed_beta, "beta held on the alpha axis");
  w->add_option("--burnin", sweep.burnin, "burn-in steps for fresh draws (default ceil(n^2.5))");
  w->add_option("--thin", sweep.thin, "steps between retained samples")->check(CLI::PositiveNumber);
  w->add_option("--lazy", sweep.lazy, "lazy (hold) probability")->check(CLI::Range(0.0, 1.0));
  w->add_option("--seed", sweep.seed, "root seed");
  w->add_option("--threads", sweep.threads, "worker threads")->check(CLI::PositiveNumber);
  w->add_option("--cache", sweep.cache, "persisted utility cache CSV");
  w->add_option("--out-dir", sweep.out_dir, "output directory")->required();

  MixingCmd mixing;
  auto* m = app.add_subcommand("mixing", "empirical mixing time from pairwise deviation");
  m->add_option("--graph", mixing.graph, "priority graph JSON")->required();
  m->add_option("--chains", mixing.chains, "parallel chains")->check(CLI::PositiveNumber);
  m->add_option("--init", mixing.init, "shared chain start")->check(CLI::IsMember({"greedy", "random", "both"}));
  m->add_option("--epsilon", mixing.epsilon, "deviation threshold");
  m->add_option("--guard", mixing.guard, "guard band below the threshold");
  m->add_option("--lazy", mixing.lazy, "lazy (hold) probability")->check(CLI::Range(0.0, 1.0));
  m->add_option("--seed", mixing.seed, "root seed");
  m->add_option("--threads", mixing.threads, "worker threads")->check(CLI::PositiveNumber);
  m->add_flag("--full-curve", mixing.full_curve, "continue checkpoints to the horizon");
  m->add_option("--horizon", mixing.horizon, "last checkpoint (default ceil(n^3 ln n))");
  m->add_option("--out", mixing.out, "curve CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*v) return value.run();
    if (*e) return exact.run();
    if (*s) return sample.run();
    if (*w) return sweep.run();
    if (*m) return mixing.run();
  } catch (const CliFailure& f) {
    std::cerr << "gpasv: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& ex) {
    std::cerr << "gpasv: " << ex.what() << '\n';
    return 3;
  }
  return 0;
}

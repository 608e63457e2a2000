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

#include "gpasv/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gpasv {
namespace {

using nlohmann::json;

json parse_document(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, source + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json& field(const json& obj, const char* key, const std::string& source) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorKind::kParse, source + ": missing field `" + key + "`");
  return *it;
}

template <class T>
T as(const json& v, const std::string& what, const std::string& source) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kParse, source + ": field `" + what + "` has the wrong type");
  }
}

std::vector<double> number_array(const json& v, const std::string& what, const std::string& source) {
  if (!v.is_array()) fail(ErrorKind::kParse, source + ": field `" + what + "` must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(ErrorKind::kParse, source + ": field `" + what + "` must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<GameTerm> parse_terms(const json& doc, int n, const std::string& source) {
  const auto& terms = field(doc, "terms", source);
  if (!terms.is_array()) fail(ErrorKind::kParse, source + ": `terms` must be an array");
  std::vector<GameTerm> out;
  for (const auto& t : terms) {
    if (!t.is_object()) fail(ErrorKind::kParse, source + ": each term must be an object {\"T\": [...], \"c\": x}");
    GameTerm term;
    const auto& members = field(t, "T", source);
    if (!members.is_array()) fail(ErrorKind::kParse, source + ": term `T` must be an array of player indices");
    for (const auto& m : members) {
      const int i = as<int>(m, "T", source);
      require(i >= 0 && i < n, source + ": term player " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
      term.members |= bit(i);
    }
    term.coeff = as<double>(field(t, "c", source), "c", source);
    out.push_back(term);
  }
  return out;
}

int player_count(const json& doc, std::optional<int> n, const std::string& source) {
  if (const auto it = doc.find("n"); it != doc.end()) {
    const int m = as<int>(*it, "n", source);
    require(!n || *n == m, source + ": game has " + std::to_string(m) + " players but the graph has " + std::to_string(*n));
    return m;
  }
  if (!n) fail(ErrorKind::kParse, source + ": player count unknown; give `n` in the game spec or supply a graph");
  return *n;
}

}  // namespace

GraphSpec parse_graph_json(const std::string& text, const std::string& source) {
  const json doc = parse_document(text, source);
  if (!doc.is_object()) fail(ErrorKind::kParse, source + ": graph file must hold a JSON object");
  const int n = as<int>(field(doc, "n", source), "n", source);
  require(n >= 1 && n <= kMaxPlayers, source + ": player count " + std::to_string(n) + " out of range [1, 64]");
  GraphSpec spec;
  spec.raw.omega = Matrix(n, n);
  spec.raw.beta = as<double>(field(doc, "beta", source), "beta", source);
  std::vector<std::vector<bool>> seen(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  if (const auto it = doc.find("edges"); it != doc.end()) {
    if (!it->is_array()) fail(ErrorKind::kParse, source + ": `edges` must be an array of [i, j, w] triples");
    for (const auto& e : *it) {
      if (!e.is_array() || e.size() != 3) fail(ErrorKind::kParse, source + ": each edge must be an [i, j, w] triple");
      const int i = as<int>(e[0], "edges", source);
      const int j = as<int>(e[1], "edges", source);
      const double w = as<double>(e[2], "edges", source);
      require(i >= 0 && i < n && j >= 0 && j < n,
              source + ": edge (" + std::to_string(i) + ", " + std::to_string(j) + ") outside [0, " + std::to_string(n) + ")");
      if (seen[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
        fail(ErrorKind::kParse, source + ": duplicate edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      seen[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
      spec.raw.omega(i, j) = w;
    }
  }
  const bool has_lambda = doc.contains("lambda");
  const bool has_latent = doc.contains("latent");
  require(has_lambda != has_latent, source + ": exactly one of `lambda` or `latent` must be given");
  if (has_lambda) {
    spec.raw.soft = SoftPriority::weights(number_array(doc["lambda"], "lambda", source));
  } else {
    const auto& lat = doc["latent"];
    if (!lat.is_object()) fail(ErrorKind::kParse, source + ": `latent` must be an object {\"z\": [...], \"alpha\": x}");
    spec.raw.soft = SoftPriority::latent_scores(number_array(field(lat, "z", source), "z", source),
                                                as<double>(field(lat, "alpha", source), "alpha", source));
  }
  if (const auto it = doc.find("players"); it != doc.end()) {
    if (!it->is_array()) fail(ErrorKind::kParse, source + ": `players` must be an array of labels");
    for (const auto& p : *it) spec.players.push_back(as<std::string>(p, "players", source));
    require(static_cast<int>(spec.players.size()) == n, source + ": `players` must list one label per player");
  }
  return spec;
}

GraphSpec load_graph_json(const std::string& path) { return parse_graph_json(read_file(path), path); }

std::vector<double> sweep_latent(const RawParams& raw) {
  if (raw.soft.latent) return raw.soft.latent->z;
  const int n = raw.omega.rows();
  std::vector<double> lambda = raw.soft.lambda ? *raw.soft.lambda : std::vector<double>(static_cast<std::size_t>(n), 1.0);
  double top = 0.0;
  for (const double l : lambda) {
    require(l > 0.0 && std::isfinite(l), "soft priorities must be positive");
    top = std::max(top, std::log(l));
  }
  for (double& l : lambda) l = top - std::log(l);
  return lambda;
}

GameSpec parse_game_json(const std::string& text, std::optional<int> n, const std::string& base_dir,
                         const std::string& source) {
  const json doc = parse_document(text, source);
  if (!doc.is_object()) fail(ErrorKind::kParse, source + ": game spec must hold a JSON object");
  GameSpec spec;
  spec.type = as<std::string>(field(doc, "type", source), "type", source);
  if (spec.type == "sou" || spec.type == "sor") {
    const int m = player_count(doc, n, source);
    auto terms = parse_terms(doc, m, source);
    if (spec.type == "sou") spec.oracle = std::make_shared<SumOfUnanimityGame>(m, std::move(terms));
    else spec.oracle = std::make_shared<SumOfRaceGame>(m, std::move(terms));
  } else if (spec.type == "table") {
    const int m = player_count(doc, n, source);
    std::filesystem::path path = as<std::string>(field(doc, "path", source), "path", source);
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    spec.oracle = std::make_shared<TableOracle>(TableOracle::load(path.string(), m));
  } else if (spec.type == "scenario1" || spec.type == "scenario2") {
    const int m = player_count(doc, n, source);
    const auto regime = regime_case_from_int(as<int>(field(doc, "case", source), "case", source));
    const auto seed = doc.contains("seed") ? as<std::uint64_t>(doc["seed"], "seed", source) : std::uint64_t{0};
    BenchmarkInstance inst = spec.type == "scenario1"
                                 ? make_scenario1(m, regime, seed)
                                 : make_scenario2(m, as<int>(field(doc, "block_size", source), "block_size", source), regime, seed);
    spec.oracle = inst.game;
    spec.params = std::move(inst.params);
    spec.target = std::move(inst.target);
  } else {
    fail(ErrorKind::kParse, source + ": unknown game type `" + spec.type + "`");
  }
  return spec;
}

GameSpec load_game_json(const std::string& path, std::optional<int> n) {
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_game_json(read_file(path), n, dir.empty() ? "." : dir.string(), path);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // snprintf honours LC_NUMERIC; force the decimal point.
  for (char* c = buf; *c != '\0'; ++c) {
    if (*c == ',') *c = '.';
  }
  return buf;
}

void write_values_csv(std::ostream& out, std::span<const double> values, std::span<const double> std,
                      std::span<const std::string> labels) {
  require(std.empty() || std.size() == values.size(), "std vector does not match the value vector");
  require(labels.empty() || labels.size() == values.size(), "label count does not match the value vector");
  out << "player,value,std\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << (labels.empty() ? std::to_string(i) : labels[i]) << ',' << format_double(values[i]) << ',';
    if (!std.empty()) out << format_double(std[i]);
    out << '\n';
  }
}

void write_pairwise_csv(std::ostream& out, const Matrix& p) {
  out << "i,j,p\n";
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      if (i != j) out << i << ',' << j << ',' << format_double(p(i, j)) << '\n';
    }
  }
}

void write_mixing_csv(std::ostream& out, const MixingResult& result) {
  out << "t,deviation,kind\n";
  for (const auto& c : result.checkpoints) out << c.t << ',' << format_double(c.deviation) << ",checkpoint\n";
  for (const auto& c : result.probes) out << c.t << ',' << format_double(c.deviation) << ",probe\n";
}

void write_batch(std::ostream& out, const SampleBatch& batch) {
  for (const auto& pi : batch.samples) {
    const auto o = pi.order();
    for (std::size_t t = 0; t < o.size(); ++t) out << (t ? " " : "") << o[t];
    out << '\n';
  }
}

SampleBatch read_batch(std::istream& in, int n) {
  SampleBatch batch;
  batch.n = n;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::vector<int> order;
    int v = 0;
    while (row >> v) order.push_back(v);
    if (!row.eof()) fail(ErrorKind::kParse, "batch line " + std::to_string(lineno) + ": expected integers");
    if (static_cast<int>(order.size()) != n) {
      fail(ErrorKind::kParse, "batch line " + std::to_string(lineno) + ": expected " + std::to_string(n) + " players");
    }
    batch.push_back(Permutation(std::move(order)), Provenance::kFresh);
  }
  return batch;
}

std::string sweep_report_json(const SweepReport& report, const std::optional<std::vector<int>>& group) {
  json doc;
  doc["axis"] = to_string(report.axis);
  doc["complete"] = report.complete;
  if (!report.complete) doc["error"] = report.error;
  doc["total_fresh"] = report.total_fresh();
  std::vector<GroupPoint> groups;
  if (group) groups = group_summary(report, *group);
  json settings = json::array();
  for (std::size_t k = 0; k < report.settings.size(); ++k) {
    const auto& s = report.settings[k];
    json row;
    row["temp"] = s.temp;
    row["alpha"] = s.alpha;
    row["beta"] = s.beta;
    row["params_fingerprint"] = s.params_fingerprint;
    row["values"] = s.estimate.values;
    row["ess_in"] = s.ess_in;
    row["n_new"] = s.n_new;
    row["n_reused"] = s.n_reused;
    row["full_refresh"] = s.full_refresh;
    row["distinct_evals"] = s.distinct_evals;
    row["oracle_calls"] = s.oracle_calls;
    row["mean_position"] = s.mean_position;
    if (group) {
      row["group_sum"] = groups[k].group_sum;
      row["group_mean_position"] = groups[k].mean_position;
    }
    settings.push_back(std::move(row));
  }
  doc["settings"] = std::move(settings);
  return doc.dump(2);
}

}  // namespace gpasv

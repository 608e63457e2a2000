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

#ifndef GPASV_IO_HPP
#define GPASV_IO_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpasv/diagnostics.hpp"
#include "gpasv/games.hpp"
#include "gpasv/priority_model.hpp"
#include "gpasv/sampler.hpp"
#include "gpasv/sweep.hpp"

namespace gpasv {

/// Parsed graph file: {"n", "edges": [[i, j, w], ...], "beta", "lambda" | "latent": {"z", "alpha"},
/// optional "players": [labels]}.
struct GraphSpec {
  RawParams raw;
  std::vector<std::string> players;
};

GraphSpec parse_graph_json(const std::string& text, const std::string& source = "<graph>");
GraphSpec load_graph_json(const std::string& path);

/// Latent scores for sweeping: the file's z when given, otherwise log(max lambda) - log(lambda),
/// which reproduces the file's lambda (up to scale) at alpha = 1.
std::vector<double> sweep_latent(const RawParams& raw);

/// Parsed game spec. Scenario presets also carry their params and closed-form target.
struct GameSpec {
  std::string type;
  OraclePtr oracle;
  std::optional<GpasvParams> params;
  std::vector<double> target;
};

/// Types: "sou" / "sor" ({"terms": [{"T": [...], "c": x}]}), "table" ({"path": ...}, relative
/// to the game file), "scenario1" ({"n", "case", "seed"}), "scenario2" ({"n", "block_size",
/// "case", "seed"}). `n` is required for sou, sor and table when the game file omits it.
GameSpec parse_game_json(const std::string& text, std::optional<int> n, const std::string& base_dir = ".",
                         const std::string& source = "<game>");
GameSpec load_game_json(const std::string& path, std::optional<int> n);

/// 17 significant digits, '.' decimal point, independent of the global locale.
std::string format_double(double x);

/// `player,value,std` rows; std left empty when absent.
void write_values_csv(std::ostream& out, std::span<const double> values, std::span<const double> std,
                      std::span<const std::string> labels = {});
/// Header `i,j,p` followed by one row per ordered pair i != j.
void write_pairwise_csv(std::ostream& out, const Matrix& p);
/// `t,deviation,kind` rows (kind = checkpoint or probe).
void write_mixing_csv(std::ostream& out, const MixingResult& result);

/// One permutation per line, players separated by single spaces.
void write_batch(std::ostream& out, const SampleBatch& batch);
SampleBatch read_batch(std::istream& in, int n);

/// Sweep report as a JSON document (per-setting estimates, ESS, N_new, evaluation counts
/// and, when a group is given, group sums and mean positions).
std::string sweep_report_json(const SweepReport& report, const std::optional<std::vector<int>>& group);

}  // namespace gpasv

#endif  // GPASV_IO_HPP

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

#include "gpasv/games.hpp"

#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <sstream>

namespace gpasv {
namespace {

void check_terms(int n, const std::vector<GameTerm>& terms) {
  require(n >= 1 && n <= kMaxPlayers, "player count " + std::to_string(n) + " out of range");
  for (std::size_t k = 0; k < terms.size(); ++k) {
    require(terms[k].members != 0, "term " + std::to_string(k) + " has an empty player set");
    require((terms[k].members & ~full_mask(n)) == 0,
            "term " + std::to_string(k) + " holds a player outside [0, " + std::to_string(n) + ")");
    require(std::isfinite(terms[k].coeff) && terms[k].coeff > 0.0,
            "term " + std::to_string(k) + " has a non-positive coefficient");
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct CsvRow {
  Mask mask = 0;
  double value = 0.0;
};

/// Parses `mask,value` rows; skips blanks, '#' comments and a leading header.
std::vector<std::pair<CsvRow, int>> parse_mask_rows(std::istream& in, const std::string& source) {
  std::vector<std::pair<CsvRow, int>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    if (rows.empty() && l.rfind("mask", 0) == 0) continue;
    const auto comma = l.find(',');
    if (comma == std::string_view::npos) {
      fail(ErrorKind::kParse, source + ":" + std::to_string(lineno) + ": expected `mask,value`");
    }
    const std::string_view ms = trim(l.substr(0, comma));
    const std::string_view vs = trim(l.substr(comma + 1));
    CsvRow row;
    auto [mp, mec] = std::from_chars(ms.data(), ms.data() + ms.size(), row.mask);
    auto [vp, vec] = std::from_chars(vs.data(), vs.data() + vs.size(), row.value);
    if (mec != std::errc{} || mp != ms.data() + ms.size() || vec != std::errc{} ||
        vp != vs.data() + vs.size() || !std::isfinite(row.value)) {
      fail(ErrorKind::kParse, source + ":" + std::to_string(lineno) + ": malformed row `" + std::string(l) + "`");
    }
    rows.emplace_back(row, lineno);
  }
  return rows;
}

std::string format_row(Mask s, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%llu,%.17g\n", static_cast<unsigned long long>(s), v);
  return buf;
}

double uniform_regime_weight(bool strong, Rng& rng) {
  return strong ? 0.5 * rng.uniform_open() : 0.5 + 0.5 * rng.uniform_open();
}

}  // namespace

SumOfUnanimityGame::SumOfUnanimityGame(int n, std::vector<GameTerm> terms) : n_(n), terms_(std::move(terms)) {
  check_terms(n_, terms_);
}

double SumOfUnanimityGame::evaluate_unchecked(Mask s) const {
  double u = 0.0;
  for (const auto& t : terms_) {
    if ((t.members & ~s) == 0) u += t.coeff;
  }
  return u;
}

SumOfRaceGame::SumOfRaceGame(int n, std::vector<GameTerm> terms) : n_(n), terms_(std::move(terms)) {
  check_terms(n_, terms_);
}

double SumOfRaceGame::evaluate_unchecked(Mask s) const {
  double u = 0.0;
  for (const auto& t : terms_) {
    if ((t.members & s) != 0) u += t.coeff;
  }
  return u;
}

TableOracle TableOracle::parse(std::istream& in, int n, const std::string& source) {
  require(n >= 1 && n <= kMaxPlayers, "player count " + std::to_string(n) + " out of range");
  std::unordered_map<Mask, double> table;
  for (const auto& [row, lineno] : parse_mask_rows(in, source)) {
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if ((row.mask & ~full_mask(n)) != 0) {
      fail(ErrorKind::kParse, where + "mask " + std::to_string(row.mask) + " exceeds " + std::to_string(n) + " players");
    }
    if (!table.emplace(row.mask, row.value).second) {
      fail(ErrorKind::kParse, where + "duplicate mask " + std::to_string(row.mask));
    }
  }
  const auto empty = table.find(0);
  if (empty == table.end()) fail(ErrorKind::kParse, source + ": missing row for mask 0 (the empty coalition)");
  if (empty->second != 0.0) fail(ErrorKind::kParse, source + ": utility of mask 0 must be 0");
  return TableOracle(n, std::move(table));
}

TableOracle TableOracle::load(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open utility table " + path);
  return parse(in, n, path);
}

double TableOracle::evaluate_unchecked(Mask s) const {
  const auto it = table_.find(s);
  if (it == table_.end()) fail(ErrorKind::kMissingUtility, "missing utility for mask " + std::to_string(s));
  return it->second;
}

struct CachedOracle::InFlight {
  std::mutex m;
  std::condition_variable cv;
  bool done = false;
  double value = 0.0;
  std::exception_ptr error;
};

CachedOracle::CachedOracle(OraclePtr inner) : inner_(std::move(inner)) {
  require(inner_ != nullptr, "cached oracle needs an inner oracle");
}

CachedOracle::CachedOracle(OraclePtr inner, const std::string& persist_path) : CachedOracle(std::move(inner)) {
  {
    std::ifstream in(persist_path);
    if (in) {
      for (const auto& [row, lineno] : parse_mask_rows(in, persist_path)) {
        if ((row.mask & ~full_mask(n())) != 0) {
          fail(ErrorKind::kParse, persist_path + ":" + std::to_string(lineno) + ": mask out of range");
        }
        if (store_.emplace(row.mask, row.value).second) ++loaded_;
      }
    }
  }
  persist_.open(persist_path, std::ios::app);
  if (!persist_) fail(ErrorKind::kIo, "cannot open cache file " + persist_path + " for appending");
}

CachedOracle::~CachedOracle() {
  if (persist_.is_open()) persist_.flush();
}

std::size_t CachedOracle::size() const {
  std::lock_guard lock(mutex_);
  return store_.size();
}

double CachedOracle::evaluate_unchecked(Mask s) const {
  ++total_calls_;
  std::shared_ptr<InFlight> slot;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    if (const auto it = store_.find(s); it != store_.end()) return it->second;
    if (const auto it = in_flight_.find(s); it != in_flight_.end()) {
      slot = it->second;
    } else {
      slot = std::make_shared<InFlight>();
      in_flight_.emplace(s, slot);
      owner = true;
    }
  }
  if (!owner) {
    std::unique_lock lk(slot->m);
    slot->cv.wait(lk, [&] { return slot->done; });
    if (slot->error) std::rethrow_exception(slot->error);
    return slot->value;
  }
  double v = 0.0;
  try {
    v = inner_->evaluate(s);
  } catch (...) {
    {
      std::lock_guard lock(mutex_);
      in_flight_.erase(s);
    }
    {
      std::lock_guard lk(slot->m);
      slot->error = std::current_exception();
      slot->done = true;
    }
    slot->cv.notify_all();
    throw;
  }
  {
    std::lock_guard lock(mutex_);
    store_.emplace(s, v);
    in_flight_.erase(s);
    ++distinct_evals_;
    // Flushed per row so an interrupted run keeps every paid-for evaluation.
    if (persist_.is_open()) persist_ << format_row(s, v) << std::flush;
  }
  {
    std::lock_guard lk(slot->m);
    slot->value = v;
    slot->done = true;
  }
  slot->cv.notify_all();
  return v;
}

std::shared_ptr<CachedOracle> wrap_cached(OraclePtr inner) { return std::make_shared<CachedOracle>(std::move(inner)); }

RegimeCase regime_case_from_int(int c) {
  require(c >= 1 && c <= 4, "regime case must be 1, 2, 3 or 4");
  return static_cast<RegimeCase>(c);
}

GpasvParams scenario1_params(int n, std::vector<double> lambda, double omega0_mult) {
  require(omega0_mult > 0.0 && omega0_mult <= 1.0, "multiplicative edge weight must lie in (0, 1]");
  Matrix omega(n, n);
  const double w = -std::log(omega0_mult);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) omega(i, j) = w;
  }
  return make_params(PriorityGraph::create(std::move(omega), 1.0), std::move(lambda));
}

std::vector<double> scenario1_closed_form(int n, std::span<const double> lambda, double omega0_mult,
                                          std::span<const GameTerm> intervals) {
  require(static_cast<int>(lambda.size()) == n, "dimension mismatch between lambda and player count");
  require(omega0_mult > 0.0 && omega0_mult <= 1.0, "multiplicative edge weight must lie in (0, 1]");
  const double log_w = std::log(omega0_mult);
  std::vector<double> psi(static_cast<std::size_t>(n), 0.0);
  std::vector<double> logs;
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const Mask m = intervals[k].members;
    require(m != 0 && (m & ~full_mask(n)) == 0, "interval " + std::to_string(k) + " out of range");
    const int left = std::countr_zero(m);
    const int right = 63 - std::countl_zero(m);
    // Contiguous iff shifting down leaves a block of ones.
    const Mask shifted = m >> left;
    if ((shifted & (shifted + 1)) != 0) fail(ErrorKind::kInvalidArgument, "non-contiguous interval in term " + std::to_string(k));
    logs.clear();
    for (int q = left; q <= right; ++q) logs.push_back(std::log(lambda[static_cast<std::size_t>(q)]) + (right - q) * log_w);
    const double log_norm = log_sum_exp(logs);
    for (int q = left; q <= right; ++q) {
      psi[static_cast<std::size_t>(q)] += intervals[k].coeff * std::exp(logs[static_cast<std::size_t>(q - left)] - log_norm);
    }
  }
  return psi;
}

std::vector<double> scenario2_closed_form(const std::vector<std::vector<int>>& blocks, std::span<const double> coeffs) {
  require(blocks.size() == coeffs.size(), "malformed partition: one coefficient per block is required");
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.size();
  require(n >= 1 && n <= static_cast<std::size_t>(kMaxPlayers), "malformed partition: player count out of range");
  std::vector<double> psi(n, 0.0);
  Mask seen = 0;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    require(!blocks[j].empty(), "malformed partition: block " + std::to_string(j) + " is empty");
    for (int i : blocks[j]) {
      require(i >= 0 && static_cast<std::size_t>(i) < n, "malformed partition: player " + std::to_string(i) + " out of range");
      require(!contains(seen, i), "malformed partition: player " + std::to_string(i) + " in two blocks");
      seen |= bit(i);
      psi[static_cast<std::size_t>(i)] = coeffs[j] / static_cast<double>(blocks[j].size());
    }
  }
  return psi;
}

GpasvParams scenario2_params(int n, int block_size, const BlockWeights& weights) {
  require(block_size >= 1 && n % block_size == 0, "player count must be a multiple of the block size");
  const int blocks = n / block_size;
  require(static_cast<int>(weights.lambda_per_block.size()) == blocks &&
              static_cast<int>(weights.cycle_mult.size()) == blocks &&
              static_cast<int>(weights.between_mult.size()) == blocks,
          "block weight tables must have one entry per block");
  Matrix omega(n, n);
  auto additive = [](double mult) {
    require(mult > 0.0 && mult <= 1.0, "multiplicative edge weight must lie in (0, 1]");
    return -std::log(mult);
  };
  std::vector<double> lambda(static_cast<std::size_t>(n));
  for (int k = 0; k < blocks; ++k) {
    const int base = k * block_size;
    for (int r = 0; r < block_size; ++r) lambda[static_cast<std::size_t>(base + r)] = weights.lambda_per_block[static_cast<std::size_t>(k)];
    if (block_size >= 2) {
      const double w = additive(weights.cycle_mult[static_cast<std::size_t>(k)]);
      for (int r = 0; r < block_size; ++r) omega(base + r, base + (r + 1) % block_size) = w;
    }
    require(static_cast<int>(weights.between_mult[static_cast<std::size_t>(k)].size()) == blocks,
            "between-block weight table must be square");
    for (int l = k + 1; l < blocks; ++l) {
      const double w = additive(weights.between_mult[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]);
      if (w == 0.0) continue;
      for (int i = base; i < base + block_size; ++i) {
        for (int j = l * block_size; j < (l + 1) * block_size; ++j) omega(i, j) = w;
      }
    }
  }
  return make_params(PriorityGraph::create(std::move(omega), 1.0), std::move(lambda));
}

BenchmarkInstance make_scenario1(int n, RegimeCase regime, std::uint64_t seed) {
  require(n >= 1 && n <= kMaxPlayers, "player count out of range");
  Rng rng(seed);
  const bool hetero = regime == RegimeCase::kCase3 || regime == RegimeCase::kCase4;
  const bool strong = regime == RegimeCase::kCase2 || regime == RegimeCase::kCase4;
  const double omega0 = strong ? 0.3 : 0.7;
  std::vector<double> lambda(static_cast<std::size_t>(n), 1.0);
  if (hetero) {
    for (auto& l : lambda) l = rng.uniform(1.0, 10.0);
  }
  std::vector<std::pair<int, int>> all;
  for (int l = 0; l < n; ++l) {
    for (int r = l; r < n; ++r) all.emplace_back(l, r);
  }
  std::vector<GameTerm> terms(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (auto& t : terms) {
    const auto [l, r] = all[rng.below(all.size())];
    t.members = (full_mask(r - l + 1)) << l;
  }
  for (auto& t : terms) t.coeff = rng.uniform(0.5, 1.5);
  auto target = scenario1_closed_form(n, lambda, omega0, terms);
  auto game = std::make_shared<SumOfUnanimityGame>(n, std::move(terms));
  return {scenario1_params(n, std::move(lambda), omega0), std::move(game), std::move(target)};
}

BenchmarkInstance make_scenario2(int n, int block_size, RegimeCase regime, std::uint64_t seed) {
  require(block_size >= 1 && n % block_size == 0, "player count must be a multiple of the block size");
  Rng rng(seed);
  const int blocks = n / block_size;
  const bool hetero = regime == RegimeCase::kCase3 || regime == RegimeCase::kCase4;
  const bool strong = regime == RegimeCase::kCase2 || regime == RegimeCase::kCase4;
  BlockWeights w;
  w.lambda_per_block.assign(static_cast<std::size_t>(blocks), 1.0);
  if (hetero) {
    for (auto& l : w.lambda_per_block) l = rng.uniform(1.0, 10.0);
  }
  w.cycle_mult.resize(static_cast<std::size_t>(blocks));
  for (auto& c : w.cycle_mult) c = uniform_regime_weight(strong, rng);
  w.between_mult.assign(static_cast<std::size_t>(blocks), std::vector<double>(static_cast<std::size_t>(blocks), 1.0));
  for (int k = 0; k < blocks; ++k) {
    for (int l = k + 1; l < blocks; ++l) {
      if (rng.bernoulli(0.8)) w.between_mult[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = uniform_regime_weight(strong, rng);
    }
  }
  std::vector<GameTerm> terms(static_cast<std::size_t>(blocks));
  std::vector<std::vector<int>> members(static_cast<std::size_t>(blocks));
  std::vector<double> coeffs(static_cast<std::size_t>(blocks));
  for (int k = 0; k < blocks; ++k) {
    const double c = rng.uniform(0.5, 1.5);
    terms[static_cast<std::size_t>(k)] = {full_mask(block_size) << (k * block_size), c};
    coeffs[static_cast<std::size_t>(k)] = c;
    for (int r = 0; r < block_size; ++r) members[static_cast<std::size_t>(k)].push_back(k * block_size + r);
  }
  auto target = scenario2_closed_form(members, coeffs);
  auto game = std::make_shared<SumOfUnanimityGame>(n, std::move(terms));
  return {scenario2_params(n, block_size, w), std::move(game), std::move(target)};
}

std::vector<GameTerm> random_subset_terms(int n, int d, Rng& rng) {
  require(n >= 1 && n <= kMaxPlayers, "player count out of range");
  std::vector<GameTerm> terms(static_cast<std::size_t>(d));
  for (auto& t : terms) {
    Mask m = 0;
    while (m == 0) m = rng.next() & full_mask(n);
    t.members = m;
  }
  for (auto& t : terms) t.coeff = rng.uniform(0.5, 1.5);
  return terms;
}

}  // namespace gpasv

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

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "frozen_reference.hpp"
#include "gpasv/exact.hpp"
#include "gpasv/games.hpp"
#include "helpers.hpp"

using namespace gpasv;
using namespace testing_helpers;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "gpasv_tests";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::filesystem::remove(p);
  return p.string();
}

TableOracle table(const std::string& text, int n) {
  std::istringstream in(text);
  return TableOracle::parse(in, n, "table.csv");
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("game evaluation") {
  const auto u = sou(3, {{mask_of({0, 1}), 1.0}});
  CHECK(u->evaluate(mask_of({0})) == 0.0);
  CHECK(u->evaluate(mask_of({0, 1})) == 1.0);
  const auto r = sor(3, {{mask_of({0, 1}), 1.0}});
  CHECK(r->evaluate(mask_of({0})) == 1.0);
  CHECK(r->evaluate(0) == 0.0);
  const auto add = sou(3, {{mask_of({0}), 2.0}, {mask_of({0, 2}), 0.5}});
  CHECK(add->evaluate(mask_of({0, 2})) == 2.5);
  CHECK(kind_of([&] { (void)u->evaluate(mask_of({3})); }) == ErrorKind::kInvalidArgument);
  CHECK_THROWS_AS(SumOfUnanimityGame(3, {{0, 1.0}}), Error);
  CHECK_THROWS_AS(SumOfRaceGame(3, {{mask_of({4}), 1.0}}), Error);
}

TEST_CASE("line-order closed form") {
  const std::vector<GameTerm> one{{mask_of({0, 1}), 1.0}};
  const std::vector<double> flat2{1.0, 1.0};
  const auto psi = scenario1_closed_form(2, flat2, 0.5, one);
  CHECK(psi[0] == doctest::Approx(1.0 / 3));
  CHECK(psi[1] == doctest::Approx(2.0 / 3));
  const std::vector<double> flat5(5, 1.0);
  const std::vector<GameTerm> mid{{mask_of({1, 2, 3}), 1.0}};
  const auto sym = scenario1_closed_form(5, flat5, 1.0, mid);
  CHECK(max_abs_diff(sym, std::vector<double>{0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0}) < 1e-15);
  const std::vector<double> lam{1, 2, 3, 1.5, 0.7};
  const std::vector<GameTerm> intervals{{mask_of({0, 1, 2}), 1.0}, {mask_of({1, 2, 3, 4}), 0.8}, {mask_of({3}), 1.2}};
  CHECK(max_abs_diff(scenario1_closed_form(5, lam, 0.6, intervals), frozen::kLineIntervalValues) < 1e-12);
  const std::vector<GameTerm> gap{{mask_of({0, 2}), 1.0}};
  CHECK_THROWS_AS((void)scenario1_closed_form(5, flat5, 0.5, gap), Error);
}

TEST_CASE("line-order closed form agrees with enumeration") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lam(1, 10), mult(0.2, 0.95), coef(0.5, 1.5);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 4 + rep % 3;
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (auto& l : lambda) l = lam(rng);
    const double w0 = mult(rng);
    std::vector<GameTerm> terms;
    for (int k = 0; k < 4; ++k) {
      int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
      if (a > b) std::swap(a, b);
      terms.push_back({full_mask(b + 1) & ~full_mask(a), coef(rng)});
    }
    const auto exact = exact_value(scenario1_params(n, lambda, w0), SumOfUnanimityGame(n, terms));
    CHECK(max_abs_diff(scenario1_closed_form(n, lambda, w0, terms), exact) < 1e-8);
  }
}

TEST_CASE("block closed form") {
  const std::vector<double> c1{2.0};
  CHECK(scenario2_closed_form({{0, 1, 2, 3}}, c1) == std::vector<double>{0.5, 0.5, 0.5, 0.5});
  const std::vector<double> c2{1.0, 3.0};
  CHECK(scenario2_closed_form({{0, 1}, {2, 3, 4}}, c2) == std::vector<double>{0.5, 0.5, 1, 1, 1});
  CHECK_THROWS_AS((void)scenario2_closed_form({{0, 1}, {1, 2}}, c2), Error);
  CHECK_THROWS_AS((void)scenario2_closed_form({{0, 1}, {}}, c2), Error);
  CHECK_THROWS_AS((void)scenario2_closed_form({{0, 1}}, c2), Error);
}

TEST_CASE("block closed form agrees with enumeration") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 1.0), lam(1, 10), coef(0.5, 1.5);
  for (int rep = 0; rep < 5; ++rep) {
    BlockWeights w{{lam(rng), lam(rng)}, {u(rng), u(rng)}, {{1.0, u(rng)}, {1.0, 1.0}}};
    const std::vector<double> c{coef(rng), coef(rng)};
    const auto params = scenario2_params(6, 3, w);
    const auto game = sou(6, {{mask_of({0, 1, 2}), c[0]}, {mask_of({3, 4, 5}), c[1]}});
    CHECK(max_abs_diff(exact_value(params, *game), scenario2_closed_form({{0, 1, 2}, {3, 4, 5}}, c)) < 1e-8);
  }
}

TEST_CASE("benchmark presets carry exact targets") {
  for (int c = 1; c <= 4; ++c) {
    const auto s1 = make_scenario1(6, regime_case_from_int(c), 10u + c);
    CHECK(s1.game->terms().size() == 36);
    CHECK(max_abs_diff(exact_value(s1.params, *s1.game), s1.target) < 1e-8);
    const auto s2 = make_scenario2(8, 4, regime_case_from_int(c), 20u + c);
    CHECK(max_abs_diff(exact_value(s2.params, *s2.game), s2.target) < 1e-8);
  }
  const auto a = make_scenario1(8, RegimeCase::kCase2, 3);
  const auto b = make_scenario1(8, RegimeCase::kCase2, 3);
  CHECK(a.target == b.target);
  CHECK(a.params.fingerprint() == b.params.fingerprint());
  CHECK_THROWS_AS((void)regime_case_from_int(5), Error);
}

TEST_CASE("utility tables") {
  const auto t = table("0,0\n1,1.5\n3,4.0", 2);
  CHECK(t.evaluate(mask_of({0})) == 1.5);
  CHECK(t.evaluate(mask_of({0, 1})) == 4.0);
  try {
    (void)t.evaluate(mask_of({1}));
    FAIL("expected a missing-utility error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMissingUtility);
    CHECK(std::string(e.what()).find("mask 2") != std::string::npos);
  }
  CHECK(kind_of([] { (void)table("1,1.5\n3,4.0", 2); }) == ErrorKind::kParse);
  CHECK(kind_of([] { (void)table("0,0\n1,1\n1,2", 2); }) == ErrorKind::kParse);
  CHECK(kind_of([] { (void)table("0,0\n8,1", 2); }) == ErrorKind::kParse);
  CHECK(kind_of([] { (void)table("0,0\n1,abc", 2); }) == ErrorKind::kParse);
  CHECK(kind_of([] { (void)table("0,0.5\n", 2); }) == ErrorKind::kParse);
  CHECK(table("mask,value\n# comment\n\n0,0\n2,7", 2).evaluate(mask_of({1})) == 7.0);
  CHECK(kind_of([] { (void)TableOracle::load("/nonexistent/table.csv", 2); }) == ErrorKind::kIo);
}

TEST_CASE("cache counts distinct evaluations") {
  std::atomic<int> inner_calls{0};
  auto inner = std::make_shared<FunctionOracle>(4, [&](Mask s) {
    ++inner_calls;
    return double(cardinality(s)) * 0.5;
  });
  CachedOracle cache(inner);
  CHECK(cache.evaluate(3) == 1.0);
  CHECK(cache.evaluate(3) == 1.0);
  CHECK(cache.distinct_evals() == 1);
  CHECK(cache.total_calls() == 2);
  CHECK(cache.size() == 1);
  CHECK(inner_calls == 1);
}

TEST_CASE("cache is transparent and computes each mask once under concurrency") {
  std::atomic<int> inner_calls{0};
  auto inner = std::make_shared<FunctionOracle>(10, [&](Mask s) {
    ++inner_calls;
    std::this_thread::yield();
    return std::sin(double(s));
  });
  CachedOracle cache(inner);
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t) {
    pool.emplace_back([&, t] {
      for (int k = 0; k < 2000; ++k) {
        const Mask s = static_cast<Mask>((k * 7 + t) % 300);
        CHECK(cache.evaluate(s) == std::sin(double(s)));
      }
    });
  }
  for (auto& th : pool) th.join();
  CHECK(cache.distinct_evals() == 300);
  CHECK(inner_calls == 300);
  CHECK(cache.total_calls() == 16000);
}

TEST_CASE("shared cache across two disjoint query streams") {
  auto inner = cardinality_game(6);
  CachedOracle shared(inner), first(inner), second(inner);
  for (Mask s = 0; s < 20; ++s) {
    (void)shared.evaluate(s);
    (void)first.evaluate(s);
  }
  for (Mask s = 20; s < 64; ++s) {
    (void)shared.evaluate(s);
    (void)second.evaluate(s);
  }
  CHECK(shared.distinct_evals() == first.distinct_evals() + second.distinct_evals());
}

TEST_CASE("persisted cache is replayed without new evaluations") {
  const auto path = temp_path("cache.csv");
  auto inner = sou(5, {{mask_of({0, 1}), 1.25}, {mask_of({2}), 1.0 / 3}});
  {
    CachedOracle c(inner, path);
    for (Mask s = 0; s < 32; s += 3) (void)c.evaluate(s);
    CHECK(c.distinct_evals() == 11);
  }
  CachedOracle again(inner, path);
  CHECK(again.loaded() == 11);
  for (Mask s = 0; s < 32; s += 3) CHECK(again.evaluate(s) == inner->evaluate(s));
  CHECK(again.distinct_evals() == 0);
  (void)again.evaluate(1);
  CHECK(again.distinct_evals() == 1);
  CHECK(again.size() == 12);
  // The persisted file is itself a valid utility table.
  std::ofstream(path, std::ios::app) << "";
  CachedOracle third(inner, path);
  CHECK(third.loaded() == 12);
}

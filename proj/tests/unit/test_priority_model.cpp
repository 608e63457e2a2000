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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "doctest.h"
#include "frozen_reference.hpp"
#include "gpasv/priority_model.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gpasv;
using namespace testing_helpers;

namespace {

void check_rejects(const RawParams& raw, const std::string& fragment) {
  try {
    (void)validate(raw);
    FAIL("expected rejection containing: " << fragment);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
    CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
  }
}

Matrix square(int n, std::initializer_list<Edge> edges) {
  Matrix m(n, n);
  for (const auto& e : edges) m(e.i, e.j) = e.w;
  return m;
}

}  // namespace

TEST_CASE("validate accepts a well-formed pair and names offending entries") {
  CHECK_NOTHROW((void)make_params(2, {{0, 1, 1.0}}, 1.0));
  Matrix diag = square(2, {});
  diag(0, 0) = 0.5;
  check_rejects({diag, 1.0, SoftPriority::uniform(2)}, "nonzero diagonal at index 0");
  check_rejects({square(2, {}), 1.0, SoftPriority::weights({1, 0})}, "non-positive soft priority at index 1");
  check_rejects({square(2, {{1, 0, -1.0}}), 1.0, SoftPriority::uniform(2)}, "negative edge weight");
  check_rejects({square(2, {}), 1.0, SoftPriority::weights({1, 1, 1})}, "3");
  check_rejects({Matrix(2, 3), 1.0, SoftPriority::uniform(2)}, "dimension mismatch");
  check_rejects({square(2, {}), -0.1, SoftPriority::uniform(2)}, "beta");
  check_rejects({square(2, {}), 1.0, SoftPriority::latent_scores({0, -1}, 1.0)}, "negative latent score at index 1");
}

TEST_CASE("latent scores expand to exp(-alpha z)") {
  const auto p = validate({square(3, {}), 0.0, SoftPriority::latent_scores({0.0, 1.0, 2.0}, 0.5)});
  CHECK(p.lambda()[0] == doctest::Approx(1.0));
  CHECK(p.lambda()[1] == doctest::Approx(std::exp(-0.5)));
  CHECK(p.lambda()[2] == doctest::Approx(std::exp(-1.0)));
  const auto flat = validate({square(3, {}), 0.0, SoftPriority::latent_scores({0.0, 1.0, 2.0}, 0.0)});
  for (double l : flat.lambda()) CHECK(l == 1.0);
}

TEST_CASE("stage violation sums edges into the subset") {
  const auto single = make_params(3, {{0, 1, 3.0}}, 1.0);
  CHECK(stage_violation(single, 0, mask_of({1})) == 3.0);
  CHECK(stage_violation(single, 0, 0) == 0.0);
  CHECK(stage_violation(single, 0, mask_of({0, 1})) == 3.0);
  // Players 3, {1, 4} in 1-based labels.
  CHECK(stage_violation(cyclic_fixture(1.0), 2, mask_of({0, 3})) == 7.0);
}

TEST_CASE("total violation counts edges whose head comes first") {
  const auto single = make_params(2, {{0, 1, 3.0}}, 1.0);
  CHECK(total_violation(single, perm({1, 0})) == 3.0);
  CHECK(total_violation(single, perm({0, 1})) == 0.0);
  CHECK(total_violation(cyclic_fixture(1.0), perm({0, 1, 2, 3, 4})) == 1.0);
}

TEST_CASE("property: violations telescope over stages") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 3 + rep % 10;
    const auto inst = oracle::random_instance(n, rep % 2 == 0, true, 1.0, rng);
    const auto p = inst.params();
    std::vector<int> o(static_cast<std::size_t>(n));
    std::iota(o.begin(), o.end(), 0);
    std::shuffle(o.begin(), o.end(), rng);
    const Permutation pi(o);
    double staged = 0.0;
    Mask prefix = 0;
    for (int t = 0; t < n; ++t) {
      prefix |= bit(pi[t]);
      staged += stage_violation(p, pi[t], prefix);
    }
    CHECK(staged == doctest::Approx(total_violation(p, pi)).epsilon(1e-12));
  }
}

TEST_CASE("log mass matches the independent reference") {
  const auto uni = make_params(3, {}, 0.0);
  CHECK(log_unnormalized_pmf(uni, perm({0, 1, 2})) == doctest::Approx(log_unnormalized_pmf(uni, perm({2, 0, 1}))));
  const auto pl = make_params(3, {}, 0.0, {1, 2, 3});
  CHECK(std::exp(log_unnormalized_pmf(pl, perm({0, 1, 2})) - log_unnormalized_pmf(pl, perm({1, 0, 2}))) ==
        doctest::Approx(2.0).epsilon(1e-12));
  const auto cyc = make_params(4, {{0, 1, 1.5}, {1, 2, 0.7}, {2, 0, 0.4}, {3, 1, 2.0}, {2, 3, 0.3}}, 1.3,
                               {1, 2, 0.5, 3});
  CHECK(log_unnormalized_pmf(cyc, perm({0, 1, 2, 3})) == doctest::Approx(frozen::kCyclicLogMassIdentity).epsilon(1e-12));
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const auto inst = oracle::random_instance(6, rep % 2 == 0, true, 2.0, rng);
    const auto p = inst.params();
    for (const auto& o : oracle::all_orders(6)) {
      if (rng() % 20 != 0) continue;
      CHECK(log_unnormalized_pmf(p, Permutation(o)) == doctest::Approx(oracle::log_mass(inst, o)).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: unit soft priorities factor through the violation") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const auto inst = oracle::random_instance(7, false, false, 1.7, rng);
    const auto p = inst.params();
    const auto orders = oracle::all_orders(7);
    for (int k = 0; k < 30; ++k) {
      const Permutation a(orders[rng() % orders.size()]);
      const Permutation b(orders[rng() % orders.size()]);
      const double lhs = log_unnormalized_pmf(p, a) - log_unnormalized_pmf(p, b);
      const double rhs = -p.beta() * (total_violation(p, a) - total_violation(p, b));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("choice and state factors") {
  const auto uni = make_params(4, {}, 0.0);
  const auto f = gscf_factors(uni, 1, mask_of({0, 1, 2}));
  CHECK(f.choice == doctest::Approx(1.0 / 3));
  CHECK(f.state == doctest::Approx(3.0));
  const auto pl = make_params(3, {}, 0.0, {1, 2, 3});
  const auto g = gscf_factors(pl, 2, mask_of({0, 1, 2}));
  CHECK(g.choice == doctest::Approx(0.5));
  CHECK(g.state == doctest::Approx(3.0));
  const auto edge = make_params(2, {{0, 1, 3.0}}, 1.0);
  CHECK(gscf_factors(edge, 0, mask_of({0, 1})).choice == doctest::Approx(std::exp(-3.0) / (1 + std::exp(-3.0))));
  CHECK_THROWS_AS((void)gscf_factors(edge, 0, mask_of({1})), Error);
}

TEST_CASE("property: choice factors normalize and obey weight proportionality") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const auto inst = oracle::random_instance(8, rep % 2 == 1, true, 1.3, rng);
    const auto p = inst.params();
    for (int k = 0; k < 20; ++k) {
      const Mask s = (rng() % 255) + 1;
      double total = 0.0;
      int first = -1;
      for_each_member(s, [&](int i) {
        total += gscf_factors(p, i, s).choice;
        if (first < 0) first = i;
        const double ratio = gscf_factors(p, i, s).choice / gscf_factors(p, first, s).choice;
        const double expected = inst.lambda[static_cast<std::size_t>(i)] / inst.lambda[static_cast<std::size_t>(first)] *
                                std::exp(-p.beta() * (stage_violation(p, i, s) - stage_violation(p, first, s)));
        CHECK(ratio == doctest::Approx(expected).epsilon(1e-10));
      });
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: the factorisation reproduces the log mass up to a constant") {
  std::mt19937_64 rng(9);
  const auto inst = oracle::random_instance(6, false, true, 0.8, rng);
  const auto p = inst.params();
  std::optional<double> offset;
  for (const auto& o : oracle::all_orders(6)) {
    if (rng() % 10 != 0) continue;
    const Permutation pi(o);
    double sum_logs = 0.0;
    Mask prefix = 0;
    for (int t = 0; t < 6; ++t) {
      prefix |= bit(pi[t]);
      const auto f = gscf_factors(p, pi[t], prefix);
      sum_logs += std::log(f.state) + std::log(f.choice);
    }
    const double diff = log_unnormalized_pmf(p, pi) - sum_logs;
    if (!offset) offset = diff;
    CHECK(diff == doctest::Approx(*offset).epsilon(1e-10));
  }
}

TEST_CASE("property: scaling soft priorities leaves mass ratios unchanged") {
  std::mt19937_64 rng(10);
  const auto inst = oracle::random_instance(6, false, true, 1.1, rng);
  auto scaled = inst;
  for (auto& l : scaled.lambda) l *= 7.5;
  const auto p = inst.params();
  const auto q = scaled.params();
  const auto a = perm({0, 1, 2, 3, 4, 5});
  const auto b = perm({5, 3, 1, 0, 2, 4});
  CHECK(log_unnormalized_pmf(p, a) - log_unnormalized_pmf(p, b) ==
        doctest::Approx(log_unnormalized_pmf(q, a) - log_unnormalized_pmf(q, b)).epsilon(1e-12));
}

TEST_CASE("multiplicative view") {
  const auto p = make_params(3, {{0, 1, 3.0}}, 1.0);
  const auto m = to_multiplicative(p.graph());
  CHECK(m(0, 1) == doctest::Approx(std::exp(-3.0)));
  CHECK(m(1, 0) == 1.0);
  CHECK(m(2, 2) == 1.0);
  const auto flat = to_multiplicative(make_params(3, {{0, 1, 3.0}}, 0.0).graph());
  for (double x : flat.data()) CHECK(x == 1.0);
}

TEST_CASE("permutations are checked bijections") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), Error);
  CHECK_THROWS_AS(Permutation({0, 3, 1}), Error);
  const auto pi = perm({2, 0, 1});
  CHECK(pi.positions() == std::vector<int>{1, 2, 0});
  CHECK(pi.predecessors(1) == mask_of({0, 2}));
}

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

#ifndef GPASV_TESTS_HELPERS_HPP
#define GPASV_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <memory>
#include <span>
#include <tuple>
#include <vector>

#include "gpasv/games.hpp"
#include "gpasv/priority_model.hpp"

namespace testing_helpers {

struct Edge {
  int i;
  int j;
  double w;
};

inline gpasv::GpasvParams make_params(int n, std::initializer_list<Edge> edges, double beta,
                                      std::vector<double> lambda = {}) {
  gpasv::Matrix m(n, n);
  for (const auto& e : edges) m(e.i, e.j) = e.w;
  if (lambda.empty()) lambda.assign(static_cast<std::size_t>(n), 1.0);
  return gpasv::validate(gpasv::RawParams{m, beta, gpasv::SoftPriority::weights(std::move(lambda))});
}

/// Five players, edges 1->2 (3), 2->3 (4), 3->1 (1), 3->4 (6) in 1-based labels, lambda = 1..5.
inline gpasv::GpasvParams cyclic_fixture(double beta) {
  return make_params(5, {{0, 1, 3.0}, {1, 2, 4.0}, {2, 0, 1.0}, {2, 3, 6.0}}, beta, {1, 2, 3, 4, 5});
}

inline gpasv::Mask mask_of(std::initializer_list<int> players) {
  gpasv::Mask s = 0;
  for (int p : players) s |= gpasv::Mask{1} << p;
  return s;
}

inline std::shared_ptr<gpasv::SumOfUnanimityGame> sou(int n,
                                                      std::initializer_list<std::pair<gpasv::Mask, double>> terms) {
  std::vector<gpasv::GameTerm> t;
  for (const auto& [m, c] : terms) t.push_back({m, c});
  return std::make_shared<gpasv::SumOfUnanimityGame>(n, std::move(t));
}

inline std::shared_ptr<gpasv::SumOfRaceGame> sor(int n, std::initializer_list<std::pair<gpasv::Mask, double>> terms) {
  std::vector<gpasv::GameTerm> t;
  for (const auto& [m, c] : terms) t.push_back({m, c});
  return std::make_shared<gpasv::SumOfRaceGame>(n, std::move(t));
}

/// U(S) = |S|.
inline std::shared_ptr<gpasv::FunctionOracle> cardinality_game(int n) {
  return std::make_shared<gpasv::FunctionOracle>(n, [](gpasv::Mask s) { return double(gpasv::cardinality(s)); });
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline gpasv::Permutation perm(std::initializer_list<int> order) { return gpasv::Permutation(std::vector<int>(order)); }

}  // namespace testing_helpers

#endif  // GPASV_TESTS_HELPERS_HPP

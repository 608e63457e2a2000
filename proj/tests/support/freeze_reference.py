# Copyright 2026 The GPASV Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates frozen_reference.hpp with 40-digit brute-force enumeration.

Run: python3 tests/support/freeze_reference.py > tests/support/frozen_reference.hpp
"""

import itertools
import sys

import mpmath as mp

mp.mp.dps = 40


def log_mass(n, omega, beta, lam, order):
    total = mp.mpf(0)
    prefix = set()
    for p in order:
        prefix.add(p)
        w = {k: mp.e ** (-beta * sum(omega.get((k, j), 0) for j in prefix)) for k in prefix}
        zeta = sum(lam[k] * w[k] for k in prefix) / sum(w.values())
        total += mp.log(lam[p] * w[p] / zeta)
    return total


def enumerate_pmf(n, omega, beta, lam):
    orders = list(itertools.permutations(range(n)))
    mass = [mp.e ** log_mass(n, omega, beta, lam, o) for o in orders]
    z = sum(mass)
    return orders, [m / z for m in mass], mp.log(z)


def values(orders, probs, n, u):
    psi = [mp.mpf(0)] * n
    for o, p in zip(orders, probs):
        s = frozenset()
        for i in o:
            before = u(s)
            s = s | {i}
            psi[i] += p * (u(s) - before)
    return psi


def sou(terms):
    return lambda s: sum(mp.mpf(c) for t, c in terms if set(t) <= s)


def sor(terms):
    return lambda s: sum(mp.mpf(c) for t, c in terms if set(t) & s)


def arr(name, xs):
    body = ", ".join(mp.nstr(x, 20, strip_zeros=False) for x in xs)
    return f"inline constexpr double {name}[] = {{{body}}};"


LICENSE = """// Copyright 2026 The GPASV Authors
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
"""

out = [LICENSE]
out.append("// Generated by freeze_reference.py; do not edit by hand.")
out.append("#ifndef GPASV_TESTS_FROZEN_REFERENCE_HPP")
out.append("#define GPASV_TESTS_FROZEN_REFERENCE_HPP")
out.append("namespace frozen {")

# Cyclic four-player instance.
n = 4
omega = {(0, 1): 1.5, (1, 2): 0.7, (2, 0): 0.4, (3, 1): 2.0, (2, 3): 0.3}
beta = mp.mpf("1.3")
lam = [mp.mpf(1), mp.mpf(2), mp.mpf("0.5"), mp.mpf(3)]
terms = [((0, 1), 1.0), ((1, 2, 3), 2.0), ((3,), 0.5)]
orders, probs, log_z = enumerate_pmf(n, omega, beta, lam)
pair = [sum(p for o, p in zip(orders, probs) if o.index(i) < o.index(j)) if i != j else mp.mpf(0)
        for i in range(n) for j in range(n)]
out.append("// n = 4, beta = 1.3, lambda = (1, 2, 0.5, 3),")
out.append("// omega(0,1) = 1.5, omega(1,2) = 0.7, omega(2,0) = 0.4, omega(3,1) = 2, omega(2,3) = 0.3.")
out.append(arr("kCyclicPairwise", pair))
out.append(f"inline constexpr double kCyclicLogZ = {mp.nstr(log_z, 20)};")
out.append(f"inline constexpr double kCyclicLogMassIdentity = {mp.nstr(log_mass(n, omega, beta, lam, (0, 1, 2, 3)), 20)};")
out.append("// Terms ({0,1}, 1), ({1,2,3}, 2), ({3}, 0.5).")
out.append(arr("kCyclicSouValues", values(orders, probs, n, sou(terms))))
out.append(arr("kCyclicSorValues", values(orders, probs, n, sor(terms))))

# Line order instance with interval unanimity terms.
n = 5
w0 = mp.mpf("0.6")
omega = {(i, j): -mp.log(w0) for i in range(n) for j in range(n) if i < j}
lam = [mp.mpf(x) for x in ("1", "2", "3", "1.5", "0.7")]
terms = [((0, 1, 2), 1.0), ((1, 2, 3, 4), 0.8), ((3,), 1.2)]
orders, probs, _ = enumerate_pmf(n, omega, mp.mpf(1), lam)
out.append("// n = 5 line order, multiplicative weight 0.6, lambda = (1, 2, 3, 1.5, 0.7),")
out.append("// intervals ([0,2], 1), ([1,4], 0.8), ([3,3], 1.2).")
out.append(arr("kLineIntervalValues", values(orders, probs, n, sou(terms))))

out.append("}  // namespace frozen")
out.append("#endif  // GPASV_TESTS_FROZEN_REFERENCE_HPP")
sys.stdout.write("\n".join(out) + "\n")

#!/usr/bin/env python3
# Copyright 2026 The oamsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Critical isotropic-state weight for the CGLMP Bell inequality.

For the maximally entangled two-qudit state and the standard CGLMP
measurement bases, evaluates the Bell expression I_d by brute-force
probability enumeration, cross-checks it against the closed form, and prints
p_min = 2 / I_d (white noise contributes zero to I_d). The output is the
table stored in config/threshold_pmin.cfg.
"""

import argparse

import numpy as np


def measurement_basis(d, shift, sign):
    j = np.arange(d)
    basis = np.empty((d, d), dtype=complex)
    for k in range(d):
        basis[k] = np.exp(2j * np.pi * j * (sign * k + shift) / d) / np.sqrt(d)
    return basis


def joint_probabilities(d):
    psi = np.zeros(d * d, dtype=complex)
    for i in range(d):
        psi[i * d + i] = 1.0 / np.sqrt(d)
    alice = [measurement_basis(d, 0.0, +1), measurement_basis(d, 0.5, +1)]
    bob = [measurement_basis(d, 0.25, -1), measurement_basis(d, -0.25, -1)]
    probs = {}
    for a in range(2):
        for b in range(2):
            p = np.zeros((d, d))
            for k in range(d):
                for l in range(d):
                    v = np.kron(alice[a][k], bob[b][l])
                    p[k, l] = abs(np.vdot(v, psi)) ** 2
            probs[a, b] = p
    return probs


def prob_diff(p, shift, d):
    """P(A = B + shift mod d) from the joint table p[A, B]."""
    return sum(p[(l + shift) % d, l] for l in range(d))


def cglmp_value(d):
    probs = joint_probabilities(d)
    total = 0.0
    for k in range(d // 2):
        weight = 1.0 - 2.0 * k / (d - 1)
        plus = (prob_diff(probs[0, 0], k, d)
                + prob_diff(probs[1, 0].T, k + 1, d)   # P(B1 = A2 + k + 1)
                + prob_diff(probs[1, 1], k, d)
                + prob_diff(probs[0, 1].T, k, d))      # P(B2 = A1 + k)
        minus = (prob_diff(probs[0, 0], -k - 1, d)
                 + prob_diff(probs[1, 0].T, -k, d)
                 + prob_diff(probs[1, 1], -k - 1, d)
                 + prob_diff(probs[0, 1].T, -k - 1, d))
        total += weight * (plus - minus)
    return total


def cglmp_closed_form(d):
    def q(k):
        return 1.0 / (2.0 * d ** 3 * np.sin(np.pi * (k + 0.25) / d) ** 2)
    return 4 * d * sum((1 - 2 * k / (d - 1)) * (q(k) - q(-(k + 1))) for k in range(d // 2))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dmax", type=int, default=8)
    args = parser.parse_args()
    print("# d, I_d, p_min = 2 / I_d")
    for d in range(2, args.dmax + 1):
        brute = cglmp_value(d)
        closed = cglmp_closed_form(d)
        assert abs(brute - closed) < 1e-12, (d, brute, closed)
        print(f"threshold.p_min.{d} = {2.0 / brute:.12f}   # I_{d} = {brute:.12f}")


if __name__ == "__main__":
    main()

"""Smoke test for the gromov_lab extension module.

Build and run from the workspace root:

    cargo build -p gromov-py --release --features extension-module
    cp target/release/libgromov_lab.so crates/py/python/gromov_lab.so
    python3 crates/py/python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import gromov_lab as g


def main():
    x = g.MetricSpace.from_reals([0.0, 1.0, 3.0])
    assert len(x) == 3 and x.diameter() == 3.0
    assert x.to_matrix()[0] == [0.0, 1.0, 3.0]

    cert = g.gh_exact(x, x)
    assert cert.value == 0.0 and cert.optimal
    assert cert.witness == [(0, 0), (1, 1), (2, 2)]

    p = g.MetricSpace.point()
    assert g.gh_exact(x, p).value == 1.5
    assert g.gh_exact(x.scale(2.0), x).value == g.gh_scaling_value(x, 2.0, 1.0) == 1.5

    sq = g.MetricSpace([[0, 1], [1, 0]], ["p", "q"]).l1_product(g.MetricSpace.from_reals([0, 1]))
    assert len(sq) == 4 and sq.diameter() == 2.0
    assert sq.labels[0] == "p|0"
    assert x.add_constant(1.0).d(0, 1) == 2.0
    assert x.isometry_violation(x, [0, 1, 2]) is None

    assert g.distortion(x, p, [(0, 0), (1, 0), (2, 0)]) == 3.0
    assert g.hausdorff(x, [0, 1], [2]) == 3.0

    assert g.ball_count(2, 2) == 13
    assert g.ball_count(2, "1") == 5
    assert g.witness_radius(1, 2, 3, list(range(1, 11))) == 2.0
    assert g.witness_radius(1, 2, 0, list(range(1, 11))) == 1.0
    (_, n, n_prime, ratio), = g.ratio_series(1, 2, 0, [1000])
    assert abs(ratio - 2.0) < 0.01 * 2.0, (n, n_prime)
    assert abs(g.ball_count(2, 500) / (math.pi * 500 ** 2) - 1) < 0.05
    assert len(g.zn_window(2, 1)) == 9
    assert g.product_bound_constraint(1, 0.0, 2.0, 1.0) >= 0.0

    budget = g.gh_exact(g.MetricSpace.from_reals([0, 1, 3, 7]), x, node_budget=1)
    assert not budget.optimal and budget.lower_proof == "CallerBudgetExceeded"

    for bad in ([[0, 1], [2, 0]], [[0, 1, 5], [1, 0, 1], [5, 1, 0]]):
        try:
            g.MetricSpace(bad)
        except ValueError:
            pass
        else:
            raise AssertionError("accepted a non-metric")

    print("smoke test ok")


if __name__ == "__main__":
    main()

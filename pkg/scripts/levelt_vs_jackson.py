"""Connection matrix between the Levelt solution at p2/p1 = 0 and Jackson solutions.

Both solve the same dynamical equations, so Psi_hat^{-1} Y must not depend on q.
"""
import argparse

import numpy as np

from grassqkz.combinatorics import enumerate_index_sets
from grassqkz.numeric import SamplePoint, jackson_solution, levelt_fundamental, levelt_series, seeded_sample


def connection(series, sp):
    k, n = series.k, series.n
    Y = np.array([jackson_solution(J, sp).values for J in enumerate_index_sets(k, n)]).T
    return np.linalg.solve(levelt_fundamental(series, sp), Y)


def main(k, n, order, seed):
    base = seeded_sample(n, seed=seed)
    series = levelt_series(k, n, order, list(base.z))
    ref = connection(series, base)
    print(f"# ({k},{n}) z={tuple(v.real for v in base.z)} order={order}")
    for q in (0.02, 0.05, 0.08, 0.12):
        C = connection(series, SamplePoint.from_q(base.z, q))
        print(f"q={q:<5} max|C(q) - C(0.05)| / max|C| = {np.max(np.abs(C - ref)) / np.max(np.abs(ref)):.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--order", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    a = ap.parse_args()
    main(a.k, a.n, a.order, a.seed)

"""Relative error of the determinantal identity as the truncation grows, on several branches.

Box truncations {0..L}^k on the G(k,n) side match products of {0..L} truncations on
the P^{n-1} side, so the identity holds at every L; the last row shows how far the
truncated solutions themselves are from L=60.
"""
import argparse

import numpy as np
from dataclasses import dataclass

from grassqkz.numeric import SamplePoint, jackson_table, verify_detprop


@dataclass(frozen=True)
class Config:
    k: int = 2
    n: int = 3
    z: tuple = (0.31, -0.57, 0.11)
    q: float = 0.05
    truncations: tuple = (2, 4, 8, 16, 24, 40)
    branches: tuple = (-1, 0, 1)


def run(cfg: Config):
    print(f"# ({cfg.k},{cfg.n})  z={cfg.z}  q={cfg.q}")
    print("branch  " + "  ".join(f"L={L:<6}" for L in cfg.truncations))
    for br in cfg.branches:
        sp = SamplePoint.from_q(cfg.z, cfg.q, branch=br)
        errs = [verify_detprop(cfg.k, cfg.n, sp, L=L, tol=1.0, tail_tol=None).max_rel_err for L in cfg.truncations]
        print(f"{br:>6}  " + "  ".join(f"{e:.1e}" for e in errs))
    sp = SamplePoint.from_q(cfg.z, cfg.q)
    ref = jackson_table(cfg.k, cfg.n, sp, 60, None).matrix
    scale = np.max(np.abs(ref))
    diffs = [np.max(np.abs(jackson_table(cfg.k, cfg.n, sp, L, None).matrix - ref)) / scale for L in cfg.truncations]
    print("vs L60  " + "  ".join(f"{d:.1e}" for d in diffs))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--q", type=float, default=0.05)
    a = ap.parse_args()
    z = Config.z if a.n == 3 else tuple(round(0.8 * (-1) ** i * (i + 1) / (a.n + 1), 3) for i in range(a.n))
    run(Config(k=a.k, n=a.n, z=z, q=a.q))

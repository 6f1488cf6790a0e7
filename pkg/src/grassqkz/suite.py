"""Orchestrated verification suite across all modules."""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .config import SuiteConfig


@dataclass(frozen=True)
class CheckSpec:
    suite: str
    id: str
    anchor: str
    n: int
    task: str
    args: tuple = ()


@dataclass
class CheckResult:
    id: str
    anchor: str
    status: str
    detail: str = ""


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)
    elapsed: float = 0.0
    config: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def to_json(self, timing: bool = False) -> dict:
        d = {
            "suite": self.suite,
            "passed": self.passed,
            "config": self.config,
            "samples": self.samples,
            "checks": [
                {"id": c.id, "anchor": c.anchor, "status": c.status, "detail": c.detail} for c in self.checks
            ],
        }
        if timing:
            d["elapsed"] = round(self.elapsed, 3)
        return d

    def dumps(self, timing: bool = False) -> str:
        return json.dumps(self.to_json(timing), indent=2, sort_keys=True)

    def text(self) -> str:
        lines = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks, {self.elapsed:.1f}s)"]
        for c in self.checks:
            extra = f"  [{c.detail}]" if c.detail else ""
            lines.append(f"  {c.status.upper():4}  {c.id}  ({c.anchor}){extra}")
        return "\n".join(lines)


# -- tasks -----------------------------------------------------------------------
# Each task returns (passed, detail). They live at module level so a process pool can run them.


def _t_compat(n, k, pairs=None):
    from .weight_ops import verify_compatibility

    rep = verify_compatibility(n, k, list(pairs) if pairs else None)
    bad = [c.name for c in rep.checks if not c.passed]
    return not bad, ",".join(bad)


def _t_gauge(n, k):
    from .weight_ops import verify_satake_gauge

    rep = verify_satake_gauge(n, k)
    bad = [c.name for c in rep.checks if not c.passed]
    return not bad, ",".join(bad)


def _t_stab_orth(k, n):
    from .cohomology import poincare_pairing, stable_envelope_basis

    s, o = stable_envelope_basis(k, n)
    sign = -1 if (k * (n - k)) % 2 else 1
    for i, a in enumerate(s):
        for j, b in enumerate(o):
            want = sign if i == j else 0
            if poincare_pairing(a, b) != want:
                return False, f"pairing ({i},{j})"
    return True, ""


def _t_kempf_laksov(k, n):
    from .cohomology import kempf_laksov_class, schubert_class
    from .combinatorics import all_partitions

    bad = [str(lam) for lam in all_partitions(k, n) if kempf_laksov_class(lam, k, n) != schubert_class(lam, k, n)]
    return not bad, ",".join(bad)


def _t_gsc(k, n):
    from .cohomology import gsc_identity

    ok = all(l == r for l, r in (gsc_identity(k, n, i) for i in (1, 2)))
    return ok, ""


def _t_gram(kind, k, n, ell):
    from .ktheory import generate_Q_basis, is_symmetric_integer_laurent, kapranov_basis

    if kind == "kapranov":
        b = kapranov_basis(k, n)
    else:
        b = generate_Q_basis(n, ell, kind)
    G = b.gram
    if not G.is_upper_unitriangular():
        return False, "not unitriangular"
    N = G.size
    for i in range(N):
        for j in range(N):
            if not is_symmetric_integer_laurent(G[i, j]):
                return False, f"entry ({i},{j}) not symmetric integer Laurent"
    return True, ""


def _t_stokes(k, n, kind):
    from .algebra import Matrix
    from .ktheory import dagger, k_ring, stokes_matrices

    sd = stokes_matrices(k, n, 0, kind)
    ok = sd.S2 * dagger(sd.S1) == Matrix.identity(k_ring(n), sd.S1.size)
    return ok and sd.S1.is_upper_unitriangular(), ""


def _t_markov(case):
    from .ktheory import markov_entries, markov_holds, satake_markov_map, stokes_matrices

    a, b, c = markov_entries(stokes_matrices(1, 3, 0, "prime").S1)
    if case == "p2":
        return markov_holds(a, b, c, 1), ""
    if case == "map":
        return markov_holds(*satake_markov_map(a, b, c), 2), ""
    return markov_holds(*markov_entries(stokes_matrices(2, 3, 0, "prime").S1), 2), ""


def _t_minor(k, n):
    from .ktheory import exterior_minors, signed_relabel, stokes_matrices

    sp = stokes_matrices(1, n, 0, "prime")
    sg = stokes_matrices(k, n, 0, "prime")
    Pi = signed_relabel(k, n)
    ok = all(A == Pi * exterior_minors(B, k) * Pi for A, B in ((sg.S1, sp.S1), (sg.S2, sp.S2)))
    return ok, ""


def _t_canonical(k, n, kind):
    from .ktheory import canonical_checks, stokes_matrices

    sd = stokes_matrices(k, n, 0, kind)
    rep = canonical_checks(k, n, sd.basis, (sd.S1, sd.S2))
    return rep.passed, "" if rep.passed else json.dumps(rep.to_json(), sort_keys=True)


def _t_spectrum(n):
    from .ktheory import spectrum_simple, spectrum_simple_criterion

    bad = [k for k in range(n + 1) if spectrum_simple(k, n) != spectrum_simple_criterion(k, n)]
    return not bad, ",".join(map(str, bad))


def _num_result(rep):
    return rep.passed, f"max_rel_err={rep.max_rel_err:.2e}"


def _t_detprop(k, n, seed, L, tol):
    from .numeric import seeded_sample, verify_detprop

    return _num_result(verify_detprop(k, n, seeded_sample(n, seed=seed), L=L, tol=tol))


def _t_leading(k, n, seed, tol):
    from .ktheory import kapranov_basis
    from .numeric import leading_term_check, seeded_sample

    sp = seeded_sample(n, seed=seed)
    worst = None
    for P in kapranov_basis(k, n).elements:
        rep = leading_term_check(P, sp, tol)
        if worst is None or rep.max_rel_err > worst.max_rel_err:
            worst = rep
    return _num_result(worst)


def _t_hrr(k, n, seed, tol):
    from .numeric import hrr_check, seeded_sample

    return _num_result(hrr_check(k, n, seeded_sample(n, seed=seed), tol))


def _t_levelt(k, n, order):
    from fractions import Fraction

    from .numeric import levelt_det_coefficients, levelt_residual, levelt_series

    z = [Fraction(2 * i * i + 1, 7 * (i + 3)) for i in range(n)]
    s = levelt_series(k, n, order, z)
    res_ok = all(v == 0 for pair in levelt_residual(s) for M in pair for row in M for v in row)
    det = levelt_det_coefficients(s)
    det_ok = det[0] == 1 and all(c == 0 for c in det[1:])
    return res_ok and det_ok, f"residual={'0' if res_ok else 'nonzero'} det={'const' if det_ok else 'varies'}"


def _t_qkz_shift(k, n, seed, L, tol):
    from .numeric import qkz_shift_check, seeded_sample

    sp = seeded_sample(n, seed=seed)
    reps = [qkz_shift_check(k, n, a, sp, L, tol) for a in range(1, n + 1)]
    worst = max(reps, key=lambda r: r.max_rel_err)
    return _num_result(worst)


TASKS = {name[3:]: fn for name, fn in globals().items() if name.startswith("_t_")}


def _run_task(spec: CheckSpec) -> CheckResult:
    try:
        ok, detail = TASKS[spec.task](*spec.args)
        return CheckResult(spec.id, spec.anchor, "pass" if ok else "fail", detail)
    except Exception as exc:  # a crashing check is a failing check
        return CheckResult(spec.id, spec.anchor, "fail", f"{type(exc).__name__}: {exc}")


# -- planning ------------------------------------------------------------------------


def plan(cfg: SuiteConfig) -> list[CheckSpec]:
    specs: list[CheckSpec] = []
    add = specs.append
    tol = cfg.tolerances
    for n in range(1, 5):
        for k in range(n + 1):
            add(CheckSpec("compat", f"compat/({k},{n})", "qKZ flatness and qKZ/dynamical compatibility", n, "compat", (n, k)))
    add(CheckSpec("compat", "compat/(2,5)/pair(1,2)", "qKZ flatness and qKZ/dynamical compatibility", 5, "compat", (5, 2, ((1, 2),))))
    for n in range(1, 6):
        for k in range(1, n + 1):
            add(CheckSpec("gauge", f"gauge/({k},{n})", "exterior powers of P^{n-1} operators equal G(k,n) operators", n, "gauge", (n, k)))
    for n in range(1, 5):
        for k in range(n + 1):
            add(CheckSpec("cohomology", f"stab-orth/({k},{n})", "stable envelope orthogonality", n, "stab_orth", (k, n)))
            add(CheckSpec("cohomology", f"kempf-laksov/({k},{n})", "Kempf-Laksov vs factorial Schur", n, "kempf_laksov", (k, n)))
    add(CheckSpec("cohomology", "gsc/(2,4)", "quantum multiplication as exterior derivation", 4, "gsc", (2, 4)))
    for n in range(2, 5):
        for k in range(1, n):
            add(CheckSpec("kgram", f"gram/kapranov/({k},{n})", "Kapranov collection is exceptional", n, "gram", ("kapranov", k, n, 0)))
        for ell in (-1, 0, 1):
            for kind in ("prime", "doubleprime"):
                add(CheckSpec("kgram", f"gram/{kind}/ell={ell}/n={n}", "rule-based exceptional bases", n, "gram", (kind, 1, n, ell)))
    for k, n in ((1, 3), (2, 3), (1, 4), (2, 4)):
        for kind in ("prime", "doubleprime"):
            add(CheckSpec("stokes", f"stokes/{kind}/({k},{n})", "S2 S1^dagger = Id", n, "stokes", (k, n, kind)))
            add(CheckSpec("canonical", f"canonical/{kind}/({k},{n})", "canonical operator constraints", n, "canonical", (k, n, kind)))
    for k, n in ((2, 3), (2, 4)):
        add(CheckSpec("stokes", f"stokes/minors/({k},{n})", "G(k,n) Stokes matrix as signed k-minors", n, "minor", (k, n)))
    add(CheckSpec("markov", "markov/(1,3)", "P^2 Stokes entries satisfy the *-Markov equation", 3, "markov", ("p2",)))
    add(CheckSpec("markov", "markov/(1,3)->(2,3)", "(a,b,c) -> (c, ac-b, a) lands in the G(2,3) equations", 3, "markov", ("map",)))
    add(CheckSpec("markov", "markov/(2,3)", "G(2,3) Stokes entries satisfy the G(2,3) equations", 3, "markov", ("own",)))
    for n in range(2, cfg.spectrum_max_n + 1):
        add(CheckSpec("spectrum", f"spectrum/n={n}", "simple spectrum iff no k between pi_1(n) and n - pi_1(n)", 1, "spectrum", (n,)))
    s = cfg.seed
    for k, n in ((2, 2), (2, 3)):
        add(CheckSpec("numeric", f"detprop/({k},{n})", "determinantal identity for Jackson solutions", n, "detprop", (k, n, s, tol.truncation, tol.detprop)))
    for k, n in ((1, 2), (1, 3), (2, 3)):
        add(CheckSpec("numeric", f"leading/({k},{n})", "ell=0 Jackson term equals the B-class", n, "leading", (k, n, s, tol.leading)))
        add(CheckSpec("numeric", f"hrr/({k},{n})", "kappa-deformed Riemann-Roch", n, "hrr", (k, n, s, tol.hrr)))
    add(CheckSpec("numeric", "levelt/(1,3)/order=10", "Levelt series solves the dynamical equation", 3, "levelt", (1, 3, 10)))
    add(CheckSpec("numeric", "levelt/(2,4)/order=6", "Levelt series solves the dynamical equation", 4, "levelt", (2, 4, 6)))
    for k, n in ((1, 2), (1, 3)):
        add(CheckSpec("numeric", f"qkz-shift/({k},{n})", "Jackson solutions satisfy the qKZ equations", n, "qkz_shift", (k, n, s, tol.truncation, tol.qkz_shift)))
    return [c for c in specs if c.suite in cfg.which and c.n <= cfg.max_n]


def run_suite(cfg: SuiteConfig) -> Report:
    """Run the selected checks; deterministic given cfg (sample z come from cfg.seed)."""
    from .numeric import seeded_sample

    t0 = time.perf_counter()
    specs = plan(cfg)
    workers = cfg.worker_count()
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, specs))
    else:
        results = [_run_task(c) for c in specs]
    results.sort(key=lambda r: r.id)
    samples = {}
    if "numeric" in cfg.which:
        for n in (2, 3):
            if n <= cfg.max_n:
                samples[f"n={n}"] = [v.real for v in seeded_sample(n, seed=cfg.seed).z]
    rep = Report(
        suite="+".join(sorted(cfg.which)),
        checks=results,
        elapsed=time.perf_counter() - t0,
        config=cfg.to_json(),
        samples=samples,
    )
    return rep

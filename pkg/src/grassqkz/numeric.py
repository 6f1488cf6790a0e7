"""Numeric evaluation of hypergeometric solutions (Jackson residue sums),
B-class restrictions, the kappa-deformed Riemann-Roch check, Levelt series
and the determinantal identity between G(k,n) and P^{n-1} solutions.

Powers a^x are always exp(x log a) with the logarithm carried explicitly,
so every branch choice is visible in the SamplePoint.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import permutations, product
from typing import Sequence

import numpy as np
from gmpy2 import mpq
from scipy.linalg import expm
from scipy.special import loggamma, rgamma

from .algebra import Matrix, Ring, determinant
from .cohomology import stable_envelope_basis
from .combinatorics import IndexSet, binomial, enumerate_index_sets
from .ktheory import KClass, chi_pairing, euler_characteristic, satake_k
from .weight_ops import dynamical_operator, qkz_operator

TWO_PI_I = 2j * math.pi


class NumericError(ArithmeticError):
    pass


class PoleAt(NumericError):
    """log Gamma requested at a nonpositive integer."""


class GammaPole(NumericError):
    pass


class CoincidingT(NumericError):
    pass


class TruncationNotConverged(NumericError):
    pass


class ResonantZ(NumericError):
    pass


class ToleranceExceeded(NumericError):
    pass


# -- sample points ----------------------------------------------------------------


@dataclass(frozen=True)
class SamplePoint:
    """z, the two Kahler parameters through their logarithms, kappa with its log.

    branch fixes arg(-1) = (2 branch + 1) pi; it is used for negative real kappa
    and for the p1 rotation in the determinantal identity.
    """

    z: tuple
    log_p1: complex
    log_p2: complex = 0j
    kappa: complex = -1 + 0j
    log_kappa: complex | None = None
    branch: int = 0

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in self.z))
        object.__setattr__(self, "kappa", complex(self.kappa))
        if self.kappa == 0:
            raise ValueError("kappa must be nonzero")
        if self.log_kappa is None:
            k = self.kappa
            if k.imag == 0 and k.real < 0:
                lk = complex(math.log(-k.real), (2 * self.branch + 1) * math.pi)
            else:
                lk = cmath.log(k)
            object.__setattr__(self, "log_kappa", lk)

    @classmethod
    def from_q(cls, z: Sequence, q: float, kappa: complex = -1, branch: int = 0) -> "SamplePoint":
        """The specialization p1 = 1/q, p2 = 1."""
        return cls(tuple(z), -cmath.log(q), 0j, kappa, None, branch)

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def p1(self) -> complex:
        return cmath.exp(self.log_p1)

    @property
    def p2(self) -> complex:
        return cmath.exp(self.log_p2)

    def power_kappa(self, x: complex) -> complex:
        return cmath.exp(x * self.log_kappa)

    def z_acute(self) -> list[complex]:
        return [cmath.exp(-TWO_PI_I * zi / self.kappa) for zi in self.z]

    def rotate_p1(self, angle: float) -> "SamplePoint":
        return replace(self, log_p1=self.log_p1 + 1j * angle)

    def with_z(self, z: Sequence) -> "SamplePoint":
        return replace(self, z=tuple(z))

    def half_turn_kappa(self) -> "SamplePoint":
        """kappa -> e^{-pi i} kappa on the universal cover."""
        return replace(self, kappa=-self.kappa, log_kappa=self.log_kappa - 1j * math.pi)

    def to_json(self) -> dict:
        c = lambda v: [v.real, v.imag]
        return {
            "z": [c(v) for v in self.z],
            "log_p1": c(self.log_p1),
            "log_p2": c(self.log_p2),
            "kappa": c(self.kappa),
            "log_kappa": c(self.log_kappa),
            "branch": self.branch,
        }


def seeded_sample(n: int, q: float = 0.05, seed: int = 0, kappa: complex = -1, branch: int = 0) -> SamplePoint:
    """Random real z in (-0.9, 0.9), rounded to 3 decimals so it prints replayably."""
    rng = np.random.default_rng(seed)
    z = tuple(round(float(v), 3) for v in rng.uniform(-0.9, 0.9, size=n))
    return SamplePoint.from_q(z, q, kappa, branch)


@dataclass(frozen=True)
class NumericVector:
    """Per-index-set complex values, lex order."""

    k: int
    n: int
    values: tuple

    def __getitem__(self, I: IndexSet | int) -> complex:
        if isinstance(I, IndexSet):
            return self.values[enumerate_index_sets(self.k, self.n).index(I)]
        return self.values[I]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)

    def to_json(self) -> dict:
        return {
            str(I): [v.real, v.imag] for I, v in zip(enumerate_index_sets(self.k, self.n), self.values)
        }


# -- special functions ------------------------------------------------------------


def _is_pole(x: complex) -> bool:
    x = complex(x)
    return x.imag == 0 and x.real <= 0 and x.real == math.floor(x.real)


def log_gamma(x: complex) -> complex:
    """Principal branch of log Gamma."""
    if _is_pole(x):
        raise PoleAt(f"Gamma has a pole at {x}")
    return complex(loggamma(complex(x)))


def gamma(x: complex) -> complex:
    return cmath.exp(log_gamma(x))


# -- weight functions ----------------------------------------------------------------


def _u_values(I1: tuple, t: np.ndarray, z: np.ndarray) -> np.ndarray:
    """U_I on a batch of t rows (shape (G, k))."""
    G, k = t.shape
    out = np.ones(G, dtype=complex)
    for a in range(k):
        for c in range(I1[a] - 1):
            out = out * (t[:, a] - z[c])
        for b in range(a + 1, k):
            out = out / (t[:, b] - t[:, a])
    return out


def weight_values(I: IndexSet, t: np.ndarray, z: Sequence) -> np.ndarray:
    """W_I = Sym_t U_I evaluated on a batch of t rows."""
    t = np.atleast_2d(np.asarray(t, dtype=complex))
    z = np.asarray(z, dtype=complex)
    k = t.shape[1]
    if k >= 2:
        for a in range(k):
            for b in range(a + 1, k):
                if np.any(t[:, a] == t[:, b]):
                    raise CoincidingT("t coordinates must be pairwise distinct")
    total = np.zeros(t.shape[0], dtype=complex)
    for sigma in permutations(range(k)):
        total = total + _u_values(I.I1, t[:, list(sigma)], z)
    return total


def weight_function(I: IndexSet, t: Sequence, z: Sequence) -> complex:
    return complex(weight_values(I, np.asarray([t], dtype=complex), z)[0])


# -- Jackson residue sums --------------------------------------------------------------


@dataclass
class JacksonTable:
    """M[H][I] = M_H(Phi W_I) with the truncation actually used."""

    k: int
    n: int
    matrix: np.ndarray
    shells_used: int
    tail_ratio: float


def _log_prefactor(k: int, n: int, sp: SamplePoint, t: np.ndarray) -> np.ndarray:
    lk = sp.log_kappa
    kap = sp.kappa
    sz = sum(sp.z)
    st = t.sum(axis=1)
    a = (sz / kap) * (-k * lk + sp.log_p2)
    b = (st / kap) * (n * lk + sp.log_p1 - sp.log_p2)
    return a + b


def _shell(k: int, m: int) -> list[tuple]:
    """Multi-indices in {0..m}^k with max exactly m."""
    if m == 0:
        return [(0,) * k]
    return [e for e in product(range(m + 1), repeat=k) if max(e) == m]


def _residue_terms(H: IndexSet, ells: np.ndarray, sp: SamplePoint) -> tuple[np.ndarray, np.ndarray]:
    """Residue points t and Phi-residue values at t = Sigma_H - kappa ell."""
    k, n = H.k, H.n
    kap = sp.kappa
    z = np.asarray(sp.z, dtype=complex)
    h = np.array([a - 1 for a in H.I1])
    t = z[h][None, :] - kap * ells
    logv = _log_prefactor(k, n, sp, t)
    sign = np.ones(len(ells))
    for a in range(k):
        # Gamma((t_a - z_{h_a})/kappa) contributes kappa (-1)^ell / ell!
        logv = logv + sp.log_kappa - loggamma(ells[:, a] + 1.0)
        sign = sign * np.where(ells[:, a] % 2 == 0, 1.0, -1.0)
        for c in range(n):
            if c == h[a]:
                continue
            arg = (t[:, a] - z[c]) / kap
            if np.any((arg.imag == 0) & (arg.real <= 0) & (arg.real == np.floor(arg.real))):
                raise GammaPole(f"non-generic z: Gamma pole at t_{a + 1} - z_{c + 1}")
            logv = logv + loggamma(arg)
    vals = sign * np.exp(logv)
    for a in range(k):
        for b in range(k):
            if a != b:
                vals = vals * rgamma((t[:, a] - t[:, b]) / kap)
    return t, vals


def jackson_table(k: int, n: int, sp: SamplePoint, L: int = 40, tail_tol: float | None = 1e-12) -> JacksonTable:
    """Truncated Jackson sums over {0..L}^k, grown shell by shell (max-norm).

    Stops early once a shell changes every entry by less than tail_tol relative
    to the largest entry; raises TruncationNotConverged if that never happens.
    With tail_tol=None the full box {0..L}^k is summed with no test.
    """
    if not (0 <= L <= 200):
        raise ValueError("truncation L must lie in 0..200")
    if sp.n != n:
        raise ValueError("sample point has the wrong number of z's")
    basis = enumerate_index_sets(k, n)
    M = np.zeros((len(basis), len(basis)), dtype=complex)
    ratio = math.inf
    used = 0
    for m in range(L + 1):
        ells = np.array(_shell(k, m), dtype=float).reshape(-1, k)
        inc = np.zeros_like(M)
        for r, H in enumerate(basis):
            t, vals = _residue_terms(H, ells, sp)
            for c, I in enumerate(basis):
                inc[r, c] = np.sum(vals * weight_values(I, t, sp.z))
        M += inc
        used = m
        scale = np.max(np.abs(M))
        ratio = float(np.max(np.abs(inc)) / scale) if scale > 0 else 0.0
        if tail_tol is not None and m >= 2 and ratio < tail_tol:
            break
    if tail_tol is not None and ratio >= tail_tol:
        raise TruncationNotConverged(f"tail ratio {ratio:.3e} at L={L}")
    return JacksonTable(k, n, M, used, ratio)


def chern_character_eval(P: KClass, sp: SamplePoint) -> list[complex]:
    """P at every fixed point with Z_i -> exp(-2 pi i z_i / kappa)."""
    za = sp.z_acute()
    vals = {f"Z{i + 1}": za[i] for i in range(P.n)}
    return [complex(v.evaluate(vals)) for v in P.locs]


def jackson_solution(
    target: IndexSet | KClass,
    sp: SamplePoint,
    L: int = 40,
    tail_tol: float | None = 1e-12,
    table: JacksonTable | None = None,
) -> NumericVector:
    """Psi_J for an index set, Psi_P for a K-class; components on v_I."""
    k, n = target.k, target.n
    tab = table or jackson_table(k, n, sp, L, tail_tol)
    pref = cmath.exp(-(k * (n - k) + k) * sp.log_kappa)
    basis = enumerate_index_sets(k, n)
    if isinstance(target, IndexSet):
        row = tab.matrix[basis.index(target)]
    else:
        ch = np.asarray(chern_character_eval(target, sp))
        row = ch @ tab.matrix
    return NumericVector(k, n, tuple(complex(v) for v in pref * row))


def stab_matrix(k: int, n: int, z: Sequence) -> np.ndarray:
    """S[J, I] = Stab_I restricted to pt_J."""
    stab, _ = stable_envelope_basis(k, n)
    vals = {f"z{i + 1}": complex(z[i]) for i in range(n)}
    N = len(stab)
    S = np.zeros((N, N), dtype=complex)
    for c, cls in enumerate(stab):
        for r, v in enumerate(cls.locs):
            S[r, c] = complex(v.evaluate(vals))
    return S


# -- B-class ---------------------------------------------------------------------------


def b_class_restriction(P: KClass, J: IndexSet, sp: SamplePoint) -> complex:
    """B(P; kappa) at pt_J:
    P(z_acute at J) kappa^{((n-k) sum_{J1} z - k sum_{J2} z)/kappa} prod Gamma(1 + (z_a - z_b)/kappa).
    """
    k, n = J.k, J.n
    kap = sp.kappa
    z = sp.z
    s1 = sum(z[a - 1] for a in J.I1)
    s2 = sum(z[b - 1] for b in J.I2)
    logv = ((n - k) * s1 - k * s2) / kap * sp.log_kappa
    for a in J.I1:
        for b in J.I2:
            arg = 1 + (z[a - 1] - z[b - 1]) / kap
            if _is_pole(arg):
                raise GammaPole(f"Gamma(1 + (z_{a} - z_{b})/kappa) has a pole")
            logv += log_gamma(arg)
    ch = chern_character_eval(P, sp)[enumerate_index_sets(k, n).index(J)]
    return ch * cmath.exp(logv)


def _tangent_weights(J: IndexSet, z: Sequence) -> list[complex]:
    return [z[j - 1] - z[i - 1] for i in J.I1 for j in J.I2]


# -- reports ------------------------------------------------------------------------------


def _rel_err(a: complex, b: complex) -> float:
    d = abs(a - b)
    s = max(abs(a), abs(b))
    return d / s if s > 0 else d


@dataclass
class NumericReport:
    identity: str
    lhs: list
    rhs: list
    tol: float
    max_rel_err: float = field(init=False)
    passed: bool = field(init=False)
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        errs = [_rel_err(a, b) for a, b in zip(self.lhs, self.rhs)]
        self.max_rel_err = max(errs) if errs else 0.0
        self.passed = bool(self.max_rel_err <= self.tol)

    def to_json(self) -> dict:
        c = lambda v: [complex(v).real, complex(v).imag]
        return {
            "identity": self.identity,
            "lhs": [c(v) for v in self.lhs],
            "rhs": [c(v) for v in self.rhs],
            "max_rel_err": self.max_rel_err,
            "passed": self.passed,
            **({"info": self.info} if self.info else {}),
        }

    def raise_if_failed(self):
        if not self.passed:
            raise ToleranceExceeded(f"{self.identity}: {self.max_rel_err:.3e} > {self.tol:.1e}")
        return self


# -- leading term versus the closed B-class form ------------------------------------------


def leading_term_check(P: KClass, sp: SamplePoint, tol: float = 1e-10) -> NumericReport:
    """The ell=0 part of Stab Psi_P at pt_J against B(P)|_J p1^{sum_{J1}z/kappa} p2^{sum_{J2}z/kappa}."""
    k, n = P.k, P.n
    tab = jackson_table(k, n, sp, L=0, tail_tol=None)
    psi = jackson_solution(P, sp, table=tab).as_array()
    loc = stab_matrix(k, n, sp.z) @ psi
    rhs = []
    for J in enumerate_index_sets(k, n):
        s1 = sum(sp.z[a - 1] for a in J.I1)
        s2 = sum(sp.z[b - 1] for b in J.I2)
        pp = cmath.exp((s1 * sp.log_p1 + s2 * sp.log_p2) / sp.kappa)
        rhs.append(b_class_restriction(P, J, sp) * pp)
    return NumericReport(f"leading term = B-class ({k},{n})", list(loc), rhs, tol)


# -- Riemann-Roch --------------------------------------------------------------------------


def _zeval(n: int, sp: SamplePoint) -> dict:
    za = sp.z_acute()
    return {f"Z{i + 1}": za[i] for i in range(n)}


def hrr_value(V: KClass, sp: SamplePoint) -> complex:
    """(-kappa/2 pi i)^dim sum_J Ch(V)_J prod F(w)/w over tangent weights w."""
    k, n = V.k, V.n
    kap = sp.kappa
    ch = chern_character_eval(V, sp)
    total = 0j
    for J, c in zip(enumerate_index_sets(k, n), ch):
        term = c
        for w in _tangent_weights(J, sp.z):
            # F(w)/w with F(t) = -(2 pi i/kappa) t / (1 - exp(2 pi i t/kappa))
            term *= -(TWO_PI_I / kap) / (1 - cmath.exp(TWO_PI_I * w / kap))
        total += term
    return (-kap / TWO_PI_I) ** (k * (n - k)) * total


def hrr_pairing_value(V1: KClass, V2: KClass, sp: SamplePoint) -> complex:
    """(-kappa/2 pi i)^dim integral of B(V1; e^{-pi i} kappa) B(V2; kappa)."""
    k, n = V1.k, V1.n
    sp1 = sp.half_turn_kappa()
    total = 0j
    for J in enumerate_index_sets(k, n):
        e = 1
        for w in _tangent_weights(J, sp.z):
            e *= w
        total += b_class_restriction(V1, J, sp1) * b_class_restriction(V2, J, sp) / e
    return (-sp.kappa / TWO_PI_I) ** (k * (n - k)) * total


def hrr_check(
    k: int,
    n: int,
    sp: SamplePoint,
    tol: float = 1e-9,
    classes: Sequence[KClass] | None = None,
    pair: tuple[KClass, KClass] | None = None,
) -> NumericReport:
    """Numeric Riemann-Roch side against exact chi^T evaluated at Z = z_acute.

    Default classes: O and the Kapranov collection; default pair: its first two members.
    """
    from .ktheory import kapranov_basis, one_kclass

    if classes is None:
        classes = [one_kclass(k, n)] + list(kapranov_basis(k, n).elements)
    vals = _zeval(n, sp)
    lhs, rhs = [], []
    for V in classes:
        lhs.append(hrr_value(V, sp))
        rhs.append(complex(euler_characteristic(V).evaluate(vals)))
    if pair is None and len(classes) >= 3:
        pair = (classes[1], classes[2])
    if pair is not None:
        lhs.append(hrr_pairing_value(pair[0], pair[1], sp))
        rhs.append(complex(chi_pairing(pair[0], pair[1]).evaluate(vals)))
    return NumericReport(f"Riemann-Roch ({k},{n})", lhs, rhs, tol, {"classes": len(classes)})


# -- determinantal identity -------------------------------------------------------------------


def default_factors(k: int, n: int) -> list[KClass]:
    """P_i = O(k - i) on P^{n-1}, times a Z-monomial so the check is not too symmetric."""
    from .ktheory import line_bundle

    out = []
    R = line_bundle(0, n).locs[0].ring
    for i in range(1, k + 1):
        f = line_bundle(k - i, n)
        z = R.gen(f"Z{(i % n) + 1}")
        out.append(f * (R.one() + z * (i + 1)))
    return out


def verify_detprop(
    k: int,
    n: int,
    sp: SamplePoint,
    L: int = 40,
    tol: float = 1e-8,
    factors: Sequence[KClass] | None = None,
    tail_tol: float | None = 1e-12,
) -> NumericReport:
    """mu_J(P) = (2 pi i/kappa)^{-C(k,2)} p2^{(1-k) sum z/kappa} det(mu_{i, j_a}) at rotated p1.

    Left side: k-fold residues of Phi_{k,n} against symmetrized weight functions.
    Right side: one-dimensional residues for P^{n-1}, one factor at a time.
    """
    fs = list(factors) if factors is not None else default_factors(k, n)
    if len(fs) != k:
        raise ValueError("need exactly k factors")
    ell = sp.branch
    P = satake_k(fs, twist=ell)
    lhs_vec = jackson_solution(P, sp, L, tail_tol).values
    rot = sp.rotate_p1(math.pi * (k - 1) * (2 * ell + 1))
    tab1 = jackson_table(1, n, rot, L, tail_tol)
    mus = [jackson_solution(f, rot, table=tab1).values for f in fs]
    sz = sum(sp.z)
    const = (TWO_PI_I / sp.kappa) ** (-binomial(k, 2)) * cmath.exp((1 - k) * sz / sp.kappa * sp.log_p2)
    rhs_vec = []
    for J in enumerate_index_sets(k, n):
        sub = np.array([[mus[i][j - 1] for j in J.I1] for i in range(k)], dtype=complex)
        rhs_vec.append(const * np.linalg.det(sub))
    return NumericReport(f"determinantal identity ({k},{n})", list(lhs_vec), rhs_vec, tol, {"L": L, "branch": ell})


def exdetid_leading(sp: SamplePoint, factors: Sequence[KClass] | None = None, tol: float = 1e-10) -> NumericReport:
    """(k,n) = (2,2) at ell=0 truncation: both sides against the closed leading term.

    Closed form: det(P_i(z_acute_j)) exp(2 pi i sum z/kappa) / (exp(2 pi i z1/kappa) - exp(2 pi i z2/kappa)) p1^{sum z/kappa}.
    """
    fs = list(factors) if factors is not None else default_factors(2, 2)
    kap = sp.kappa
    z1, z2 = sp.z
    za = sp.z_acute()
    pv = [[complex(f.locs[j].evaluate({"Z1": za[0], "Z2": za[1]})) for f in fs] for j in range(2)]
    d = pv[0][0] * pv[1][1] - pv[0][1] * pv[1][0]
    closed = d * cmath.exp(TWO_PI_I * (z1 + z2) / kap) / (cmath.exp(TWO_PI_I * z1 / kap) - cmath.exp(TWO_PI_I * z2 / kap))
    closed *= cmath.exp((z1 + z2) / kap * sp.log_p1)
    P = satake_k(fs, twist=0)
    lhs = jackson_solution(P, sp, table=jackson_table(2, 2, sp, 0, None)).values[0]
    rot = sp.rotate_p1(math.pi)
    tab1 = jackson_table(1, 2, rot, 0, None)
    mus = [jackson_solution(f, rot, table=tab1).values for f in fs]
    det = mus[0][0] * mus[1][1] - mus[0][1] * mus[1][0]
    rhs = (kap / TWO_PI_I) * cmath.exp(-(z1 + z2) / kap * sp.log_p2) * det
    return NumericReport("determinantal identity (2,2), leading order", [lhs, rhs], [closed, closed], tol)


# -- qKZ shift ------------------------------------------------------------------------------------


def _eval_matrix(M: Matrix, values: dict) -> np.ndarray:
    N = M.size
    return np.array([[complex(M[r, c].evaluate(values)) for c in range(N)] for r in range(N)])


def qkz_shift_check(k: int, n: int, a: int, sp: SamplePoint, L: int = 40, tol: float = 1e-8) -> NumericReport:
    """Psi_J(z_a + kappa) = K_a(z) Psi_J(z) on the weight space, for every J."""
    K = qkz_operator(n, k, a).matrix
    vals = {f"z{i + 1}": sp.z[i] for i in range(n)}
    vals.update({"kp": sp.kappa, "p1": sp.p1, "p2": sp.p2})
    Kz = _eval_matrix(K, vals)
    zs = list(sp.z)
    zs[a - 1] += sp.kappa
    sp2 = sp.with_z(zs)
    t1 = jackson_table(k, n, sp, L)
    t2 = jackson_table(k, n, sp2, L)
    lhs, rhs = [], []
    for J in enumerate_index_sets(k, n):
        before = jackson_solution(J, sp, table=t1).as_array()
        after = jackson_solution(J, sp2, table=t2).as_array()
        lhs.extend(after)
        rhs.extend(Kz @ before)
    return NumericReport(f"qKZ shift K_{a} ({k},{n})", lhs, rhs, tol)


# -- Levelt series ------------------------------------------------------------------------------------


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, type(mpq(0))))


def _levelt_parts(k: int, n: int, z: Sequence) -> tuple[list[list], list[list]]:
    """X_1(z; p2/p1 = 0) and the coefficient of p2/p1 in X_1."""
    X = dynamical_operator(n, k, 1).matrix
    exact = all(_is_exact(v) for v in z)
    conv = (lambda v: mpq(v)) if exact else complex
    base = {f"z{i + 1}": conv(z[i]) for i in range(n)}
    N = X.size
    A = [[None] * N for _ in range(N)]
    B = [[None] * N for _ in range(N)]
    for r in range(N):
        for c in range(N):
            e = X[r, c]
            a0 = e.evaluate({**base, "p1": conv(1), "p2": conv(0), "kp": conv(1)})
            a1 = e.evaluate({**base, "p1": conv(1), "p2": conv(1), "kp": conv(1)})
            A[r][c] = a0
            B[r][c] = a1 - a0
    return A, B


def _mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][l] * B[l][j] for l in range(m)), A[0][0] * 0) for j in range(p)] for i in range(n)]


def _solve_exact(M, rhs):
    """Gauss-Jordan over an exact field; M square, rhs list of columns."""
    n = len(M)
    aug = [list(M[i]) + [col[i] for col in rhs] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise ResonantZ("singular system")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [[aug[i][n + j] for i in range(n)] for j in range(len(rhs))]


def _eigenbasis_exact(A, eig):
    """Columns v_I with A v_I = E_I v_I, found from the nullspace of A - E_I."""
    n = len(A)
    cols = []
    for lam in eig:
        M = [[A[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
        cols.append(_nullvector(M))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _nullvector(M):
    n = len(M)
    rows = [list(r) for r in M]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        raise ResonantZ("eigenvalues of X_1 at the origin are not simple")
    f = free[0]
    v = [mpq(0)] * n
    v[f] = mpq(1)
    for i, c in enumerate(pivots):
        v[c] = -rows[i][f]
    return v


@dataclass
class LeveltSeries:
    k: int
    n: int
    z: tuple
    kappa: object
    coefficients: list  # Psi_0, Psi_1, ... as nested lists
    eigenvalues: list

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1


def levelt_series(k: int, n: int, order: int, z: Sequence, kappa=-1) -> LeveltSeries:
    """Coefficients Psi_m of Psi_bullet = sum Psi_m s^m, s = p2/p1.

    Order m solves A Psi_m - Psi_m A + m kappa Psi_m = -N Psi_{m-1}, with
    X_1 = A + s N. Exact z (ints/Fractions) run over Q in the eigenbasis of A;
    float z solve the vectorized Sylvester system with numpy.
    """
    if not (0 <= order <= 20):
        raise ValueError("order must lie in 0..20")
    basis = enumerate_index_sets(k, n)
    A, Nm = _levelt_parts(k, n, z)
    size = len(basis)
    exact = all(_is_exact(v) for v in z) and _is_exact(kappa)
    eig = [sum((z[a - 1] for a in I.I1), 0) for I in basis]
    if exact:
        kap = mpq(kappa)
        eig = [mpq(e) for e in eig]
        for i in range(size):
            for j in range(size):
                for m in range(1, order + 1):
                    if eig[i] - eig[j] + m * kap == 0:
                        raise ResonantZ(f"E_{basis[i]} - E_{basis[j]} = {-m * kap}")
        V = _eigenbasis_exact(A, eig)
        ident = [[mpq(int(i == j)) for j in range(size)] for i in range(size)]
        Vinv_cols = _solve_exact(V, [[ident[i][j] for i in range(size)] for j in range(size)])
        Vinv = [[Vinv_cols[j][i] for j in range(size)] for i in range(size)]
        Nt = _mat_mul(Vinv, _mat_mul(Nm, V))
        coeffs_t = [ident]
        for m in range(1, order + 1):
            rhs = _mat_mul(Nt, coeffs_t[-1])
            coeffs_t.append(
                [[-rhs[i][j] / (eig[i] - eig[j] + m * kap) for j in range(size)] for i in range(size)]
            )
        coeffs = [_mat_mul(V, _mat_mul(C, Vinv)) for C in coeffs_t]
        return LeveltSeries(k, n, tuple(z), kap, coeffs, eig)
    kap = complex(kappa)
    An = np.array(A, dtype=complex)
    Nn = np.array(Nm, dtype=complex)
    Id = np.eye(size)
    coeffs = [Id.astype(complex)]
    for m in range(1, order + 1):
        op = np.kron(Id, An) - np.kron(An.T, Id) + m * kap * np.eye(size * size)
        if abs(np.linalg.det(op)) < 1e-300:
            raise ResonantZ(f"resonant at order {m}")
        rhs = -(Nn @ coeffs[-1])
        sol = np.linalg.solve(op, rhs.reshape(-1, order="F"))
        coeffs.append(sol.reshape(size, size, order="F"))
    return LeveltSeries(k, n, tuple(z), kap, [c.tolist() for c in coeffs], eig)


def levelt_residual(series: LeveltSeries) -> list:
    """Order-by-order residuals of both dynamical equations (matrices; zero when solved)."""
    k, n = series.k, series.n
    A, Nm = _levelt_parts(k, n, series.z)
    size = len(A)
    zero = A[0][0] * 0
    sz = sum(series.z, zero)
    Bm = [[(sz if i == j else zero) - A[i][j] for j in range(size)] for i in range(size)]
    N2 = [[-v for v in row] for row in Nm]
    kap = series.kappa
    C = series.coefficients
    out = []
    for m in range(1, series.order + 1):
        first = _sub(_add(_mat_mul(A, C[m]), _mat_mul(Nm, C[m - 1])), _add(_mat_mul(C[m], A), _scale(C[m], -m * kap)))
        second = _sub(_add(_mat_mul(Bm, C[m]), _mat_mul(N2, C[m - 1])), _add(_mat_mul(C[m], Bm), _scale(C[m], m * kap)))
        out.append((first, second))
    return out


def _add(X, Y):
    return [[a + b for a, b in zip(r, s)] for r, s in zip(X, Y)]


def _sub(X, Y):
    return [[a - b for a, b in zip(r, s)] for r, s in zip(X, Y)]


def _scale(X, c):
    return [[a * c for a in r] for r in X]


def levelt_det_coefficients(series: LeveltSeries) -> list:
    """Coefficients of s^0..s^N in det(sum_{m<=N} Psi_m s^m); constancy means [1, 0, ..., 0]."""
    R = Ring(["s"])
    s = R.gen("s")
    size = len(series.coefficients[0])
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            e = R.zero()
            for m, C in enumerate(series.coefficients):
                e = e + s ** m * R.const(mpq(C[i][j])) if C[i][j] != 0 else e
            row.append(e)
        rows.append(row)
    d = determinant(Matrix.from_rows(rows))
    coeffs = d.coeff_in("s")
    return [coeffs.get(m, R.zero()).constant() for m in range(series.order + 1)]


def levelt_fundamental(series: LeveltSeries, sp: SamplePoint) -> np.ndarray:
    """Numeric Psi_hat = Psi_bullet(s) p1^{A/kappa} p2^{B/kappa} at a sample point."""
    A, _ = _levelt_parts(series.k, series.n, sp.z)
    An = np.array(A, dtype=complex)
    size = An.shape[0]
    sz = sum(sp.z)
    Bn = sz * np.eye(size) - An
    s = cmath.exp(sp.log_p2 - sp.log_p1)
    Pb = sum(np.array(C, dtype=complex) * s ** m for m, C in enumerate(series.coefficients))
    return Pb @ expm((An * sp.log_p1 + Bn * sp.log_p2) / sp.kappa)


def levelt_det_exponents(k: int, n: int) -> tuple[Fraction, Fraction]:
    """(d1, d2) with det Psi_hat = p1^{d1 sum z/kappa} p2^{d2 sum z/kappa}."""
    base = math.factorial(n - 1)
    den = math.factorial(k) * math.factorial(n - k)
    return Fraction(base * k, den), Fraction(base * (n - k), den)

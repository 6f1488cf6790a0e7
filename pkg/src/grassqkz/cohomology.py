"""Torus-equivariant cohomology of G(k,n) through fixed-point localization."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import (
    AlgebraError,
    Matrix,
    Poly,
    Rational,
    Ring,
    determinant,
    rational_sum,
)
from .combinatorics import (
    IndexSet,
    Partition,
    all_partitions,
    compose,
    enumerate_index_sets,
    inverse,
    longest_perm,
    reduced_word,
    to_partition,
)
from .weight_ops import BadRange, dynamical_operator, exterior_power_matrix


class NotPolynomial(AlgebraError):
    pass


class ShapeMismatch(ValueError):
    pass


def z_ring(n: int) -> Ring:
    return Ring([f"z{i}" for i in range(1, n + 1)])


def rep_ring(k: int, n: int) -> Ring:
    """Representatives: gamma_{1,i} as g1..gk, then z1..zn."""
    return Ring([f"g{i}" for i in range(1, k + 1)] + [f"z{i}" for i in range(1, n + 1)])


def quantum_ring(n: int) -> Ring:
    return Ring([f"z{i}" for i in range(1, n + 1)] + ["q"])


def schubert_ring(n: int) -> Ring:
    return Ring([f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)])


# -- classes ------------------------------------------------------------------


@dataclass(frozen=True)
class CohClass:
    """Localization vector: values at the fixed points, in lex order of I."""

    k: int
    n: int
    locs: tuple

    def __post_init__(self):
        if len(self.locs) != len(enumerate_index_sets(self.k, self.n)):
            raise ShapeMismatch("wrong number of localizations")

    @classmethod
    def from_values(cls, k: int, n: int, values: Sequence) -> "CohClass":
        ring = z_ring(n)
        locs = tuple(v if isinstance(v, Rational) else Rational(ring.embed(v) if isinstance(v, Poly) else ring.const(v)) for v in values)
        return cls(k, n, locs)

    @classmethod
    def from_poly(cls, f: Poly, k: int, n: int) -> "CohClass":
        """Localize a representative written in g1..gk (and z's)."""
        zr = z_ring(n)
        vals = []
        for I in enumerate_index_sets(k, n):
            sub = {f"g{i + 1}": zr.gen(f"z{a}") for i, a in enumerate(I.I1)}
            vals.append(Rational(f.subs(sub, zr)))
        return cls(k, n, tuple(vals))

    def _check(self, other: "CohClass"):
        if (self.k, self.n) != (other.k, other.n):
            raise ShapeMismatch(f"({self.k},{self.n}) vs ({other.k},{other.n})")

    def __add__(self, other):
        self._check(other)
        return CohClass(self.k, self.n, tuple(a + b for a, b in zip(self.locs, other.locs)))

    def __sub__(self, other):
        self._check(other)
        return CohClass(self.k, self.n, tuple(a - b for a, b in zip(self.locs, other.locs)))

    def __neg__(self):
        return CohClass(self.k, self.n, tuple(-a for a in self.locs))

    def __mul__(self, other):
        if isinstance(other, CohClass):
            self._check(other)
            return CohClass(self.k, self.n, tuple(a * b for a, b in zip(self.locs, other.locs)))
        return CohClass(self.k, self.n, tuple(a * other for a in self.locs))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        return (self.k, self.n) == (other.k, other.n) and all(
            a == b for a, b in zip(self.locs, other.locs)
        )

    def __hash__(self):
        return hash((self.k, self.n))

    def is_genuine(self) -> bool:
        return all(v.is_polynomial() for v in self.locs)


def one_class(k: int, n: int) -> CohClass:
    ring = z_ring(n)
    return CohClass(k, n, tuple(Rational(ring.one()) for _ in enumerate_index_sets(k, n)))


def chern_class(k: int, n: int, bundle: int = 1, degree: int = 1) -> CohClass:
    """c_degree of E_1 (roots z_{I1}) or E_2 (roots z_{I2})."""
    ring = z_ring(n)
    vals = []
    for I in enumerate_index_sets(k, n):
        roots = [ring.gen(f"z{a}") for a in (I.I1 if bundle == 1 else I.I2)]
        vals.append(Rational(_elementary(roots, degree, ring)))
    return CohClass(k, n, tuple(vals))


def _elementary(xs: Sequence[Poly], d: int, ring: Ring) -> Poly:
    e = [ring.one()] + [ring.zero()] * d
    for x in xs:
        for j in range(d, 0, -1):
            e[j] = e[j] + e[j - 1] * x
    return e[d]


# -- factorial Schur and double Schubert polynomials -----------------------------------


def falling(x: Poly, y: Sequence[Poly], p: int) -> Poly:
    """(x|y)^p = prod_{c=1}^{p} (x - y_c)."""
    out = x.ring.one()
    for c in range(p):
        out = out * (x - y[c])
    return out


def factorial_schur(lam: Partition | Sequence[int], x: Sequence[Poly], y: Sequence[Poly]) -> Poly:
    """det((x_i|y)^{lam_j+k-j}) / prod_{i<j}(x_i - x_j), by exact division."""
    if not isinstance(lam, Partition):
        lam = Partition(tuple(lam))
    k = len(x)
    p = lam.padded(k)
    if p and p[0] + k - 1 > len(y):
        raise ShapeMismatch(f"need {p[0] + k - 1} y-variables, have {len(y)}")
    if k == 0:
        return y[0].ring.one() if y else None
    M = Matrix.from_rows([[falling(x[i], y, p[j] + k - 1 - j) for j in range(k)] for i in range(k)])
    num = determinant(M)
    for i in range(k):
        for j in range(i + 1, k):
            num = num.exact_div(x[i] - x[j])
    return num


def divided_difference(f: Poly, i: int, prefix: str = "x") -> Poly:
    a, b = f"{prefix}{i}", f"{prefix}{i + 1}"
    sf = f.rename({a: b, b: a})
    return (f - sf).exact_div(f.ring.gen(a) - f.ring.gen(b))


def double_schubert(sigma: Sequence[int], n: int, word: Sequence[int] | None = None) -> Poly:
    """S_sigma(x;y) = Delta_{sigma^{-1} sigma0} of prod_{i+j<=n}(x_i - y_j)."""
    ring = schubert_ring(n)
    top = ring.one()
    for i in range(1, n + 1):
        for j in range(1, n + 1 - i):
            top = top * (ring.gen(f"x{i}") - ring.gen(f"y{j}"))
    w = compose(inverse(tuple(sigma)), longest_perm(n))
    if word is None:
        word = reduced_word(w)
    f = top
    for i in reversed(list(word)):
        f = divided_difference(f, i)
    return f


# -- Schubert classes ---------------------------------------------------------------


def _gammas(ring: Ring, k: int) -> list[Poly]:
    return [ring.gen(f"g{i}") for i in range(1, k + 1)]


def schubert_poly(lam: Partition, k: int, n: int, flag: str = "standard") -> Poly:
    """(-1)^{|lam|} s_lam(gamma | z_{sigma0}) (standard) or s_lam(gamma | z) (opposite)."""
    ring = rep_ring(k, n)
    zs = [ring.gen(f"z{i}") for i in range(1, n + 1)]
    y = zs[::-1] if flag == "standard" else zs
    s = factorial_schur(lam, _gammas(ring, k), y)
    return -s if lam.size % 2 else s


def schubert_class(lam: Partition | Sequence[int], k: int, n: int, flag: str = "standard") -> CohClass:
    if not isinstance(lam, Partition):
        lam = Partition(tuple(lam))
    if not lam.fits(k, n):
        raise ShapeMismatch(f"{lam.parts} not inside {k}x{n - k}")
    return CohClass.from_poly(schubert_poly(lam, k, n, flag), k, n)


def kempf_laksov_class(lam: Partition | Sequence[int], k: int, n: int, flag: str = "standard") -> CohClass:
    """det(c_{lam_i+j-i}(Q - F_{m_i})) with m_i = n-k+i-lam_i, localized directly."""
    if not isinstance(lam, Partition):
        lam = Partition(tuple(lam))
    p = lam.padded(k)
    ring = z_ring(n)
    zs = [ring.gen(f"z{i}") for i in range(1, n + 1)]
    deg = (p[0] + k) if k else 0
    vals = []
    for I in enumerate_index_sets(k, n):
        quot = [zs[a - 1] for a in I.I2]
        series = {}
        for i in range(1, k + 1):
            m = n - k + i - p[i - 1]
            flag_roots = zs[:m] if flag == "standard" else zs[n - m:]
            series[i] = _chern_ratio(quot, flag_roots, deg, ring)

        def c(i, j):
            if j < 0 or j > deg:
                return ring.zero()
            return series[i][j]

        if k == 0:
            vals.append(Rational(ring.one()))
            continue
        M = Matrix.from_rows([[c(i, p[i - 1] + j - i) for j in range(1, k + 1)] for i in range(1, k + 1)])
        vals.append(Rational(determinant(M)))
    return CohClass(k, n, tuple(vals))


def _chern_ratio(num_roots, den_roots, deg, ring) -> list[Poly]:
    """Coefficients of prod(1 + a t) / prod(1 + b t) through t^deg."""
    s = [ring.one()] + [ring.zero()] * deg
    for a in num_roots:
        for j in range(deg, 0, -1):
            s[j] = s[j] + s[j - 1] * a
    for b in den_roots:
        for j in range(1, deg + 1):
            s[j] = s[j] - s[j - 1] * b
    return s


# -- pairing, idempotents, stable envelopes ------------------------------------------


def tangent_weight_product(I: IndexSet, ring: Ring) -> list[Poly]:
    """Linear forms z_a - z_b over a in I1, b in I2 (product is R at z_{sigma_I})."""
    return [ring.gen(f"z{a}") - ring.gen(f"z{b}") for a in I.I1 for b in I.I2]


def poincare_pairing(u: CohClass, v: CohClass, require_polynomial: bool = False) -> Rational:
    """(-1)^{k(n-k)} sum_I u_I v_I / R(z_{sigma_I})."""
    u._check(v)
    k, n = u.k, u.n
    ring = z_ring(n)
    terms = []
    for I, a, b in zip(enumerate_index_sets(k, n), u.locs, v.locs):
        prod = a * b
        den = dict(prod.den)
        r = Rational(prod.num, den, _raw=True)
        for f in tangent_weight_product(I, ring):
            r = r.div_form(f)
        terms.append(r)
    total = rational_sum(terms)
    if (k * (n - k)) % 2:
        total = -total
    if require_polynomial and not total.is_polynomial():
        raise NotPolynomial(total.text())
    return total


def idempotent_class(I: IndexSet) -> CohClass:
    ring = z_ring(I.n)
    vals = [Rational(ring.one() if J == I else ring.zero()) for J in enumerate_index_sets(I.k, I.n)]
    return CohClass(I.k, I.n, tuple(vals))


def idempotent_basis(k: int, n: int) -> list[CohClass]:
    return [idempotent_class(I) for I in enumerate_index_sets(k, n)]


def idempotent_representative(I: IndexSet) -> Rational:
    """prod_i prod_{b in I2}(gamma_i - z_b) / R(z_{sigma_I})."""
    ring = rep_ring(I.k, I.n)
    g = _gammas(ring, I.k)
    num = ring.one()
    for gi in g:
        for b in I.I2:
            num = num * (gi - ring.gen(f"z{b}"))
    r = Rational(num)
    for f in tangent_weight_product(I, ring):
        r = r.div_form(f)
    return r


def reconstruct(f: CohClass) -> list[Rational]:
    """Coefficients of f in the idempotent basis (its localizations)."""
    return list(f.locs)


def representative(f: CohClass) -> Rational:
    """sum_I f(z_{sigma_I}) Delta_I, a representative in gamma of partial degree <= n-k."""
    ring = rep_ring(f.k, f.n)
    terms = []
    for I, v in zip(enumerate_index_sets(f.k, f.n), f.locs):
        vr = v.subs({}, ring) if not v.is_zero() else Rational(ring.zero())
        terms.append(vr * idempotent_representative(I))
    return rational_sum(terms)


def stab_poly(I: IndexSet, opposite: bool = False) -> Poly:
    """Stab_I = s_{lam^vee}(gamma | z_{sigma0}); Stab^op_I = s_lam(gamma | z)."""
    lam = to_partition(I)
    if opposite:
        return schubert_poly(lam, I.k, I.n, "opposite") * (-1) ** lam.size
    dual = lam.complement(I.k, I.n)
    return schubert_poly(dual, I.k, I.n, "standard") * (-1) ** dual.size


def stab_poly_double_schubert(I: IndexSet, opposite: bool = False) -> Poly:
    """Same classes through double Schubert polynomials in (gamma; z_{sigma0}) or (gamma; z)."""
    k, n = I.k, I.n
    ring = rep_ring(k, n)
    if opposite:
        J = I
        ys = [ring.gen(f"z{j}") for j in range(1, n + 1)]
    else:
        J = IndexSet(k, n, tuple(sorted(n + 1 - a for a in I.I1)))
        ys = [ring.gen(f"z{j}") for j in range(n, 0, -1)]
    sigma = J.I1 + J.I2
    S = double_schubert(sigma, n)
    sub = {f"x{i}": (ring.gen(f"g{i}") if i <= k else ring.zero()) for i in range(1, n + 1)}
    sub.update({f"y{j}": ys[j - 1] for j in range(1, n + 1)})
    return S.subs(sub, ring)


def stable_envelope_basis(k: int, n: int) -> tuple[list[CohClass], list[CohClass]]:
    basis = enumerate_index_sets(k, n)
    stab = [CohClass.from_poly(stab_poly(I), k, n) for I in basis]
    op = [CohClass.from_poly(stab_poly(I, True), k, n) for I in basis]
    return stab, op


def schubert_basis(k: int, n: int, flag: str = "standard") -> list[CohClass]:
    """[Omega_lam] with lam running over partitions in the lex order of index sets."""
    return [schubert_class(lam, k, n, flag) for lam in all_partitions(k, n)]


# -- quantum multiplication ---------------------------------------------------------------


def _stab_to_q(M: Matrix, n: int) -> Matrix:
    """Specialize p1 = q^{-1}, p2 = 1 (kappa does not occur)."""
    lq = Ring(quantum_ring(n).names, [False] * n + [True])
    target = quantum_ring(n)

    def conv(e: Poly) -> Poly:
        v = e.subs({"p1": lq.parse("q^-1"), "p2": lq.one(), "kp": lq.zero()}, lq)
        return target.embed(v)

    return M.map(conv)


def quantum_c1_matrix(k: int, n: int, i: int, basis: str = "stab") -> Matrix:
    """Matrix of c_1(E_i) quantum multiplication; columns are images."""
    if i not in (1, 2):
        raise BadRange("bundle index must be 1 or 2")
    M = _stab_to_q(dynamical_operator(n, k, i).matrix, n)
    if basis == "stab":
        return M
    if basis != "schubert":
        raise BadRange(f"unknown basis {basis!r}")
    P, s = _stab_to_schubert(k, n)
    size = M.size
    rows = [[None] * size for _ in range(size)]
    for I in range(size):
        for J in range(size):
            rows[P[I]][P[J]] = M[I, J] * (s[I] * s[J])
    return Matrix.from_rows(rows)


def _stab_to_schubert(k: int, n: int):
    """Stab_I = s_I * sigma_{P(I)} with sigma the Schubert classes in lex-of-lambda order."""
    basis = enumerate_index_sets(k, n)
    lams = all_partitions(k, n)
    pos = {lam: r for r, lam in enumerate(lams)}
    P, s = [], []
    for I in basis:
        dual = to_partition(I).complement(k, n)
        P.append(pos[dual])
        s.append((-1) ** dual.size)
    return P, s


def classical_limit(M: Matrix) -> Matrix:
    return M.subs({"q": M[0, 0].ring.zero()})


def gsc_identity(k: int, n: int, i: int) -> tuple[Matrix, Matrix]:
    """Both sides of the exterior-derivation identity between the P^{n-1} and
    G(k,n) quantum matrices in Schubert bases."""
    qr = quantum_ring(n)
    P = quantum_c1_matrix(1, n, i, "schubert").subs({"q": -qr.gen("q") if k % 2 == 0 else qr.gen("q")})
    lhs = exterior_power_matrix(P, k, "derivation")
    rhs = quantum_c1_matrix(k, n, i, "schubert")
    if i == 2:
        sz = qr.zero()
        for a in range(1, n + 1):
            sz = sz + qr.gen(f"z{a}")
        rhs = rhs + Matrix.scalar(sz * (k - 1), rhs.size)
    return lhs, rhs


# -- cohomological level-k map ------------------------------------------------------------


def vandermonde_forms(xs: Sequence[Poly]) -> list[Poly]:
    return [xs[i] - xs[j] for i in range(len(xs)) for j in range(i + 1, len(xs))]


def satake_cohomology(fs: Sequence[CohClass]) -> CohClass:
    """Localization at I: det(f_j(z_{a_i})) / prod_{i<j}(z_{a_i} - z_{a_j})."""
    if any(f.k != 1 for f in fs) or len({f.n for f in fs}) != 1:
        raise ShapeMismatch("all inputs must be classes on P^{n-1}")
    k, n = len(fs), fs[0].n
    ring = z_ring(n)
    vals = []
    for I in enumerate_index_sets(k, n):
        M = Matrix.from_rows([[fs[j].locs[a - 1] for j in range(k)] for a in I.I1])
        d = determinant(M)
        d = d if isinstance(d, Rational) else Rational(d)
        for f in vandermonde_forms([ring.gen(f"z{a}") for a in I.I1]):
            d = d.div_form(f)
        vals.append(d.reduce())
    return CohClass(k, n, tuple(vals))


def wedge_pairing(us: Sequence[CohClass], vs: Sequence[CohClass]) -> Rational:
    """Induced pairing on the exterior power: det(eta(u_i, v_j))."""
    M = Matrix.from_rows([[poincare_pairing(u, v) for v in vs] for u in us])
    return determinant(M)


def projective_schubert(a: int, n: int) -> CohClass:
    return schubert_class(Partition((a,)), 1, n)


def schubert_wedge(lam: Partition, k: int, n: int) -> list[CohClass]:
    """sigma_{lam_k} ^ sigma_{lam_{k-1}+1} ^ ... ^ sigma_{lam_1+k-1} on P^{n-1}."""
    p = lam.padded(k)
    return [projective_schubert(p[k - 1 - j] + j, n) for j in range(k)]

"""Torus-equivariant K-theory of G(k,n) by localization: Euler characteristic
pairing, Grothendieck polynomials, exceptional bases, mutations, Stokes data."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

from .algebra import (
    AlgebraError,
    Matrix,
    Poly,
    Rational,
    Ring,
    charpoly,
    determinant,
    rational_sum,
    unitriangular_inverse,
)
from .combinatorics import Partition, enumerate_index_sets, to_index_set, to_partition


class NotLaurentPolynomial(AlgebraError):
    pass


class NotExceptional(AlgebraError):
    pass


class NotSymmetricLaurent(AlgebraError):
    pass


class BadKind(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


def k_ring(n: int) -> Ring:
    """Representation ring of the torus: Laurent polynomials in Z1..Zn."""
    return Ring([f"Z{i}" for i in range(1, n + 1)], laurent=True)


def k_rep_ring(k: int, n: int) -> Ring:
    """Representatives: G1..Gk stand for the Chern roots Gamma_{1,i} of E_1."""
    return Ring([f"G{i}" for i in range(1, k + 1)] + [f"Z{i}" for i in range(1, n + 1)], laurent=True)


def p_ring(n: int) -> Ring:
    """Representatives on P^{n-1}: X is the class Gamma_{1,1}."""
    return Ring(["X"] + [f"Z{i}" for i in range(1, n + 1)], laurent=True)


def elementary(values: Sequence[Poly], d: int, ring: Ring) -> Poly:
    acc = ring.zero()
    for c in combinations(values, d):
        t = ring.one()
        for v in c:
            t = t * v
        acc = acc + t
    return acc


def e_sym(n: int, d: int) -> Poly:
    R = k_ring(n)
    return elementary(R.gens(*R.names), d, R)


# -- classes ------------------------------------------------------------------


@dataclass(frozen=True)
class KClass:
    """Localization vector in the lex order of index sets."""

    k: int
    n: int
    locs: tuple

    def __post_init__(self):
        if len(self.locs) != comb(self.n, self.k):
            raise ShapeMismatch("wrong number of localizations")

    @classmethod
    def from_poly(cls, f: Poly, k: int, n: int) -> "KClass":
        """Localize a representative in G1..Gk (or X when k=1) and Z's."""
        R = k_ring(n)
        vals = []
        for I in enumerate_index_sets(k, n):
            sub = {f"G{i + 1}": R.gen(f"Z{a}") for i, a in enumerate(I.I1)}
            if k == 1 and "X" in f.ring:
                sub = {"X": R.gen(f"Z{I.I1[0]}")}
            vals.append(f.subs(sub, R))
        return cls(k, n, tuple(vals))

    @classmethod
    def scalar(cls, c, k: int, n: int) -> "KClass":
        R = k_ring(n)
        v = R(c)
        return cls(k, n, (v,) * comb(n, k))

    def _check(self, other: "KClass"):
        if (self.k, self.n) != (other.k, other.n):
            raise ShapeMismatch(f"({self.k},{self.n}) vs ({other.k},{other.n})")

    def __add__(self, other):
        self._check(other)
        return KClass(self.k, self.n, tuple(a + b for a, b in zip(self.locs, other.locs)))

    def __sub__(self, other):
        self._check(other)
        return KClass(self.k, self.n, tuple(a - b for a, b in zip(self.locs, other.locs)))

    def __neg__(self):
        return KClass(self.k, self.n, tuple(-a for a in self.locs))

    def __mul__(self, other):
        if isinstance(other, KClass):
            self._check(other)
            return KClass(self.k, self.n, tuple(a * b for a, b in zip(self.locs, other.locs)))
        if isinstance(other, Poly):
            other = k_ring(self.n).embed(other)
        return KClass(self.k, self.n, tuple(a * other for a in self.locs))

    __rmul__ = __mul__

    def star(self) -> "KClass":
        """Duality involution: invert every Z at every fixed point."""
        return KClass(self.k, self.n, tuple(a.star() for a in self.locs))

    def __eq__(self, other):
        if not isinstance(other, KClass):
            return NotImplemented
        return (self.k, self.n) == (other.k, other.n) and self.locs == other.locs

    def __hash__(self):
        return hash((self.k, self.n, self.locs))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "localizations": {str(I): v.text() for I, v in zip(enumerate_index_sets(self.k, self.n), self.locs)},
        }


def dual_involution(e: KClass) -> KClass:
    return e.star()


def one_kclass(k: int, n: int) -> KClass:
    return KClass.scalar(1, k, n)


def det_e1(k: int, n: int) -> KClass:
    """[det E_1]: the product of the Z's in I_1."""
    R = k_ring(n)
    vals = []
    for I in enumerate_index_sets(k, n):
        t = R.one()
        for a in I.I1:
            t = t * R.gen(f"Z{a}")
        vals.append(t)
    return KClass(k, n, tuple(vals))


# -- Euler characteristic -------------------------------------------------------


def euler_characteristic(f: KClass) -> Poly:
    """chi^T(f) = sum_I f_I / prod_{i in I1, j in I2}(1 - Z_i/Z_j)."""
    R = k_ring(f.n)
    terms = []
    for I, v in zip(enumerate_index_sets(f.k, f.n), f.locs):
        if v.is_zero():
            continue
        num = v
        forms = []
        for j in I.I2:
            zj = R.gen(f"Z{j}")
            num = num * zj ** f.k
            forms.extend(zj - R.gen(f"Z{i}") for i in I.I1)
        terms.append(Rational.of(num, *forms))
    if not terms:
        return R.zero()
    total = rational_sum(terms)
    if total.den:
        raise NotLaurentPolynomial(f"chi did not reduce: {total.text()}")
    return total.num


def chi_pairing(e: KClass, f: KClass) -> Poly:
    """chi(e, f) = chi^T(e* f)."""
    e._check(f)
    return euler_characteristic(e.star() * f)


# -- Grothendieck polynomials ---------------------------------------------------


def groth_ring(k: int, n: int) -> Ring:
    return Ring(
        [f"x{i}" for i in range(1, k + 1)] + [f"y{j}" for j in range(1, n + 1)],
        laurent=[False] * k + [True] * n,
    )


def _one_minus(R: Ring, i: int, j: int) -> Poly:
    return R.one() - R.gen(f"x{i}") * R.gen(f"y{j}") ** -1


def demazure(f: Poly, i: int) -> Poly:
    """D_i f = (y_i f - y_{i+1} s_i f) / (y_i - y_{i+1})."""
    R = f.ring
    yi, yj = R.gen(f"y{i}"), R.gen(f"y{i + 1}")
    sf = f.rename({f"y{i}": f"y{i + 1}", f"y{i + 1}": f"y{i}"})
    return (yi * f - yj * sf).exact_div(yi - yj)


@lru_cache(maxsize=None)
def _groth_recursive(k: int, n: int, I1: tuple) -> Poly:
    R = groth_ring(k, n)
    top = tuple(range(n - k + 1, n + 1))
    if I1 == top:
        out = R.one()
        for i in range(1, k + 1):
            for j in range(1, n - k + 1):
                out = out * _one_minus(R, i, j)
        return out
    # I1 comes from a larger set by replacing i+1 with i
    s = set(I1)
    for i in range(1, n):
        if i in s and i + 1 not in s:
            parent = tuple(sorted((s - {i}) | {i + 1}))
            return demazure(_groth_recursive(k, n, parent), i)
    raise AssertionError("unreachable: only the top set has no ascent")


def grothendieck_polynomial(lam, k: int, n: int, method: str = "demazure") -> Poly:
    """Double Grothendieck polynomial in x1..xk; y1..yn for a diagram in k x (n-k)."""
    lam = to_partition(lam) if not isinstance(lam, (tuple, list)) else Partition(tuple(lam))
    if not lam.fits(k, n):
        raise ShapeMismatch(f"{lam.parts} does not fit in {k}x{n - k}")
    if method == "demazure":
        return _groth_recursive(k, n, to_index_set(lam, k, n).I1)
    if method != "determinant":
        raise ValueError(method)
    R = groth_ring(k, n)
    p = lam.padded(k)
    rows = []
    for i in range(1, k + 1):
        xi = R.gen(f"x{i}")
        row = []
        for j in range(1, k + 1):
            t = xi ** (j - 1)
            for c in range(1, p[j - 1] + k - j + 1):
                t = t * _one_minus(R, i, c)
            row.append(t)
        rows.append(row)
    d = determinant(Matrix.from_rows(rows))
    van = R.one()
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            van = van * (R.gen(f"x{j}") - R.gen(f"x{i}"))
    return d.exact_div(van)


def schubert_sheaf_class(lam, k: int, n: int) -> KClass:
    """[O_lambda] = G_lambda(Gamma_1; Z) localized."""
    g = grothendieck_polynomial(lam, k, n)
    R = k_ring(n)
    vals = []
    for I in enumerate_index_sets(k, n):
        sub = {f"x{i + 1}": R.gen(f"Z{a}") for i, a in enumerate(I.I1)}
        sub.update({f"y{j}": R.gen(f"Z{j}") for j in range(1, n + 1)})
        vals.append(g.subs(sub, R))
    return KClass(k, n, tuple(vals))


# -- Schur functors and Satake map ----------------------------------------------


def _vandermonde(xs: Sequence[Poly], ring: Ring) -> Poly:
    """prod_{a<b}(x_a - x_b)."""
    out = ring.one()
    for a in range(len(xs)):
        for b in range(a + 1, len(xs)):
            out = out * (xs[a] - xs[b])
    return out


def schur_laurent(lam: Sequence[int], xs: Sequence[Poly], ring: Ring) -> Poly:
    """Bialternant Schur polynomial s_lambda(xs); xs may be Laurent monomials."""
    k = len(xs)
    lam = tuple(lam) + (0,) * (k - len(lam))
    num = determinant(Matrix.from_rows([[x ** (lam[j] + k - 1 - j) for j in range(k)] for x in xs]))
    den = determinant(Matrix.from_rows([[x ** (k - 1 - j) for j in range(k)] for x in xs]))
    return num.exact_div(den)


def kapranov_class(lam, k: int, n: int, twisted: bool = True) -> KClass:
    """L (x) Sigma_lambda E_1^*, with [L] = (prod Gamma_1)^{1-k}."""
    lam = to_partition(lam) if not isinstance(lam, (tuple, list)) else Partition(tuple(lam))
    R = k_ring(n)
    vals = []
    for I in enumerate_index_sets(k, n):
        zs = [R.gen(f"Z{a}") for a in I.I1]
        v = schur_laurent(lam.padded(k), [z ** -1 for z in zs], R)
        if twisted:
            prod = R.one()
            for z in zs:
                prod = prod * z
            v = v * prod ** (1 - k)
        vals.append(v)
    return KClass(k, n, tuple(vals))


def line_bundle(m: int, n: int) -> KClass:
    """O(m) on P^{n-1}, represented by X^{-m}."""
    return KClass.from_poly(p_ring(n).gen("X") ** (-m), 1, n)


def satake_k(fs: Sequence[KClass], twist: int = 0) -> KClass:
    """Image of f_1 ^ ... ^ f_k under the K-theoretic Satake map.

    Localization at I: det(f_j(Z_{i_l})) / ((prod Z_{I1})^{(k-1) twist} (-1)^{C(k,2)} V(Z_{I1}))
    with V(x) = prod_{a<b}(x_a - x_b). twist=0 realizes L (x) Sigma, twist=-1 gives Sigma.
    """
    k = len(fs)
    if k == 0:
        raise ShapeMismatch("need at least one factor")
    n = fs[0].n
    for f in fs:
        if (f.k, f.n) != (1, n):
            raise ShapeMismatch("all factors must live on P^{n-1}")
    R = k_ring(n)
    sign = -1 if comb(k, 2) % 2 else 1
    vals = []
    for I in enumerate_index_sets(k, n):
        rows = [[f.locs[a - 1] for f in fs] for a in I.I1]
        d = determinant(Matrix.from_rows(rows))
        zs = [R.gen(f"Z{a}") for a in I.I1]
        den = _vandermonde(zs, R) * sign
        prod = R.one()
        for z in zs:
            prod = prod * z
        if twist:
            den = den * prod ** ((k - 1) * twist)
        vals.append(d.exact_div(den))
    return KClass(k, n, tuple(vals))


def k_representative(c: KClass) -> Rational:
    """Representative in G1..Gk by Lagrange interpolation over the fixed points.

    The G-part is a polynomial, symmetric in G; coefficients are rational in Z.
    """
    n, k = c.n, c.k
    Rr = k_rep_ring(k, n)
    R = k_ring(n)
    terms = []
    for I, v in zip(enumerate_index_sets(k, n), c.locs):
        if v.is_zero():
            continue
        num = Rr.embed(v)
        forms = []
        for g in range(1, k + 1):
            for j in I.I2:
                num = num * (Rr.gen(f"G{g}") - Rr.gen(f"Z{j}"))
        for i in I.I1:
            for j in I.I2:
                forms.append(Rr.gen(f"Z{i}") - Rr.gen(f"Z{j}"))
        terms.append(Rational.of(num, *forms))
    rep = rational_sum(terms) if terms else Rational(Rr.zero())
    for I, v in zip(enumerate_index_sets(k, n), c.locs):
        sub = {f"G{i + 1}": R.gen(f"Z{a}") for i, a in enumerate(I.I1)}
        if not rep.subs(sub, R) == v:
            raise AssertionError("interpolation failed")
    return rep


# -- exceptional bases ----------------------------------------------------------


def gram_matrix(elements: Sequence[KClass]) -> Matrix:
    """G[i][j] = chi(e_i, e_j)."""
    return Matrix.from_rows([[chi_pairing(a, b) for b in elements] for a in elements])


@dataclass
class ExceptionalBasis:
    k: int
    n: int
    elements: list
    provenance: str = ""
    _gram: Matrix | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.elements) != comb(self.n, self.k):
            raise ShapeMismatch("wrong number of elements")

    @property
    def gram(self) -> Matrix:
        if self._gram is None:
            self._gram = gram_matrix(self.elements)
        return self._gram

    def is_exceptional(self) -> bool:
        return self.gram.is_upper_unitriangular()

    def verify(self) -> "ExceptionalBasis":
        if not self.is_exceptional():
            raise NotExceptional(self.provenance or "basis")
        return self

    def __len__(self):
        return len(self.elements)

    def same_elements(self, other: "ExceptionalBasis") -> bool:
        return self.elements == other.elements


def beilinson_basis(n: int) -> ExceptionalBasis:
    """(O, O(1), ..., O(n-1)) on P^{n-1}."""
    return ExceptionalBasis(1, n, [line_bundle(m, n) for m in range(n)], "beilinson")


def kapranov_basis(k: int, n: int, twisted: bool = True) -> ExceptionalBasis:
    """Kapranov classes in lex order of index sets (a refinement of inclusion)."""
    els = [kapranov_class(to_partition(I), k, n, twisted) for I in enumerate_index_sets(k, n)]
    return ExceptionalBasis(k, n, els, "kapranov" + ("" if twisted else "-untwisted"))


def x_poly(m: int, h: int, n: int) -> Poly:
    """X^m(h) = sum_{i=0}^{m-h} (-1)^i e_i(Z) X^{m-i}."""
    if not 0 <= m - h <= n:
        raise ValueError(f"need 0 <= m-h <= n, got m={m}, h={h}")
    P = p_ring(n)
    X = P.gen("X")
    out = P.zero()
    for i in range(m - h + 1):
        out = out + P.embed(e_sym(n, i)) * X ** (m - i) * (-1) ** i
    return out


def _q_objects(n: int, ell: int, kind: str) -> list[tuple[int, int]]:
    """Objects as (d, t) meaning wedge^d T(t); d=0 is the line bundle O(t)."""
    objs: list[tuple[int, int]] = []
    if kind not in ("prime", "doubleprime"):
        raise BadKind(kind)
    if n % 2:
        c = -ell - (n - 1) // 2
        if kind == "prime":
            objs.append((0, c))
            for j in range(1, (n - 1) // 2 + 1):
                objs += [(2 * j - 1, c - j), (0, c + j)]
        else:
            objs.append((0, c))
            for j in range(1, (n - 1) // 2 + 1):
                objs += [(0, c + j), (2 * j, c - j)]
    else:
        if kind == "prime":
            c = -ell - n // 2
            objs.append((0, c))
            for j in range(1, (n - 2) // 2 + 1):
                objs += [(0, c + j), (2 * j, c - j)]
            objs.append((0, -ell))
        else:
            c = -ell - n // 2 + 1
            for j in range(0, (n - 2) // 2 + 1):
                objs += [(0, c + j), (2 * j + 1, c - j - 1)]
    return objs


@dataclass(frozen=True)
class QElement:
    m: int
    h: int
    twist: int

    def label(self) -> str:
        base = f"X^{self.m}" if self.m == self.h else f"X^{self.m}({self.h})"
        if self.twist:
            return f"[(-1)^(n+1)e_n]^{self.twist}*{base}"
        return base


def q_elements(n: int, ell: int, kind: str, twisted: bool = True) -> list[QElement]:
    out = []
    for d, t in _q_objects(n, ell, kind):
        m = -t
        h = m - d
        a = -(m // n) if twisted else 0
        out.append(QElement(m, h, a))
    return out


def q_polynomials(n: int, ell: int, kind: str, twisted: bool = True) -> list[Poly]:
    P = p_ring(n)
    en = P.embed(e_sym(n, n)) * (-1) ** (n + 1)
    polys = []
    for q in q_elements(n, ell, kind, twisted):
        p = x_poly(q.m, q.h, n)
        if q.twist:
            p = p * en ** q.twist
        polys.append(p)
    return polys


def generate_Q_basis(n: int, ell: int, kind: str, twisted: bool = True) -> ExceptionalBasis:
    if n < 2:
        raise ValueError("need n >= 2")
    els = [KClass.from_poly(p, 1, n) for p in q_polynomials(n, ell, kind, twisted)]
    tag = ("tilde-" if twisted else "") + f"Q{kind}[{ell}]"
    return ExceptionalBasis(1, n, els, tag)


def satake_exterior_basis(basis: ExceptionalBasis, k: int, twist: int = 0, check: bool = True) -> ExceptionalBasis:
    """Wedges e_{i1} ^ ... ^ e_{ik}, i1 < ... < ik, in lex order, mapped to G(k,n)."""
    if basis.k != 1:
        raise ShapeMismatch("input must be a basis on P^{n-1}")
    n = basis.n
    els = [satake_k([basis.elements[i] for i in c], twist) for c in combinations(range(n), k)]
    out = ExceptionalBasis(k, n, els, f"wedge{k}({basis.provenance})")
    if check:
        out.verify()
    return out


def exterior_minors(M: Matrix, k: int) -> Matrix:
    idx = list(combinations(range(M.size), k))
    return Matrix.from_rows([[determinant(M.submatrix(A, B)) for B in idx] for A in idx])


# -- mutations and braids -------------------------------------------------------


def left_mutation(e: KClass, f: KClass) -> KClass:
    """L_e f = f - chi(e,f) e."""
    return f - e * chi_pairing(e, f)


def right_mutation(e: KClass, f: KClass) -> KClass:
    """R_e f = f - chi(f,e)^* e."""
    return f - e * chi_pairing(f, e).star()


def mutate(basis: ExceptionalBasis, i: int, side: str, check: bool = True) -> ExceptionalBasis:
    """Mutate the pair at positions i, i+1 (1-based)."""
    N = len(basis)
    if not 0 < i < N:
        raise ValueError(f"need 0 < i < {N}")
    els = list(basis.elements)
    a, b = els[i - 1], els[i]
    if side == "left":
        els[i - 1], els[i] = left_mutation(a, b), a
    elif side == "right":
        els[i - 1], els[i] = b, right_mutation(b, a)
    else:
        raise ValueError(side)
    out = ExceptionalBasis(basis.k, basis.n, els, f"{'L' if side == 'left' else 'R'}{i}({basis.provenance})")
    if check:
        out.verify()
    return out


_GEN = re.compile(r"^t(\d+)(\^-1)?$")


def parse_braid(word: str) -> list[int]:
    """'t1 t2^-1' -> [1, -2]."""
    out = []
    for tok in word.split():
        m = _GEN.match(tok)
        if not m:
            raise ValueError(f"bad braid generator {tok!r}")
        g = int(m.group(1))
        out.append(-g if m.group(2) else g)
    return out


def act_braid(basis: ExceptionalBasis, word: Sequence[int] | str, check: bool = True) -> ExceptionalBasis:
    """Braid action with tau_i -> R_{N-i}, tau_i^-1 -> L_{N-i}; rightmost factor acts first."""
    if isinstance(word, str):
        word = parse_braid(word)
    N = len(basis)
    out = basis
    for g in reversed(list(word)):
        i = N - abs(g)
        out = mutate(out, i, "right" if g > 0 else "left", check=False)
    if check:
        out.verify()
    return out


def beta_word(N: int) -> list[int]:
    """tau_1 (tau_2 tau_1) ... (tau_{N-1} ... tau_1)."""
    w: list[int] = []
    for top in range(1, N):
        w.extend(range(top, 0, -1))
    return w


def dual_basis(basis: ExceptionalBasis, side: str = "left") -> ExceptionalBasis:
    w = beta_word(len(basis))
    if side == "right":
        w = [-g for g in reversed(w)]
    elif side != "left":
        raise ValueError(side)
    out = act_braid(basis, w)
    out.provenance = f"{side}-dual({basis.provenance})"
    return out


# -- Stokes data ----------------------------------------------------------------


def dagger(M: Matrix) -> Matrix:
    return M.map(lambda x: x.star()).transpose()


def anti_identity(ring: Ring, N: int) -> Matrix:
    one, zero = ring.one(), ring.zero()
    return Matrix.from_rows([[one if i + j == N - 1 else zero for j in range(N)] for i in range(N)])


def lower_unitriangular_inverse(M: Matrix) -> Matrix:
    return unitriangular_inverse(M.transpose()).transpose()


def is_symmetric_integer_laurent(p: Poly) -> bool:
    if not p.integer_coefficients():
        return False
    names = p.ring.names
    for a in range(len(names) - 1):
        if p.rename({names[a]: names[a + 1], names[a + 1]: names[a]}) != p:
            return False
    return True


@dataclass
class StokesData:
    k: int
    n: int
    gram: Matrix
    S1: Matrix
    S2: Matrix
    basis: ExceptionalBasis


def stokes_from_gram(G: Matrix) -> tuple[Matrix, Matrix]:
    """S1 = J (G^dag)^{-1} J and S2 = J G J."""
    ring = G[0, 0].ring
    J = anti_identity(ring, G.size)
    return J * lower_unitriangular_inverse(dagger(G)) * J, J * G * J


def stokes_basis(k: int, n: int, ell: int, kind: str) -> ExceptionalBasis:
    return satake_exterior_basis(generate_Q_basis(n, ell, kind, twisted=True), k)


def stokes_matrices(k: int, n: int, ell: int = 0, kind: str = "prime", check: bool = True) -> StokesData:
    if comb(n, k) > 10:
        raise ValueError("C(n,k) must be at most 10")
    basis = stokes_basis(k, n, ell, kind)
    G = basis.gram
    S1, S2 = stokes_from_gram(G)
    if check:
        for M in (S1, S2):
            for row in M.rows:
                for x in row:
                    if not is_symmetric_integer_laurent(x):
                        raise NotSymmetricLaurent(x.text())
    return StokesData(k, n, G, S1, S2, basis)


def trace_exterior(M: Matrix, ell: int):
    """Tr of the ell-th exterior power: sum of principal ell-minors."""
    ring = M[0, 0].ring
    if ell == 0:
        return ring.one()
    acc = ring.zero()
    for A in combinations(range(M.size), ell):
        acc = acc + determinant(M.submatrix(A, A))
    return acc


def canonical_eigenvalues(k: int, n: int) -> list[Poly]:
    """nu_I = (-1)^{k(n-k)} (prod_{I1} Z)^n / (Z_1...Z_n)^k."""
    R = k_ring(n)
    allz = R.one()
    for j in range(1, n + 1):
        allz = allz * R.gen(f"Z{j}")
    out = []
    for I in enumerate_index_sets(k, n):
        t = R.one()
        for a in I.I1:
            t = t * R.gen(f"Z{a}")
        out.append(t ** n * allz ** (-k) * (-1) ** (k * (n - k)))
    return out


def nu_tilde(k: int, n: int, j: int) -> Poly:
    return elementary(canonical_eigenvalues(k, n), j, k_ring(n))


def canonical_operator(c: KClass) -> KClass:
    return KClass(c.k, c.n, tuple(v * nu for v, nu in zip(c.locs, canonical_eigenvalues(c.k, c.n))))


def canonical_matrix(G: Matrix) -> Matrix:
    """G^{-1} G^dag."""
    return unitriangular_inverse(G) * dagger(G)


@dataclass
class CanonicalReport:
    k: int
    n: int
    charpoly_ok: bool
    matrix_ok: bool
    serre_ok: bool
    traces_ok: dict
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.charpoly_ok and self.matrix_ok and self.serre_ok and all(self.traces_ok.values())

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "charpoly": self.charpoly_ok,
            "canonical_matrix": self.matrix_ok,
            "serre_pairing": self.serre_ok,
            "traces": {str(a): v for a, v in self.traces_ok.items()},
            "passed": self.passed,
        }


def canonical_checks(k: int, n: int, basis: ExceptionalBasis | None = None, S: Sequence[Matrix] | None = None) -> CanonicalReport:
    """Characteristic polynomial, matrix of k, Serre duality and trace constraints."""
    basis = basis or stokes_basis(k, n, 0, "prime")
    G = basis.gram
    N = G.size
    R = k_ring(n)
    T = R.extend(["t"])
    t = T.gen("t")
    K = canonical_matrix(G)
    lhs = charpoly(K.map(T.embed), t)
    rhs = T.one()
    for nu in canonical_eigenvalues(k, n):
        rhs = rhs * (t - T.embed(nu))
    cp_ok = lhs == rhs
    # column j of K holds the coordinates of k(e_j)
    mat_ok = True
    for j, e in enumerate(basis.elements):
        img = canonical_operator(e)
        comb_ = KClass.scalar(0, k, n)
        for i, f in enumerate(basis.elements):
            comb_ = comb_ + f * K[i, j]
        if comb_ != img:
            mat_ok = False
            break
    serre_ok = all(
        chi_pairing(a, b).star() == chi_pairing(b, canonical_operator(a))
        for a in basis.elements[:3]
        for b in basis.elements[:3]
    )
    if S is None:
        S = stokes_from_gram(G)
    traces = {}
    for idx, M in enumerate(S, 1):
        A = dagger(M) * _unitri_any_inverse(M)
        for ell in range(0, N + 1):
            traces[(idx, ell)] = trace_exterior(A, ell) == nu_tilde(k, n, ell)
    return CanonicalReport(k, n, cp_ok, mat_ok, serre_ok, traces)


def _unitri_any_inverse(M: Matrix) -> Matrix:
    n = M.size
    if all(M[i, j].is_zero() for i in range(n) for j in range(i)):
        return unitriangular_inverse(M)
    return lower_unitriangular_inverse(M)


# -- *-Markov equations ---------------------------------------------------------


def markov_rhs(n_or_k: tuple[int, int], ell: int) -> Poly:
    k, n = n_or_k
    return k_ring(n).const(3) - nu_tilde(k, n, ell)


def markov_lhs(a: Poly, b: Poly, c: Poly, ell: int) -> Poly:
    """aa* + bb* + cc* - a b* c for ell=1, and its dual form for ell=2."""
    base = a * a.star() + b * b.star() + c * c.star()
    if ell == 1:
        return base - a * b.star() * c
    return base - a.star() * b * c.star()


def markov_entries(S: Matrix) -> tuple[Poly, Poly, Poly]:
    return S[0, 1], S[0, 2], S[1, 2]


def markov_holds(a: Poly, b: Poly, c: Poly, k: int) -> bool:
    return all(markov_lhs(a, b, c, ell) == markov_rhs((k, 3), ell) for ell in (1, 2))


def satake_markov_map(a: Poly, b: Poly, c: Poly) -> tuple[Poly, Poly, Poly]:
    """(a, b, c) -> (c, ac - b, a)."""
    return c, a * c - b, a


def signed_relabel(k: int, n: int) -> Matrix:
    """Pi = J_N * wedge^k(J_n): relates G(k,n) Stokes matrices to k-minors of P^{n-1} ones."""
    R = k_ring(n)
    N = comb(n, k)
    return anti_identity(R, N) * exterior_minors(anti_identity(R, n), k)


# -- formal data ----------------------------------------------------------------


def cyclotomic_poly(n: int) -> list[int]:
    """Integer coefficients (low to high) of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _int_poly_div(num, cyclotomic_poly(d))
    return num


def _int_poly_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        if c * b[-1] != a[i + len(b) - 1]:
            raise ArithmeticError("non-exact integer division")
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    if any(a):
        raise ArithmeticError("non-zero remainder")
    return q


def reduce_cyclotomic(vec: Sequence[int], n: int) -> tuple:
    """Canonical form of sum vec[i] zeta^i in Q(zeta_n): remainder modulo Phi_n."""
    phi = cyclotomic_poly(n)
    d = len(phi) - 1
    a = list(vec)
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for j, pj in enumerate(phi):
                a[i - d + j] -= c * pj
    return tuple(a[:d] + [0] * (d - len(a[:d])))


@dataclass(frozen=True)
class FormalData:
    k: int
    n: int
    s: tuple
    p_exponents: tuple
    exponent_form: str

    def s_numeric(self) -> list[complex]:
        import cmath

        zeta = cmath.exp(2j * cmath.pi / self.n)
        return [sum(c * zeta ** i for i, c in enumerate(v)) for v in self.s]


def formal_data(k: int, n: int) -> FormalData:
    """s_I = sum_{i in I1} zeta^{i-1} in Q(zeta_n); p_I = zeta^{-sum(i-1)} stored as exponent mod n."""
    if n > 12:
        raise ValueError("n must be at most 12")
    svals, pexp = [], []
    for I in enumerate_index_sets(k, n):
        vec = [0] * n
        for i in I.I1:
            vec[i - 1] += 1
        svals.append(reduce_cyclotomic(vec, n))
        pexp.append((-sum(i - 1 for i in I.I1)) % n)
    lam = f"{k}*((n-1)/2 + z1+...+zn)".replace("n-1", str(n - 1))
    return FormalData(k, n, tuple(svals), tuple(pexp), lam)


def spectrum_simple(k: int, n: int) -> bool:
    s = formal_data(k, n).s
    return len(set(s)) == len(s)


def smallest_prime_factor(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def spectrum_simple_criterion(k: int, n: int) -> bool:
    p = smallest_prime_factor(n)
    return not (p <= k <= n - p)

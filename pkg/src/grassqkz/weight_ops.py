"""R-matrix, qKZ and dynamical operators on weight subspaces of (C^2)^{tensor n},
exterior powers and the level-k identification with (1,n) data."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .algebra import Matrix, Poly, Ring, determinant
from .combinatorics import BadRange, IndexSet, enumerate_index_sets


def weight_ring(n: int) -> Ring:
    names = [f"z{i}" for i in range(1, n + 1)] + ["kp", "p1", "p2"]
    return Ring(names, [False] * (n + 1) + [True, True])


@dataclass(frozen=True)
class OperatorMatrix:
    k: int
    n: int
    matrix: Matrix

    @property
    def basis(self) -> list[IndexSet]:
        return enumerate_index_sets(self.k, self.n)

    @property
    def size(self) -> int:
        return self.matrix.size

    def entries(self) -> list[list[str]]:
        return self.matrix.text_rows()

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "basis": [I.to_json() for I in self.basis],
            "entries": self.entries(),
        }

    def __eq__(self, other):
        return (self.k, self.n) == (other.k, other.n) and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.k, self.n))


# -- R-matrix -----------------------------------------------------------------


def r_matrix(u: Poly) -> Matrix:
    """R(u) = P + u e11 (x) e22 on C^2 (x) C^2, basis v1v1, v1v2, v2v1, v2v2."""
    ring = u.ring
    one, zero = ring.one(), ring.zero()
    return Matrix.from_rows(
        [
            [one, zero, zero, zero],
            [zero, u, one, zero],
            [zero, one, zero, zero],
            [zero, zero, zero, one],
        ]
    )


def _apply_r(vec: dict, i: int, j: int, u: Poly) -> dict:
    """R^{(i,j)}(u) on a vector {state: coeff}; states are tuples of 1/2 labels."""
    out: dict = {}
    for s, c in vec.items():
        t = list(s)
        t[i - 1], t[j - 1] = t[j - 1], t[i - 1]
        t = tuple(t)
        out[t] = out[t] + c if t in out else c
        if s[i - 1] == 1 and s[j - 1] == 2:
            uc = u * c
            out[s] = out[s] + uc if s in out else uc
    return {s: c for s, c in out.items() if not c.is_zero()}


def _apply_diag(vec: dict, a: int, p1: Poly, p2: Poly) -> dict:
    return {s: c * (p1 if s[a - 1] == 1 else p2) for s, c in vec.items()}


def _state(I: IndexSet) -> tuple:
    s = set(I.I1)
    return tuple(1 if x in s else 2 for x in range(1, I.n + 1))


def _index_of_state(s: tuple, k: int, n: int) -> IndexSet:
    return IndexSet(k, n, tuple(i + 1 for i, x in enumerate(s) if x == 1))


def qkz_factors(n: int, a: int):
    """The factors of K_a from left to right: ('R', i, j, shift) or ('D', a)."""
    left = [("R", a, b, True) for b in range(a - 1, 0, -1)]
    right = [("R", a, b, False) for b in range(n, a, -1)]
    return left + [("D", a)] + right


def _r_arg(ring: Ring, i: int, j: int, shifted: bool) -> Poly:
    u = ring.gen(f"z{i}") - ring.gen(f"z{j}")
    return u + ring.gen("kp") if shifted else u


def qkz_operator(n: int, k: int, a: int) -> OperatorMatrix:
    """K_a on the weight space with k copies of v1, built from the R-matrix
    action on basis vectors."""
    if not (1 <= a <= n) or not (0 <= k <= n):
        raise BadRange(f"need 1 <= a <= n and 0 <= k <= n, got n={n}, k={k}, a={a}")
    return _qkz_cached(n, k, a)


@lru_cache(maxsize=None)
def _qkz_cached(n: int, k: int, a: int) -> OperatorMatrix:
    ring = weight_ring(n)
    p1, p2 = ring.gen("p1"), ring.gen("p2")
    basis = enumerate_index_sets(k, n)
    pos = {I.I1: r for r, I in enumerate(basis)}
    factors = qkz_factors(n, a)
    cols = []
    for I in basis:
        vec = {_state(I): ring.one()}
        for f in reversed(factors):
            if f[0] == "D":
                vec = _apply_diag(vec, a, p1, p2)
            else:
                _, i, j, sh = f
                vec = _apply_r(vec, i, j, _r_arg(ring, i, j, sh))
        col = [ring.zero()] * len(basis)
        for s, c in vec.items():
            col[pos[_index_of_state(s, k, n).I1]] = c
        cols.append(col)
    return OperatorMatrix(k, n, Matrix.from_rows(cols).transpose())


# -- full tensor-space construction (cross-check for small n) ------------------


def _kron(A: Matrix, B: Matrix) -> Matrix:
    ra, ca = A.shape
    rb, cb = B.shape
    rows = []
    for i in range(ra):
        for ii in range(rb):
            rows.append(tuple(A[i, j] * B[ii, jj] for j in range(ca) for jj in range(cb)))
    return Matrix(tuple(rows))


def _full_adjacent(M4: Matrix, i: int, n: int, ring: Ring) -> Matrix:
    """M4 acting on tensor factors i, i+1 of (C^2)^{tensor n}."""
    left = Matrix.identity(ring, 2 ** (i - 1))
    right = Matrix.identity(ring, 2 ** (n - i - 1))
    return _kron(_kron(left, M4), right)


def full_r(n: int, i: int, j: int, u: Poly) -> Matrix:
    """R^{(i,j)}(u) on the full 2^n space, via adjacent embeddings and flips."""
    ring = u.ring
    if i == j:
        raise ValueError("i != j required")
    if i > j:
        P = full_permutation(n, i, j, ring)
        return P * full_r(n, j, i, u) * P
    if j == i + 1:
        return _full_adjacent(r_matrix(u), i, n, ring)
    flip = _full_adjacent(r_matrix(ring.zero()), j - 1, n, ring)
    return flip * full_r(n, i, j - 1, u) * flip


def full_permutation(n: int, i: int, j: int, ring: Ring) -> Matrix:
    """The flip of tensor factors i and j."""
    if i > j:
        i, j = j, i
    flip = lambda m: _full_adjacent(r_matrix(ring.zero()), m, n, ring)
    P = flip(i)
    for m in range(i + 1, j):
        P = flip(m) * P * flip(m)
    return P


def full_diag(n: int, a: int, ring: Ring) -> Matrix:
    d = Matrix.from_rows([[ring.gen("p1"), ring.zero()], [ring.zero(), ring.gen("p2")]])
    left = Matrix.identity(ring, 2 ** (a - 1))
    right = Matrix.identity(ring, 2 ** (n - a))
    return _kron(_kron(left, d), right)


def full_qkz(n: int, a: int) -> Matrix:
    ring = weight_ring(n)
    M = Matrix.identity(ring, 2 ** n)
    for f in qkz_factors(n, a):
        if f[0] == "D":
            M = M * full_diag(n, a, ring)
        else:
            _, i, j, sh = f
            M = M * full_r(n, i, j, _r_arg(ring, i, j, sh))
    return M


def full_state_index(s: tuple) -> int:
    """Row of a tensor basis state in the Kronecker order (v1 before v2)."""
    r = 0
    for x in s:
        r = 2 * r + (x - 1)
    return r


def restrict_full(M: Matrix, k: int, n: int) -> tuple[Matrix, bool]:
    """Restrict to the weight block; also report whether the block is invariant."""
    basis = enumerate_index_sets(k, n)
    idx = [full_state_index(_state(I)) for I in basis]
    block = M.submatrix(idx, idx)
    inside = set(idx)
    leak = any(
        not M[r, c].is_zero() for c in idx for r in range(M.size) if r not in inside
    )
    return block, not leak


# -- dynamical operators ------------------------------------------------------


def dynamical_operator(n: int, k: int, i: int) -> OperatorMatrix:
    if i not in (1, 2) or not (0 <= k <= n):
        raise BadRange(f"i must be 1 or 2 and 0 <= k <= n, got i={i}, k={k}")
    return _dyn_cached(n, k, i)


@lru_cache(maxsize=None)
def _dyn_cached(n: int, k: int, i: int) -> OperatorMatrix:
    ring = weight_ring(n)
    z = [ring.gen(f"z{a}") for a in range(1, n + 1)]
    ratio = ring.parse("p1^-1*p2")
    basis = enumerate_index_sets(k, n)
    pos = {I.I1: r for r, I in enumerate(basis)}
    rows = [[ring.zero()] * len(basis) for _ in basis]
    for col, I in enumerate(basis):
        own, other = (I.I1, I.I2) if i == 1 else (I.I2, I.I1)
        diag = ring.zero()
        for a in own:
            diag = diag + z[a - 1]
        rows[col][col] = diag
        sign = 1 if i == 1 else -1
        for a in own:
            for b in other:
                # a in I_i, b in I_j with (j - i)(a - b) = 1 mod n
                if (sign * (a - b)) % n != 1 % n:
                    continue
                wrap = (a < b) if i == 1 else (b < a)
                w = ratio if wrap else ring.one()
                new = set(I.I1)
                if i == 1:
                    new.remove(a)
                    new.add(b)
                else:
                    new.remove(b)
                    new.add(a)
                r = pos[tuple(sorted(new))]
                rows[r][col] = rows[r][col] + w * sign
    return OperatorMatrix(k, n, Matrix.from_rows(rows))


# -- exterior powers and the level-k identification ------------------------------


def satake_theta(k: int, n: int) -> dict:
    """Wedge v_[a1]^...^v_[ak] (a1<...<ak) corresponds to v_I with I1 = {a1..ak}."""
    if not (1 <= k <= n):
        raise BadRange(f"need 1 <= k <= n, got k={k}, n={n}")
    return {tuple(c): IndexSet(k, n, tuple(c)) for c in combinations(range(1, n + 1), k)}


def _sort_sign(seq: Sequence[int]) -> tuple[int, tuple]:
    s = list(seq)
    if len(set(s)) != len(s):
        return 0, ()
    sign = 1
    for i in range(len(s)):
        for j in range(len(s) - 1 - i):
            if s[j] > s[j + 1]:
                s[j], s[j + 1] = s[j + 1], s[j]
                sign = -sign
    return sign, tuple(s)


class BadMode(ValueError):
    pass


def exterior_power_matrix(M: Matrix, k: int, mode: str = "multiplicative") -> Matrix:
    """Matrix of M on the k-th exterior power in the lex basis of k-subsets."""
    n = M.size
    subsets = list(combinations(range(n), k))
    ring = M[0, 0].ring
    if mode == "multiplicative":
        return Matrix.from_rows(
            [[determinant(M.submatrix(A, B)) if k else ring.one() for B in subsets] for A in subsets]
        )
    if mode != "derivation":
        raise BadMode(mode)
    pos = {A: r for r, A in enumerate(subsets)}
    rows = [[ring.zero()] * len(subsets) for _ in subsets]
    for c, B in enumerate(subsets):
        for slot, b in enumerate(B):
            for r in range(n):
                entry = M[r, b]
                if entry.is_zero():
                    continue
                new = list(B)
                new[slot] = r
                sign, A = _sort_sign(new)
                if sign:
                    rows[pos[A]][c] = rows[pos[A]][c] + entry * sign
    return Matrix.from_rows(rows)


def sum_z(ring: Ring, n: int) -> Poly:
    acc = ring.zero()
    for a in range(1, n + 1):
        acc = acc + ring.gen(f"z{a}")
    return acc


def shift_z(M: Matrix, a: int, n: int) -> Matrix:
    """z_a -> z_a + kappa."""
    ring = weight_ring(n)
    return M.subs({f"z{a}": ring.gen(f"z{a}") + ring.gen("kp")})


def sign_p1(M: Matrix, sign: int, n: int) -> Matrix:
    ring = weight_ring(n)
    if sign == 1:
        return M
    return M.subs({"p1": -ring.gen("p1")})


# -- verification reports ---------------------------------------------------------


@dataclass
class Check:
    name: str
    anchor: str
    passed: bool
    detail: str = ""


@dataclass
class IdentityReport:
    title: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, anchor: str, ok: bool, detail: str = ""):
        self.checks.append(Check(name, anchor, bool(ok), detail))

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [
                {"id": c.name, "anchor": c.anchor, "status": "pass" if c.passed else "fail", "detail": c.detail}
                for c in self.checks
            ],
        }


def verify_compatibility(n: int, k: int, pairs: Sequence[tuple[int, int]] | None = None) -> IdentityReport:
    """Flatness of the joint qKZ and dynamical system as exact identities."""
    rep = IdentityReport(f"compatibility ({k},{n})")
    ring = weight_ring(n)
    kp = ring.gen("kp")
    K = {a: qkz_operator(n, k, a).matrix for a in range(1, n + 1)}
    X = {i: dynamical_operator(n, k, i).matrix for i in (1, 2)}
    pname = {1: "p1", 2: "p2"}
    if pairs is None:
        pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    for a, b in pairs:
        lhs = shift_z(K[a], b, n) * K[b]
        rhs = shift_z(K[b], a, n) * K[a]
        rep.add(f"qkz-flat a={a} b={b}", "discrete flatness", lhs == rhs)
    lhs = X[2].map(lambda e: e.euler("p1") * kp) - X[1].map(lambda e: e.euler("p2") * kp)
    rhs = X[1] * X[2] - X[2] * X[1]
    rep.add("dyn-flat i=1 j=2", "dynamical flatness", lhs == rhs)
    a_list = sorted({a for pr in pairs for a in pr}) if pairs else range(1, n + 1)
    for a in a_list:
        for i in (1, 2):
            lhs = K[a].map(lambda e: e.euler(pname[i]) * kp)
            rhs = shift_z(X[i], a, n) * K[a] - K[a] * X[i]
            rep.add(f"mixed a={a} i={i}", "qKZ/dynamical compatibility", lhs == rhs)
    return rep


def satake_qkz_side(n: int, k: int, a: int) -> Matrix:
    """wedge^k K_a with p1 -> (-1)^{k-1} p1, computed from the (1,n) operator."""
    K1 = qkz_operator(n, 1, a).matrix
    return exterior_power_matrix(sign_p1(K1, (-1) ** (k - 1), n), k, "multiplicative")


def verify_satake_gauge(n: int, k: int) -> IdentityReport:
    rep = IdentityReport(f"satake gauge ({k},{n})")
    ring = weight_ring(n)
    p2 = ring.gen("p2")
    sz = sum_z(ring, n)
    # theta is the identity between lex k-subsets and lex index sets
    theta = satake_theta(k, n)
    assert [I.I1 for I in theta.values()] == [I.I1 for I in enumerate_index_sets(k, n)]
    for a in range(1, n + 1):
        lhs = satake_qkz_side(n, k, a)
        rhs = qkz_operator(n, k, a).matrix * (p2 ** (k - 1))
        rep.add(f"qkz a={a}", "exterior power of K_a", lhs == rhs)
    X1 = sign_p1(dynamical_operator(n, 1, 1).matrix, (-1) ** (k - 1), n)
    X2 = sign_p1(dynamical_operator(n, 1, 2).matrix, (-1) ** (k - 1), n)
    Y1 = dynamical_operator(n, k, 1).matrix
    Y2 = dynamical_operator(n, k, 2).matrix
    d1 = exterior_power_matrix(X1, k, "derivation")
    d2 = exterior_power_matrix(X2, k, "derivation")
    rep.add("dyn i=1", "derivation extension of X_1", d1 == Y1)
    shift = Matrix.scalar(sz * (k - 1), Y2.size)
    rep.add("dyn i=2", "derivation extension of X_2", d2 == Y2 + shift)
    return rep

"""Exact arithmetic: sparse Laurent polynomials, rational functions with
linear-form denominators, matrices and determinants."""
from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from functools import reduce as _fold
from typing import Iterable, Mapping, Sequence

import numpy as np
from gmpy2 import mpq, mpz


class AlgebraError(Exception):
    pass


class DivisionNotExact(AlgebraError):
    pass


class RingMismatch(AlgebraError):
    pass


class ParseError(AlgebraError):
    pass


class NonSquare(AlgebraError):
    pass


def scalar(c) -> mpq:
    """Coerce ints, strings like '3/2' and mpq values to an exact rational."""
    if isinstance(c, str):
        return mpq(c)
    return mpq(c)


def scalar_text(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# Rings


class Ring:
    """Ordered list of variable names, each flagged Laurent or polynomial.

    Rings are interned, so two rings with the same data are the same object.
    """

    _cache: dict = {}

    def __new__(cls, names: Sequence[str], laurent: Sequence[bool] | bool = False):
        names = tuple(names)
        if isinstance(laurent, bool):
            laurent = (laurent,) * len(names)
        laurent = tuple(bool(x) for x in laurent)
        if len(laurent) != len(names):
            raise ValueError("one Laurent flag per variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        key = (names, laurent)
        ring = cls._cache.get(key)
        if ring is None:
            ring = super().__new__(cls)
            ring.names = names
            ring.laurent = laurent
            ring.nvars = len(names)
            ring._pos = {v: i for i, v in enumerate(names)}
            ring._zero = (0,) * len(names)
            cls._cache[key] = ring
        return ring

    def __reduce__(self):
        return (Ring, (self.names, self.laurent))

    def __repr__(self):
        flags = "".join("L" if f else "P" for f in self.laurent)
        return f"Ring({','.join(self.names)}|{flags})"

    def index(self, name: str) -> int:
        try:
            return self._pos[name]
        except KeyError:
            raise RingMismatch(f"variable {name!r} not in {self!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._pos

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {self._zero: mpq(1)})

    def const(self, c) -> "Poly":
        c = scalar(c)
        return Poly(self, {self._zero: c} if c else {})

    def gen(self, name: str) -> "Poly":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): mpq(1)})

    def gens(self, *names: str) -> list["Poly"]:
        return [self.gen(v) for v in names]

    def monomial(self, exps: Mapping[str, int], coeff=1) -> "Poly":
        e = [0] * self.nvars
        for v, k in exps.items():
            e[self.index(v)] = k
        return Poly(self, {tuple(e): scalar(coeff)}, check=True)

    def __call__(self, value) -> "Poly":
        """Coerce a scalar, string or polynomial from another ring."""
        if isinstance(value, Poly):
            return self.embed(value)
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    def embed(self, p: "Poly") -> "Poly":
        if p.ring is self:
            return p
        idx = [self.index(v) for v in p.ring.names]
        terms = {}
        for e, c in p.terms.items():
            ne = [0] * self.nvars
            for j, k in zip(idx, e):
                ne[j] = k
            terms[tuple(ne)] = c
        return Poly(self, terms, check=True)

    def extend(self, names: Sequence[str], laurent: bool = False) -> "Ring":
        extra = [v for v in names if v not in self._pos]
        return Ring(self.names + tuple(extra), self.laurent + (laurent,) * len(extra))

    def parse(self, text: str) -> "Poly":
        return _Parser(self, text).parse()


# ---------------------------------------------------------------------------
# Laurent polynomials


def _gl_key(e):
    return (sum(e), e)


class Poly:
    """Sparse multivariate Laurent polynomial with exact rational coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict, check: bool = False):
        self.ring = ring
        self.terms = terms
        self._hash = None
        if check:
            for e in terms:
                for k, flag, v in zip(e, ring.laurent, ring.names):
                    if k < 0 and not flag:
                        raise AlgebraError(f"negative exponent of polynomial variable {v}")
            for e in [e for e, c in terms.items() if not c]:
                del terms[e]

    # -- basic predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring._zero in self.terms)

    def constant(self) -> mpq:
        return self.terms.get(self.ring._zero, mpq(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            for v, k in zip(self.ring.names, e):
                if k:
                    used.add(v)
        return used

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def min_degree(self, name: str) -> int:
        i = self.ring.index(name)
        return min((e[i] for e in self.terms), default=0)

    # -- coercion -----------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is not self.ring:
                raise RingMismatch(f"{self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, (int, mpz, mpq)):
            return self.ring.const(other)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for e, c in small.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = -c
            else:
                v = v - c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly(self.ring, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, mpz, mpq)):
            c0 = mpq(other)
            if not c0:
                return Poly(self.ring, {})
            return Poly(self.ring, {e: c * c0 for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            ((eb, cb),) = b.items()
            return Poly(self.ring, {tuple(x + y for x, y in zip(ea, eb)): ca * cb for ea, ca in a.items()})
        if len(a) * len(b) > 256:
            return Poly(self.ring, _packed_mul(a, b, self.ring.nvars))
        return Poly(self.ring, _plain_mul(a, b))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise AlgebraError("negative power of a non-monomial")
            ((e, c),) = self.terms.items()
            return Poly(self.ring, {tuple(-x * -k for x in e): (1 / c) ** (-k)}, check=True)
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, mpz, mpq)):
            return self * (1 / mpq(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.exact_div(other)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring is other.ring and self.terms == other.terms
        if isinstance(other, (int, mpz, mpq)):
            return self.terms == ({self.ring._zero: mpq(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.names, frozenset(self.terms.items())))
        return self._hash

    # -- structure ----------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _gl_key(t[0]), reverse=True)

    def leading_term(self):
        e = max(self.terms, key=_gl_key)
        return e, self.terms[e]

    def content_monomial(self) -> tuple:
        """Per-variable minimum exponent."""
        if not self.terms:
            return self.ring._zero
        return tuple(min(col) for col in zip(*self.terms))

    def shift(self, e: Sequence[int]) -> "Poly":
        """Multiply by the monomial with exponent vector e (no Laurent check)."""
        return Poly(self.ring, {tuple(x + y for x, y in zip(k, e)): c for k, c in self.terms.items()})

    def coeff_in(self, name: str) -> dict[int, "Poly"]:
        """Split as sum over powers of one variable."""
        i = self.ring.index(name)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            ne = e[:i] + (0,) + e[i + 1:]
            out.setdefault(e[i], {})[ne] = c
        return {k: Poly(self.ring, t) for k, t in out.items()}

    def integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    # -- transformations ----------------------------------------------------
    def euler(self, name: str) -> "Poly":
        """The operator name*d/d(name): scale each term by its exponent."""
        i = self.ring.index(name)
        return Poly(self.ring, {e: c * e[i] for e, c in self.terms.items() if e[i]})

    def diff(self, name: str) -> "Poly":
        i = self.ring.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly(self.ring, out, check=True)

    def star(self, names: Iterable[str] | None = None) -> "Poly":
        """Invert the listed variables (all by default)."""
        if names is None:
            return Poly(self.ring, {tuple(-x for x in e): c for e, c in self.terms.items()}, check=True)
        idx = {self.ring.index(v) for v in names}
        return Poly(
            self.ring,
            {tuple(-x if i in idx else x for i, x in enumerate(e)): c for e, c in self.terms.items()},
            check=True,
        )

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        """Permute variables by name inside the same ring."""
        ring = self.ring
        perm = [ring.index(mapping.get(v, v)) for v in ring.names]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for j, k in zip(perm, e):
                ne[j] += k
            out[tuple(ne)] = c
        return Poly(ring, out, check=True)

    def subs(self, mapping: Mapping[str, "Poly"], target: Ring | None = None) -> "Poly":
        """Substitute polynomials for variables; result lives in target."""
        target = target or self.ring
        src = self.ring
        images = []
        for v in src.names:
            if v in mapping:
                img = mapping[v]
                if not isinstance(img, Poly):
                    img = target.const(img)
                images.append(target.embed(img))
            else:
                images.append(target.gen(v))
        # exponent-wise power cache
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            p = cache.get(key)
            if p is None:
                p = images[i] ** k
                cache[key] = p
            return p

        acc: dict = {}
        for e, c in self.terms.items():
            term = None
            fixed = [0] * target.nvars
            for i, k in enumerate(e):
                if not k:
                    continue
                img = images[i]
                if img.is_monomial() and img.terms.get(next(iter(img.terms))) == 1:
                    ie = next(iter(img.terms))
                    for j, x in enumerate(ie):
                        fixed[j] += x * k
                    continue
                p = power(i, k)
                term = p if term is None else term * p
            if term is None:
                term = target.one()
            term = term.shift(fixed) if any(fixed) else term
            for te, tc in term.terms.items():
                v = acc.get(te)
                acc[te] = tc * c if v is None else v + tc * c
        return Poly(target, {e: c for e, c in acc.items() if c}, check=True)

    def evaluate(self, values: Mapping[str, object]):
        """Numeric or exact evaluation; every used variable must be assigned."""
        ring = self.ring
        vals = [values.get(v) for v in ring.names]
        total = 0
        exact = all(isinstance(v, (int, mpz, mpq)) or v is None for v in vals)
        for e, c in self.terms.items():
            t = c if exact else complex(float(c))
            for i, k in enumerate(e):
                if k:
                    x = vals[i]
                    if x is None:
                        raise AlgebraError(f"no value for {ring.names[i]}")
                    t = t * (x ** k if k > 0 else (1 / x) ** (-k))
            total = total + t
        return mpq(total) if exact else total

    # -- division -----------------------------------------------------------
    def exact_div(self, other: "Poly") -> "Poly":
        q = self.divide_or_none(other)
        if q is None:
            raise DivisionNotExact(f"({self.text()}) / ({other.text()})")
        return q

    def divide_or_none(self, other: "Poly") -> "Poly | None":
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if not self.terms:
            return self
        if len(other.terms) == 1:
            ((e, c),) = other.terms.items()
            neg = tuple(-x for x in e)
            out = {}
            for k, v in self.terms.items():
                ne = tuple(x + y for x, y in zip(k, neg))
                out[ne] = v / c
            for ne in out:
                for k, flag in zip(ne, self.ring.laurent):
                    if k < 0 and not flag:
                        return None
            return Poly(self.ring, out)
        sa = self.content_monomial()
        sb = other.content_monomial()
        a = self.shift([-x for x in sa])
        b = other.shift([-x for x in sb])
        q = _poly_div(a.terms, b.terms)
        if q is None:
            return None
        res = Poly(self.ring, q).shift([x - y for x, y in zip(sa, sb)])
        for e in res.terms:
            for k, flag in zip(e, self.ring.laurent):
                if k < 0 and not flag:
                    return None
        return res

    # -- text ---------------------------------------------------------------
    def text(self) -> str:
        return poly_canonical_text(self)

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"Poly({self.text()!r})"


_I64 = 2 ** 62


def _packed_mul(a: dict, b: dict, nv: int) -> dict:
    """Product with exponent vectors packed into single integers (Kronecker substitution).

    Integer coefficients that provably fit in int64 take a vectorized path.
    """
    ea = np.array(list(a.keys()), dtype=np.int64).reshape(len(a), nv)
    eb = np.array(list(b.keys()), dtype=np.int64).reshape(len(b), nv)
    lo_a, lo_b = ea.min(axis=0), eb.min(axis=0)
    span = (ea.max(axis=0) - lo_a) + (eb.max(axis=0) - lo_b) + 1
    keyspace = 1
    for x in span.tolist():
        keyspace *= x
    ca, cb = list(a.values()), list(b.values())
    fast = keyspace < _I64 and all(c.denominator == 1 for c in ca) and all(c.denominator == 1 for c in cb)
    if fast:
        ma = max(abs(int(c)) for c in ca)
        mb = max(abs(int(c)) for c in cb)
        fast = ma * mb * min(len(ca), len(cb)) < _I64
    if not fast:
        return _plain_mul(a, b)
    radix = np.cumprod(np.concatenate(([1], span[:-1]))).astype(np.int64)
    ka = (ea - lo_a) @ radix
    kb = (eb - lo_b) @ radix
    va = np.array([int(c) for c in ca], dtype=np.int64)
    vb = np.array([int(c) for c in cb], dtype=np.int64)
    keys = np.add.outer(ka, kb).ravel()
    vals = np.multiply.outer(va, vb).ravel()
    uniq, inv = np.unique(keys, return_inverse=True)
    sums = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(sums, inv, vals)
    nz = sums != 0
    uniq, sums = uniq[nz], sums[nz]
    lo = lo_a + lo_b
    exps = np.empty((len(uniq), nv), dtype=np.int64)
    rest = uniq.copy()
    for i in range(nv):
        rest, exps[:, i] = np.divmod(rest, span[i])
    exps += lo
    return {tuple(e): mpq(int(v)) for e, v in zip(exps.tolist(), sums.tolist())}


def _plain_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    get = out.get
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = get(e)
            out[e] = ca * cb if v is None else v + ca * cb
    return {e: c for e, c in out.items() if c}


def _poly_div(a: dict, b: dict) -> dict | None:
    """Exact division of polynomials with nonnegative exponents; None if not exact."""
    lt = max(b)
    lc = b[lt]
    rest = [(e, c) for e, c in b.items() if e != lt]
    rem = dict(a)
    heap = [tuple(-x for x in e) for e in rem]
    heapq.heapify(heap)
    q = {}
    while heap:
        ne = heapq.heappop(heap)
        e = tuple(-x for x in ne)
        c = rem.pop(e, None)
        if c is None:
            continue
        d = tuple(x - y for x, y in zip(e, lt))
        if any(x < 0 for x in d):
            return None
        qc = c / lc
        q[d] = qc
        for be, bc in rest:
            ee = tuple(x + y for x, y in zip(d, be))
            old = rem.get(ee)
            if old is None:
                rem[ee] = -qc * bc
                heapq.heappush(heap, tuple(-x for x in ee))
            else:
                nv = old - qc * bc
                if nv:
                    rem[ee] = nv
                else:
                    del rem[ee]
    return q


def poly_canonical_text(p: Poly) -> str:
    if not p.terms:
        return "0"
    names = p.ring.names
    out = []
    for idx, (e, c) in enumerate(p.sorted_terms()):
        mono = "*".join(
            v if k == 1 else f"{v}^{k}" for v, k in zip(names, e) if k
        )
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = scalar_text(a)
        elif a == 1:
            body = mono
        else:
            body = f"{scalar_text(a)}*{mono}"
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class _Parser:
    def __init__(self, ring: Ring, text: str):
        self.ring = ring
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                break
            pos = m.end()
            num, ident, op = m.groups()
            if num is not None:
                self.tokens.append(("num", int(num)))
            elif ident is not None:
                self.tokens.append(("id", ident))
            elif op is not None and not op.isspace():
                if op not in "+-*/^()":
                    raise ParseError(f"unexpected character {op!r}")
                self.tokens.append(("op", op))
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Poly:
        if not self.tokens:
            raise ParseError("empty input")
        p = self.expr()
        if self.i != len(self.tokens):
            raise ParseError(f"trailing input at token {self.tokens[self.i][1]!r}")
        return p

    def expr(self) -> Poly:
        sign = 1
        tok = self.peek()
        if tok == ("op", "-"):
            self.i += 1
            sign = -1
        elif tok == ("op", "+"):
            self.i += 1
        acc = self.term() * sign
        while True:
            tok = self.peek()
            if tok == ("op", "+"):
                self.i += 1
                acc = acc + self.term()
            elif tok == ("op", "-"):
                self.i += 1
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> Poly:
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.i += 1
                acc = acc * self.factor()
            elif tok == ("op", "/"):
                self.i += 1
                d = self.factor()
                if d.is_constant():
                    acc = acc * (1 / d.constant())
                else:
                    acc = acc.exact_div(d)
            else:
                return acc

    def factor(self) -> Poly:
        base = self.primary()
        if self.peek() == ("op", "^"):
            self.i += 1
            sign = 1
            if self.peek() == ("op", "-"):
                self.i += 1
                sign = -1
            _, k = self.take("num")
            return base ** (sign * k)
        return base

    def primary(self) -> Poly:
        kind, val = self.peek()
        if kind == "num":
            self.i += 1
            return self.ring.const(val)
        if kind == "id":
            self.i += 1
            return self.ring.gen(val)
        if (kind, val) == ("op", "("):
            self.i += 1
            p = self.expr()
            self.take("op", ")")
            return p
        if (kind, val) == ("op", "-"):
            self.i += 1
            return -self.primary()
        raise ParseError(f"unexpected token {val!r}")


def parse_poly(ring: Ring, text: str) -> Poly:
    return ring.parse(text)


# ---------------------------------------------------------------------------
# Rational functions with linear-form denominators


def normalize_linear_form(f: Poly) -> tuple[mpq, Poly]:
    """Write f = u * g with g primitive integral, leading coefficient positive."""
    if f.total_degree() != 1 or any(sum(e) < 0 for e in f.terms) or any(
        x < 0 for e in f.terms for x in e
    ):
        raise AlgebraError(f"not a linear form: {f.text()}")
    coeffs = list(f.terms.values())
    den = _fold(lambda x, y: x * y // _gcd(x, y), [int(c.denominator) for c in coeffs], 1)
    ints = [int(c * den) for c in coeffs]
    g = _fold(_gcd, ints, 0)
    scale = mpq(g, den)
    _, lc = f.leading_term()
    if lc < 0:
        scale = -scale
    return scale, f * (1 / scale)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


class Rational:
    """Quotient of a Laurent polynomial by a product of linear forms."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: dict | None = None, _raw: bool = False):
        self.num = num
        self.den = den or {}
        if not _raw and self.den:
            self._normalize()

    @property
    def ring(self):
        return self.num.ring

    @classmethod
    def of(cls, num: Poly, *forms: Poly) -> "Rational":
        r = cls(num)
        for f in forms:
            r = r.div_form(f)
        return r

    def _normalize(self):
        den = {}
        num = self.num
        for f, m in self.den.items():
            u, g = normalize_linear_form(f)
            num = num * (1 / (u ** m))
            den[g] = den.get(g, 0) + m
        self.num = num
        self.den = den

    def div_form(self, f: Poly, mult: int = 1) -> "Rational":
        if f.is_monomial() and _laurent_ok(f):
            return Rational(self.num * (f ** -mult), dict(self.den), _raw=True)
        u, g = normalize_linear_form(f)
        den = dict(self.den)
        den[g] = den.get(g, 0) + mult
        return Rational(self.num * (1 / (u ** mult)), den, _raw=True)

    def reduce(self) -> "Rational":
        if not self.num.terms:
            return Rational(self.num, {}, _raw=True)
        num = self.num
        den = {}
        for g, m in self.den.items():
            while m:
                q = num.divide_or_none(g)
                if q is None:
                    break
                num = q
                m -= 1
            if m:
                den[g] = m
        return Rational(num, den, _raw=True)

    def is_polynomial(self) -> bool:
        return not self.reduce().den

    def to_poly(self) -> Poly:
        r = self.reduce()
        if r.den:
            raise DivisionNotExact(f"not a polynomial: {r}")
        return r.num

    def denominator(self) -> Poly:
        d = self.ring.one()
        for g, m in self.den.items():
            d = d * g ** m
        return d

    def _coerce(self, other) -> "Rational":
        if isinstance(other, Rational):
            if other.ring is not self.ring:
                raise RingMismatch(f"{self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, Poly):
            return Rational(self.ring.embed(other) if other.ring is not self.ring else other)
        return Rational(self.ring.const(other))

    def __add__(self, other):
        return rational_sum([self, self._coerce(other)])

    __radd__ = __add__

    def __neg__(self):
        return Rational(-self.num, dict(self.den), _raw=True)

    def __sub__(self, other):
        return rational_sum([self, -self._coerce(other)])

    def __rsub__(self, other):
        return rational_sum([-self, self._coerce(other)])

    def __mul__(self, other):
        o = self._coerce(other)
        den = dict(self.den)
        for g, m in o.den.items():
            den[g] = den.get(g, 0) + m
        return Rational(self.num * o.num, den, _raw=True).reduce()

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o.num.terms:
            raise ZeroDivisionError
        num = self.num
        for g, m in o.den.items():
            num = num * g ** m
        r = Rational(num, dict(self.den), _raw=True)
        d = o.num
        if d.is_monomial():
            return Rational(r.num * (d ** -1), r.den, _raw=True).reduce() if _laurent_ok(d) else r.div_form(d).reduce()
        if d.total_degree() == 1 and all(x >= 0 for e in d.terms for x in e):
            return r.div_form(d).reduce()
        q = r.num.divide_or_none(d)
        if q is not None:
            return Rational(q, r.den, _raw=True).reduce()
        raise AlgebraError(f"cannot divide by non-linear {d.text()}")

    def __eq__(self, other):
        if not isinstance(other, (Rational, Poly, int, mpq, mpz)):
            return NotImplemented
        diff = self - self._coerce(other)
        return not diff.num.terms

    def __hash__(self):
        r = self.reduce()
        return hash((r.num, frozenset(r.den.items())))

    def is_zero(self):
        return not self.num.terms

    def subs(self, mapping, target=None) -> "Rational":
        target = target or self.ring
        num = self.num.subs(mapping, target)
        out = Rational(num)
        for g, m in self.den.items():
            gi = g.subs(mapping, target)
            if not gi.terms:
                raise ZeroDivisionError(f"denominator {g.text()} vanishes")
            if gi.is_constant():
                out = Rational(out.num * (1 / gi.constant() ** m), out.den, _raw=True)
            else:
                out = out.div_form(gi, m)
        return out.reduce()

    def evaluate(self, values):
        v = self.num.evaluate(values)
        for g, m in self.den.items():
            v = v / g.evaluate(values) ** m
        return v

    def text(self) -> str:
        r = self.reduce()
        if not r.den:
            return r.num.text()
        dens = sorted(r.den.items(), key=lambda t: t[0].text())
        dtxt = "*".join(f"({g.text()})" + (f"^{m}" if m > 1 else "") for g, m in dens)
        return f"({r.num.text()})/({dtxt})"

    __str__ = text

    def __repr__(self):
        return f"Rational({self.text()!r})"


def _laurent_ok(mono: Poly) -> bool:
    ((e, _),) = mono.terms.items()
    return all(flag or k == 0 for k, flag in zip(e, mono.ring.laurent))


def rational_sum(items: Iterable[Rational]) -> Rational:
    """Sum over a common denominator, then cancel."""
    items = list(items)
    if not items:
        raise ValueError("empty sum")
    ring = items[0].ring
    lcm: dict = {}
    for r in items:
        for g, m in r.den.items():
            if lcm.get(g, 0) < m:
                lcm[g] = m
    total = ring.zero()
    for r in items:
        num = r.num
        for g, m in lcm.items():
            extra = m - r.den.get(g, 0)
            if extra:
                num = num * g ** extra
        total = total + num
    return Rational(total, lcm, _raw=True).reduce()


def rational_reduce(r: Rational) -> Rational:
    return r.reduce()


# ---------------------------------------------------------------------------
# Matrices


@dataclass(frozen=True)
class Matrix:
    """Dense matrix with entries in one ring (Poly or Rational entries)."""

    rows: tuple

    @classmethod
    def from_rows(cls, rows) -> "Matrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        one, zero = ring.one(), ring.zero()
        return cls(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, ring: Ring, n: int, m: int | None = None) -> "Matrix":
        zero = ring.zero()
        return cls(tuple(tuple(zero for _ in range(m if m is not None else n)) for _ in range(n)))

    @classmethod
    def scalar(cls, value: Poly, n: int) -> "Matrix":
        zero = value.ring.zero()
        return cls(tuple(tuple(value if i == j else zero for j in range(n)) for i in range(n)))

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @property
    def size(self):
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def map(self, fn) -> "Matrix":
        return Matrix(tuple(tuple(fn(x) for x in r) for r in self.rows))

    def transpose(self) -> "Matrix":
        return Matrix(tuple(zip(*self.rows)))

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self):
        return self.map(lambda x: -x)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            cols = list(zip(*other.rows))
            out = []
            for r in self.rows:
                row = []
                for c in cols:
                    acc = None
                    for a, b in zip(r, c):
                        if a.is_zero() or b.is_zero():
                            continue
                        t = a * b
                        acc = t if acc is None else acc + t
                    row.append(acc if acc is not None else _zero_like(r[0]))
                out.append(tuple(row))
            return Matrix(tuple(out))
        return self.map(lambda x: x * other)

    def __rmul__(self, other):
        return self.map(lambda x: other * x)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s)
        )

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def subs(self, mapping, target=None) -> "Matrix":
        return self.map(lambda x: x.subs(mapping, target))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(tuple(tuple(self.rows[i][j] for j in cols) for i in rows))

    def text_rows(self) -> list[list[str]]:
        return [[x.text() for x in r] for r in self.rows]

    def trace(self):
        acc = _zero_like(self.rows[0][0])
        for i in range(self.size):
            acc = acc + self.rows[i][i]
        return acc

    def is_upper_unitriangular(self) -> bool:
        n = self.size
        return all(
            (self.rows[i][j] == 1) if i == j else (i < j or self.rows[i][j].is_zero())
            for i in range(n)
            for j in range(n)
        )

    def __repr__(self):
        return "Matrix(" + repr(self.text_rows()) + ")"


def _zero_like(x):
    if isinstance(x, Poly):
        return x.ring.zero()
    if isinstance(x, Rational):
        return Rational(x.ring.zero())
    return 0


def determinant(M) -> Poly | Rational:
    """Exact determinant: memoized Laplace expansion up to 8x8, Bareiss above."""
    rows = M.rows if isinstance(M, Matrix) else tuple(tuple(r) for r in M)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NonSquare(f"{n} rows with lengths {[len(r) for r in rows]}")
    if n == 0:
        raise NonSquare("empty matrix")
    if any(isinstance(x, Rational) for r in rows for x in r):
        return _det_rational(rows)
    if n <= 8:
        return _det_laplace(rows)
    return _det_bareiss(rows)


def _det_laplace(rows):
    """Expansion along the first row, memoized on the set of remaining columns."""
    n = len(rows)
    memo: dict = {}

    def det(r: int, cols: tuple):
        if r == n - 1:
            return rows[r][cols[0]]
        got = memo.get(cols)
        if got is not None:
            return got
        acc = None
        for pos, c in enumerate(cols):
            a = rows[r][c]
            if a.is_zero():
                continue
            sub = det(r + 1, cols[:pos] + cols[pos + 1:])
            if sub.is_zero():
                continue
            t = a * sub
            if pos % 2:
                t = -t
            acc = t if acc is None else acc + t
        out = acc if acc is not None else _zero_like(rows[0][0])
        memo[cols] = out
        return out

    return det(0, tuple(range(n)))


def _det_bareiss(rows):
    a = [list(r) for r in rows]
    n = len(a)
    ring = a[0][0].ring
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return ring.zero()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = v.exact_div(prev) if not prev == 1 else v
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return d if sign == 1 else -d


def _det_rational(rows):
    scaled = []
    dens = []
    for r in rows:
        rr = [x if isinstance(x, Rational) else Rational(x) for x in r]
        lcm: dict = {}
        for x in rr:
            for g, m in x.den.items():
                lcm[g] = max(lcm.get(g, 0), m)
        new = []
        for x in rr:
            num = x.num
            for g, m in lcm.items():
                extra = m - x.den.get(g, 0)
                if extra:
                    num = num * g ** extra
            new.append(num)
        scaled.append(tuple(new))
        dens.append(lcm)
    d = determinant(Matrix(tuple(scaled)))
    total: dict = {}
    for lcm in dens:
        for g, m in lcm.items():
            total[g] = total.get(g, 0) + m
    return Rational(d, total, _raw=True).reduce()


def minor(M: Matrix, rows: Sequence[int], cols: Sequence[int]):
    return determinant(M.submatrix(rows, cols))


def charpoly(M: Matrix, var: Poly) -> Poly:
    """Characteristic polynomial det(t - M) by Faddeev-LeVerrier (division by integers only)."""
    n = M.size
    ring = var.ring
    ident = Matrix.identity(ring, n)
    coeffs = [ring.one()]
    Mk = ident
    for k in range(1, n + 1):
        AM = M * Mk
        ck = AM.trace() * mpq(-1, k)
        coeffs.append(ck)
        Mk = AM + ident * ck
    out = ring.zero()
    for k, c in enumerate(coeffs):
        out = out + c * var ** (n - k)
    return out


def unitriangular_inverse(M: Matrix) -> Matrix:
    """Inverse of an upper unitriangular matrix by back substitution."""
    n = M.size
    ring = M.rows[0][0].ring
    inv = [[ring.zero()] * n for _ in range(n)]
    for j in range(n):
        inv[j][j] = ring.one()
        for i in range(j - 1, -1, -1):
            acc = ring.zero()
            for m in range(i + 1, j + 1):
                if not M.rows[i][m].is_zero() and not inv[m][j].is_zero():
                    acc = acc + M.rows[i][m] * inv[m][j]
            inv[i][j] = -acc
    return Matrix(tuple(tuple(r) for r in inv))

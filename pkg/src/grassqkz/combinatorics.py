"""Index sets, Grassmannian permutations and Young diagrams."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Sequence


class BadRange(ValueError):
    pass


class InconsistentShape(ValueError):
    pass


@dataclass(frozen=True, order=True)
class IndexSet:
    """A k-subset I1 of {1..n}; I2 is its complement."""

    k: int
    n: int
    I1: tuple

    def __post_init__(self):
        if len(self.I1) != self.k or tuple(sorted(set(self.I1))) != tuple(self.I1):
            raise InconsistentShape(f"I1={self.I1} is not a sorted {self.k}-set")
        if self.I1 and (self.I1[0] < 1 or self.I1[-1] > self.n):
            raise InconsistentShape(f"I1={self.I1} outside 1..{self.n}")

    @property
    def I2(self) -> tuple:
        s = set(self.I1)
        return tuple(a for a in range(1, self.n + 1) if a not in s)

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "I1": list(self.I1)}

    @classmethod
    def from_json(cls, d: dict) -> "IndexSet":
        return cls(d["k"], d["n"], tuple(d["I1"]))

    def __str__(self):
        return "{" + ",".join(map(str, self.I1)) + "}"


@dataclass(frozen=True)
class GrassPerm:
    """Permutation of 1..n increasing on the first k and on the last n-k slots."""

    k: int
    values: tuple

    def __post_init__(self):
        n = len(self.values)
        if sorted(self.values) != list(range(1, n + 1)):
            raise InconsistentShape(f"{self.values} is not a permutation")
        v, k = self.values, self.k
        if any(v[i] > v[i + 1] for i in range(k - 1)) or any(
            v[i] > v[i + 1] for i in range(k, n - 1)
        ):
            raise InconsistentShape(f"{self.values} has a descent away from {k}")

    @property
    def n(self):
        return len(self.values)


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing parts; stored without trailing zeros."""

    parts: tuple

    def __post_init__(self):
        p = tuple(self.parts)
        if any(x < 0 for x in p) or any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise InconsistentShape(f"{p} is not a partition")
        while p and p[-1] == 0:
            p = p[:-1]
        object.__setattr__(self, "parts", p)

    def padded(self, k: int) -> tuple:
        if len(self.parts) > k:
            raise InconsistentShape(f"{self.parts} has more than {k} rows")
        return self.parts + (0,) * (k - len(self.parts))

    @property
    def size(self) -> int:
        return sum(self.parts)

    def fits(self, k: int, n: int) -> bool:
        return len(self.parts) <= k and (not self.parts or self.parts[0] <= n - k)

    def complement(self, k: int, n: int) -> "Partition":
        """The dual diagram inside the k x (n-k) box."""
        lam = self.padded(k)
        return Partition(tuple(n - k - lam[k - 1 - i] for i in range(k)))

    def contains(self, other: "Partition") -> bool:
        k = max(len(self.parts), len(other.parts))
        return all(a >= b for a, b in zip(self.padded(k), other.padded(k)))


def enumerate_index_sets(k: int, n: int) -> list[IndexSet]:
    """All k-subsets in lexicographic order of the basis vectors v_I."""
    if not (0 <= k <= n <= 12):
        raise BadRange(f"need 0 <= k <= n <= 12, got k={k}, n={n}")
    return [IndexSet(k, n, c) for c in combinations(range(1, n + 1), k)]


def all_partitions(k: int, n: int) -> list[Partition]:
    """Partitions inside k x (n-k), in the order of their index sets."""
    return [to_partition(I) for I in enumerate_index_sets(k, n)]


# -- conversions --------------------------------------------------------------


def perm_of_index_set(I: IndexSet) -> GrassPerm:
    return GrassPerm(I.k, I.I1 + I.I2)


def index_set_of_perm(s: GrassPerm) -> IndexSet:
    return IndexSet(s.k, s.n, tuple(s.values[: s.k]))


def partition_of_perm(s: GrassPerm) -> Partition:
    k = s.k
    return Partition(tuple(s.values[k - j] - k + j - 1 for j in range(1, k + 1)))


def perm_of_partition(lam: Partition, k: int, n: int) -> GrassPerm:
    if not lam.fits(k, n):
        raise InconsistentShape(f"{lam.parts} does not fit in {k}x{n - k}")
    p = lam.padded(k)
    first = [p[k - j] + j for j in range(1, k + 1)]
    rest = [a for a in range(1, n + 1) if a not in set(first)]
    return GrassPerm(k, tuple(first + rest))


def perm_of_partition_walk(lam: Partition, k: int, n: int) -> GrassPerm:
    """Lattice-path rule: walk from the SW to the NE corner of the k x (n-k) box
    along the boundary of the diagram; the up-steps are the first k values."""
    p = lam.padded(k)
    x = 0
    step = 0
    ups = []
    for r in range(k, 0, -1):
        while x < p[r - 1]:
            x += 1
            step += 1
        step += 1
        ups.append(step)
    rest = [a for a in range(1, n + 1) if a not in set(ups)]
    return GrassPerm(k, tuple(ups + rest))


def to_partition(label, k: int | None = None, n: int | None = None) -> Partition:
    if isinstance(label, Partition):
        return label
    if isinstance(label, IndexSet):
        label = perm_of_index_set(label)
    return partition_of_perm(label)


def to_perm(label, k: int | None = None, n: int | None = None) -> GrassPerm:
    if isinstance(label, GrassPerm):
        return label
    if isinstance(label, IndexSet):
        return perm_of_index_set(label)
    if k is None or n is None:
        raise InconsistentShape("a partition needs (k, n) to become a permutation")
    return perm_of_partition(label, k, n)


def to_index_set(label, k: int | None = None, n: int | None = None) -> IndexSet:
    if isinstance(label, IndexSet):
        return label
    return index_set_of_perm(to_perm(label, k, n))


def convert(label, target: str, k: int | None = None, n: int | None = None):
    """Convert between 'index_set', 'perm' and 'partition' labels."""
    if isinstance(label, (IndexSet, GrassPerm)):
        k0, n0 = label.k, label.n
        if (k is not None and k != k0) or (n is not None and n != n0):
            raise InconsistentShape(f"label is for ({k0},{n0}), asked ({k},{n})")
        k, n = k0, n0
    fn = {"index_set": to_index_set, "perm": to_perm, "partition": to_partition}.get(target)
    if fn is None:
        raise ValueError(f"unknown target {target!r}")
    return fn(label, k, n)


def index_set_of_partition(lam: Partition, k: int, n: int) -> IndexSet:
    return to_index_set(lam, k, n)


# -- permutations of variables -----------------------------------------------


def longest_perm(n: int) -> tuple:
    return tuple(range(n, 0, -1))


def permute_tuple(sigma: Sequence[int], items: Sequence):
    """(x_{sigma(1)}, ..., x_{sigma(n)}) for a 1-based permutation sigma."""
    if isinstance(sigma, GrassPerm):
        sigma = sigma.values
    return tuple(items[s - 1] for s in sigma)


def compose(s: Sequence[int], t: Sequence[int]) -> tuple:
    """(s o t)(i) = s(t(i))."""
    return tuple(s[x - 1] for x in t)


def inverse(s: Sequence[int]) -> tuple:
    out = [0] * len(s)
    for i, x in enumerate(s, 1):
        out[x - 1] = i
    return tuple(out)


def length(s: Sequence[int]) -> int:
    return sum(1 for i in range(len(s)) for j in range(i + 1, len(s)) if s[i] > s[j])


def reduced_word(s: Sequence[int]) -> list[int]:
    """Indices i1..il with s = s_{i1} ... s_{il} (s_i the simple transposition)."""
    w = list(s)
    word = []
    # bubble sort w from the right: w * s_i swaps positions i, i+1
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                w[i], w[i + 1] = w[i + 1], w[i]
                word.append(i + 1)
                changed = True
    # s * s_{word[0]} * ... * s_{word[-1]} = id, so s = s_{word[-1]} ... s_{word[0]}
    return word[::-1]


def binomial(n: int, k: int) -> int:
    return comb(n, k)

import time

import pytest

from grassqkz.algebra import Matrix


def parse_matrix(ring, rows):
    return Matrix.from_rows([[ring.parse(s) for s in row] for row in rows])


@pytest.fixture
def criterion(capsys):
    """Time a block and print one pass/fail line for it."""

    class _Criterion:
        def __init__(self):
            self.label = None
            self.bound = None

        def __call__(self, label, bound):
            self.label, self.bound = label, bound
            return self

        def __enter__(self):
            self.t0 = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc, tb):
            elapsed = time.perf_counter() - self.t0
            ok = exc_type is None and elapsed < self.bound
            with capsys.disabled():
                print(f"\n[{'PASS' if ok else 'FAIL'}] {self.label} ({elapsed:.2f}s, bound {self.bound}s)")
            if exc_type is None:
                assert elapsed < self.bound, f"{self.label} took {elapsed:.2f}s"
            return False

    return _Criterion()

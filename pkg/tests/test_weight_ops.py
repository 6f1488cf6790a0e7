import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import parse_matrix
from reference_data import QKZ_N3

from grassqkz.algebra import Matrix
from grassqkz.combinatorics import BadRange
from grassqkz.weight_ops import (
    BadMode,
    dynamical_operator,
    exterior_power_matrix,
    full_diag,
    full_qkz,
    full_r,
    qkz_factors,
    qkz_operator,
    restrict_full,
    satake_theta,
    sum_z,
    verify_compatibility,
    verify_satake_gauge,
    weight_ring,
)


def test_factor_order():
    assert qkz_factors(3, 2) == [("R", 2, 1, True), ("D", 2), ("R", 2, 3, False)]
    assert qkz_factors(3, 3) == [("R", 3, 2, True), ("R", 3, 1, True), ("D", 3)]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_weight_block_agrees_with_full_tensor_product(n):
    for a in range(1, n + 1):
        F = full_qkz(n, a)
        for k in range(n + 1):
            block, invariant = restrict_full(F, k, n)
            assert invariant
            assert block == qkz_operator(n, k, a).matrix


def test_k3_operator_list_annotation():
    # The n=3 example lists R(z3-z2+kappa) for the (3,1) factor of K_3. Taking
    # that literally changes the matrix; the display matches the product formula.
    R = weight_ring(3)
    g = R.gen
    literal = full_r(3, 3, 2, g("z3") - g("z2") + g("kp")) * full_r(3, 3, 1, g("z3") - g("z2") + g("kp")) * full_diag(3, 3, R)
    block, _ = restrict_full(literal, 2, 3)
    display = parse_matrix(R, QKZ_N3[(2, 3)])
    assert block != display
    assert qkz_operator(3, 2, 3).matrix == display


def test_yang_baxter():
    R = weight_ring(3)
    u, v = R.gen("z1"), R.gen("z2")
    lhs = full_r(3, 1, 2, u - v) * full_r(3, 1, 3, u) * full_r(3, 2, 3, v)
    rhs = full_r(3, 2, 3, v) * full_r(3, 1, 3, u) * full_r(3, 1, 2, u - v)
    assert lhs == rhs


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_dynamical_operators_sum_to_total_weight(n):
    R = weight_ring(n)
    for k in range(n + 1):
        X1 = dynamical_operator(n, k, 1).matrix
        X2 = dynamical_operator(n, k, 2).matrix
        assert X1 + X2 == Matrix.scalar(sum_z(R, n), X1.size)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_qkz_determinant(n):
    # det K_a on the k-th block is p1^{C(n-1,k-1)} p2^{C(n-1,k)} times R-matrix determinants;
    # at kp = 0 and z = 0 every R-factor is a permutation, so only the p-part survives
    from math import comb

    from grassqkz.algebra import determinant

    R = weight_ring(n)
    zero = {f"z{i}": R.zero() for i in range(1, n + 1)}
    zero["kp"] = R.zero()
    for k in range(n + 1):
        for a in range(1, n + 1):
            d = determinant(qkz_operator(n, k, a).matrix.subs(zero))
            want = R.gen("p1") ** comb(n - 1, k - 1) * R.gen("p2") ** comb(n - 1, k) if k else R.gen("p2") ** comb(n - 1, k)
            assert d == want or d == -want


def test_bad_ranges():
    with pytest.raises(BadRange):
        qkz_operator(3, 4, 1)
    with pytest.raises(BadRange):
        qkz_operator(3, 1, 0)
    with pytest.raises(BadRange):
        dynamical_operator(3, 1, 3)
    with pytest.raises(BadRange):
        satake_theta(0, 3)


def test_exterior_power_mode():
    M = qkz_operator(3, 1, 1).matrix
    with pytest.raises(BadMode):
        exterior_power_matrix(M, 2, "tensor")
    assert exterior_power_matrix(M, 1) == M


def test_to_json_shape():
    d = qkz_operator(3, 1, 2).to_json()
    assert d["size"] == 3 and len(d["entries"]) == 3
    assert [b["I1"] for b in d["basis"]] == [[1], [2], [3]]


def test_reports_pass():
    assert verify_compatibility(3, 1).passed
    assert verify_satake_gauge(4, 2).passed
    rep = verify_compatibility(3, 2, pairs=[(1, 3)]).to_json()
    assert rep["passed"] and {c["status"] for c in rep["checks"]} == {"pass"}


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n), st.integers(1, n))))
def test_exterior_powers_of_products(data):
    # wedge^k is multiplicative: wedge^k(K_a K_b) = wedge^k K_a wedge^k K_b
    n, k, a = data
    b = n + 1 - a
    A, B = qkz_operator(n, 1, a).matrix, qkz_operator(n, 1, b).matrix
    assert exterior_power_matrix(A * B, k) == exterior_power_matrix(A, k) * exterior_power_matrix(B, k)

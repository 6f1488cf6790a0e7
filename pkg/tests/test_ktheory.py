from math import comb

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from grassqkz.combinatorics import all_partitions, enumerate_index_sets, to_partition
from grassqkz.ktheory import (
    BadKind,
    ExceptionalBasis,
    KClass,
    NotExceptional,
    ShapeMismatch,
    act_braid,
    anti_identity,
    beilinson_basis,
    beta_word,
    canonical_operator,
    chi_pairing,
    cyclotomic_poly,
    dagger,
    dual_basis,
    euler_characteristic,
    exterior_minors,
    formal_data,
    generate_Q_basis,
    grothendieck_polynomial,
    k_representative,
    k_ring,
    kapranov_basis,
    kapranov_class,
    line_bundle,
    lower_unitriangular_inverse,
    markov_entries,
    mutate,
    one_kclass,
    parse_braid,
    q_elements,
    reduce_cyclotomic,
    satake_exterior_basis,
    satake_k,
    schubert_sheaf_class,
    smallest_prime_factor,
    spectrum_simple,
    spectrum_simple_criterion,
    stokes_matrices,
    x_poly,
)


def at_one(p, n):
    return p.evaluate({f"Z{i}": 1 for i in range(1, n + 1)})


@pytest.mark.parametrize("k,n", [(1, 2), (1, 3), (2, 3), (2, 4), (3, 5)])
def test_structure_sheaf_has_euler_characteristic_one(k, n):
    assert chi_pairing(one_kclass(k, n), one_kclass(k, n)) == 1


@pytest.mark.parametrize("k,n", [(1, 3), (2, 4), (2, 5)])
def test_schubert_structure_sheaves_have_chi_one(k, n):
    for lam in all_partitions(k, n):
        assert euler_characteristic(schubert_sheaf_class(lam, k, n)) == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_line_bundle_cohomology_dimension(n):
    # chi(O(m)) on P^{n-1} has dimension C(n-1+m, n-1) for m >= 0
    for m in range(0, 4):
        assert at_one(chi_pairing(line_bundle(0, n), line_bundle(m, n)), n) == comb(n - 1 + m, n - 1)


@pytest.mark.parametrize("k,n", [(1, 3), (2, 4), (2, 5)])
def test_grothendieck_two_methods_agree(k, n):
    for lam in all_partitions(k, n):
        assert grothendieck_polynomial(lam, k, n) == grothendieck_polynomial(lam, k, n, "determinant")


def test_grothendieck_bad_inputs():
    with pytest.raises(ShapeMismatch):
        grothendieck_polynomial((3,), 1, 3)
    with pytest.raises(ValueError):
        grothendieck_polynomial((1,), 1, 3, "pipe-dream")


@pytest.mark.parametrize("k,n", [(2, 3), (2, 4), (3, 5)])
def test_kapranov_classes_from_line_bundles(k, n):
    for I in enumerate_index_sets(k, n):
        lam = to_partition(I).padded(k)
        fs = [line_bundle(lam[j] + k - 1 - j, n) for j in range(k)]
        assert satake_k(fs) == kapranov_class(lam, k, n)
        assert satake_k(fs, -1) == kapranov_class(lam, k, n, twisted=False)


@pytest.mark.parametrize("k,n", [(2, 3), (2, 4), (3, 4)])
def test_wedge_gram_is_minors_of_gram(k, n):
    b = generate_Q_basis(n, 0, "prime")
    assert satake_exterior_basis(b, k).gram == exterior_minors(b.gram, k)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_beilinson_gram_entries(n):
    G = beilinson_basis(n).gram
    for i in range(n):
        for j in range(n):
            want = comb(n - 1 + j - i, n - 1) if j >= i else 0
            assert at_one(G[i, j], n) == want


def test_dual_bases():
    b = beilinson_basis(3)
    N = len(b)
    ld, rd = dual_basis(b, "left"), dual_basis(b, "right")
    for i in range(N):
        for j in range(N):
            delta = 1 if i + j == N - 1 else 0
            assert chi_pairing(ld.elements[i], b.elements[j]) == delta
            assert chi_pairing(b.elements[i], rd.elements[j]) == delta
    J = anti_identity(k_ring(3), 3)
    want = J * lower_unitriangular_inverse(dagger(b.gram)) * J
    assert ld.gram == want and rd.gram == want
    # the right dual of the right dual is the canonical twist
    assert dual_basis(rd, "right").elements == [canonical_operator(e) for e in b.elements]


def test_mutation_inverse_pairs():
    b = kapranov_basis(2, 3)
    for i in (1, 2):
        back = mutate(mutate(b, i, "left"), i, "right")
        assert back.elements == b.elements


def test_mutation_errors():
    b = beilinson_basis(3)
    with pytest.raises(ValueError):
        mutate(b, 3, "left")
    with pytest.raises(ValueError):
        mutate(b, 1, "up")
    with pytest.raises(ValueError):
        parse_braid("t1 s2")
    assert parse_braid("t1 t2^-1") == [1, -2]
    assert beta_word(4) == [1, 2, 1, 3, 2, 1]


def test_not_exceptional():
    els = list(reversed(beilinson_basis(3).elements))
    with pytest.raises(NotExceptional):
        ExceptionalBasis(1, 3, els).verify()


def test_braid_action_on_p2():
    b = beilinson_basis(3)
    assert act_braid(b, "t1 t2 t1").elements == act_braid(b, "t2 t1 t2").elements


@pytest.mark.parametrize("k,n", [(1, 3), (2, 4)])
def test_k_representative_roundtrip(k, n):
    for e in kapranov_basis(k, n).elements:
        k_representative(e)  # raises if interpolation fails


def test_x_poly_and_q_elements():
    with pytest.raises(ValueError):
        x_poly(5, 0, 3)
    with pytest.raises(BadKind):
        q_elements(3, 0, "triple")
    assert len(q_elements(5, 0, "prime")) == 5


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("kind", ["prime", "doubleprime"])
def test_q_bases_are_exceptional(n, kind):
    assert generate_Q_basis(n, 0, kind).is_exceptional()


def test_p2_stokes_matrix_at_one():
    # non-equivariantly the P^2 Stokes entries solve x^2 + y^2 + z^2 = xyz
    a, b, c = (at_one(x, 3) for x in markov_entries(stokes_matrices(1, 3).S1))
    assert a * a + b * b + c * c == a * b * c
    assert sorted(abs(x) for x in (a, b, c)) == [3, 3, 6]


def test_stokes_size_guard():
    with pytest.raises(ValueError):
        stokes_matrices(3, 6)


@pytest.mark.parametrize("n", range(1, 25))
def test_cyclotomic_against_sympy(n):
    x = sympy.Symbol("x")
    want = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()[::-1]
    assert cyclotomic_poly(n) == [int(c) for c in want]


def test_reduce_cyclotomic():
    # 1 + zeta + zeta^2 = 0 for n = 3
    assert reduce_cyclotomic([1, 1, 1], 3) == (0, 0)


@pytest.mark.parametrize("k,n", [(1, 4), (2, 4), (2, 6), (3, 7)])
def test_formal_data_numeric(k, n):
    import cmath

    fd = formal_data(k, n)
    zeta = cmath.exp(2j * cmath.pi / n)
    for I, v in zip(enumerate_index_sets(k, n), fd.s_numeric()):
        assert abs(v - sum(zeta ** (i - 1) for i in I.I1)) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 5, 7, 11])
def test_prime_n_always_simple(n):
    assert all(spectrum_simple(k, n) for k in range(n + 1))


def test_smallest_prime_factor():
    assert [smallest_prime_factor(n) for n in (2, 9, 15, 49, 97)] == [2, 3, 3, 7, 97]
    assert spectrum_simple_criterion(2, 4) is False and spectrum_simple_criterion(1, 4) is True


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4).flatmap(lambda k: st.tuples(st.just(k), st.integers(k, 5))), st.data())
def test_grothendieck_property(kn, data):
    k, n = kn
    lam = data.draw(st.sampled_from(all_partitions(k, n)))
    assert grothendieck_polynomial(lam, k, n) == grothendieck_polynomial(lam, k, n, "determinant")


def test_kclass_shape_checks():
    with pytest.raises(ShapeMismatch):
        one_kclass(1, 3) + one_kclass(2, 3)
    with pytest.raises(ShapeMismatch):
        KClass(1, 3, (k_ring(3).one(),))
    with pytest.raises(ShapeMismatch):
        satake_k([one_kclass(2, 3)])

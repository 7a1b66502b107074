import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framedpoly import intertwiners as qi
from framedpoly import weingarten as wg
from framedpoly.moments import corr_pairs, moment_V, quartic_unitary_integral


def test_partitions_counts():
    assert [len(wg.partitions(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert wg.partitions(3) == sorted(wg.partitions(3))


def test_character_examples():
    assert wg.sn_character((3,), (2, 1)) == 1
    assert wg.sn_character((1, 1), (2,)) == -1
    assert wg.sn_character((2, 1), (3,)) == -1
    with pytest.raises(ValueError):
        wg.sn_character((2, 1), (2,))


@pytest.mark.parametrize("n", range(1, 7))
def test_character_orthogonality(n):
    parts = wg.partitions(n)
    for a in parts:
        for b in parts:
            s = sum(wg.class_size(ct) * wg.sn_character(a, ct) * wg.sn_character(b, ct) for ct in parts)
            assert s == (math.factorial(n) if a == b else 0)
    # columns
    for c1 in parts:
        for c2 in parts:
            s = sum(wg.sn_character(lam, c1) * wg.sn_character(lam, c2) for lam in parts)
            cent = math.factorial(n) // wg.class_size(c1)
            assert s == (cent if c1 == c2 else 0)


def test_schur_dimension():
    assert wg.schur_dimension((1,), 7) == 7
    assert wg.schur_dimension((1, 1), 3) == 3
    assert wg.schur_dimension((1, 1), 4) == 6 == qi.dimension(4, 1)
    assert wg.schur_dimension((2, 2), 4) == qi.dimension(4, 2)
    assert wg.schur_dimension((1, 1, 1), 2) == 0


def test_catalan():
    assert [wg.catalan(c) for c in range(7)] == [1, 1, 2, 5, 14, 42, 132]


@pytest.mark.parametrize("n_dim", [2, 3, 7])
def test_weingarten_small(n_dim):
    assert wg.weingarten_exact(1, n_dim, (0,)) == Fraction(1, n_dim)
    assert wg.weingarten_exact(2, n_dim, (0, 1)) == Fraction(1, n_dim**2 - 1)
    assert wg.weingarten_exact(2, n_dim, (1, 0)) == Fraction(-1, n_dim * (n_dim**2 - 1))


def test_weingarten_n3_fixture():
    assert wg.weingarten_exact(2, 3, (0, 1)) == Fraction(1, 8)
    assert wg.weingarten_exact(2, 3, (1, 0)) == Fraction(-1, 24)
    with pytest.raises(ValueError, match="singular"):
        wg.weingarten_exact(3, 2, (0, 1, 2))


@settings(max_examples=30, deadline=None)
@given(st.permutations(range(5)), st.permutations(range(5)))
def test_class_function(sigma, rho):
    sigma, rho = tuple(sigma), tuple(rho)
    conj = wg.compose(wg.compose(rho, sigma), wg.inverse(rho))
    assert wg.weingarten_exact(5, 6, sigma) == wg.weingarten_exact(5, 6, conj)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_gram_inverse(n):
    for n_dim in sorted({n, n + 1, n + 3, 10}):
        assert wg.gram_inverse_check(n, n_dim)


def test_gram_matrix_n2():
    assert wg.gram_matrix(2, 5) == [[25, 5], [5, 25]]


@pytest.mark.parametrize("n", [2, 3])
def test_asymptotic_ratio(n):
    for sigma in itertools.permutations(range(n)):
        ratio = wg.weingarten_asymptotic(sigma, 100) / float(wg.weingarten_exact(n, 100, sigma))
        assert abs(ratio - 1) < 1e-3
    assert wg.weingarten_asymptotic((0, 1, 2), 10) == pytest.approx(1e-3)


def test_asymptotic_three_cycle_catalan():
    # leading coefficient +C_2 = 2 on N^-(3+2)
    assert wg.weingarten_asymptotic((1, 2, 0), 10) == pytest.approx(2 / 10**5)


def test_polynomial_integral_examples():
    assert wg.polynomial_integral((0,), (0,), (0,), (0,), 4) == Fraction(1, 4)
    for n_dim in (2, 3, 6):
        assert wg.polynomial_integral((0, 0), (0, 0), (0, 0), (0, 0), n_dim) == Fraction(2, n_dim * (n_dim + 1))
        assert wg.polynomial_integral((0, 1), (0, 1), (0, 1), (0, 1), n_dim) == Fraction(1, n_dim**2 - 1)
    # mismatched U / conj(U) index counts vanish
    assert wg.polynomial_integral((0, 1), (0, 0), (0, 0), (0, 0), 3) == 0
    with pytest.raises(ValueError):
        wg.polynomial_integral((0,) * 7, (0,) * 7, (0,) * 7, (0,) * 7, 8)


@pytest.mark.parametrize("n_dim", [2, 3])
def test_quartic_formula_matches_weingarten(n_dim):
    idx = range(n_dim)
    for i, j, a, b, m, v, k, l in itertools.product(idx, repeat=8):
        if (i + j + a + b + m + v + k + l) % 3:  # thin the sweep, still covers every pattern type
            continue
        lhs = quartic_unitary_integral(i, j, a, b, m, v, k, l, n_dim)
        # argument order is U_ij conj(U_ab) U_mv conj(U_kl)
        rhs = wg.polynomial_integral((i, m), (j, v), (a, k), (b, l), n_dim)
        assert lhs == rhs


def test_vector_polynomial_average_reproduces_moments():
    for n in (3, 4, 7):
        lam = Fraction(5, 2)
        assert wg.vector_polynomial_average([(1, "n")], n, lam) == moment_V(n, lam, 1)
        assert wg.vector_polynomial_average([(1, "n"), (1, "n")], n, lam) == moment_V(n, lam, 2)
        assert wg.vector_polynomial_average([(2, "n")] * 3, n, lam) == moment_V(n, lam, 3)
        pairs = corr_pairs(n, lam)
        assert wg.vector_polynomial_average([(1, "n"), (2, "n")], n, lam) == pairs["ViVj"]
        assert wg.vector_polynomial_average([(1, "x"), (2, "x")], n, lam) == -2 * lam**2 / (n * (n * n - 1))
        assert wg.vector_polynomial_average([(1, "x"), (2, "y")], n, lam) == 0
        assert wg.vector_polynomial_average([(1, "z"), (1, "z")], n, lam) == 2 * lam**2 / (n * (n + 1))
    with pytest.raises(ValueError):
        wg.vector_polynomial_average([(1, "n")] * 7, 8)


def test_closure_identity():
    # sum_i V_i^a = 0 pointwise, so <V_1^x sum_i V_i^x> vanishes
    n = 5
    total = sum(wg.vector_polynomial_average([(1, "x"), (i, "x")], n) for i in range(1, n + 1))
    assert total == 0


def test_mc_spot_check():
    from framedpoly.sampling import haar_unitary_batch, make_rng
    from framedpoly.stats import batch_means

    u = haar_unitary_batch(3, 200_000, make_rng(2))
    val = u[:, 0, 0] * u[:, 1, 1] * np.conj(u[:, 0, 1] * u[:, 1, 0])
    exact = float(wg.polynomial_integral((0, 1), (0, 1), (0, 1), (1, 0), 3))
    m, se = batch_means(val)
    assert abs(m.real - exact) < 4 * se.real and abs(m.imag) < 4 * se.imag

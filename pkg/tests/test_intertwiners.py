from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framedpoly import intertwiners as qi
from framedpoly.moments import density, moment_V
from framedpoly.sampling import sample_haar_unitary, sample_polyhedron
from framedpoly.spinors import SpinorEnsemble

h = Fraction(1, 2)


def test_dimension_fixtures():
    assert all(qi.dimension(n, 0) == 1 for n in range(1, 8))
    assert qi.dimension(4, 1) == 6
    assert qi.dimension(4, 2) == 20
    assert qi.dimension(4, h) == 0


def test_dimension_fixed_spin_fixtures():
    assert qi.dimension_fixed_spin(3, 1, 0) == 3
    assert qi.dimension_fixed_spin(3, 1, 1) == 6
    assert qi.dimension_fixed_spin(3, h, h) == 3
    assert qi.dimension_fixed_spin(3, 1, 2) == 0


def test_coupling_counts():
    assert qi.dimension_by_coupling([h, h]) == 1
    assert qi.dimension_by_coupling([1, 1, 1]) == 1
    assert qi.covariant_count([h, h], 1) == 1
    for two_j in range(7):
        assert qi.dimension(5, Fraction(two_j, 2)) == qi.dimension_brute_force(5, Fraction(two_j, 2))


def test_sum_rule_report():
    rep = qi.sum_rule_check(3, 1)
    assert rep.leg_peeling_sum == 6 == rep.target
    assert rep.literal_sum == 9 and not rep.literal_holds
    assert qi.sum_rule_check(3, 2).leg_peeling_sum == 20
    assert all(qi.sum_rule_check(4, j).leg_peeling_holds for j in range(4))


def test_leg_spectrum_n4_j2():
    # 6 + 8 + 6 = 20 states with leg spin 0, 1/2, 1
    assert qi.leg_spectrum(4, 4) == ((0, 6), (1, 8), (2, 6))


def test_trace_moments():
    assert qi.trace_moment_V(4, 2, 1) == 1
    assert qi.trace_moment_V(4, 2, 2) == Fraction(18, 5)
    assert qi.casimir_moment(4, 2) == Fraction(18, 5) == qi.trace_moment_closed_form(4, 2, 2)
    assert qi.power_moment(4, 2, 2) == Fraction(8, 5)
    with pytest.raises(ValueError):
        qi.trace_moment_closed_form(4, 2, 3)


def test_trace_moment_classical_limit():
    n = 5
    for j in (50, 200):
        ratio = qi.trace_moment_V(n, j, 2) / moment_V(n, j, 2)
        assert abs(float(ratio) - 1) < 2 * n / j


@pytest.mark.parametrize("n", [3, 4, 6])
def test_per_leg_mean(n):
    for j in range(5):
        if qi.dimension(n, j):
            assert qi.trace_moment_V(n, j, 1) == Fraction(2 * j, n)


def test_factorial_moments():
    for n in (3, 4, 5):
        for j in (1, 2, 3):
            assert qi.factorial_moment(n, j, 0) == qi.trace_moment_V(n, j, 1)
            assert qi.factorial_moment(n, j, 1) == qi.power_moment(n, j, 2) + qi.power_moment(n, j, 1)
            for m in range(4):
                assert qi.factorial_moment_closed(n, j, m) == qi.factorial_moment(n, j, m)
    rep = qi.factorial_moment_report(4, 2, 2)
    assert rep["factorial_form_agrees"] and not rep["binomial_form_agrees"]
    assert rep["binomial_form"] == 4 * 5 * rep["spectral"]


def test_spin_correlations_fixture():
    c = qi.spin_correlations(4, 2)
    assert c["ViVk_printed"] == Fraction(2, 15)
    assert 4 * Fraction(18, 5) + 12 * c["ViVk_printed"] == 16
    assert c["Vi_dot_Vk"] == Fraction(-6, 5)
    assert c["closure_rule"] == 0
    assert c["ViVk"] == Fraction(4, 5)
    assert c["area_rule"] == 16
    zero = qi.spin_correlations(5, 0)
    assert zero["ViVk"] == 0 and zero["Vi_dot_Vk"] == 0


def test_character_values():
    assert qi.character(4, 1, np.zeros(4)) == pytest.approx(6)
    th = np.array([0.4, -1.1])
    for j in (1, 2, 3):
        assert qi.character(2, j, th) == pytest.approx(np.exp(1j * j * th.sum()))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.integers(1, 3), st.permutations(range(4)))
def test_character_symmetric(thetas, j, perm):
    th = np.array(thetas)
    assert qi.character(4, j, th) == pytest.approx(qi.character(4, j, th[list(perm)]), abs=1e-9)


def test_character_vandermonde_crosscheck():
    th = np.array([0.3, 0.1, -0.2, 0.5])
    for j in (1, 2):
        assert abs(qi.character(4, j, th) - qi.character_vandermonde(4, j, th)) < 1e-8


def test_coherent_states():
    ref = SpinorEnsemble.reference(2)
    for j in (1, 2, 5):
        assert qi.coherent_overlap(j, ref, ref) == pytest.approx(1)
    e = sample_polyhedron(6, 1.7, 3)
    for j in (1, 2):
        assert qi.coherent_norm(j, e) == pytest.approx(1.7 ** (2 * j), rel=1e-10)
        assert qi.coherent_norm_from_vectors(j, e) == pytest.approx(1.7 ** (2 * j), rel=1e-10)
    w = sample_polyhedron(6, 0.8, 4)
    u = sample_haar_unitary(6, 5)
    a = qi.coherent_overlap(2, e.spinors, u @ w.spinors)
    b = qi.coherent_overlap(2, u.conj().T @ e.spinors, w.spinors)
    assert abs(a - b) < 1e-10 * abs(a)
    assert qi.coherent_overlap_pairs(2, e, w) == pytest.approx(qi.coherent_overlap(2, e, w))
    with pytest.raises(ValueError):
        qi.coherent_norm(h, e)


def test_norm_decreases_with_open_closure():
    lam = 1.0
    base = np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=complex) / np.sqrt(2)
    prev = None
    for t in (0.0, 0.2, 0.4, 0.6):
        z = base.copy()
        z[0] = np.array([np.cos(t), np.sin(t)]) / np.sqrt(2)
        e = SpinorEnsemble(z)
        assert e.total_area == pytest.approx(2 * lam)
        val = qi.coherent_norm(1, e)
        if prev is not None:
            assert val < prev
        prev = val


def test_mc_estimators():
    assert qi.dimension_mc(4, 0, 10, 0) == (1.0, 0.0)
    m, se = qi.dimension_mc(3, 1, 200_000, seed=1)
    assert abs(m - 3) < 4 * se
    th = np.array([0.3, 0.1, -0.2, 0.5])
    m, se = qi.character_mc(4, 1, th, 200_000, seed=2)
    exact = qi.character(4, 1, th)
    assert abs(m.real - exact.real) < 4 * se.real and abs(m.imag - exact.imag) < 4 * se.imag
    m, se = qi.character_mc(2, 2, [0.4, 0.7], 100_000, seed=3)
    assert abs(m - np.exp(2.2j)) < 4 * abs(se)
    with pytest.raises(ValueError):
        qi.dimension_mc(9, 1, 10, 0)


def test_asymptotics():
    ratio = qi.asymptotic_dimension(4, 100) / qi.dimension(4, 100)
    assert abs(ratio - 1) < 0.02
    # leading term at J = lambda is the classical density
    n, j = 5, 40
    lead = j ** (2 * n - 4) / float(np.prod([1, 2, 3, 4]) * np.prod([1, 2, 3]))
    assert lead == pytest.approx(float(density(n, j)))
    with pytest.raises(ValueError):
        qi.asymptotic_dimension(2, 3)


def test_spin_validation():
    assert qi.twice(1.5) == 3
    with pytest.raises(ValueError):
        qi.twice(Fraction(1, 3))
    with pytest.raises(ValueError):
        qi.Spin(-1)
    assert qi.IntertwinerSpaceLabel(4, 4).dimension() == 20
    assert qi.IntertwinerSpaceLabel(3, 2, 2).dimension() == 6

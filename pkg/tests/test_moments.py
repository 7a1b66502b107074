import math
from fractions import Fraction

import numpy as np
import pytest

from framedpoly import moments
from framedpoly.sampling import make_rng, sample_free_batch, sample_polyhedra_batch
from framedpoly.spinors import spinor_vectors
from framedpoly.stats import batch_means


def test_density_small_cases():
    assert moments.density(2) == 1
    assert moments.density(3, 2) == Fraction(4, 2)
    assert moments.density(4) == Fraction(1, 12)
    for n in range(2, 21):
        assert moments.density(n, Fraction(3, 2)) == moments.density_sphere_form(n, Fraction(3, 2))
    with pytest.raises(ValueError):
        moments.density(1)


def test_free_density_normalizes_dirichlet():
    # (2 lam)^(2N-1)/(2N-1)! is the volume of prod V_i dV_i on the simplex sum V = 2 lam
    n, lam = 3, Fraction(1, 2)
    assert moments.density_free(n, lam) == Fraction(1, math.factorial(5))


def test_moment_v_values():
    assert moments.moment_V(5, 1, 0) == 1
    assert moments.moment_V(10, 1, 1) == Fraction(1, 5)
    assert moments.moment_V(4, 1, 2) == Fraction(6, 20)
    for n in (3, 6):
        for k in range(5):
            assert moments.moment_V(n, Fraction(5, 2), k) == Fraction(5, 2) ** k * moments.moment_V(n, 1, k)


def test_moment_v_free_values():
    n = 4
    assert moments.moment_V_free(n, 1, 1) == Fraction(2, n)
    assert moments.moment_V_free(n, 1, 2) == Fraction(3 * 4, n * (2 * n + 1))


@pytest.mark.parametrize("n", [3, 4, 9])
def test_sum_rules(n):
    lam = Fraction(7, 3)
    p = moments.corr_pairs(n, lam)
    assert n * p["V2"] + n * (n - 1) * p["ViVj"] == 4 * lam**2
    assert n * p["Via_Vib"] + n * (n - 1) * p["Via_Vjb"] == 0
    assert p["V2"] == moments.moment_V(n, lam, 2)


def test_theta_tensor_is_traceless_and_symmetric():
    v = spinor_vectors(sample_polyhedra_batch(6, 1.0, 10, make_rng(0)))
    th = moments.theta_tensors(v)
    assert np.allclose(np.trace(th, axis1=1, axis2=2), 0)
    assert np.allclose(th, np.swapaxes(th, 1, 2))
    gram = np.einsum("sia,sja->sij", v, v)
    direct = np.sum(gram**2, axis=(1, 2)) - np.einsum("sii->s", gram) ** 2 / 3
    assert np.allclose(moments.trace_theta_squared(v), direct)
    t = moments.ThetaTensor.from_vectors(v[0])
    assert t.trace_square == pytest.approx(direct[0])


@pytest.mark.parametrize("n", [4, 5, 8])
def test_theta_weingarten_closed_form(n):
    a, b = moments.theta_coefficients_weingarten(n)
    assert a == Fraction(-16, 3 * n * (n + 1) * (n + 3))
    assert b == Fraction(8, n * (n + 1) * (n + 3))
    assert moments.mean_trace_theta2_weingarten(n) == Fraction(80, n * (n + 1) * (n + 3))


def test_printed_theta_pair_against_exact():
    for n in (4, 6, 9):
        pa, pb = moments.theta_coefficients_printed(n)
        a, b = moments.theta_coefficients_weingarten(n)
        assert pa == -a
        assert pb == -b / (n + 2)
        # Theta is traceless, the exact pair respects it and the printed one does not
        assert 3 * a + 2 * b == 0
        assert 3 * pa + 2 * pb != 0
        # contracting the printed pair gives 4/lam^2 times the printed trace
        assert 3 * pa + 12 * pb == 4 * moments.mean_trace_theta2_printed(n)
    assert moments.theta_correlation_exact(5)["status"] == "unverified-paper-form"
    assert moments.mean_trace_theta2_printed(4) == 0


def test_theta_mc_matches_weingarten():
    n = 6
    v = spinor_vectors(sample_polyhedra_batch(n, 1.0, 300_000, make_rng(3)))
    st = moments.theta_statistics(v)
    a, b = moments.theta_coefficients_weingarten(n)
    for key, exact in (("a", a), ("b", b), ("tr_theta2", 3 * a + 12 * b), ("theta_01", 0), ("theta_00", 0)):
        m, se = st[key]
        assert abs(m - float(exact)) < 4 * se, key


def test_quartic_examples():
    for n in (2, 3, 5):
        assert moments.quartic_unitary_integral(0, 0, 0, 0, 0, 0, 0, 0, n) == Fraction(2, n * (n + 1))
        assert moments.quartic_unitary_integral(0, 0, 0, 0, 1, 1, 1, 1, n) == Fraction(1, n * n - 1)
    assert moments.quartic_unitary_integral(0, 0, 0, 0, 1, 1, 1, 1, 2) == Fraction(1, 3)


def test_tables_agree_with_mc():
    n, lam = 5, 1.5
    z = sample_polyhedra_batch(n, lam, 200_000, make_rng(4))
    obs = moments.polyhedron_observables(z)
    for key, exact in moments.exact_polyhedron_table(n, lam).items():
        m, se = batch_means(obs[key])
        assert abs(m - float(exact)) < 4 * se, key
    v = sample_free_batch(n, lam, 200_000, make_rng(5))
    obs = moments.free_observables(v)
    for key, exact in moments.exact_free_table(n, lam).items():
        m, se = batch_means(obs[key])
        assert abs(m - float(exact)) < 4 * se, key


def test_moment_report():
    r = moments.MomentReport("V", 0.2, 0.21, 0.005, samples=100)
    assert r.z_score == pytest.approx(2.0)
    assert r.passes(3) and not r.passes(1)
    assert moments.MomentReport("V", 0.2).z_score is None

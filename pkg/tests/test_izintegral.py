import math
from fractions import Fraction

import numpy as np
import pytest

from framedpoly import izintegral as iz
from framedpoly.moments import moment_V


def test_one_by_one():
    assert iz.iz_determinant(iz.SpectralPair((2.0,), (0.5,), 0.3)) == pytest.approx(np.exp(0.3j))


def test_small_theta_limit():
    p = iz.SpectralPair((1, 2, 3), (0.5, 1.5, 2.5), 1e-6)
    assert abs(iz.iz_determinant(p) - 1) < 1e-4
    assert iz.iz_determinant(iz.SpectralPair((1, 2), (3, 4), 0.0)) == 1


def test_permutation_and_conjugation():
    p = iz.SpectralPair((1, 2, 3, 5), (0.1, 0.7, 1.1, 2.0), 0.4)
    base = iz.iz_determinant(p)
    q = iz.SpectralPair((3, 1, 5, 2), (2.0, 0.1, 1.1, 0.7), 0.4)
    assert iz.iz_determinant(q) == pytest.approx(base, rel=1e-10)
    r = iz.SpectralPair(p.x, p.y, -0.4)
    assert iz.iz_determinant(r) == pytest.approx(np.conj(base), rel=1e-10)


def test_near_degenerate_rejected():
    with pytest.raises(ValueError, match="iz_degenerate"):
        iz.iz_determinant(iz.SpectralPair((1, 1, 2), (0, 1, 2), 0.5))


def test_mc_n2_and_theta_zero():
    p = iz.SpectralPair((0.0, 1.5), (0.2, 1.0), 1.1)
    m, se = iz.iz_mc(p, 200_000, seed=1)
    exact = iz.iz_determinant(p)
    assert abs(m.real - exact.real) < 4 * se.real and abs(m.imag - exact.imag) < 4 * se.imag
    m, se = iz.iz_mc(iz.SpectralPair((1, 2), (3, 4), 0.0), 10, seed=1)
    assert m == 1 and se == 0


def test_series_coefficients():
    lam = Fraction(3, 2)
    assert iz.area_series_coefficient(5, 1, lam) == 2 * lam / 5
    assert iz.area_series_coefficient(5, 2, lam) * 2 == 6 * lam**2 / 30
    for n in (2, 3, 7):
        for k in range(13):
            assert iz.area_series_coefficient(n, k, lam) * math.factorial(k) == moment_V(n, lam, k)
    assert iz.area_generating_series(4, 1.0, 0.0, 10) == 1


def test_series_matches_mc_on_single_face():
    # Tr(Y U^+ X U) with X = lam e1 e1^T and Y = diag(1,1,0,..) is the area of one face
    n, lam, theta = 5, 1.0, 1.3
    p = iz.SpectralPair((lam,) + (0.0,) * (n - 1), (1.0, 1.0) + (0.0,) * (n - 2), theta)
    m, se = iz.iz_mc(p, 200_000, seed=2)
    series = iz.area_generating_series(n, lam, theta, 60)
    assert abs(m.real - series.real) < 4 * se.real and abs(m.imag - series.imag) < 4 * se.imag


def test_degenerate_matches_extrapolation():
    x = (1.0, 2.0, 3.0, 4.0)
    deg = iz.iz_degenerate_Y(x, 0.3)
    ext = iz.iz_degenerate_extrapolated(x, 0.3)
    assert abs(deg - ext) / abs(ext) < 1e-5
    x6 = (0.3, 1.0, 1.7, 2.2, 3.5, 4.1)
    assert iz.iz_degenerate_Y(x6, 0.6) == pytest.approx(iz.iz_degenerate_extrapolated(x6, 0.6), rel=1e-5)


def test_degenerate_double_limit_gives_series():
    n, theta = 4, 0.8
    d = 1e-4
    x = (1.0, d, 2 * d, 3 * d)
    assert iz.iz_degenerate_Y(x, theta) == pytest.approx(iz.area_generating_series(n, 1.0, theta, 60), abs=1e-3)


def test_printed_degenerate_form_disagrees():
    x = (1.0, 2.0, 3.0, 4.0)
    assert abs(iz.iz_degenerate_printed(x, 0.3) - iz.iz_degenerate_Y(x, 0.3)) > 0.1


def test_degenerate_domain():
    with pytest.raises(ValueError):
        iz.iz_degenerate_Y((1, 2, 3), 0.3)
    with pytest.raises(ValueError):
        iz.iz_degenerate_Y(tuple(range(1, 10)), 0.3)


def test_perturbed_y_symmetry():
    a = sorted(iz.perturbed_y(5, 1e-3))
    b = sorted(iz.perturbed_y(5, -1e-3))
    assert np.allclose(a, b)

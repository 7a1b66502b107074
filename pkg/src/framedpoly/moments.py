"""Closed-form densities and moments of random polyhedra, plus sample evaluators.

Closed forms are exact rationals; pass ``lam`` as an int or ``Fraction`` to
keep them exact, a float converts at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import weingarten
from .spinors import spinor_vectors
from .stats import batch_means, z_score


def _scaled(coef: Fraction, lam, power: int):
    if isinstance(lam, (int, Fraction)):
        return coef * Fraction(lam) ** power
    return float(coef) * float(lam) ** power


def _check_n(n: int, least: int = 2) -> None:
    if n < least:
        raise ValueError(f"need N >= {least}")


def density(n: int, lam=1):
    """Volume of framed polyhedra with N faces and total area 2*lam."""
    _check_n(n)
    coef = Fraction(1, math.factorial(n - 1) * math.factorial(n - 2))
    return _scaled(coef, lam, 2 * n - 4)


def _sphere_volume(dim: int) -> tuple[Fraction, int]:
    # Vol(S_{2m-1}) = 2 pi^m / (m-1)!, as (rational, power of pi)
    if dim % 2 == 0:
        raise ValueError("only odd-dimensional spheres are needed")
    m = (dim + 1) // 2
    return Fraction(2, math.factorial(m - 1)), m


def density_sphere_form(n: int, lam=1):
    """Same density written as (pi/4) pi^-2N Vol(S_2N-1) Vol(S_2N-3)."""
    _check_n(n)
    c1, p1 = _sphere_volume(2 * n - 1)
    c2, p2 = _sphere_volume(2 * n - 3)
    pi_power = 1 - 2 * n + p1 + p2
    if pi_power != 0:
        raise ArithmeticError("pi powers do not cancel")
    return _scaled(Fraction(1, 4) * c1 * c2, lam, 2 * n - 4)


def density_free(n: int, lam=1):
    """Volume without closure: ``(2 lam)^(2N-1) / (2N-1)!``."""
    _check_n(n, 1)
    coef = Fraction(2 ** (2 * n - 1), math.factorial(2 * n - 1))
    return _scaled(coef, lam, 2 * n - 1)


def moment_V(n: int, lam=1, k: int = 1):
    """<V^k> = lam^k (k+1)! (N-1)! / (N+k-1)! over closed polyhedra."""
    _check_n(n)
    if k < 0:
        raise ValueError("k must be >= 0")
    coef = Fraction(
        math.factorial(k + 1) * math.factorial(n - 1), math.factorial(n + k - 1)
    )
    return _scaled(coef, lam, k)


def moment_V_free(n: int, lam=1, k: int = 1):
    """<V^k> without closure: (2 lam)^k (k+1)! (2N-1)! / (2N+k-1)!."""
    _check_n(n, 1)
    if k < 0:
        raise ValueError("k must be >= 0")
    coef = Fraction(
        2**k * math.factorial(k + 1) * math.factorial(2 * n - 1),
        math.factorial(2 * n + k - 1),
    )
    return _scaled(coef, lam, k)


def corr_pairs(n: int, lam=1) -> dict:
    """Quadratic correlations of the closed and free ensembles.

    Component correlations are the coefficients of ``delta_ab``.
    """
    _check_n(n, 3)
    q = Fraction
    closed = {
        "V2": q(6, n * (n + 1)),
        "ViVj": q(2 * (2 * n - 1), (n - 1) * n * (n + 1)),
        "Via_Vib": q(2, n * (n + 1)),
        "Via_Vjb": q(-2, n * (n * n - 1)),
    }
    free = {
        "V2_free": q(12, n * (2 * n + 1)),
        "ViVj_free": q(8, n * (2 * n + 1)),
        "Via_Vib_free": q(4, n * (2 * n + 1)),
        "Via_Vjb_free": q(0),
        "closure_spread_free": q(12, 2 * n + 1),
    }
    out = {k: _scaled(v, lam, 2) for k, v in closed.items()}
    out.update({k: _scaled(v, lam, 2) for k, v in free.items()})
    return out


@dataclass(frozen=True)
class ThetaTensor:
    """Symmetric traceless shape tensor of one polyhedron."""

    matrix: np.ndarray

    @classmethod
    def from_vectors(cls, vectors) -> "ThetaTensor":
        return cls(theta_tensors(np.asarray(vectors)[None])[0])

    @property
    def trace_square(self) -> float:
        return float(np.sum(self.matrix * self.matrix))


def theta_tensors(vectors: np.ndarray) -> np.ndarray:
    """Theta^ab = sum_i V_i^a V_i^b - delta^ab V_i^2 / 3; (S, N, 3) -> (S, 3, 3)."""
    second = np.einsum("sia,sib->sab", vectors, vectors)
    sq = np.einsum("sia,sia->s", vectors, vectors)
    return second - sq[:, None, None] * np.eye(3) / 3


def trace_theta_squared(vectors: np.ndarray) -> np.ndarray:
    """Tr Theta^2, equal to sum (Vi.Vj)^2 - (sum Vi^2)^2 / 3.

    Contracted through the 3x3 tensor so memory stays linear in N.
    """
    th = theta_tensors(vectors)
    return np.einsum("sab,sab->s", th, th)


def theta_statistics(vectors: np.ndarray) -> dict:
    """Mean and batch-means stderr of Theta, Tr Theta^2 and the isotropic coefficients.

    ``a`` estimates <Theta^xx Theta^yy> and ``b`` estimates <Theta^xy Theta^xy>,
    each averaged over the equivalent index pairs.
    """
    th = theta_tensors(vectors)
    out = {}
    for a in range(3):
        for b in range(a, 3):
            out[f"theta_{a}{b}"] = batch_means(th[:, a, b])
    out["tr_theta2"] = batch_means(trace_theta_squared(vectors))
    a_samples = (th[:, 0, 0] * th[:, 1, 1] + th[:, 0, 0] * th[:, 2, 2] + th[:, 1, 1] * th[:, 2, 2]) / 3
    b_samples = (th[:, 0, 1] ** 2 + th[:, 0, 2] ** 2 + th[:, 1, 2] ** 2) / 3
    out["a"] = batch_means(a_samples)
    out["b"] = batch_means(b_samples)
    return out


def _isotropic(a, b) -> np.ndarray:
    d = np.eye(3)
    return (
        float(a) * np.einsum("ab,cd->abcd", d, d)
        + float(b) * (np.einsum("ac,bd->abcd", d, d) + np.einsum("ad,bc->abcd", d, d))
    )


def theta_coefficients_printed(n: int, lam=1) -> tuple:
    """Coefficients (a, b) of the published <Theta Theta> tensor.

    Unverified: a is minus the Weingarten value, while b is negative although
    b = <(Theta^xy)^2> >= 0 and carries an extra 1/(N+2).  The pair is not
    traceless (3a + 2b != 0).  Kept for comparison only.
    """
    _check_n(n)
    den = 3 * (n - 1) * n * (n + 1) * (n + 2) * (n + 3)
    return (
        _scaled(Fraction(16 * (n * n + n - 2), den), lam, 4),
        _scaled(Fraction(-24 * (n - 1), den), lam, 4),
    )


def mean_trace_theta2_printed(n: int, lam=1):
    """Published <Tr Theta^2> = 4 lam^2 (N-4) / (N(N+1)(N+2)(N+3)); zero at N=4."""
    _check_n(n)
    return _scaled(Fraction(4 * (n - 4), n * (n + 1) * (n + 2) * (n + 3)), lam, 2)


def theta_correlation_exact(n: int, lam=1) -> dict:
    """The published <Theta^ab Theta^cd> tensor, flagged as unverified."""
    a, b = theta_coefficients_printed(n, lam)
    return {"tensor": _isotropic(a, b), "a": a, "b": b, "status": "unverified-paper-form"}


def _theta_pair(n: int, ab, cd) -> Fraction:
    def parts(face, pair):
        out = [([(face, pair[0]), (face, pair[1])], Fraction(1))]
        if pair[0] == pair[1]:
            out.append(([(face, 0), (face, 0)], Fraction(-1, 3)))
        return out

    total = Fraction(0)
    for i, j, mult in ((1, 1, n), (1, 2, n * (n - 1))):
        for m1, c1 in parts(i, ab):
            for m2, c2 in parts(j, cd):
                total += mult * c1 * c2 * weingarten.vector_polynomial_average(m1 + m2, n)
    return total


def theta_coefficients_weingarten(n: int, lam=1) -> tuple:
    """(a, b) of <Theta Theta> computed exactly with Collins' formula (N >= 4).

    The result is a = -16/(3N(N+1)(N+3)), b = 8/(N(N+1)(N+3)), times lam^4.
    """
    _check_n(n, 4)
    a = _theta_pair(n, ("x", "x"), ("y", "y"))
    b = _theta_pair(n, ("x", "y"), ("x", "y"))
    return _scaled(a, lam, 4), _scaled(b, lam, 4)


def theta_correlation_weingarten(n: int, lam=1) -> dict:
    a, b = theta_coefficients_weingarten(n, lam)
    return {"tensor": _isotropic(a, b), "a": a, "b": b, "status": "weingarten"}


def mean_trace_theta2_weingarten(n: int, lam=1):
    """<Tr Theta^2> = 3a + 12b = 80 lam^4 / (N(N+1)(N+3))."""
    a, b = theta_coefficients_weingarten(n, lam)
    return 3 * a + 12 * b


def quartic_unitary_integral(i, j, alpha, beta, mu, nu, k, l, n: int) -> Fraction:
    """Haar integral of U_ij conj(U_alpha beta) U_mu nu conj(U_kl), two-block form."""
    _check_n(n)

    def d(x, y):
        return 1 if x == y else 0

    direct = d(i, alpha) * d(k, mu) * d(j, beta) * d(l, nu)
    crossed = d(i, k) * d(alpha, mu) * d(j, l) * d(beta, nu)
    mixed_a = d(i, k) * d(alpha, mu) * d(j, beta) * d(l, nu)
    mixed_b = d(i, alpha) * d(k, mu) * d(j, l) * d(beta, nu)
    nn = Fraction(n)
    return direct / nn**2 + (
        crossed - mixed_a / nn - mixed_b / nn + direct / nn**2
    ) / (nn**2 - 1)


@dataclass(frozen=True)
class MomentReport:
    observable: str
    exact: float
    mc_mean: float | None = None
    mc_stderr: float | None = None
    samples: int = 0
    n: int | None = None
    lam: float | None = None
    seed: int | None = None

    @property
    def z_score(self) -> float | None:
        if self.mc_mean is None or self.mc_stderr is None:
            return None
        return z_score(self.mc_mean, self.mc_stderr, float(self.exact))

    def passes(self, sigmas: float) -> bool:
        z = self.z_score
        return z is not None and abs(z) <= sigmas


def polyhedron_observables(z: np.ndarray) -> dict:
    """Per-sample observables of a batch of closed ensembles (S, N, 2)."""
    v = spinor_vectors(z)
    norms = np.linalg.norm(v, axis=-1)
    th = theta_tensors(v)
    return {
        "V": norms[:, 0],
        "V2": norms[:, 0] ** 2,
        "ViVj": norms[:, 0] * norms[:, 1],
        "Via_Vib": v[:, 0, 0] * v[:, 0, 0],
        "Via_Vjb": v[:, 0, 0] * v[:, 1, 0],
        "theta_xx": th[:, 0, 0],
        "theta_xy": th[:, 0, 1],
        "tr_theta2": np.einsum("sab,sab->s", th, th),
    }


def free_observables(v: np.ndarray, max_power: int = 4) -> dict:
    norms = np.linalg.norm(v, axis=-1)
    out = {f"V{k}_free": norms[:, 0] ** k for k in range(1, max_power + 1)}
    out["ViVj_free"] = norms[:, 0] * norms[:, 1]
    out["Via_Vjb_free"] = v[:, 0, 0] * v[:, 1, 0]
    out["closure_spread_free"] = np.sum(v.sum(axis=1) ** 2, axis=-1)
    return out


def exact_polyhedron_table(n: int, lam) -> dict:
    pairs = corr_pairs(n, lam)
    table = {
        "V": moment_V(n, lam, 1),
        "V2": moment_V(n, lam, 2),
        "ViVj": pairs["ViVj"],
        "Via_Vib": pairs["Via_Vib"],
        "Via_Vjb": pairs["Via_Vjb"],
        "theta_xx": 0,
        "theta_xy": 0,
    }
    if n >= 4:
        table["tr_theta2"] = mean_trace_theta2_weingarten(n, lam)
    return table


def exact_free_table(n: int, lam, max_power: int = 4) -> dict:
    pairs = corr_pairs(n, lam)
    table = {f"V{k}_free": moment_V_free(n, lam, k) for k in range(1, max_power + 1)}
    table["ViVj_free"] = pairs["ViVj_free"]
    table["Via_Vjb_free"] = pairs["Via_Vjb_free"]
    table["closure_spread_free"] = pairs["closure_spread_free"]
    return table

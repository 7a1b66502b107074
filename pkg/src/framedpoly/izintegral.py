"""Itzykson-Zuber integral and its use as a generating function for face areas.

The normalized integral is

    int dU exp(i theta Tr(Y U^+ X U))
        = prod_{p<N} p! * det(e^{i theta x_j y_k}) / (Delta(X) Delta(Y) (i theta)^{N(N-1)/2})

with ``Delta(X) = prod_{i<j} (x_j - x_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import mpmath
import numpy as np

from .sampling import haar_unitary_batch
from .stats import batch_means, run_chunks

DEGENERATE_GAP = 1e-10
RICHARDSON_EPS = (1e-3, 5e-4)


@dataclass(frozen=True)
class SpectralPair:
    x: tuple
    y: tuple
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise ValueError("spectra must have the same length")

    @property
    def n(self) -> int:
        return len(self.x)


def _min_gap(v) -> float:
    s = np.sort(np.asarray(v, dtype=float))
    return float(np.min(np.diff(s))) if s.size > 1 else np.inf


def _log_vandermonde(v) -> tuple[float, int]:
    """(log|Delta|, sign) of prod_{i<j} (v_j - v_i)."""
    v = np.asarray(v, dtype=float)
    diffs = (v[None, :] - v[:, None])[np.triu_indices(v.size, 1)]
    return float(np.sum(np.log(np.abs(diffs)))), int(np.prod(np.sign(diffs)))


def _superfactorial(n: int) -> int:
    return math.prod(math.factorial(p) for p in range(1, n))


def _lost_digits(x, y, theta) -> float:
    # det/(Delta Delta) is O(1) while the matrix entries are O(1): the
    # cancellation costs roughly log10 of (Delta(X) Delta(Y) theta^(N(N-1)/2))^-1
    lx, _ = _log_vandermonde(x)
    ly, _ = _log_vandermonde(y)
    n = len(x)
    return max(0.0, -(lx + ly + n * (n - 1) / 2 * math.log(abs(theta))) / math.log(10))


def iz_determinant(p: SpectralPair, n: int | None = None) -> complex:
    """Closed-form IZ integral; raises on near-degenerate spectra.

    Uses double precision when little cancellation is expected and mpmath
    otherwise (small theta or clustered eigenvalues).
    """
    n = p.n if n is None else n
    if n != p.n:
        raise ValueError("N does not match the spectra")
    x, y, theta = p.x, p.y, p.theta
    if theta == 0:
        return 1 + 0j
    for v in (x, y):
        scale = max(1.0, float(np.max(np.abs(v))))
        if _min_gap(v) < DEGENERATE_GAP * scale:
            raise ValueError("near-degenerate spectrum; use iz_degenerate_Y")
    lost = _lost_digits(x, y, theta)
    pre = _superfactorial(n)
    power = n * (n - 1) // 2
    if lost < 4:
        m = np.exp(1j * theta * np.outer(x, y))
        det = np.linalg.det(m)
        lx, sx = _log_vandermonde(x)
        ly, sy = _log_vandermonde(y)
        scale = pre * sx * sy * math.exp(-lx - ly) * abs(theta) ** (-power)
        return complex(det * scale * (1j * math.copysign(1, theta)) ** (-power))
    with mpmath.workdps(int(20 + lost)):
        m = mpmath.matrix(n, n)
        for j in range(n):
            for k in range(n):
                m[j, k] = mpmath.expj(mpmath.mpf(theta) * mpmath.mpf(x[j]) * mpmath.mpf(y[k]))
        det = mpmath.det(m)
        vx = mpmath.fprod(mpmath.mpf(x[b]) - x[a] for a in range(n) for b in range(a + 1, n))
        vy = mpmath.fprod(mpmath.mpf(y[b]) - y[a] for a in range(n) for b in range(a + 1, n))
        val = pre * det / (vx * vy * (1j * mpmath.mpf(theta)) ** power)
        return complex(val)


@dataclass(frozen=True)
class _IZPhases:
    x: tuple
    y: tuple
    theta: float

    def __call__(self, rng, size):
        x = np.asarray(self.x)
        u = haar_unitary_batch(x.size, size, rng)
        # Tr(Y U^+ X U) = sum_jk x_j y_k |U_jk|^2
        tr = np.einsum("j,sjk,k->s", x, np.abs(u) ** 2, np.asarray(self.y))
        return np.exp(1j * self.theta * tr)


def iz_mc(p: SpectralPair, samples: int, seed: int, workers: int = 1) -> tuple[complex, complex]:
    """Haar MC of the IZ integrand: (mean, stderr_re + 1j*stderr_im)."""
    if p.theta == 0:
        return 1 + 0j, 0j
    vals = run_chunks(_IZPhases(p.x, p.y, p.theta), samples, seed, workers)
    return batch_means(vals)


def area_series_coefficient(n_faces: int, k: int, lam=1):
    """Coefficient of (i theta)^k in <exp(i theta V)>: (N-1)!(k+1)/(k+N-1)! lam^k."""
    if n_faces < 2:
        raise ValueError("need N >= 2")
    if k == 0:
        return Fraction(1)
    c = Fraction(math.factorial(n_faces - 1) * (k + 1), math.factorial(k + n_faces - 1))
    if isinstance(lam, (int, Fraction)):
        return c * Fraction(lam) ** k
    return float(c) * lam**k


def area_generating_series(n_faces: int, lam: float, theta: float, n_max: int) -> complex:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    total = 0j
    for k in range(n_max + 1):
        total += float(area_series_coefficient(n_faces, k)) * (1j * theta * lam) ** k
    return total


def _check_degenerate_domain(x, n):
    if n is None:
        n = len(x)
    if n != len(x):
        raise ValueError("N does not match the spectrum")
    if n < 4:
        raise ValueError("degenerate-Y formula needs N >= 4")
    if n > 8:
        raise ValueError("N > 8 exceeds the permutation-sum cost guard")
    return n


def iz_degenerate_Y(x, theta: float, n: int | None = None) -> complex:
    """IZ integral at Y = diag(1, 1, 0, ..., 0) by the confluent limit.

    The limit of det(e^{i theta x_j y_k})/Delta(Y) is the determinant with
    columns e^{i theta x}, i theta x e^{i theta x}, (i theta x)^m/m!
    (m = 0..N-3), which gives

        (N-1)! (N-2)! det[e^{i theta x}, x e^{i theta x}, x^m] / (Delta(X) (i theta)^{2N-4}).
    """
    x = np.asarray(x, dtype=float)
    n = _check_degenerate_domain(x, n)
    if theta == 0:
        return 1 + 0j
    if _min_gap(x) < DEGENERATE_GAP * max(1.0, float(np.max(np.abs(x)))):
        raise ValueError("degenerate X spectrum")
    with mpmath.workdps(40):
        m = mpmath.matrix(n, n)
        for j in range(n):
            e = mpmath.expj(mpmath.mpf(theta) * x[j])
            m[j, 0] = e
            m[j, 1] = x[j] * e
            for k in range(n - 2):
                m[j, k + 2] = mpmath.mpf(x[j]) ** k
        det = mpmath.det(m)
        vx = mpmath.fprod(mpmath.mpf(x[b]) - x[a] for a in range(n) for b in range(a + 1, n))
        pre = math.factorial(n - 1) * math.factorial(n - 2)
        return complex(pre * det / (vx * (1j * mpmath.mpf(theta)) ** (2 * n - 4)))


def degenerate_limit_printed(x, theta: float, n: int | None = None) -> complex:
    """Published limit of det(e^{i theta x_j y_k})/Delta(Y), evaluated literally.

    Signed sum over S_N of x^{N-2}..x^1 e^{i theta x} x e^{i theta x},
    times i^{N(N+1)/2} theta^{3(N-3)+1} / ((N-1)! prod_{k<=N-3} k!).
    """
    x = np.asarray(x, dtype=float)
    n = _check_degenerate_domain(x, n)
    total = 0j
    for perm in permutations(range(n)):
        sign = _perm_sign(perm)
        term = 1 + 0j
        for slot in range(n - 2):
            term *= x[perm[slot]] ** (n - 2 - slot)
        term *= np.exp(1j * theta * x[perm[n - 2]])
        term *= x[perm[n - 1]] * np.exp(1j * theta * x[perm[n - 1]])
        total += sign * term
    den = math.factorial(n - 1) * math.prod(math.factorial(k) for k in range(1, n - 2))
    return complex(1j ** (n * (n + 1) // 2) * theta ** (3 * (n - 3) + 1) * total / den)


def iz_degenerate_printed(x, theta: float, n: int | None = None) -> complex:
    """IZ integral obtained by inserting the published limit into the normalized formula."""
    x = np.asarray(x, dtype=float)
    n = _check_degenerate_domain(x, n)
    lx, sx = _log_vandermonde(x)
    power = n * (n - 1) // 2
    return complex(
        _superfactorial(n) * degenerate_limit_printed(x, theta, n) * sx * math.exp(-lx) / (1j * theta) ** power
    )


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def perturbed_y(n: int, eps: float) -> tuple[float, ...]:
    """Regulated degenerate spectrum, symmetric under eps -> -eps.

    Y = diag(1+eps, 1-eps, eps*(k - (N-3)/2) for k = 0..N-3).  Reversing eps
    only permutes the eigenvalues, so the regulated integral is even in eps.
    """
    zeros = [eps * (k - (n - 3) / 2) for k in range(n - 2)]
    return tuple([1 + eps, 1 - eps] + zeros)


def iz_degenerate_extrapolated(x, theta: float, eps=RICHARDSON_EPS) -> complex:
    """Richardson extrapolation in eps^2 of the regulated determinant (error O(eps^4))."""
    n = len(x)
    e1, e2 = eps
    f1 = iz_determinant(SpectralPair(x, perturbed_y(n, e1), theta))
    f2 = iz_determinant(SpectralPair(x, perturbed_y(n, e2), theta))
    return (e1**2 * f2 - e2**2 * f1) / (e1**2 - e2**2)

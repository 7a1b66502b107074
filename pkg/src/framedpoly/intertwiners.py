"""SU(2) intertwiner spaces: dimensions, traces, U(N) characters and coherent states.

Spins are stored doubled (``2j`` as an int) so half-integers stay exact.
Public functions accept ints, ``Fraction`` or floats that are half-integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .spinors import SpinorEnsemble, f_matrix
from .stats import batch_means, run_chunks

MC_MAX_N = 8
MC_MAX_J = 4


def twice(value) -> int:
    """Doubled spin as an int; rejects values that are not half-integers."""
    if isinstance(value, Spin):
        return value.doubled
    if isinstance(value, float):
        d = Fraction(round(2 * value))
        if abs(float(d) - 2 * value) > 1e-12:
            raise ValueError(f"{value} is not a half-integer")
    else:
        d = Fraction(value) * 2
    if d.denominator != 1:
        raise ValueError(f"{value} is not a half-integer")
    if d < 0:
        raise ValueError("spins must be >= 0")
    return int(d)


@dataclass(frozen=True)
class Spin:
    doubled: int

    def __post_init__(self):
        if self.doubled < 0:
            raise ValueError("spins must be >= 0")

    @classmethod
    def of(cls, value) -> "Spin":
        return cls(twice(value))

    @property
    def value(self) -> Fraction:
        return Fraction(self.doubled, 2)


@dataclass(frozen=True)
class IntertwinerSpaceLabel:
    n: int
    two_j: int
    two_overall: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.two_j < 0:
            raise ValueError("need N >= 1 and J >= 0")
        if self.two_overall is not None:
            if self.two_overall > self.two_j or (self.two_j - self.two_overall) % 2:
                raise ValueError("overall spin must be <= J and of the same integrality")

    def dimension(self) -> int:
        if self.two_overall is None:
            return _dim(self.n, self.two_j)
        return _dim_fixed(self.n, self.two_j, self.two_overall)


def _binom(n: int, k: int) -> int:
    # generalized: C(-1, 0) = 1 is needed for single-leg spaces
    if k < 0:
        return 0
    if k == 0:
        return 1
    if n < k:
        return 0
    return math.comb(n, k)


def _dim(n: int, two_j: int) -> int:
    if two_j % 2:
        return 0
    j = two_j // 2
    if n == 1:
        return 1 if j == 0 else 0
    return _binom(n + j - 1, j) * _binom(n + j - 2, j) // (j + 1)


def _dim_fixed(n: int, two_j: int, two_s: int) -> int:
    if two_s > two_j or (two_j - two_s) % 2:
        return 0
    plus = (two_j + two_s) // 2
    minus = (two_j - two_s) // 2
    num = (two_s + 1) * _binom(n + plus - 1, plus) * _binom(n + minus - 2, minus)
    return num // (plus + 1)


def dimension(n: int, total) -> int:
    """d_N[J] = C(N+J-1, J) C(N+J-2, J) / (J+1); zero for half-integer J."""
    if n < 1:
        raise ValueError("need N >= 1")
    return _dim(n, twice(total))


def dimension_fixed_spin(n: int, total, overall) -> int:
    """d_N[J, S]: N spins summing to J coupled to overall spin S."""
    if n < 1:
        raise ValueError("need N >= 1")
    return _dim_fixed(n, twice(total), twice(overall))


def _coupling_multiplicities(doubled: tuple[int, ...]) -> dict[int, int]:
    mult = {0: 1}
    for d in doubled:
        nxt: dict[int, int] = {}
        for s, m in mult.items():
            for t in range(abs(s - d), s + d + 1, 2):
                nxt[t] = nxt.get(t, 0) + m
        mult = nxt
    return mult


def covariant_count(spins, overall) -> int:
    """Multiplicity of spin ``overall`` in the tensor product of ``spins``."""
    spins = tuple(twice(s) for s in spins)
    if not spins:
        raise ValueError("need at least one spin")
    return _coupling_multiplicities(spins).get(twice(overall), 0)


def dimension_by_coupling(spins) -> int:
    """Number of invariants in the tensor product of ``spins``."""
    return covariant_count(spins, 0)


def spin_lists(n: int, two_total: int):
    """All ordered lists of N doubled spins summing to ``two_total``."""
    if n == 1:
        yield (two_total,)
        return
    for first in range(two_total + 1):
        for rest in spin_lists(n - 1, two_total - first):
            yield (first,) + rest


def dimension_brute_force(n: int, total) -> int:
    return sum(_coupling_multiplicities(s).get(0, 0) for s in spin_lists(n, twice(total)))


def dimension_fixed_brute_force(n: int, total, overall) -> int:
    s2 = twice(overall)
    return sum(_coupling_multiplicities(s).get(s2, 0) for s in spin_lists(n, twice(total)))


@dataclass(frozen=True)
class SumRuleReport:
    n: int
    total: Fraction
    target: int
    literal_sum: int
    leg_peeling_sum: int

    @property
    def literal_holds(self) -> bool:
        return self.literal_sum == self.target

    @property
    def leg_peeling_holds(self) -> bool:
        return self.leg_peeling_sum == self.target


def sum_rule_check(n: int, total) -> SumRuleReport:
    """Compare d_{N+1}[J] with both candidate sums over the overall spin S.

    literal:      sum_{S <= J} d_N[J, S]
    leg peeling:  sum_S d_N[J - S, S]  (the extra leg carries spin S)
    """
    two_j = twice(total)
    target = _dim(n + 1, two_j)
    literal = sum(_dim_fixed(n, two_j, s) for s in range(two_j % 2, two_j + 1, 2))
    peeled = sum(_dim_fixed(n, two_j - s, s) for s in range(0, two_j + 1))
    return SumRuleReport(n, Fraction(two_j, 2), target, literal, peeled)


@lru_cache(maxsize=None)
def leg_spectrum(n: int, two_j: int) -> tuple[tuple[int, int], ...]:
    """Pairs (2j, multiplicity) for the spin of one leg on the N-leg space.

    The leg with spin j couples to the other N-1 legs (total J - j) at
    overall spin j: count(j) = d_{N-1}[J - j, j].
    """
    if n < 2:
        raise ValueError("need N >= 2")
    out = []
    for d in range(two_j + 1):
        c = _dim_fixed(n - 1, two_j - d, d)
        if c:
            out.append((d, c))
    return tuple(out)


def _spectral_mean(n: int, total, weight) -> Fraction:
    two_j = twice(total)
    dim = _dim(n, two_j)
    if dim == 0:
        raise ValueError("empty intertwiner space")
    spec = leg_spectrum(n, two_j)
    return Fraction(sum(weight(d) * c for d, c in spec), dim)


def power_moment(n: int, total, k: int) -> Fraction:
    """Spectral <(2j)^k> of one leg."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return _spectral_mean(n, total, lambda d: d**k)


def trace_moment_V(n: int, total, k: int) -> Fraction:
    """Trace moment <V^k> of one leg.

    V_i is the area 2 j_i, but V_i^2 is the operator V_i.V_i whose eigenvalue
    is the Casimir 4 j (j+1); k = 2 therefore returns ``casimir_moment`` and
    every other k the spectral <(2j)^k>.
    """
    if k == 2:
        return casimir_moment(n, total)
    return power_moment(n, total, k)


def casimir_moment(n: int, total) -> Fraction:
    """Spectral <4 j (j+1)> = <|V_i|^2> of one leg."""
    return _spectral_mean(n, total, lambda d: d * (d + 2))


def trace_moment_closed_form(n: int, total, k: int) -> Fraction:
    """Closed forms: k=1 gives 2J/N, k=2 gives the Casimir 6J(J+N)/(N(N+1))."""
    j = Fraction(twice(total), 2)
    if k == 1:
        return 2 * j / n
    if k == 2:
        return 6 * j * (j + n) / (n * (n + 1))
    raise ValueError("closed form only for k = 1, 2")


def factorial_moment(n: int, total, m: int) -> Fraction:
    """Spectral <2j (2j+1) ... (2j+m)>."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return _spectral_mean(n, total, lambda d: math.prod(d + r for r in range(m + 1)))


def factorial_moment_closed(n: int, total, m: int) -> Fraction:
    """Factorial closed form J((m+2)J+2N+m-2)(m+1)! (N+J+m-2)!(N-1)! / ((N+J-1)!(N+m)!)."""
    two_j = twice(total)
    if two_j % 2:
        raise ValueError("closed form needs integer J")
    j = two_j // 2
    if j == 0:
        return Fraction(0)
    return Fraction(
        j * ((m + 2) * j + 2 * n + m - 2) * math.factorial(m + 1)
        * math.factorial(n + j + m - 2) * math.factorial(n - 1),
        math.factorial(n + j - 1) * math.factorial(n + m),
    )


def factorial_moment_binomial(n: int, total, m: int) -> Fraction | None:
    """The binomial rewriting J((m+2)J+2N+m-2)(m+1)! C(N+J+m-2, m-1)/C(N+m, m-1).

    Returns None for m = 0 where the binomials are undefined.
    """
    j = Fraction(twice(total), 2)
    if m < 1:
        return None
    jj = int(j)
    num = j * ((m + 2) * j + 2 * n + m - 2) * math.factorial(m + 1) * _binom(n + jj + m - 2, m - 1)
    return num / _binom(n + m, m - 1)


def factorial_moment_report(n: int, total, m: int) -> dict:
    truth = factorial_moment(n, total, m)
    closed = factorial_moment_closed(n, total, m)
    binom = factorial_moment_binomial(n, total, m)
    return {
        "spectral": truth,
        "factorial_form": closed,
        "factorial_form_agrees": closed == truth,
        "binomial_form": binom,
        "binomial_form_agrees": binom == truth,
    }


def spin_correlations(n: int, total) -> dict:
    """Two-leg correlations on the N-leg space.

    ``ViVk_printed`` comes from the sum rule N<V^2> + N(N-1)<ViVk> = 4J^2
    with the Casimir in place of <V^2>.  ``ViVk`` uses the spectral
    <(2j)^2>, which is what squaring sum_i 2 j_i = 2J actually gives.
    """
    if n < 3:
        raise ValueError("need N >= 3")
    j = Fraction(twice(total), 2)
    pairs = n * (n - 1)
    printed = j * j * Fraction(2 * (2 * n - 1), (n - 1) * n * (n + 1)) - Fraction(6, (n - 1) * (n + 1)) * j
    dots = -6 * j * (j + n) / ((n - 1) * n * (n + 1))
    if j == 0:
        return {"ViVk": Fraction(0), "ViVk_printed": Fraction(0), "Vi_dot_Vk": Fraction(0),
                "area_rule_printed": Fraction(0), "area_rule": Fraction(0), "closure_rule": Fraction(0)}
    honest = (4 * j * j - n * power_moment(n, total, 2)) / pairs
    return {
        "ViVk": honest,
        "ViVk_printed": printed,
        "Vi_dot_Vk": dots,
        "area_rule_printed": n * trace_moment_closed_form(n, total, 2) + pairs * printed,
        "area_rule": n * power_moment(n, total, 2) + pairs * honest,
        "closure_rule": n * casimir_moment(n, total) + pairs * dots,
    }


def _complete_homogeneous(x: np.ndarray, k_max: int) -> np.ndarray:
    """h_0..h_kmax of the variables ``x`` by the recursion over variables."""
    h = np.zeros(k_max + 1, dtype=complex)
    h[0] = 1
    for v in x:
        for k in range(1, k_max + 1):
            h[k] += v * h[k - 1]
    return h


def character(n: int, total, thetas) -> complex:
    """U(N) character of the two-row irrep (J, J) at eigenvalues e^{i theta}.

    Jacobi-Trudi: s_(J,J) = h_J^2 - h_{J+1} h_{J-1}.
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (n,):
        raise ValueError("need one angle per face")
    two_j = twice(total)
    if two_j % 2:
        return 0j
    j = two_j // 2
    if j == 0:
        return 1 + 0j
    h = _complete_homogeneous(np.exp(1j * thetas), j + 1)
    return complex(h[j] ** 2 - h[j + 1] * h[j - 1])


def character_vandermonde(n: int, total, thetas) -> complex:
    """Bialternant ratio det(x_i^{lam_j+N-j}) / det(x_i^{N-j}); needs distinct angles."""
    thetas = np.asarray(thetas, dtype=float)
    j = twice(total) // 2
    lam = [j, j] + [0] * (n - 2) if n >= 2 else [j]
    x = np.exp(1j * thetas)
    num = np.linalg.det(np.array([[xi ** (lam[c] + n - 1 - c) for c in range(n)] for xi in x]))
    den = np.linalg.det(np.array([[xi ** (n - 1 - c) for c in range(n)] for xi in x]))
    if abs(den) < 1e-12:
        raise ValueError("angles too close for the Vandermonde ratio")
    return complex(num / den)


def _pair(z, w) -> tuple[np.ndarray, np.ndarray]:
    z = z.spinors if isinstance(z, SpinorEnsemble) else np.asarray(z, dtype=complex)
    w = w.spinors if isinstance(w, SpinorEnsemble) else np.asarray(w, dtype=complex)
    if z.shape != w.shape:
        raise ValueError("ensembles must have the same N")
    return z, w


def coherent_overlap(total, z, w) -> complex:
    """(det sum_i |w_i><z_i|)^J."""
    z, w = _pair(z, w)
    two_j = twice(total)
    if two_j % 2:
        raise ValueError("coherent intertwiners need integer J")
    return complex(np.linalg.det(w.T @ z.conj()) ** (two_j // 2))


def coherent_overlap_pairs(total, z, w) -> complex:
    """Same overlap as (1/2 sum_ij [w_i|w_j> conj([z_i|z_j>))^J, by Cauchy-Binet."""
    z, w = _pair(z, w)
    two_j = twice(total)
    if two_j % 2:
        raise ValueError("coherent intertwiners need integer J")
    s = 0.5 * np.sum(f_matrix(w) * np.conj(f_matrix(z)))
    return complex(s ** (two_j // 2))


def coherent_norm(total, z) -> float:
    """(1/2 sum_ij |F_ij|^2)^J = (det sum_i |z_i><z_i|)^J."""
    z = z.spinors if isinstance(z, SpinorEnsemble) else np.asarray(z, dtype=complex)
    two_j = twice(total)
    if two_j % 2:
        raise ValueError("coherent intertwiners need integer J")
    d = 0.5 * float(np.sum(np.abs(f_matrix(z)) ** 2))
    return d ** (two_j // 2)


def coherent_norm_from_vectors(total, z) -> float:
    """2^{-2J} ((sum V_i)^2 - |sum vec V_i|^2)^J."""
    e = z if isinstance(z, SpinorEnsemble) else SpinorEnsemble(z)
    v = e.vectors()
    s = float(np.sum(np.linalg.norm(v, axis=1)))
    c = v.sum(axis=0)
    return (0.25 * (s * s - float(c @ c))) ** (twice(total) // 2)


def _mc_guard(n: int, j: int) -> None:
    if n < 2 or n > MC_MAX_N or j > MC_MAX_J:
        raise ValueError(f"MC estimators are guarded to 2 <= N <= {MC_MAX_N}, J <= {MC_MAX_J}")


def _gaussian_spinors(rng, size, n):
    g = rng.standard_normal((size, n, 2, 2))
    return (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2)


@dataclass(frozen=True)
class _WeightedDet:
    """(1/2 sum_ij phase_ij |F_ij|^2)^J / (J!(J+1)!) over Gaussian spinors."""

    n: int
    j: int
    thetas: tuple | None = None

    def __call__(self, rng, size):
        z = _gaussian_spinors(rng, size, self.n)
        f2 = np.abs(f_matrix(z)) ** 2
        if self.thetas is None:
            d = 0.5 * f2.sum(axis=(1, 2))
        else:
            th = np.asarray(self.thetas)
            d = 0.5 * np.sum(np.exp(1j * np.add.outer(th, th)) * f2, axis=(1, 2))
        return d**self.j / (math.factorial(self.j) * math.factorial(self.j + 1))


def dimension_mc(n: int, total, samples: int, seed: int, workers: int = 1) -> tuple[float, float]:
    """Gaussian integral E[det(sum |z><z|)^J] / (J!(J+1)!) estimating d_N[J]."""
    two_j = twice(total)
    if two_j % 2:
        raise ValueError("need integer J")
    j = two_j // 2
    _mc_guard(n, j)
    if j == 0:
        return 1.0, 0.0
    vals = run_chunks(_WeightedDet(n, j), samples, seed, workers)
    return batch_means(vals)


def character_mc(n: int, total, thetas, samples: int, seed: int, workers: int = 1) -> tuple[complex, complex]:
    """Gaussian integral of (1/2 sum_ij e^{i(th_i+th_j)} |F_ij|^2)^J / (J!(J+1)!)."""
    two_j = twice(total)
    if two_j % 2:
        raise ValueError("need integer J")
    j = two_j // 2
    _mc_guard(n, j)
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (n,):
        raise ValueError("need one angle per face")
    if j == 0:
        return 1 + 0j, 0j
    vals = run_chunks(_WeightedDet(n, j, tuple(float(t) for t in thetas)), samples, seed, workers)
    return batch_means(vals)


def asymptotic_dimension(n: int, total) -> float:
    """J^{2N-4}/((N-1)!(N-2)!) + N J^{2N-5}/((N-1)!(N-3)!)."""
    if n < 3:
        raise ValueError("need N >= 3")
    j = float(Fraction(twice(total), 2))
    lead = j ** (2 * n - 4) / (math.factorial(n - 1) * math.factorial(n - 2))
    return lead + n * j ** (2 * n - 5) / (math.factorial(n - 1) * math.factorial(n - 3))

"""Exact Weingarten calculus for polynomial integrals over U(N).

Permutations are tuples of images on ``0..n-1``; partitions are weakly
decreasing tuples of positive ints.  All values are ``fractions.Fraction``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import permutations as _perms

import numpy as np

MAX_DEGREE = 6


def partitions(n: int) -> list[tuple[int, ...]]:
    """All partitions of ``n`` in lexicographic order of their tuples."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = []

    def rec(rest, cap, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for p in range(min(rest, cap), 0, -1):
            acc.append(p)
            rec(rest - p, p, acc)
            acc.pop()

    rec(n, n, [])
    return sorted(out)


def cycles(perm) -> list[tuple[int, ...]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = perm[i]
        out.append(tuple(cyc))
    return out


def cycle_type(perm) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycles(perm)), reverse=True))


def num_cycles(perm) -> int:
    return len(cycles(perm))


def compose(a, b) -> tuple[int, ...]:
    """``(a o b)(m) = a[b[m]]``."""
    return tuple(a[x] for x in b)


def inverse(perm) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def from_cycle_type(ct) -> tuple[int, ...]:
    """A representative permutation with the given cycle type."""
    perm = []
    start = 0
    for length in ct:
        perm.extend(range(start + 1, start + length))
        perm.append(start)
        start += length
    return tuple(perm)


def class_size(ct) -> int:
    n = sum(ct)
    size = math.factorial(n)
    for length in set(ct):
        m = ct.count(length)
        size //= length**m * math.factorial(m)
    return size


def _beta_set(lam) -> tuple[int, ...]:
    k = len(lam)
    return tuple(lam[i] + k - 1 - i for i in range(k))


def _from_beta(beta) -> tuple[int, ...]:
    beta = sorted(beta, reverse=True)
    k = len(beta)
    return tuple(p for p in (beta[i] - (k - 1 - i) for i in range(k)) if p > 0)


@lru_cache(maxsize=None)
def _mn(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1 if not lam else 0
    r, rest = mu[0], mu[1:]
    beta = _beta_set(lam)
    occupied = set(beta)
    total = 0
    for b in beta:
        t = b - r
        if t < 0 or t in occupied:
            continue
        # border strip height = beads strictly between t and b
        height = sum(1 for c in beta if t < c < b)
        new = [c for c in beta if c != b] + [t]
        total += (-1) ** height * _mn(_from_beta(new), rest)
    return total


def sn_character(lam, ct) -> int:
    """Irreducible S_n character by Murnaghan-Nakayama."""
    lam, ct = tuple(lam), tuple(sorted(ct, reverse=True))
    if sum(lam) != sum(ct):
        raise ValueError("partition and cycle type have different weights")
    return _mn(lam, ct)


def schur_dimension(lam, n: int) -> int:
    """Dimension of the U(N) irrep with highest weight ``lam`` (hook-content)."""
    lam = tuple(lam)
    if len(lam) > n:
        return 0
    conj = [sum(1 for p in lam if p > j) for j in range(lam[0])] if lam else []
    num, den = 1, 1
    for i, row in enumerate(lam):
        for j in range(row):
            num *= n + j - i
            den *= (row - j - 1) + (conj[j] - i - 1) + 1
    return num // den


def catalan(c: int) -> int:
    if c < 0:
        raise ValueError("c must be >= 0")
    return math.comb(2 * c, c) // (c + 1)


@lru_cache(maxsize=None)
def _wg_by_type(ct: tuple[int, ...], n_dim: int) -> Fraction:
    n = sum(ct)
    total = Fraction(0)
    for lam in partitions(n):
        dim = sn_character(lam, (1,) * n)
        total += Fraction(dim * dim * sn_character(lam, ct), schur_dimension(lam, n_dim))
    return total / math.factorial(n) ** 2


def _as_cycle_type(sigma) -> tuple[int, ...]:
    sigma = tuple(sigma)
    if sorted(sigma) == list(range(len(sigma))):
        return cycle_type(sigma)
    return tuple(sorted(sigma, reverse=True))


def weingarten_exact(n: int, n_dim: int, sigma) -> Fraction:
    """Wg^{(n)}_N(sigma); ``sigma`` is a permutation of 0..n-1 or a cycle type."""
    if n_dim < n:
        raise ValueError("Gram matrix singular regime (N < n)")
    ct = _as_cycle_type(sigma) if n else ()
    if sum(ct) != n:
        raise ValueError("sigma does not act on n points")
    return _wg_by_type(ct, n_dim)


def weingarten_asymptotic(sigma, n_dim: int) -> float:
    """Leading large-N term ``N^-(n+|sigma|) prod_c (-1)^|c| Catalan(|c|)``."""
    ct = _as_cycle_type(sigma)
    n = sum(ct)
    transpositions = n - len(ct)
    coef = 1
    for length in ct:
        coef *= (-1) ** (length - 1) * catalan(length - 1)
    return coef / float(n_dim) ** (n + transpositions)


@lru_cache(maxsize=None)
def _sym_group(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(_perms(range(n)))


def _matching(a, b) -> list[tuple[int, ...]]:
    """Permutations p with ``a[m] == b[p[m]]`` for all m."""
    return [p for p in _sym_group(len(a)) if all(a[m] == b[p[m]] for m in range(len(a)))]


def polynomial_integral(rows_i, cols_j, rows_k, cols_l, n_dim: int) -> Fraction:
    """Haar integral of ``prod U[i_m, j_m] * conj(U[k_m, l_m])``."""
    n = len(rows_i)
    if not (len(cols_j) == len(rows_k) == len(cols_l) == n):
        raise ValueError("index tuples must share one length")
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds the cost guard {MAX_DEGREE}")
    if n == 0:
        return Fraction(1)
    if n_dim < n:
        raise ValueError("Gram matrix singular regime (N < n)")
    sig = _matching(rows_i, rows_k)
    tau = _matching(cols_j, cols_l)
    total = Fraction(0)
    for s in sig:
        for t in tau:
            total += _wg_by_type(cycle_type(compose(s, inverse(t))), n_dim)
    return total


def gram_matrix(n: int, n_dim: int) -> list[list[int]]:
    """``M[s][t] = N^cycles(s^-1 t)`` over S_n in itertools order."""
    group = _sym_group(n)
    return [[n_dim ** num_cycles(compose(inverse(s), t)) for t in group] for s in group]


def gram_inverse_check(n: int, n_dim: int) -> bool:
    """Exact check that the Weingarten matrix inverts the Gram matrix."""
    group = _sym_group(n)
    wg = {s: weingarten_exact(n, n_dim, s) for s in group}
    for s in group:
        s_inv = inverse(s)
        for r in group:
            acc = Fraction(0)
            for t in group:
                acc += wg[compose(s_inv, t)] * n_dim ** num_cycles(compose(inverse(t), r))
            if acc != (1 if s == r else 0):
                return False
    return True


_COMPONENT = {0: 0, "n": 0, "norm": 0, 1: 1, "x": 1, 2: 2, "y": 2, 3: 3, "z": 3}
_PAULI_INT = [
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def _cycle_trace(comps, tau) -> complex:
    value = 1 + 0j
    for cyc in cycles(tau):
        mat = np.eye(2, dtype=complex)
        for m in cyc:
            mat = mat @ _PAULI_INT[comps[m]]
        value *= np.trace(mat)
    return value


def vector_polynomial_average(monomial, n_dim: int, lam=1):
    """Ensemble average of a product of face observables.

    ``monomial`` is a sequence of ``(face, component)`` pairs, faces counted
    from 1 and components one of ``0``/``"n"`` (area), ``"x"``, ``"y"``,
    ``"z"``.  Each factor is ``lam * sum conj(U[k,a]) U[k,b] s[a,b]`` with
    ``s`` the identity or a Pauli matrix, integrated with Collins' formula.
    Returns a Fraction when ``lam`` is rational.
    """
    monomial = list(monomial)
    n = len(monomial)
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds the cost guard {MAX_DEGREE}")
    if n == 0:
        return Fraction(1)
    if n_dim < n:
        raise ValueError("Gram matrix singular regime (N < n)")
    faces = tuple(f for f, _ in monomial)
    if any(f < 1 or f > n_dim for f in faces):
        raise ValueError("face index out of range")
    comps = tuple(_COMPONENT[c] for c in monomial_components(monomial))
    sig = _matching(faces, faces)
    re = Fraction(0)
    im = Fraction(0)
    for t in _sym_group(n):
        tr = _cycle_trace(comps, t)
        if tr == 0:
            continue
        t_inv = inverse(t)
        w = sum((_wg_by_type(cycle_type(compose(s, t_inv)), n_dim) for s in sig), Fraction(0))
        re += w * int(round(tr.real))
        im += w * int(round(tr.imag))
    if im != 0:
        raise ArithmeticError("non-real average; monomial is not a real observable")
    if isinstance(lam, (int, Fraction)):
        return re * Fraction(lam) ** n
    return float(re) * lam**n


def monomial_components(monomial):
    return [c for _, c in monomial]

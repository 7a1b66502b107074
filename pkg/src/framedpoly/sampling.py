"""Random framed polyhedra, Haar unitaries and the closure-free ensemble.

Every sampler is a pure function of ``(seed, stream)``: the generator is a
PCG64 seeded through ``SeedSequence(seed, spawn_key=(stream,))``.  Batched
variants (``*_batch``) take a ready generator and return stacked arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spinors import SpinorEnsemble, UnitaryFrame

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class RandomSeed:
    seed: int
    stream: int = 0

    def rng(self) -> np.random.Generator:
        return make_rng(self.seed, self.stream)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, RandomSeed):
        return seed.rng()
    return make_rng(int(seed))


@dataclass(frozen=True)
class AngleCoordinates:
    """Angles of the recursive two-column parametrization.

    ``theta`` holds theta_1..theta_N, ``phi`` and ``alpha`` hold the entries
    k = 2..N, ``beta`` holds k = 3..N.  A leading batch axis is allowed.
    """

    theta: np.ndarray
    phi: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    @property
    def n(self) -> int:
        return np.shape(self.theta)[-1]

    def validate(self) -> None:
        n = self.n
        if n < 2:
            raise ValueError("need N >= 2")
        shapes = (np.shape(self.phi)[-1], np.shape(self.alpha)[-1], np.shape(self.beta)[-1])
        if shapes != (n - 1, n - 1, n - 2):
            raise ValueError(f"angle counts {shapes} do not match N={n}")
        if np.any(np.asarray(self.alpha) < 0) or np.any(np.asarray(self.alpha) > np.pi / 2):
            raise ValueError("alpha out of [0, pi/2]")
        if np.any(np.asarray(self.beta) < 0) or np.any(np.asarray(self.beta) > np.pi / 2):
            raise ValueError("beta out of [0, pi/2]")


def angles_to_columns_batch(a: AngleCoordinates) -> tuple[np.ndarray, np.ndarray]:
    """Build the orthonormal pair (v, w) recursively; returns arrays (..., N)."""
    theta = np.asarray(a.theta, dtype=float)
    phi = np.asarray(a.phi, dtype=float)
    alpha = np.asarray(a.alpha, dtype=float)
    beta = np.asarray(a.beta, dtype=float)
    n = theta.shape[-1]
    batch = theta.shape[:-1]
    v = np.zeros(batch + (n,), dtype=complex)
    w = np.zeros(batch + (n,), dtype=complex)
    e1 = np.exp(1j * theta[..., 0])
    e2 = np.exp(1j * theta[..., 1])
    ca, sa = np.cos(alpha[..., 0]), np.sin(alpha[..., 0])
    p2 = np.exp(1j * phi[..., 0])
    v[..., 0] = e1 * ca
    v[..., 1] = e2 * sa
    w[..., 0] = -p2 * e1 * sa
    w[..., 1] = p2 * e2 * ca
    for k in range(3, n + 1):
        ek = np.exp(1j * theta[..., k - 1])
        pk = np.exp(1j * phi[..., k - 2])
        ca, sa = np.cos(alpha[..., k - 2]), np.sin(alpha[..., k - 2])
        cb, sb = np.cos(beta[..., k - 3]), np.sin(beta[..., k - 3])
        prev_v = v[..., : k - 1].copy()
        w[..., : k - 1] = cb[..., None] * w[..., : k - 1] - (pk * sa * sb)[..., None] * prev_v
        w[..., k - 1] = pk * ek * ca * sb
        v[..., : k - 1] = ca[..., None] * prev_v
        v[..., k - 1] = ek * sa
    return v, w


def angles_to_columns(a: AngleCoordinates) -> UnitaryFrame:
    a.validate()
    v, w = angles_to_columns_batch(a)
    return UnitaryFrame(v, w, 1.0)


def sample_angles(n: int, count: int, rng: np.random.Generator) -> AngleCoordinates:
    """Draw angles from the Haar density by inverse CDF.

    alpha_k has CDF ``1 - cos^(2k-2)``, beta_k has CDF ``1 - cos^(2k-4)``.
    """
    if n < 2:
        raise ValueError("need N >= 2")
    theta = rng.uniform(0, TWO_PI, size=(count, n))
    phi = rng.uniform(0, TWO_PI, size=(count, n - 1))
    ka = np.arange(2, n + 1)
    alpha = np.arccos((1 - rng.random(size=(count, n - 1))) ** (1 / (2 * ka - 2)))
    kb = np.arange(3, n + 1)
    beta = np.arccos((1 - rng.random(size=(count, n - 2))) ** (1 / (2 * kb - 4)))
    return AngleCoordinates(theta, phi, alpha, beta)


def sample_polyhedra_batch(n: int, lam: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform closed ensembles, shape (count, N, 2)."""
    if n < 2:
        raise ValueError("need N >= 2")
    if lam <= 0:
        raise ValueError("need lambda > 0")
    v, w = angles_to_columns_batch(sample_angles(n, count, rng))
    return np.sqrt(lam) * np.stack([v, w], axis=-1)


def sample_polyhedron(n: int, lam: float, seed) -> SpinorEnsemble:
    return SpinorEnsemble(sample_polyhedra_batch(n, lam, 1, _rng(seed))[0])


def _ginibre(shape, rng) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _phase_fixed_qr(a: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(a)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]


def haar_unitary_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitaries from Ginibre QR with the R-diagonal phase correction."""
    if n < 1:
        raise ValueError("need N >= 1")
    return _phase_fixed_qr(_ginibre((count, n, n), rng))


def sample_haar_unitary(n: int, seed) -> np.ndarray:
    return haar_unitary_batch(n, 1, _rng(seed))[0]


def sample_gaussian_closed_batch(n: int, lam: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Closed ensembles from an orthonormalized Ginibre pair, shape (count, N, 2)."""
    if n < 2:
        raise ValueError("need N >= 2")
    q = _phase_fixed_qr(_ginibre((count, n, 2), rng))
    return np.sqrt(lam) * q


def sample_gaussian_closed(n: int, lam: float, seed) -> SpinorEnsemble:
    return SpinorEnsemble(sample_gaussian_closed_batch(n, lam, 1, _rng(seed))[0])


def _isotropic_directions(shape, rng) -> np.ndarray:
    g = rng.standard_normal(shape + (3,))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def sample_free_batch(n: int, lam: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Normals without closure: Dirichlet(2,...,2) areas times 2*lambda, isotropic directions.

    Returns shape (count, N, 3).
    """
    if n < 1:
        raise ValueError("need N >= 1")
    if lam <= 0:
        raise ValueError("need lambda > 0")
    g = rng.gamma(2.0, size=(count, n))
    areas = 2 * lam * g / g.sum(axis=1, keepdims=True)
    return areas[..., None] * _isotropic_directions((count, n), rng)


def sample_free_ensemble(n: int, lam: float, seed) -> np.ndarray:
    return sample_free_batch(n, lam, 1, _rng(seed))[0]

"""Spinor phase space of framed polyhedra.

A face is a complex 2-vector ``z = (z0, z1)``; its normal is ``<z|sigma|z>``
and its area is ``<z|z>``.  An ensemble of N spinors is closed when
``sum_i |z_i><z_i|`` is proportional to the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CLOSURE_TOL = 1e-12
MATCH_TOL = 1e-8

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class DegenerateError(ValueError):
    """Raised when an operation is undefined on a degenerate configuration."""


def _as_spinor(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape != (2,):
        raise ValueError(f"spinor must have shape (2,), got {z.shape}")
    return z


def dual(z) -> np.ndarray:
    """Structure-map conjugate ``|z] = (-conj(z1), conj(z0))``."""
    z = _as_spinor(z)
    return np.array([-np.conj(z[1]), np.conj(z[0])])


def spinor_to_vector(z) -> tuple[np.ndarray, float]:
    z = _as_spinor(z)
    c = np.conj(z[0]) * z[1]
    vec = np.array([2 * c.real, 2 * c.imag, abs(z[0]) ** 2 - abs(z[1]) ** 2])
    return vec, float(abs(z[0]) ** 2 + abs(z[1]) ** 2)


def vector_to_spinor(v, theta: float = 0.0) -> np.ndarray:
    """Inverse of :func:`spinor_to_vector` with overall phase ``theta``.

    On the z-axis the azimuth is undefined and is fixed to zero.
    """
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DegenerateError("degenerate normal")
    rho = np.hypot(v[0], v[1])
    phase = (v[0] + 1j * v[1]) / rho if rho > 0 else 1.0
    up = np.sqrt(max(norm + v[2], 0.0) / 2)
    down = np.sqrt(max(norm - v[2], 0.0) / 2)
    return np.exp(1j * theta) * np.array([up, phase * down])


@dataclass(frozen=True)
class SpinorEnsemble:
    """N spinors stored as an (N, 2) complex array; read-only once built."""

    spinors: np.ndarray

    def __post_init__(self):
        arr = np.array(self.spinors, dtype=complex, copy=True)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise ValueError("ensemble needs shape (N, 2) with N >= 2")
        arr.flags.writeable = False
        object.__setattr__(self, "spinors", arr)

    @classmethod
    def reference(cls, n: int = 2) -> "SpinorEnsemble":
        """The flat configuration: (1,0), (0,1) followed by zero spinors."""
        z = np.zeros((n, 2), dtype=complex)
        z[0, 0] = 1
        z[1, 1] = 1
        return cls(z)

    @property
    def n(self) -> int:
        return self.spinors.shape[0]

    @property
    def areas(self) -> np.ndarray:
        return np.sum(np.abs(self.spinors) ** 2, axis=1)

    @property
    def total_area(self) -> float:
        return float(np.sum(self.areas))

    @property
    def lam(self) -> float:
        return self.total_area / 2

    def vectors(self) -> np.ndarray:
        return spinor_vectors(self.spinors)

    def is_closed(self, tol: float = CLOSURE_TOL) -> bool:
        c, two_lam = closure_vector(self)
        return bool(np.linalg.norm(c) <= tol * max(two_lam, np.finfo(float).tiny))

    def __eq__(self, other):
        if not isinstance(other, SpinorEnsemble):
            return NotImplemented
        return np.array_equal(self.spinors, other.spinors)

    def __hash__(self):
        return hash(self.spinors.tobytes())


def spinor_vectors(z: np.ndarray) -> np.ndarray:
    """Normals of a stack of spinors, shape (..., N, 2) -> (..., N, 3)."""
    z = np.asarray(z)
    c = np.conj(z[..., 0]) * z[..., 1]
    return np.stack(
        [2 * c.real, 2 * c.imag, np.abs(z[..., 0]) ** 2 - np.abs(z[..., 1]) ** 2],
        axis=-1,
    )


def closure_vector(e: SpinorEnsemble) -> tuple[np.ndarray, float]:
    return spinor_vectors(e.spinors).sum(axis=0), e.total_area


def _frame_matrix(z: np.ndarray) -> np.ndarray:
    # X = sum_i |z_i><z_i|
    return z.T @ z.conj()


def close_ensemble(e: SpinorEnsemble) -> tuple[SpinorEnsemble, np.ndarray]:
    """Close an open ensemble with an SL(2,C) map.

    Diagonalizes ``X = g D g^-1`` and applies the inverse of
    ``Lambda = g sqrt(D) / det(D)^(1/4)``.  Returns the closed ensemble and
    ``Lambda`` (so that ``z_in = Lambda z_out``).
    """
    z = e.spinors
    x = _frame_matrix(z)
    two_lam = float(np.trace(x).real)
    det = float(np.linalg.det(x).real)
    if two_lam <= 0 or det <= (CLOSURE_TOL * two_lam) ** 2:
        raise DegenerateError("non-closable configuration")
    w, g = np.linalg.eigh(x)
    g = g / np.sqrt(np.linalg.det(g))
    lam = g @ np.diag(np.sqrt(w)) / det**0.25
    closed = z @ np.linalg.inv(lam).T
    return SpinorEnsemble(closed), lam


def close_ensemble_boost(e: SpinorEnsemble) -> tuple[SpinorEnsemble, np.ndarray]:
    """Close by rotating the closure vector onto +z and boosting along z.

    Independent of :func:`close_ensemble`; the two must agree on F.
    """
    c, two_lam = closure_vector(e)
    cn = float(np.linalg.norm(c))
    if two_lam <= 0 or two_lam - cn <= CLOSURE_TOL * two_lam:
        raise DegenerateError("non-closable configuration")
    if cn == 0.0:
        return e, np.eye(2, dtype=complex)
    u = vector_to_spinor(c / cn)
    # g(u) sends e_z to the closure direction, its adjoint undoes that
    rot = np.array([[u[0], -np.conj(u[1])], [u[1], np.conj(u[0])]]).conj().T
    half = two_lam / 2
    mu = ((half - cn / 2) / (half + cn / 2)) ** 0.25
    boost = np.diag([mu, 1 / mu])
    inv = boost @ rot
    return SpinorEnsemble(e.spinors @ inv.T), np.linalg.inv(inv)


def apply_sl2c(t, e: SpinorEnsemble) -> SpinorEnsemble:
    t = np.asarray(t, dtype=complex)
    if abs(np.linalg.det(t) - 1) > 1e-12:
        raise ValueError("SL(2,C) matrix must have unit determinant")
    return SpinorEnsemble(e.spinors @ t.T)


def apply_su2(g, e: SpinorEnsemble) -> SpinorEnsemble:
    g = np.asarray(g, dtype=complex)
    if np.linalg.norm(g.conj().T @ g - np.eye(2)) > 1e-12:
        raise ValueError("matrix is not unitary")
    return apply_sl2c(g, e)


def apply_unitary(u, e: SpinorEnsemble) -> SpinorEnsemble:
    """Cyclic U(N) action ``(Uz)_i = sum_j U_ij z_j``."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (e.n, e.n):
        raise ValueError(f"expected a {e.n}x{e.n} matrix")
    if np.linalg.norm(u.conj().T @ u - np.eye(e.n)) > 1e-10:
        raise ValueError("matrix is not unitary")
    return SpinorEnsemble(u @ e.spinors)


@dataclass(frozen=True)
class ObservableMatrices:
    E: np.ndarray
    F: np.ndarray


def e_matrix(z: np.ndarray) -> np.ndarray:
    return z.conj() @ z.T


def f_matrix(z: np.ndarray) -> np.ndarray:
    z0 = z[..., :, 0]
    z1 = z[..., :, 1]
    return z0[..., :, None] * z1[..., None, :] - z1[..., :, None] * z0[..., None, :]


def compute_observables(e: SpinorEnsemble) -> ObservableMatrices:
    return ObservableMatrices(e_matrix(e.spinors), f_matrix(e.spinors))


def dot_products_from_e(e_mat: np.ndarray) -> np.ndarray:
    v = np.real(np.diag(e_mat))
    return 2 * np.abs(e_mat) ** 2 - np.outer(v, v)


def dot_products_from_f(f_mat: np.ndarray, areas: np.ndarray) -> np.ndarray:
    return -2 * np.abs(f_mat) ** 2 + np.outer(areas, areas)


def plucker_residual(f) -> float:
    """Max |F_ij F_kl - F_ik F_jl + F_il F_jk| over all quadruples, scaled by max|F|^2."""
    f = np.asarray(f, dtype=complex)
    scale = float(np.max(np.abs(f))) if f.size else 0.0
    if scale == 0.0:
        return 0.0
    worst = 0.0
    for i in range(f.shape[0]):
        # indices j, k, l broadcast over the remaining three axes
        r = (
            f[i, :, None, None] * f[None, :, :]
            - f[i, None, :, None] * f[:, None, :]
            + f[i, None, None, :] * f[:, :, None]
        )
        worst = max(worst, float(np.max(np.abs(r))))
    return worst / scale**2


def _ket_bra_dual(ket: np.ndarray, w: np.ndarray) -> np.ndarray:
    # |ket>[w| with [w| = (-w1, w0)
    return np.outer(ket, np.array([-w[1], w[0]]))


def match_by_F(z: SpinorEnsemble, w: SpinorEnsemble) -> np.ndarray:
    """SL(2,C) matrix sending every ``w_i`` onto ``z_i`` when their F agree."""
    if z.n != w.n:
        raise ValueError("ensembles differ in size")
    fz = f_matrix(z.spinors)
    fw = f_matrix(w.spinors)
    scale = float(np.max(np.abs(fw)))
    if scale == 0.0:
        raise DegenerateError("rank-deficient")
    if np.max(np.abs(fz - fw)) > 1e-10 * scale:
        raise ValueError("F matrices do not match")
    k, l = np.unravel_index(np.argmax(np.abs(fw)), fw.shape)
    zs, ws = z.spinors, w.spinors
    lam = (_ket_bra_dual(zs[l], ws[k]) - _ket_bra_dual(zs[k], ws[l])) / fw[k, l]
    return lam


def match_by_F_closed(z: SpinorEnsemble, w: SpinorEnsemble) -> tuple[np.ndarray, bool]:
    """SU(2) element ``g`` with ``g w_i = z_i`` for closed ensembles of equal F.

    Returns ``(g, degenerate)``; when both ensembles vanish any g works and
    the identity is returned with ``degenerate=True``.
    """
    if z.n != w.n:
        raise ValueError("ensembles differ in size")
    if not (z.is_closed() and w.is_closed()):
        raise ValueError("both ensembles must be closed")
    if z.lam == 0.0 or w.lam == 0.0:
        return np.eye(2, dtype=complex), True
    fz, fw = f_matrix(z.spinors), f_matrix(w.spinors)
    if np.max(np.abs(fz - fw)) > 1e-10 * float(np.max(np.abs(fw))):
        raise ValueError("F matrices do not match")
    k = int(np.argmax(w.areas))
    zk, wk = z.spinors[k], w.spinors[k]
    g = np.outer(zk, wk.conj()) + _ket_bra_dual(dual(zk), wk)
    g /= np.sqrt(w.areas[k] * z.areas[k])
    return g, False


def cross_ratios(e: SpinorEnsemble) -> np.ndarray:
    """Complex cross-ratios ``(zeta_i - zeta_1)/(zeta_3 - zeta_2)`` for i >= 4."""
    z = e.spinors
    if e.n <= 3:
        return np.zeros(0, dtype=complex)
    z0 = z[:, 0]
    if np.any(np.abs(z0) <= 1e-15 * np.linalg.norm(z, axis=1)) or np.any(z0 == 0):
        raise DegenerateError("chart singularity")
    zeta = z[:, 1] / z0
    den = zeta[2] - zeta[1]
    if den == 0:
        raise DegenerateError("chart singularity")
    return (zeta[3:] - zeta[0]) / den


def cross_ratios_from_F(e: SpinorEnsemble) -> np.ndarray:
    """Same cross-ratios via ``(F_1i / F_23) z0_2 z0_3 / (z0_1 z0_i)``."""
    z = e.spinors
    if e.n <= 3:
        return np.zeros(0, dtype=complex)
    f = f_matrix(z)
    z0 = z[:, 0]
    if np.any(z0 == 0) or f[1, 2] == 0:
        raise DegenerateError("chart singularity")
    return f[0, 3:] / f[1, 2] * (z0[1] * z0[2]) / (z0[0] * z0[3:])


@dataclass(frozen=True)
class UnitaryFrame:
    """First two columns of a unitary matrix plus the area scale."""

    c1: np.ndarray
    c2: np.ndarray
    lam: float

    def orthonormality_residual(self) -> float:
        return float(
            max(
                abs(np.vdot(self.c1, self.c1) - 1),
                abs(np.vdot(self.c2, self.c2) - 1),
                abs(np.vdot(self.c1, self.c2)),
            )
        )

    def spinors(self) -> np.ndarray:
        return np.sqrt(self.lam) * np.stack([self.c1, self.c2], axis=1)


def reconstruct_frame(e: SpinorEnsemble) -> UnitaryFrame:
    if e.lam == 0.0:
        raise DegenerateError("zero total area")
    if not e.is_closed():
        raise ValueError("ensemble is not closed")
    s = np.sqrt(e.lam)
    return UnitaryFrame(e.spinors[:, 0] / s, e.spinors[:, 1] / s, e.lam)

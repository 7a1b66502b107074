"""Convex polygons from complex edge variables.

Each edge carries z_j; its normal is z_j^2 seen as a plane vector and its
length is |z_j|^2.  Closure is sum z_j^2 = 0 and the perimeter is sum |z_j|^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .sampling import _rng

CLOSURE_TOL = 1e-12
RECONSTRUCT_TOL = 1e-10
PARALLEL_TOL = 1e-12


@dataclass(frozen=True)
class PolygonConfig:
    z: np.ndarray

    def __post_init__(self):
        arr = np.array(self.z, dtype=complex, copy=True).reshape(-1)
        arr.flags.writeable = False
        object.__setattr__(self, "z", arr)

    @property
    def n(self) -> int:
        return self.z.size

    @property
    def perimeter(self) -> float:
        return float(np.sum(np.abs(self.z) ** 2))

    @property
    def closure(self) -> complex:
        return complex(np.sum(self.z**2))

    def is_closed(self, tol: float = CLOSURE_TOL) -> bool:
        return abs(self.closure) <= tol * max(self.perimeter, np.finfo(float).tiny)

    def __eq__(self, other):
        if not isinstance(other, PolygonConfig):
            return NotImplemented
        return np.array_equal(self.z, other.z)

    def __hash__(self):
        return hash(self.z.tobytes())


def _config(c) -> PolygonConfig:
    return c if isinstance(c, PolygonConfig) else PolygonConfig(c)


def closure_and_perimeter(c) -> tuple[complex, float]:
    c = _config(c)
    return c.closure, c.perimeter


def close_polygon(c) -> tuple[PolygonConfig, float, float]:
    """Close a configuration with a U(1) phase and an SL(2,R) squeeze.

    Returns ``(closed, theta, eta)``: all z are multiplied by e^{i theta} so
    that sum z^2 is real and nonnegative, then real parts are scaled by e^eta
    and imaginary parts by e^-eta.  The closed perimeter is
    sqrt(E^2 - |sum z^2|^2).
    """
    c = _config(c)
    closure, perim = c.closure, c.perimeter
    if perim <= 0 or abs(closure) >= perim * (1 - 1e-14):
        raise ValueError("non-closable configuration: |sum z^2| equals the perimeter")
    theta = -np.angle(closure) / 2 if abs(closure) > 0 else 0.0
    z = c.z * np.exp(1j * theta)
    re2 = float(np.sum(z.real**2))
    im2 = float(np.sum(z.imag**2))
    eta = 0.25 * np.log(im2 / re2)
    closed = PolygonConfig(np.exp(eta) * z.real + 1j * np.exp(-eta) * z.imag)
    return closed, float(theta), float(eta)


def closed_perimeter(c) -> float:
    closure, perim = closure_and_perimeter(c)
    return float(np.sqrt(perim**2 - abs(closure) ** 2))


@dataclass(frozen=True)
class Polygon:
    """Vertices traversed counterclockwise; normals are e_z x edge (pointing inward).

    ``groups`` lists, per edge, the indices of the input variables merged into it.
    """

    vertices: np.ndarray
    normals: np.ndarray
    lengths: np.ndarray
    groups: tuple = field(default=())
    chain_gap: float = 0.0

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def perimeter(self) -> float:
        return float(np.sum(np.linalg.norm(self.edges(), axis=1)))

    @property
    def area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def closure_residual(self) -> float:
        """Distance by which the chain of edge vectors misses its start."""
        return self.chain_gap

    def is_convex(self, tol: float = 1e-12) -> bool:
        e = self.edges()
        cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        scale = np.max(np.linalg.norm(e, axis=1)) ** 2
        return bool(np.all(cross >= -tol * scale))

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "normals": self.normals.tolist(),
            "edge_lengths": self.lengths.tolist(),
            "multiplicities": list(self.multiplicities),
        }


def reconstruct(c, tol: float = RECONSTRUCT_TOL) -> Polygon:
    """Build the convex polygon whose edge normals are z_j^2.

    Edges are sorted by normal angle; parallel normals merge into one edge.
    Edge j runs along n_j ^ e_z = (n_y, -n_x).  The vertex centroid is
    placed at the origin.
    """
    c = _config(c)
    if c.n < 2:
        raise ValueError("need at least two edges")
    w = c.z**2
    scale = c.perimeter
    if np.any(np.abs(w) <= 1e-15 * max(scale, 1e-300)):
        raise ValueError("zero-length edge")
    if not c.is_closed(tol):
        raise ValueError("configuration is not closed")
    ang = np.mod(np.angle(w), 2 * np.pi)
    order = np.argsort(ang, kind="stable")
    groups: list[list[int]] = []
    for idx in order:
        if groups:
            last = w[groups[-1][0]]
            if abs(np.angle(w[idx] / last)) <= PARALLEL_TOL * 2 * np.pi:
                groups[-1].append(int(idx))
                continue
        groups.append([int(idx)])
    if len(groups) > 1:
        first, last = w[groups[0][0]], w[groups[-1][0]]
        if abs(np.angle(first / last)) <= PARALLEL_TOL * 2 * np.pi:
            groups[0] = groups.pop() + groups[0]
    normals = np.array([[sum(w[i] for i in g).real, sum(w[i] for i in g).imag] for g in groups])
    edges = np.stack([normals[:, 1], -normals[:, 0]], axis=1)
    verts = np.vstack([np.zeros(2), np.cumsum(edges, axis=0)[:-1]])
    verts = verts - verts.mean(axis=0)
    gap = float(np.linalg.norm(edges.sum(axis=0)))
    poly = Polygon(verts, normals, np.linalg.norm(normals, axis=1), tuple(tuple(g) for g in groups), gap)
    if poly.closure_residual() > tol * scale:
        raise ValueError("vertex chain does not close")
    if len(groups) > 2 and not poly.is_convex():
        raise ValueError("reconstructed polygon is not convex")
    return poly


def _orthonormal_pair(n: int, count: int, rng) -> np.ndarray:
    g = rng.standard_normal((count, n, 2))
    q, r = np.linalg.qr(g)
    sign = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    sign[sign == 0] = 1
    return q * sign[:, None, :]


def sample_polygons_batch(n: int, perimeter: float, count: int, rng) -> np.ndarray:
    """Haar-random closed configurations, shape (count, N)."""
    if n < 2:
        raise ValueError("need N >= 2")
    if perimeter <= 0:
        raise ValueError("need a positive perimeter")
    o = _orthonormal_pair(n, count, rng)
    s = np.sqrt(perimeter / 2)
    return s * (o[..., 0] + 1j * o[..., 1])


def sample_polygon(n: int, perimeter: float, seed) -> PolygonConfig:
    return PolygonConfig(sample_polygons_batch(n, perimeter, 1, _rng(seed))[0])


def apply_orthogonal(o, c) -> PolygonConfig:
    c = _config(c)
    o = np.asarray(o, dtype=float)
    if o.shape != (c.n, c.n):
        raise ValueError(f"expected a {c.n}x{c.n} matrix")
    if np.linalg.norm(o.T @ o - np.eye(c.n)) > 1e-10:
        raise ValueError("matrix is not orthogonal")
    return PolygonConfig(o @ c.z)


def givens(n: int, i: int, j: int, t: float) -> np.ndarray:
    """exp(t (E_ij - E_ji)): rotation by angle t in the (i, j) plane."""
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError("need two distinct indices in range")
    g = np.eye(n)
    g[i, i] = g[j, j] = np.cos(t)
    g[i, j] = np.sin(t)
    g[j, i] = -np.sin(t)
    return g


def on_generator(i: int, j: int, t: float, c) -> PolygonConfig:
    c = _config(c)
    return apply_orthogonal(givens(c.n, i, j, t), c)


def on_generator_value(i: int, j: int, c) -> float:
    """e_ij = -i (conj(z_i) z_j - z_i conj(z_j))."""
    z = _config(c).z
    return float((-1j * (np.conj(z[i]) * z[j] - z[i] * np.conj(z[j]))).real)


@dataclass(frozen=True)
class NetworkLink:
    source: str
    target: str | None
    z_source: complex
    z_target: complex | None = None


@dataclass(frozen=True)
class ComplexNetwork:
    """Oriented graph with a complex variable on each half-link.

    A link with ``target=None`` is a boundary edge of its source polygon.
    """

    vertices: tuple
    links: tuple

    @classmethod
    def from_dict(cls, data: dict) -> "ComplexNetwork":
        def cplx(v):
            return None if v is None else complex(v[0], v[1])

        links = tuple(
            NetworkLink(str(l["source"]), None if l.get("target") is None else str(l["target"]),
                        cplx(l["z_source"]), cplx(l.get("z_target")))
            for l in data.get("links", [])
        )
        return cls(tuple(str(v) for v in data.get("vertices", [])), links)

    def to_dict(self) -> dict:
        def pair(v):
            return None if v is None else [v.real, v.imag]

        return {
            "vertices": list(self.vertices),
            "links": [
                {"source": l.source, "target": l.target, "z_source": pair(l.z_source), "z_target": pair(l.z_target)}
                for l in self.links
            ],
        }

    def vertex_config(self, v: str) -> PolygonConfig:
        zs = [l.z_source for l in self.links if l.source == v]
        zs += [l.z_target for l in self.links if l.target == v]
        return PolygonConfig(np.array(zs, dtype=complex))


@dataclass
class NetworkReport:
    closure: dict
    mismatch: dict
    failing_vertices: list
    failing_links: list

    @property
    def passed(self) -> bool:
        return not self.failing_vertices and not self.failing_links


def validate_network(net: ComplexNetwork, tol: float = RECONSTRUCT_TOL) -> NetworkReport:
    """Per-vertex closure and per-link length matching, relative to local scale."""
    known = set(net.vertices)
    for l in net.links:
        if l.source not in known or (l.target is not None and l.target not in known):
            raise ValueError("link references an unknown vertex")
        if l.target is not None and l.z_target is None:
            raise ValueError("interior link without a target value")
    closure, bad_v = {}, []
    for v in net.vertices:
        cfg = net.vertex_config(v)
        if cfg.n == 0:
            closure[v] = 0.0
            continue
        res = abs(cfg.closure) / max(cfg.perimeter, np.finfo(float).tiny)
        closure[v] = res
        if res > tol:
            bad_v.append(v)
    mismatch, bad_l = {}, []
    for k, l in enumerate(net.links):
        if l.target is None:
            continue
        a, b = abs(l.z_source) ** 2, abs(l.z_target) ** 2
        rel = abs(a - b) / max(a, b, np.finfo(float).tiny)
        mismatch[k] = rel
        if rel > tol:
            bad_l.append(k)
    return NetworkReport(closure, mismatch, bad_v, bad_l)


def polygon_json(poly: Polygon, meta: dict | None = None) -> str:
    data = poly.to_dict()
    if meta is not None:
        data = {"meta": meta, **data}
    return json.dumps(data, indent=2, sort_keys=False)


def polygon_svg(poly: Polygon, meta: dict | None = None) -> str:
    """Closed path rescaled so the larger bounding-box side is 1."""
    v = poly.vertices
    lo, hi = v.min(axis=0), v.max(axis=0)
    size = float(np.max(hi - lo)) or 1.0
    u = (v - lo) / size
    # SVG y grows downward
    pts = " ".join(f"{x:.10g},{1 - y:.10g}" for x, y in u)
    head = ""
    if meta is not None:
        head = f"<!-- {json.dumps(meta, sort_keys=True)} -->\n"
    return (
        head
        + '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.05 -0.05 1.1 1.1">\n'
        + f'  <polygon points="{pts}" fill="none" stroke="black" stroke-width="0.005"/>\n'
        + "</svg>\n"
    )

"""Command-line front end.

Exit codes: 0 ok, 1 a numeric gate tripped, 2 usage or range error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import intertwiners as qi
from . import izintegral as iz
from . import moments, polygons, sampling, serialize, weingarten
from .spinors import spinor_vectors
from .stats import batch_means, run_chunks, z_score

Z_GATE = 4.0


class UsageError(ValueError):
    pass


# samplers are module-level classes so worker processes can unpickle them
@dataclass(frozen=True)
class _PolyhedronBatch:
    n: int
    lam: float

    def __call__(self, rng, size):
        return sampling.sample_polyhedra_batch(self.n, self.lam, size, rng)


@dataclass(frozen=True)
class _FreeBatch:
    n: int
    lam: float

    def __call__(self, rng, size):
        return sampling.sample_free_batch(self.n, self.lam, size, rng)


@dataclass(frozen=True)
class _GaussianBatch:
    n: int
    lam: float

    def __call__(self, rng, size):
        return sampling.sample_gaussian_closed_batch(self.n, self.lam, size, rng)


@dataclass(frozen=True)
class _PolygonBatch:
    n: int
    perimeter: float

    def __call__(self, rng, size):
        return polygons.sample_polygons_batch(self.n, self.perimeter, size, rng)


POLY_OBS = ("V", "V2", "ViVj", "Via_Vib", "Via_Vjb", "theta_xx", "theta_xy", "tr_theta2")
FREE_OBS = ("V1_free", "V2_free", "V3_free", "V4_free", "ViVj_free", "Via_Vjb_free", "closure_spread_free")


@dataclass(frozen=True)
class _PolyhedronObservables:
    n: int
    lam: float

    def __call__(self, rng, size):
        obs = moments.polyhedron_observables(sampling.sample_polyhedra_batch(self.n, self.lam, size, rng))
        return tuple(obs[k] for k in POLY_OBS)


@dataclass(frozen=True)
class _FreeObservables:
    n: int
    lam: float

    def __call__(self, rng, size):
        obs = moments.free_observables(sampling.sample_free_batch(self.n, self.lam, size, rng))
        return tuple(obs[k] for k in FREE_OBS)


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(args) -> dict:
    return serialize.metadata(args.command, _config(args), getattr(args, "seed", None))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


def _floats(text: str | None) -> list[float]:
    if not text:
        return []
    return [float(t) for t in text.split(",")]


def _complexes(text: str | None) -> list[complex]:
    if not text:
        return []
    return [complex(t.strip().replace(" ", "")) for t in text.split(",")]


def _fmt_exact(v) -> tuple[str, str]:
    """Decimal string plus rational form for exact values."""
    if isinstance(v, (int, np.integer)):
        return str(int(v)), str(int(v))
    if isinstance(v, Fraction):
        return format(float(v), ".17g"), f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    return format(float(v), ".17g"), ""


def cmd_sample(args) -> int:
    _require(args.count >= 0, "--count must be >= 0")
    _require(args.area > 0, "--area must be positive")
    kind = args.kind
    n = args.n
    _require(n >= 2, "--n must be >= 2")
    fn = {"polyhedron": _PolyhedronBatch, "gaussian": _GaussianBatch, "free": _FreeBatch,
          "polygon": _PolygonBatch}[kind](n, args.area)
    data = run_chunks(fn, args.count, args.seed, args.workers)
    status = 0
    if kind in ("polyhedron", "gaussian"):
        data = np.empty((0, n, 2), dtype=complex) if data is None else data
        closure = np.linalg.norm(spinor_vectors(data).sum(axis=1), axis=-1) if len(data) else np.array([])
        if np.any(closure > 1e-12 * 2 * args.area):
            status = 1
        payload = {"kind": kind, "ensembles": [serialize.ensemble_to_dict(z) for z in data]}
        vecs = spinor_vectors(data)
        rows = [[s, i, v[0], v[1], v[2]] for s, e in enumerate(vecs) for i, v in enumerate(e)]
        header = ["sample", "face", "Vx", "Vy", "Vz"]
    elif kind == "free":
        data = np.empty((0, n, 3)) if data is None else data
        payload = {"kind": kind, "normals": [[[float(c) for c in v] for v in s] for s in data]}
        rows = [[s, i, v[0], v[1], v[2]] for s, e in enumerate(data) for i, v in enumerate(e)]
        header = ["sample", "face", "Vx", "Vy", "Vz"]
    else:
        data = np.empty((0, n), dtype=complex) if data is None else data
        for c in data:
            try:
                polygons.reconstruct(c)
            except ValueError:
                status = 1
        payload = {"kind": kind, "configs": [{"n": n, "z": [[float(v.real), float(v.imag)] for v in c]} for c in data]}
        rows = [[s, i, v.real, v.imag] for s, c in enumerate(data) for i, v in enumerate(c)]
        header = ["sample", "edge", "re", "im"]
    meta = _meta(args)
    if args.format == "csv":
        _emit(args, serialize.dumps_csv(meta, header, rows))
    else:
        _emit(args, serialize.dumps_json(meta, payload))
    return status


MOMENT_HEADER = ["observable", "N", "lambda", "exact", "mc_mean", "mc_stderr", "z_score", "samples", "seed", "flag"]


def _moment_rows(table: dict, names, samples, args) -> tuple[list, bool]:
    rows, tripped = [], False
    for k, name in enumerate(names):
        if name not in table:
            continue
        exact = float(table[name])
        if samples is None:
            rows.append([name, args.n, float(args.area), exact, None, None, None, 0, args.seed, ""])
            continue
        mean, se = batch_means(samples[k])
        z = z_score(mean, se, exact)
        flag = "FLAG" if abs(z) > Z_GATE else ""
        tripped |= bool(flag)
        rows.append([name, args.n, float(args.area), exact, mean, se, z, len(samples[k]), args.seed, flag])
    return rows, tripped


def cmd_moments(args) -> int:
    _require(args.n >= 3, "--n must be >= 3")
    _require(args.area > 0, "--area must be positive")
    _require(args.count >= 0, "--count must be >= 0")
    rows, tripped = [], False
    if args.ensemble in ("closed", "both"):
        samples = run_chunks(_PolyhedronObservables(args.n, args.area), args.count, args.seed, args.workers)
        r, t = _moment_rows(moments.exact_polyhedron_table(args.n, args.area), POLY_OBS, samples, args)
        rows += r
        tripped |= t
    if args.ensemble in ("free", "both"):
        # the free ensemble draws from its own stream family
        samples = run_chunks(_FreeObservables(args.n, args.area), args.count, args.seed + 1, args.workers)
        r, t = _moment_rows(moments.exact_free_table(args.n, args.area), FREE_OBS, samples, args)
        rows += r
        tripped |= t
    _emit(args, serialize.dumps_csv(_meta(args), MOMENT_HEADER, rows))
    return 1 if tripped else 0


def _cycle_notation(perm) -> str:
    cyc = [c for c in weingarten.cycles(perm) if len(c) > 1]
    if not cyc:
        return "e"
    return "".join("(" + "".join(str(i + 1) for i in c) + ")" for c in cyc)


def cmd_weingarten(args) -> int:
    n, dim = args.n, args.N
    _require(1 <= n <= weingarten.MAX_DEGREE, f"--n must be in 1..{weingarten.MAX_DEGREE}")
    _require(dim is not None and dim >= 1, "--N is required")
    _require(dim >= n, "Gram matrix singular regime (N < n)")
    rows = []
    for ct in weingarten.partitions(n):
        ct = tuple(sorted(ct, reverse=True))
        exact = weingarten.weingarten_exact(n, dim, ct)
        asym = weingarten.weingarten_asymptotic(ct, dim)
        ratio = asym / float(exact) if exact != 0 else None
        rows.append([n, _cycle_notation(weingarten.from_cycle_type(ct)), "-".join(map(str, ct)), dim,
                     exact.numerator, exact.denominator, asym, ratio])
    header = ["n", "permutation", "cycle_type", "N", "numerator", "denominator", "asymptotic", "ratio"]
    _emit(args, serialize.dumps_csv(_meta(args), header, rows))
    return 0


IZ_HEADER = ["method", "re", "im", "stderr_re", "stderr_im", "delta_re", "delta_im", "z_re", "z_im"]


def cmd_iz(args) -> int:
    methods = [m.strip() for m in args.method.split(",")]
    _require(all(m in ("det", "mc", "degenerate", "printed", "extrapolated", "series") for m in methods),
             "unknown --method")
    x, y = _floats(args.x), _floats(args.y)
    theta = args.theta
    if "series" in methods:
        _require(args.n is not None and args.n >= 2, "series needs --n >= 2")
        if not x:
            x = [1.0] + [0.0] * (args.n - 1)
        if not y:
            y = [args.area, args.area] + [0.0] * (args.n - 2)
    _require(bool(x), "--x is required")
    if not y:
        y = [1.0, 1.0] + [0.0] * (len(x) - 2)
    _require(len(x) == len(y), "--x and --y must have the same length")
    pair = iz.SpectralPair(x, y, theta)
    rows, values = [], {}
    for m in methods:
        se = 0j
        if m == "det":
            val = iz.iz_determinant(pair)
        elif m == "mc":
            _require(args.count > 0, "mc needs --count > 0")
            val, se = iz.iz_mc(pair, args.count, args.seed, args.workers)
        elif m == "degenerate":
            val = iz.iz_degenerate_Y(x, theta)
        elif m == "printed":
            val = iz.iz_degenerate_printed(x, theta)
        elif m == "extrapolated":
            val = iz.iz_degenerate_extrapolated(x, theta)
        else:
            val = iz.area_generating_series(args.n, 1.0, theta * args.area, args.terms)
        values[m] = (complex(val), complex(se))
    ref = values[methods[0]][0]
    tripped = False
    for m in methods:
        val, se = values[m]
        d = val - ref
        zr = z_score(val.real, se.real, ref.real) if se != 0 else None
        zi = z_score(val.imag, se.imag, ref.imag) if se != 0 else None
        if zr is not None and (abs(zr) > Z_GATE or abs(zi) > Z_GATE):
            tripped = True
        rows.append([m, val.real, val.imag, se.real, se.imag, d.real, d.imag, zr, zi])
    _emit(args, serialize.dumps_csv(_meta(args), IZ_HEADER, rows))
    return 1 if tripped else 0


INTERTWINER_HEADER = ["quantity", "method", "value", "value_imag", "rational", "stderr"]


def _exact_row(q, method, v):
    dec, rat = _fmt_exact(v)
    return [q, method, dec, None, rat, None]


def cmd_intertwiner(args) -> int:
    n, total = args.n, args.spin_sum
    _require(n is not None and n >= 2, "--n must be >= 2")
    _require(total is not None, "--spin-sum is required")
    try:
        two_j = qi.twice(Fraction(total))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    j = Fraction(two_j, 2)
    rows, tripped = [], False
    verb = args.verb
    if verb == "dim":
        rows.append(_exact_row("d_N[J]", "hook", qi.dimension(n, j)))
        if n <= 6 and two_j <= 8:
            rows.append(_exact_row("d_N[J]", "coupling", qi.dimension_brute_force(n, j)))
        if n >= 3:
            rows.append(_exact_row("d_N[J]", "asymptotic", qi.asymptotic_dimension(n, j)))
    elif verb == "dimfixed":
        _require(args.overall is not None, "dimfixed needs --overall")
        s = Fraction(args.overall)
        rows.append(_exact_row("d_N[J,S]", "hook", qi.dimension_fixed_spin(n, j, s)))
        if n <= 5 and two_j <= 8:
            rows.append(_exact_row("d_N[J,S]", "coupling", qi.dimension_fixed_brute_force(n, j, s)))
    elif verb == "sumrule":
        rep = qi.sum_rule_check(n, j)
        rows.append(_exact_row("d_{N+1}[J]", "hook", rep.target))
        rows.append(_exact_row("sum_S d_N[J,S]", "literal", rep.literal_sum))
        rows.append(_exact_row("sum_S d_N[J-S,S]", "leg-peeling", rep.leg_peeling_sum))
    elif verb == "trace":
        k = args.k
        rows.append(_exact_row(f"<V^{k}>", "spectral", qi.trace_moment_V(n, j, k)))
        if k in (1, 2):
            rows.append(_exact_row(f"<V^{k}>", "closed-form", qi.trace_moment_closed_form(n, j, k)))
        rows.append(_exact_row(f"<(2j)^{k}>", "spectral", qi.power_moment(n, j, k)))
    elif verb == "factorial":
        rep = qi.factorial_moment_report(n, j, args.k)
        rows.append(_exact_row(f"<2j..(2j+{args.k})>", "spectral", rep["spectral"]))
        rows.append(_exact_row(f"<2j..(2j+{args.k})>", "factorial-form", rep["factorial_form"]))
        if rep["binomial_form"] is not None:
            rows.append(_exact_row(f"<2j..(2j+{args.k})>", "binomial-form", rep["binomial_form"]))
    elif verb == "corr":
        for key, v in qi.spin_correlations(n, j).items():
            rows.append(_exact_row(key, "exact", v))
    elif verb == "char":
        th = _floats(args.thetas) or [0.0] * n
        _require(len(th) == n, "--thetas needs N angles")
        val = qi.character(n, j, th)
        rows.append(["character", "jacobi-trudi", val.real, val.imag, None, None])
        if args.count > 0:
            m, se = qi.character_mc(n, j, th, args.count, args.seed, args.workers)
            rows.append(["character", "mc", m.real, m.imag, None, abs(se)])
            tripped = abs(z_score(m.real, se.real, val.real)) > Z_GATE or abs(z_score(m.imag, se.imag, val.imag)) > Z_GATE
    elif verb == "cohnorm":
        _require(two_j % 2 == 0, "coherent states need integer J")
        e = sampling.sample_polyhedron(n, args.area, args.seed)
        rows.append(["coherent_norm", "det", qi.coherent_norm(j, e), None, None, None])
        rows.append(["coherent_norm", "vectors", qi.coherent_norm_from_vectors(j, e), None, None, None])
        rows.append(["lambda^(2J)", "closed", float(args.area) ** (2 * int(j)), None, None, None])
    elif verb == "mcdim":
        _require(args.count > 0, "mcdim needs --count > 0")
        exact = qi.dimension(n, j)
        m, se = qi.dimension_mc(n, j, args.count, args.seed, args.workers)
        rows.append(_exact_row("d_N[J]", "hook", exact))
        rows.append(["d_N[J]", "mc", m, None, None, se])
        tripped = abs(z_score(m, se, exact)) > Z_GATE
    _emit(args, serialize.dumps_csv(_meta(args), INTERTWINER_HEADER, rows))
    return 1 if tripped else 0


def cmd_polygon(args) -> int:
    verb = args.verb
    meta = _meta(args)
    if verb == "validate":
        _require(args.network is not None, "validate needs --network")
        with open(args.network, encoding="utf-8") as fh:
            net = polygons.ComplexNetwork.from_dict(json.load(fh))
        rep = polygons.validate_network(net)
        payload = {"passed": rep.passed, "closure": rep.closure,
                   "mismatch": {str(k): v for k, v in rep.mismatch.items()},
                   "failing_vertices": rep.failing_vertices, "failing_links": rep.failing_links}
        _emit(args, serialize.dumps_json(meta, payload))
        return 0 if rep.passed else 1
    if verb == "sample":
        _require(args.n is not None and args.n >= 2, "--n must be >= 2")
        _require(args.area > 0, "--area must be positive")
        cfg = polygons.sample_polygon(args.n, args.area, args.seed)
    else:
        z = _complexes(args.z)
        _require(len(z) >= 2, "--z needs at least two edge variables")
        cfg = polygons.PolygonConfig(z)
    extra = {}
    if verb == "close":
        cfg, theta, eta = polygons.close_polygon(cfg)
        extra = {"theta": theta, "eta": eta}
    try:
        poly = polygons.reconstruct(cfg)
    except ValueError as exc:
        if verb != "sample":
            raise UsageError(str(exc)) from exc
        # a sampled configuration must always reconstruct: that is a numeric failure
        print(f"framedpoly polygon: reconstruction failed: {exc}", file=sys.stderr)
        return 1
    if args.format == "svg":
        _emit(args, polygons.polygon_svg(poly, meta))
    else:
        payload = {"z": [[float(v.real), float(v.imag)] for v in cfg.z], **extra, **poly.to_dict()}
        _emit(args, serialize.dumps_json(meta, payload))
    return 0


def _selftest_checks():
    sq = polygons.reconstruct(np.exp(1j * np.pi / 4 * np.arange(4)))
    return [
        ("density N=2..8", all(moments.density(n) == moments.density_sphere_form(n) for n in range(2, 9))),
        ("Wg N=3 n=2", weingarten.weingarten_exact(2, 3, (1, 1)) == Fraction(1, 8)
         and weingarten.weingarten_exact(2, 3, (2,)) == Fraction(-1, 24)),
        ("d_4[2] = 20", qi.dimension(4, 2) == 20 == qi.dimension_brute_force(4, 2)),
        ("leg-peeling sum rule", all(qi.sum_rule_check(n, j).leg_peeling_holds for n in range(2, 6) for j in range(4))),
        ("series = moment_V", all(iz.area_series_coefficient(6, k) * math.factorial(k) == moments.moment_V(6, 1, k)
                                  for k in range(1, 13))),
        ("unit square", abs(sq.area - 1) < 1e-12 and sq.is_convex()),
        ("closed polyhedron", sampling.sample_polyhedron(6, 2.0, 7).is_closed()),
    ]


def cmd_selftest(args) -> int:
    checks = _selftest_checks()
    lines = [f"{'PASS' if ok else 'FAIL'} {name}\n" for name, ok in checks]
    _emit(args, "".join(lines))
    return 0 if all(ok for _, ok in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    p = argparse.ArgumentParser(prog="framedpoly", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common], help="sample ensembles or polygons")
    s.add_argument("--kind", choices=["polyhedron", "gaussian", "free", "polygon"], default="polyhedron")
    s.add_argument("--n", "--N", dest="n", type=int, required=True)
    s.add_argument("--area", type=float, default=1.0, help="lambda (half the total area) or polygon perimeter")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.set_defaults(func=cmd_sample)

    m = sub.add_parser("moments", parents=[common], help="exact vs Monte Carlo moment table")
    m.add_argument("--n", "--N", dest="n", type=int, required=True)
    m.add_argument("--area", type=float, default=1.0)
    m.add_argument("--count", type=int, default=100_000)
    m.add_argument("--ensemble", choices=["closed", "free", "both"], default="both")
    m.add_argument("--format", choices=["csv"], default="csv")
    m.set_defaults(func=cmd_moments)

    w = sub.add_parser("weingarten", parents=[common], help="exact Weingarten values by cycle type")
    w.add_argument("--n", type=int, required=True, help="degree")
    w.add_argument("--N", type=int, required=True, help="unitary group dimension")
    w.add_argument("--format", choices=["csv"], default="csv")
    w.set_defaults(func=cmd_weingarten)

    z = sub.add_parser("iz", parents=[common], help="Itzykson-Zuber integral")
    z.add_argument("--x", default=None, help="comma list of X eigenvalues")
    z.add_argument("--y", default=None, help="comma list of Y eigenvalues (default diag(1,1,0,...))")
    z.add_argument("--theta", type=float, default=0.5)
    z.add_argument("--method", default="det,mc",
                   help="comma list of det, mc, degenerate, printed, extrapolated, series; first is the reference")
    z.add_argument("--n", "--N", dest="n", type=int, default=None)
    z.add_argument("--area", type=float, default=1.0)
    z.add_argument("--terms", type=int, default=60)
    z.add_argument("--count", type=int, default=100_000)
    z.add_argument("--format", choices=["csv"], default="csv")
    z.set_defaults(func=cmd_iz)

    q = sub.add_parser("intertwiner", parents=[common], help="intertwiner dimensions, traces and characters")
    q.add_argument("verb", choices=["dim", "dimfixed", "sumrule", "trace", "factorial", "corr", "char",
                                    "cohnorm", "mcdim"])
    q.add_argument("--n", "--N", dest="n", type=int, required=True)
    q.add_argument("--spin-sum", "--J", dest="spin_sum", default=None)
    q.add_argument("--overall", default=None)
    q.add_argument("--k", type=int, default=2)
    q.add_argument("--thetas", default=None)
    q.add_argument("--area", type=float, default=1.0)
    q.add_argument("--count", type=int, default=0)
    q.add_argument("--format", choices=["csv"], default="csv")
    q.set_defaults(func=cmd_intertwiner)

    g = sub.add_parser("polygon", parents=[common], help="polygon sampling, closing, reconstruction")
    g.add_argument("verb", choices=["sample", "reconstruct", "close", "validate"])
    g.add_argument("--n", "--N", dest="n", type=int, default=None)
    g.add_argument("--area", type=float, default=1.0, help="perimeter")
    g.add_argument("--z", default=None, help="comma list of complex edge variables, e.g. 1,1+0.5j,1j")
    g.add_argument("--network", default=None, help="network fixture JSON")
    g.add_argument("--format", choices=["json", "svg"], default="json")
    g.set_defaults(func=cmd_polygon)

    t = sub.add_parser("selftest", parents=[common], help="fast exact self-checks")
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"framedpoly {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

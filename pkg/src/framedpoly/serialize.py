"""Plain-text formats shared by the CLI: ensemble JSON and CSV with a metadata header."""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from . import __version__
from .spinors import SpinorEnsemble


def metadata(subcommand: str, config: dict, seed) -> dict:
    return {"tool": "framedpoly", "version": __version__, "subcommand": subcommand,
            "config": config, "seed": seed}


def _float(x: float) -> float:
    # round-trip through '.17g' so the text form is exact and stable
    return float(format(float(x), ".17g"))


def ensemble_to_dict(e) -> dict:
    z = e.spinors if isinstance(e, SpinorEnsemble) else np.asarray(e)
    return {"n": int(z.shape[0]),
            "spinors": [[_float(a.real), _float(a.imag), _float(b.real), _float(b.imag)] for a, b in z]}


def ensemble_from_dict(d: dict) -> SpinorEnsemble:
    rows = d["spinors"]
    if len(rows) != d.get("n", len(rows)):
        raise ValueError("spinor count does not match n")
    z = np.array([[complex(r[0], r[1]), complex(r[2], r[3])] for r in rows])
    return SpinorEnsemble(z)


def dumps_json(meta: dict, payload: dict) -> str:
    return json.dumps({"meta": meta, **payload}, indent=2) + "\n"


def dumps_csv(meta: dict, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else (format(v, ".17g") if isinstance(v, float) else v) for v in r])
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict, list[dict]]:
    lines = text.splitlines()
    meta = json.loads(lines[0][2:]) if lines and lines[0].startswith("# ") else {}
    body = [ln for ln in lines if not ln.startswith("#")]
    return meta, list(csv.DictReader(body))

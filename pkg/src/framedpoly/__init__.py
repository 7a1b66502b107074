"""Framed polyhedra from spinor ensembles: sampling, exact moments and quantum counterparts."""

__version__ = "0.1.0"

from .spinors import SpinorEnsemble, close_ensemble, DegenerateError  # noqa: E402
from .sampling import sample_polyhedron, sample_haar_unitary, make_rng  # noqa: E402

__all__ = [
    "__version__",
    "SpinorEnsemble",
    "close_ensemble",
    "DegenerateError",
    "sample_polyhedron",
    "sample_haar_unitary",
    "make_rng",
]

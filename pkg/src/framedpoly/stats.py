"""Monte Carlo bookkeeping: batch-means error bars and chunked, seeded runs."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .sampling import make_rng

N_BATCHES = 32
CHUNK = 100_000


def batch_means(x, n_batches: int = N_BATCHES) -> tuple[float, float]:
    """Mean and batch-means standard error of a 1-d sample.

    Falls back to the plain standard error when there are fewer samples
    than batches.  Complex input returns complex mean and the stderr of the
    real and imaginary parts combined as ``se_re + 1j*se_im``.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x):
        m_re, s_re = batch_means(x.real, n_batches)
        m_im, s_im = batch_means(x.imag, n_batches)
        return complex(m_re, m_im), complex(s_re, s_im)
    n = x.shape[0]
    if n == 0:
        return float("nan"), float("nan")
    mean = float(np.mean(x))
    if n < 2 * n_batches:
        if n < 2:
            return mean, float("nan")
        return mean, float(np.std(x, ddof=1) / np.sqrt(n))
    size = n // n_batches
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return mean, float(np.std(means, ddof=1) / np.sqrt(n_batches))


def z_score(mean: float, stderr: float, exact: float) -> float:
    if not stderr > 0:
        return 0.0 if mean == exact else float("inf")
    return (mean - exact) / stderr


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    samples: int

    def z(self, exact) -> float:
        return z_score(self.mean, self.stderr, exact)


def estimate(x) -> Estimate:
    m, s = batch_means(x)
    return Estimate(m, s, int(np.shape(x)[0]))


def _run_chunk(fn, seed, index, size):
    return fn(make_rng(seed, index), size)


def run_chunks(fn, count: int, seed: int, workers: int = 1, chunk: int = CHUNK):
    """Evaluate ``fn(rng, size)`` over fixed-size chunks, one stream per chunk.

    ``fn`` returns an array (or tuple of arrays) with the sample axis first;
    results are concatenated in chunk order, so the output does not depend
    on the worker count.
    """
    sizes = [chunk] * (count // chunk)
    if count % chunk:
        sizes.append(count % chunk)
    jobs = list(enumerate(sizes))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(partial(_run_chunk, fn, seed), *zip(*jobs)))
    else:
        parts = [_run_chunk(fn, seed, i, s) for i, s in jobs]
    if not parts:
        return None
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(p) for p in zip(*parts))
    return np.concatenate(parts)

"""Timing harness: direct evaluation of f against table evaluation.

Every variant evaluates the same seeded abscissas as one batch per
repetition.  The first repetition is a discarded warm-up.  Each result carries
an order-independent checksum of its outputs so a wrong answer cannot hide
behind a fast time.
"""

import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .approx import eval_cpwl
from .lut import eval_batch

MIN_POINTS = 100_000
MIN_REPS = 5


@dataclass(frozen=True)
class BenchResult:
    variant: str
    n_segments: int  # 0 for direct evaluation
    mean_ns: float  # per evaluation
    median_ns: float
    std_ns: float
    repetitions: int
    checksum: float


def abscissas(a, b, n_points, seed):
    return np.random.default_rng(seed).uniform(a, b, n_points)


def checksum(values):
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def reference_checksum(v, xs):
    """Checksum through the scalar reference evaluator ``eval_cpwl``."""
    return math.fsum(eval_cpwl(v, x) for x in np.asarray(xs, dtype=float).tolist())


def _time(fn, xs, reps):
    out = fn(xs)  # warm-up, discarded
    per_eval = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        out = fn(xs)
        per_eval.append((time.perf_counter_ns() - t0) / xs.size)
    return per_eval, out


def _result(variant, n, per_eval, out):
    return BenchResult(
        variant, n,
        mean_ns=statistics.fmean(per_eval),
        median_ns=statistics.median(per_eval),
        std_ns=statistics.stdev(per_eval) if len(per_eval) > 1 else 0.0,
        repetitions=len(per_eval),
        checksum=checksum(out),
    )


def run_bench(fs, tables, n_points=MIN_POINTS, reps=MIN_REPS, seed=0):
    """Time ``fs.f`` and every table on one shared set of random abscissas.

    The first result is the direct evaluation; tables follow sorted by
    (kind, N).  All tables must cover the same domain.
    """
    if n_points < MIN_POINTS:
        raise ValueError(f"n_points must be at least {MIN_POINTS}")
    if reps < MIN_REPS:
        raise ValueError(f"reps must be at least {MIN_REPS}")
    tables = sorted(tables, key=lambda t: (t.kind, t.n_segments))
    if not tables:
        raise ValueError("need at least one table")
    a, b = tables[0].a, tables[0].b
    if any(t.a != a or t.b != b for t in tables):
        raise ValueError("all tables must share one domain")
    xs = abscissas(a, b, n_points, seed)

    results = [_result("direct", 0, *_time(lambda x: np.asarray(fs.f(x)), xs, reps))]
    for t in tables:
        per_eval, out = _time(lambda x, t=t: eval_batch(t, x), xs, reps)
        results.append(_result(f"{t.kind}-lut", t.n_segments, per_eval, out))
    return results

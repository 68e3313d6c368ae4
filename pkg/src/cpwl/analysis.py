"""Measured L2 errors, predicted error bounds, and convergence sweeps.

Predictions follow the asymptotic error model for CPWL approximation of C2
functions: per-interval interpolation error (1/sqrt(120)) |f''|max h^(5/2),
the equidistributed-partition estimate driven by the integral of |f''|^(2/5),
the uniform-partition estimate driven by ||f''||, and a 1/sqrt(6) reduction
for the orthogonal projection.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import approx, partition
from .quad import DEFAULT_TOL, INITIAL_CELLS, cumulative_table, difference_floor, integrate_cells

SQRT120 = math.sqrt(120.0)
SQRT6 = math.sqrt(6.0)

KINDS = ("uniform", "optimized")
METHODS = ("interp", "proj")
VARIANTS = tuple(f"{k}/{m}" for k in KINDS for m in METHODS)

# Dense sampling used for |f''|max on each interval (endpoints included).
MAX_SAMPLES = 1025
ZERO_SCAN = 4096
# A finite-difference f'' is only good to about sqrt(eps); integrals of it are
# converged relative to that level instead of to the absolute tolerance.
NUMERIC_FPP_RTOL = 1e-7
NUMERIC_DENSITY_GRID = 4096


def _fpp_rtol(fs):
    return 0.0 if fs.analytic_fpp else NUMERIC_FPP_RTOL


@dataclass(frozen=True)
class ErrorReport:
    function_id: str
    partition_kind: str
    method: Optional[str]
    n_segments: int
    measured_l2: float
    predicted: Optional[float] = None
    per_interval: Optional[np.ndarray] = None
    equalization_constant: Optional[float] = None


@dataclass(frozen=True)
class SweepRecord:
    n: int
    variant: str
    measured: float
    predicted: float


def measure(fs, v, tol=DEFAULT_TOL, method=None):
    """True L2 error of ``v`` against ``fs.f``, interval by interval.

    The squared-error integral on each interval is converged to relative
    accuracy ``tol``, with an absolute floor ``tol**2 * h_i / (b - a)`` so the
    total squared error is never worse than about ``tol**2``.  Where f is large
    the floor is raised to the roundoff level of ``f - v``.
    """
    knots = v.knots
    lo, hi = knots[:-1], knots[1:]

    def sq_err(x, k):
        return (fs.f(x) - v.on_cells(x, k)) ** 2

    span = knots[-1] - knots[0]
    floor = np.maximum(tol * tol * (hi - lo) / span,
                       difference_floor(lambda x, k: fs.f(x), v.on_cells, lo, hi))
    sq, _, _ = integrate_cells(sq_err, lo, hi, floor, rtol=tol, pass_cell=True)
    per = np.sqrt(np.maximum(sq, 0.0))
    kind = "uniform" if v.partition.is_uniform else "optimized"
    return ErrorReport(fs.id, kind, method, v.partition.n_segments,
                       float(np.sqrt(np.sum(per * per))), per_interval=per)


def fpp_max(fs, knots, samples=MAX_SAMPLES):
    """max |f''| on every interval of ``knots`` by dense sampling."""
    knots = np.asarray(knots, dtype=float)
    s = np.linspace(0.0, 1.0, samples)
    lo, h = knots[:-1, None], np.diff(knots)[:, None]
    x = lo + h * s[None, :]
    return np.max(np.abs(np.asarray(fs.fpp(x.ravel())).reshape(x.shape)), axis=1)


def interval_bounds(fs, knots):
    h = np.diff(np.asarray(knots, dtype=float))
    return fpp_max(fs, knots) * h ** 2.5 / SQRT120


def bound_interpolant_interval(fs, x_lo, x_hi):
    return float(interval_bounds(fs, [x_lo, x_hi])[0])


def equalization_constant(fs, knots):
    """Median over intervals of |f''|max h^(5/2)."""
    h = np.diff(np.asarray(knots, dtype=float))
    return float(np.median(fpp_max(fs, knots) * h ** 2.5))


def fpp_zeros(fs, a, b, scan=ZERO_SCAN):
    """Sign changes of f'' on ``[a, b]``, located by bisection."""
    t = np.linspace(a, b, scan + 1)
    d = np.asarray(fs.fpp(t), dtype=float)
    roots = list(t[1:-1][d[1:-1] == 0.0])
    for i in np.nonzero(d[:-1] * d[1:] < 0)[0]:
        lo, hi, dlo = t[i], t[i + 1], d[i]
        while True:
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            dm = float(fs.fpp(mid))
            if dm == 0.0:
                lo = hi = mid
                break
            if (dm < 0) == (dlo < 0):
                lo, dlo = mid, dm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return np.array(sorted(roots))


def _smoothstep(s):
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


def _smoothstep_d(s):
    return 30.0 * s * s * (1.0 - s) * (1.0 - s)


def density_integral(fs, a, b, tol=DEFAULT_TOL):
    """Integral of |f''|^(2/5) over ``[a, b]``.

    The integrand has |x - r|^(2/5) cusps at zeros r of f''.  The range is
    split at those zeros and each piece is mapped through a smoothstep so
    the cusps land on flat endpoints of the substitution.
    """
    edges = np.concatenate([[a], fpp_zeros(fs, a, b), [b]])
    edges = edges[np.concatenate([[True], np.diff(edges) > 0])]
    lo, w = edges[:-1], np.diff(edges)
    lkd = partition.knot_density(fs)

    def g(s, k):
        return lkd(lo[k] + w[k] * _smoothstep(s)) * w[k] * _smoothstep_d(s)

    n = lo.size
    if not fs.analytic_fpp:
        # Finite-difference noise near a root of f'' is amplified by the 2/5
        # power beyond what adaptive refinement can certify; a fixed fine grid
        # averages it out instead.
        return math.fsum(cumulative_table(lambda s, k=k: g(s, k), 0.0, 1.0, NUMERIC_DENSITY_GRID)[1][-1]
                         for k in range(n))
    vals, _, _ = integrate_cells(g, np.zeros(n), np.ones(n), tol / n, pass_cell=True)
    return float(np.sum(vals))


def fpp_norm(fs, a, b, tol=DEFAULT_TOL):
    """||f''|| in L2([a, b])."""
    edges = np.linspace(a, b, INITIAL_CELLS + 1)
    vals, _, _ = integrate_cells(lambda x: np.asarray(fs.fpp(x)) ** 2, edges[:-1], edges[1:],
                                 tol / INITIAL_CELLS, rtol=_fpp_rtol(fs))
    return math.sqrt(max(math.fsum(vals.tolist()), 0.0))


def bound_interpolant_optimized(fs, a, b, n_segments, tol=DEFAULT_TOL):
    return density_integral(fs, a, b, tol) ** 2.5 / (n_segments ** 2 * SQRT120)


def estimate_projection_optimized(fs, a, b, n_segments, tol=DEFAULT_TOL):
    return bound_interpolant_optimized(fs, a, b, n_segments, tol) / SQRT6


def bound_interpolant_uniform(fs, a, b, n_segments, tol=DEFAULT_TOL):
    return (b - a) ** 2 / (n_segments ** 2 * SQRT120) * fpp_norm(fs, a, b, tol)


def estimate_projection_uniform(fs, a, b, n_segments, tol=DEFAULT_TOL):
    return bound_interpolant_uniform(fs, a, b, n_segments, tol) / SQRT6


def optimization_gain(fs, a, b, tol=DEFAULT_TOL):
    """Predicted error ratio optimized/uniform for the interpolant (N-free)."""
    uni = bound_interpolant_uniform(fs, a, b, 1, tol)
    if uni == 0.0:
        return 1.0
    return bound_interpolant_optimized(fs, a, b, 1, tol) / uni


def predicted(fs, a, b, n_segments, kind, method, tol=DEFAULT_TOL):
    table = {
        ("uniform", "interp"): bound_interpolant_uniform,
        ("uniform", "proj"): estimate_projection_uniform,
        ("optimized", "interp"): bound_interpolant_optimized,
        ("optimized", "proj"): estimate_projection_optimized,
    }
    try:
        fn = table[kind, method]
    except KeyError:
        raise ValueError(f"unknown variant {kind}/{method}") from None
    return fn(fs, a, b, n_segments, tol)


def make_partition(fs, a, b, n_segments, kind):
    if kind == "uniform":
        return partition.uniform(a, b, n_segments)
    if kind == "optimized":
        return partition.optimized(fs, a, b, n_segments)
    raise ValueError(f"unknown partition kind {kind!r}")


def approximate(fs, p, method, tol=DEFAULT_TOL):
    if method == "interp":
        return approx.interpolant(fs, p)
    if method == "proj":
        return approx.project(fs, p, tol)
    raise ValueError(f"unknown method {method!r}")


def report(fs, a, b, n_segments, kind, method, tol=DEFAULT_TOL):
    """Build one approximation, measure it and attach its prediction."""
    p = make_partition(fs, a, b, n_segments, kind)
    v = approximate(fs, p, method, tol)
    r = measure(fs, v, tol, method)
    return ErrorReport(fs.id, kind, method, n_segments, r.measured_l2,
                       predicted(fs, a, b, n_segments, kind, method, tol),
                       r.per_interval, equalization_constant(fs, p.knots))


def convergence_sweep(fs, a, b, n_list, variants=VARIANTS, tol=DEFAULT_TOL):
    """Measured and predicted errors for every (n, variant), ordered by n then variant."""
    unknown = set(variants) - set(VARIANTS)
    if unknown:
        raise ValueError(f"unknown variants {sorted(unknown)}")
    # Both predictions scale exactly as 1/N^2; compute the constants once.
    scale = {
        "uniform": bound_interpolant_uniform(fs, a, b, 1, tol),
        "optimized": bound_interpolant_optimized(fs, a, b, 1, tol),
    }
    records = []
    for n in sorted(set(int(n) for n in n_list)):
        parts = {}
        for variant in VARIANTS:
            if variant not in variants:
                continue
            kind, method = variant.split("/")
            if kind not in parts:
                parts[kind] = make_partition(fs, a, b, n, kind)
            v = approximate(fs, parts[kind], method, tol)
            pred = scale[kind] / n ** 2 / (SQRT6 if method == "proj" else 1.0)
            records.append(SweepRecord(n, variant, measure(fs, v, tol).measured_l2, pred))
    return records


def loglog_slope(ns, values):
    """Least-squares slope of log(values) against log(ns)."""
    slope, _ = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(values, float)), 1)
    return float(slope)

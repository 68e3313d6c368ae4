"""Adaptive Simpson quadrature.

All integrands are vectorised callables: they receive a 1-D float array and
return an array of the same shape (scalars are broadcast).  The batch routine
:func:`integrate_cells` integrates one integrand over many disjoint cells at
once, refining every unconverged subinterval in the same numpy pass.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, InvalidDensity, InvalidInterval, QuadratureNoConvergence

DEFAULT_TOL = 1e-10
MAX_DEPTH = 60
# Live subintervals allowed before giving up (guards against noisy integrands).
MAX_ITEMS = 1 << 21
# integrate() starts from this many equal cells.  An odd count keeps the first
# Simpson probes off dyadic points, where a piecewise-linear integrand built on
# a uniform grid can vanish and fake early convergence.
INITIAL_CELLS = 7
# Richardson differences below this many ulps of the local integral are noise.
_ROUNDOFF_ULPS = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    value: float
    est_abs_error: float
    evaluations: int


def _call(g, x, cell=None):
    y = g(x) if cell is None else g(x, cell)
    y = np.broadcast_to(np.asarray(y, dtype=float), x.shape)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise EvaluationError(f"integrand is not finite at x={bad!r}")
    return y


def integrate_cells(g, lo, hi, tol, *, rtol=0.0, pass_cell=False, max_depth=MAX_DEPTH):
    """Integrate ``g`` over each cell ``[lo[k], hi[k]]`` independently.

    ``tol`` is an absolute tolerance per cell (scalar or array); ``rtol``
    additionally accepts a subinterval whose Richardson difference is within
    ``rtol`` of its own integral, which for nonnegative integrands bounds the
    relative error of the cell total.  With
    ``pass_cell=True`` the integrand is called as ``g(x, k)`` where ``k`` holds
    the owning cell index of every abscissa, which lets a single call integrate
    cell-dependent weights such as hat functions.

    Returns ``(values, est_abs_errors, evaluations)`` as arrays of length
    ``len(lo)``.  Refinement order is deterministic, so results are
    bit-reproducible.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    ncell = lo.size
    if np.any(~(lo < hi)):
        raise InvalidInterval("every cell needs lo < hi")
    tol = np.broadcast_to(np.asarray(tol, dtype=float), lo.shape).copy()

    owner = np.arange(ncell)
    cell = owner if pass_cell else None

    mid = 0.5 * (lo + hi)
    pts = np.concatenate([lo, mid, hi])
    fv = _call(g, pts, None if cell is None else np.tile(cell, 3))
    fl, fm, fh = fv[:ncell], fv[ncell:2 * ncell], fv[2 * ncell:]
    whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh)

    values = np.zeros(ncell)
    errors = np.zeros(ncell)
    evals = np.full(ncell, 3, dtype=np.int64)
    depth = 0

    while owner.size:
        lq = 0.5 * (lo + mid)
        rq = 0.5 * (mid + hi)
        n = owner.size
        fq = _call(g, np.concatenate([lq, rq]),
                   None if cell is None else np.concatenate([owner, owner]))
        flq, frq = fq[:n], fq[n:]
        np.add.at(evals, owner, 2)

        half = 0.5 * (hi - lo)
        left = half / 6.0 * (fl + 4.0 * flq + fm)
        right = half / 6.0 * (fm + 4.0 * frq + fh)
        delta = left + right - whole
        noise = _ROUNDOFF_ULPS * (np.abs(left) + np.abs(right))
        limit = np.maximum(15.0 * tol, noise)
        if rtol:
            limit = np.maximum(limit, 15.0 * rtol * np.abs(left + right))
        done = (np.abs(delta) <= limit) | (half <= 0) | (lq <= lo) | (rq >= hi)

        if np.any(done):
            np.add.at(values, owner[done], left[done] + right[done] + delta[done] / 15.0)
            np.add.at(errors, owner[done], np.abs(delta[done]) / 15.0)

        keep = ~done
        if not np.any(keep):
            break
        depth += 1
        if depth > max_depth or 2 * int(keep.sum()) > MAX_ITEMS:
            partial = values.copy()
            np.add.at(partial, owner[keep], left[keep] + right[keep])
            raise QuadratureNoConvergence(
                f"adaptive Simpson did not converge (depth {depth}, "
                f"{int(keep.sum())} open subintervals)", partial)

        k = keep
        owner = np.concatenate([owner[k], owner[k]])
        lo, mid, hi = (np.concatenate([lo[k], mid[k]]),
                       np.concatenate([lq[k], rq[k]]),
                       np.concatenate([mid[k], hi[k]]))
        fl, fm, fh = (np.concatenate([fl[k], fm[k]]),
                      np.concatenate([flq[k], frq[k]]),
                      np.concatenate([fm[k], fh[k]]))
        whole = np.concatenate([left[k], right[k]])
        tol = np.concatenate([tol[k], tol[k]]) * 0.5

    return values, errors, evals


def difference_floor(u, v, lo, hi, samples=9):
    """Per-cell roundoff floor for integrating ``(u - v)**2``.

    The squared difference of two nearly equal values carries absolute noise
    of about ``2 |u - v| eps |u|``; no tolerance below that (times the cell
    width) is attainable.  Both callables take ``(x, cell)``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    s = np.linspace(0.0, 1.0, samples)
    x = lo[:, None] + (hi - lo)[:, None] * s[None, :]
    cell = np.repeat(np.arange(lo.size), samples).reshape(x.shape)
    uu = np.asarray(u(x, cell), dtype=float)
    vv = np.asarray(v(x, cell), dtype=float)
    scale = np.max(np.abs(uu) + np.abs(vv), axis=1)
    diff = np.max(np.abs(uu - vv), axis=1)
    return _ROUNDOFF_ULPS * scale * diff * (hi - lo)


def integrate(g, a, b, tol=DEFAULT_TOL):
    """Integrate ``g`` over ``[a, b]`` to absolute tolerance ``tol``."""
    if not a < b:
        raise InvalidInterval(f"need a < b, got [{a}, {b}]")
    if not tol > 0:
        raise ValueError("tol must be positive")
    edges = np.linspace(a, b, INITIAL_CELLS + 1)
    edges[-1] = b
    v, e, n = integrate_cells(g, edges[:-1], edges[1:], tol / INITIAL_CELLS)
    return QuadResult(math.fsum(v.tolist()), float(np.sum(e)), int(np.sum(n)))


def l2_distance(u, v, a, b, tol=DEFAULT_TOL):
    """L2 distance between two callables on ``[a, b]``.

    ``tol`` applies to the squared distance integral.
    """
    r = integrate(lambda x: (_call(u, x) - _call(v, x)) ** 2, a, b, tol)
    return float(np.sqrt(max(r.value, 0.0)))


def cumulative_table(g, a, b, m):
    """Running integral of a nonnegative density on a uniform grid.

    Returns ``(t, G)`` with ``m + 1`` grid abscissas and ``G[j]`` the integral
    of ``g`` from ``a`` to ``t[j]``, accumulated cell by cell with Simpson's
    rule.  ``G`` is not normalised.
    """
    if not a < b:
        raise InvalidInterval(f"need a < b, got [{a}, {b}]")
    if m < 2:
        raise ValueError("m must be at least 2")
    t = np.linspace(a, b, m + 1)
    t[0], t[-1] = a, b
    mid = 0.5 * (t[:-1] + t[1:])
    gt = _call(g, t)
    gm = _call(g, mid)
    if np.any(gt < 0) or np.any(gm < 0):
        raise InvalidDensity("density has negative samples")
    cells = np.diff(t) / 6.0 * (gt[:-1] + 4.0 * gm + gt[1:])
    G = np.empty(m + 1)
    G[0] = 0.0
    np.cumsum(cells, out=G[1:])
    return t, G

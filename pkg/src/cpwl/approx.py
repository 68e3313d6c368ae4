"""Continuous piecewise-linear approximations in the hat-function basis.

Two constructions live here: the linear interpolant (nodal values are f at the
knots) and the L2 orthogonal projection (nodal values solve the tridiagonal
Gramian system).  ``best_free_segment`` is the unconstrained least-squares
line on a single interval, used to study how far the projection is from a
union of independently fitted segments.
"""

import bisect
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import EvaluationError, OutOfDomain, SingularSystem
from .partition import Partition
from .quad import DEFAULT_TOL, difference_floor, integrate_cells


@dataclass(frozen=True, eq=False)
class CpwlFunction:
    partition: Partition
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.partition.knots.shape:
            raise ValueError("need exactly one value per knot")
        if not np.all(np.isfinite(values)):
            raise EvaluationError("nodal values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def knots(self):
        return self.partition.knots

    @cached_property
    def _lists(self):
        return self.knots.tolist(), self.values.tolist()

    def __call__(self, x):
        """Vectorised evaluation (no domain check)."""
        return np.interp(x, self.knots, self.values)

    def on_cells(self, x, cell):
        """Evaluate at ``x`` using the linear piece of each given cell."""
        k, v = self.knots, self.values
        k0, k1 = k[cell], k[cell + 1]
        h = k1 - k0
        return (k1 - x) / h * v[cell] + (x - k0) / h * v[cell + 1]


@dataclass(frozen=True)
class TridiagonalSystem:
    """``sub[i]`` couples row i+1 to column i; ``sup[i]`` couples row i to i+1."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.sub) != n - 1 or len(self.sup) != n - 1 or len(self.rhs) != n:
            raise ValueError("inconsistent tridiagonal system shapes")

    def is_diagonally_dominant(self):
        off = np.zeros(len(self.diag))
        off[1:] += np.abs(self.sub)
        off[:-1] += np.abs(self.sup)
        return bool(np.all(np.abs(self.diag) > off))

    def dense(self):
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)


@dataclass(frozen=True)
class FreeSegment:
    dy_left: float
    dy_right: float
    sq_error: float


def interpolant(fs, p):
    with np.errstate(all="ignore"):
        values = np.asarray(fs.f(p.knots), dtype=float)
    if not np.all(np.isfinite(values)):
        bad = p.knots[~np.isfinite(values)][0]
        raise EvaluationError(f"{fs.id} is not finite at knot x={bad!r}")
    return CpwlFunction(p, values)


def gramian(p):
    """Mass matrix of the hat basis on ``p`` (rhs zeroed)."""
    h = p.widths
    diag = np.zeros(h.size + 1)
    diag[:-1] += h / 3.0
    diag[1:] += h / 3.0
    off = h / 6.0
    return TridiagonalSystem(off.copy(), diag, off.copy(), np.zeros(h.size + 1))


def thomas_solve(sys):
    """Solve a tridiagonal system by forward elimination and back substitution.

    No pivoting; the system is expected to be diagonally dominant.
    """
    a = [float(v) for v in sys.sub]
    b = [float(v) for v in sys.diag]
    c = [float(v) for v in sys.sup]
    d = [float(v) for v in sys.rhs]
    n = len(b)
    cp = [0.0] * n
    dp = [0.0] * n
    if b[0] == 0.0:
        raise SingularSystem("zero pivot in row 0")
    cp[0] = c[0] / b[0] if n > 1 else 0.0
    dp[0] = d[0] / b[0]
    for i in range(1, n):
        pivot = b[i] - a[i - 1] * cp[i - 1]
        if pivot == 0.0:
            raise SingularSystem(f"zero pivot in row {i}")
        if i < n - 1:
            cp[i] = c[i] / pivot
        dp[i] = (d[i] - a[i - 1] * dp[i - 1]) / pivot
    x = [0.0] * n
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return np.array(x)


def hat_moments(f, knots, tol):
    """Per-interval integrals of f against the falling and rising hat halves.

    Returns ``(left, right)`` where ``left[k] = int f (x_{k+1}-x)/h_k`` and
    ``right[k] = int f (x-x_k)/h_k`` over interval k.
    """
    lo, hi = knots[:-1], knots[1:]
    h = hi - lo

    def falling(x, k):
        return f(x) * (hi[k] - x) / h[k]

    def rising(x, k):
        return f(x) * (x - lo[k]) / h[k]

    left, _, _ = integrate_cells(falling, lo, hi, tol, pass_cell=True)
    right, _, _ = integrate_cells(rising, lo, hi, tol, pass_cell=True)
    return left, right


def project(fs, p, tol=DEFAULT_TOL):
    """L2 orthogonal projection of ``fs.f`` onto the CPWL space of ``p``."""
    n = p.n_segments
    left, right = hat_moments(fs.f, p.knots, tol / (n + 1) / 2.0)
    sys = gramian(p)
    rhs = np.zeros(n + 1)
    rhs[:-1] += left
    rhs[1:] += right
    sys = TridiagonalSystem(sys.sub, sys.diag, sys.sup, rhs)
    return CpwlFunction(p, thomas_solve(sys))


def free_segments(fs, knots, tol=DEFAULT_TOL):
    """Best unconstrained line on every interval of ``knots``.

    Returns arrays ``(dy_left, dy_right, sq_error)``; offsets are relative to
    f at the interval endpoints.
    """
    knots = np.asarray(knots, dtype=float)
    lo, hi = knots[:-1], knots[1:]
    h = hi - lo
    b0, b1 = hat_moments(fs.f, knots, tol)
    # Normal equations h [[1/3, 1/6], [1/6, 1/3]] c = b.
    c0 = (4.0 * b0 - 2.0 * b1) / h
    c1 = (4.0 * b1 - 2.0 * b0) / h
    f_lo = np.asarray(fs.f(lo), dtype=float)
    f_hi = np.asarray(fs.f(hi), dtype=float)

    def line(x, k):
        t = (x - lo[k]) / h[k]
        return (1.0 - t) * c0[k] + t * c1[k]

    def residual_sq(x, k):
        return (fs.f(x) - line(x, k)) ** 2

    floor = np.maximum(tol * tol * h / (knots[-1] - knots[0]),
                       difference_floor(lambda x, k: fs.f(x), line, lo, hi))
    sq, _, _ = integrate_cells(residual_sq, lo, hi, floor, rtol=tol, pass_cell=True)
    return c0 - f_lo, c1 - f_hi, np.maximum(sq, 0.0)


def best_free_segment(fs, x_lo, x_hi, tol=DEFAULT_TOL):
    if not x_lo < x_hi:
        raise ValueError(f"need x_lo < x_hi, got [{x_lo}, {x_hi}]")
    dl, dr, sq = free_segments(fs, [x_lo, x_hi], tol)
    return FreeSegment(float(dl[0]), float(dr[0]), float(sq[0]))


def eval_cpwl(v, x):
    """Reference scalar evaluation: binary search plus linear blend."""
    knots, values = v._lists
    if not knots[0] <= x <= knots[-1]:
        raise OutOfDomain(x, knots[0], knots[-1])
    i = min(bisect.bisect_right(knots, x) - 1, len(knots) - 2)
    k0, k1 = knots[i], knots[i + 1]
    h = k1 - k0
    return (k1 - x) / h * values[i] + (x - k0) / h * values[i + 1]

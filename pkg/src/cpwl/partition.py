"""Uniform and error-equalizing partitions of an interval."""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, InvalidInterval, InvalidPartition
from .quad import cumulative_table

log = logging.getLogger(__name__)

# Relative spacing below which two knots are considered coincident.
MIN_SPACING = 1e-12
# Total knot density below this means f is affine on the interval.
DEGENERATE_DENSITY = 1e-300


@dataclass(frozen=True, eq=False)
class Partition:
    """Ordered knots ``x_0 < ... < x_N``.

    ``fallback`` is set when an optimized partition degenerated to a uniform
    one because f'' vanishes on the whole interval.
    """

    knots: np.ndarray
    is_uniform: bool
    fallback: bool = False

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float)
        if knots.ndim != 1 or knots.size < 2:
            raise InvalidPartition("a partition needs at least two knots")
        if not np.all(np.isfinite(knots)):
            raise InvalidPartition("knots must be finite")
        span = knots[-1] - knots[0]
        if not span > 0 or np.any(np.diff(knots) < MIN_SPACING * span):
            raise InvalidPartition("knots must be strictly increasing")
        knots.flags.writeable = False
        object.__setattr__(self, "knots", knots)

    @property
    def n_segments(self):
        return self.knots.size - 1

    @property
    def a(self):
        return float(self.knots[0])

    @property
    def b(self):
        return float(self.knots[-1])

    @property
    def widths(self):
        return np.diff(self.knots)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.is_uniform == other.is_uniform and np.array_equal(self.knots, other.knots)

    __hash__ = None


def _check_interval(a, b, n_segments):
    if not a < b:
        raise InvalidInterval(f"invalid interval [{a}, {b}]: need a < b")
    if int(n_segments) != n_segments or n_segments < 1:
        raise ValueError(f"n_segments must be a positive integer, got {n_segments}")


def uniform(a, b, n_segments):
    _check_interval(a, b, n_segments)
    n = int(n_segments)
    knots = a + (b - a) * (np.arange(n + 1) / n)
    knots[0], knots[-1] = a, b
    return Partition(knots, True)


def knot_density(fs):
    """Local knot density |f''|^(2/5) as a vectorised callable."""
    def lkd(x):
        d2 = np.asarray(fs.fpp(x), dtype=float)
        if not np.all(np.isfinite(d2)):
            raise EvaluationError(f"non-finite f'' for {fs.id}")
        return np.abs(d2) ** 0.4
    return lkd


def grid_size(n_segments):
    return max(4096, 64 * int(n_segments))


def invert_levels(t, F, levels):
    """Leftmost abscissas where the sampled nondecreasing map ``F`` reaches ``levels``.

    Binary search over the grid, then linear interpolation inside the cell.
    """
    j = np.searchsorted(F, levels, side="left")
    j = np.clip(j, 1, F.size - 1)
    f0, f1 = F[j - 1], F[j]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(f1 > f0, (levels - f0) / (f1 - f0), 0.0)
    return t[j - 1] + np.clip(frac, 0.0, 1.0) * (t[j] - t[j - 1])


def optimized(fs, a, b, n_segments, grid=None):
    """Partition whose knots equidistribute |f''|^(2/5) over ``[a, b]``.

    Interior knots solve ``F(x_i) = i/N`` for the normalised cumulative knot
    density ``F``.  An affine ``f`` falls back to the uniform partition.
    """
    _check_interval(a, b, n_segments)
    n = int(n_segments)
    m = grid or grid_size(n)
    t, G = cumulative_table(knot_density(fs), a, b, m)
    total = G[-1]
    if total <= DEGENERATE_DENSITY:
        log.warning("f'' vanishes on [%g, %g]; using a uniform partition", a, b)
        p = uniform(a, b, n)
        return Partition(p.knots, True, fallback=True)

    F = G / total
    knots = np.empty(n + 1)
    knots[0], knots[-1] = a, b
    if n > 1:
        knots[1:-1] = invert_levels(t, F, np.arange(1, n) / n)
    # Plateau tie-breaking can produce coincident knots; push them apart.
    nudge = MIN_SPACING * (b - a)
    for i in range(1, n):
        if knots[i] - knots[i - 1] < nudge:
            knots[i] = knots[i - 1] + nudge
            while knots[i] - knots[i - 1] < nudge:
                knots[i] = np.nextafter(knots[i], np.inf)
    if n > 1 and knots[-1] - knots[-2] < nudge:
        raise EvaluationError("cannot place knots: density concentrated at the right endpoint")
    return Partition(knots, False)

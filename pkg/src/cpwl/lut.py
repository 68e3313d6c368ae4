"""Fast CPWL evaluation from lookup tables.

Uniform tables store only the endpoints and nodal values; the cell index is
computed arithmetically.  Both paths blend with the weights ``(x_i - x) / h``
and ``(x - x_{i-1}) / h`` computed separately, rather than forming ``1 - delta``,
which keeps full relative accuracy where the result is small.  Non-uniform tables also store the knots and locate
the cell with a branch-free binary search: a fixed number of steps, each a
conditional select rather than a data-dependent branch.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import OutOfDomain

KINDS = ("uniform", "nonuniform")
POLICIES = ("strict", "clamp")


class _Lookup(NamedTuple):
    scale: Optional[float]
    values: list
    knots: Optional[list]
    steps: tuple
    padded: Optional[list]
    padded_array: Optional[np.ndarray]


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class LutTable:
    kind: str
    a: float
    b: float
    values: np.ndarray
    knots: Optional[np.ndarray] = None
    policy: str = "strict"
    _lookup: _Lookup = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValueError(f"invalid table domain [{a}, {b}]")
        values = _frozen(self.values)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("a table needs at least two values")
        if not np.all(np.isfinite(values)):
            raise ValueError("table values must be finite")
        knots = None
        if self.kind == "uniform":
            if self.knots is not None:
                raise ValueError("uniform tables store no knots")
        else:
            if self.knots is None:
                raise ValueError("nonuniform tables need knots")
            knots = _frozen(self.knots)
            if knots.shape != values.shape:
                raise ValueError("knots and values differ in length")
            if not np.all(np.isfinite(knots)) or np.any(np.diff(knots) <= 0):
                raise ValueError("knots must be finite and strictly increasing")
            if knots[0] != a or knots[-1] != b:
                raise ValueError("first and last knots must equal the endpoints")
        for name, val in (("a", a), ("b", b), ("values", values), ("knots", knots)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "_lookup", self._prepare())

    def _prepare(self):
        n = self.n_segments
        vals = self.values.tolist()
        if self.kind == "uniform":
            return _Lookup(n / (self.b - self.a), vals, None, (), None, None)
        steps = []
        step = 1
        while step < n:
            steps.append(step)
            step *= 2
        steps.reverse()
        size = 2 * steps[0] if steps else 1
        # Cell-start knots padded with +inf so every probe index is valid.
        padded = self.knots[:-1].tolist() + [math.inf] * (size - n)
        return _Lookup(None, vals, self.knots.tolist(), tuple(steps), padded,
                       np.array(padded))

    @property
    def n_segments(self):
        return self.values.size - 1

    def __call__(self, x):
        if np.ndim(x):
            return eval_batch(self, x)
        return evaluate(self, x)

    def __eq__(self, other):
        if not isinstance(other, LutTable):
            return NotImplemented
        same_knots = (self.knots is None and other.knots is None) or (
            self.knots is not None and other.knots is not None
            and self.knots.tobytes() == other.knots.tobytes())
        return (self.kind == other.kind and self.policy == other.policy
                and np.float64(self.a).tobytes() == np.float64(other.a).tobytes()
                and np.float64(self.b).tobytes() == np.float64(other.b).tobytes()
                and self.values.tobytes() == other.values.tobytes() and same_knots)

    __hash__ = None


def from_cpwl(v, policy="strict", kind=None):
    """Freeze a CpwlFunction into a table.

    ``kind`` defaults to ``uniform`` exactly when the partition is uniform;
    passing ``"nonuniform"`` forces the search path for any partition.
    """
    p = v.partition
    if kind is None:
        kind = "uniform" if p.is_uniform else "nonuniform"
    if kind == "uniform" and not p.is_uniform:
        raise ValueError("a non-uniform partition cannot use the uniform path")
    knots = p.knots if kind == "nonuniform" else None
    return LutTable(kind, p.a, p.b, v.values, knots, policy)


def locate(t, x):
    """Cell index ``i`` with ``knots[i] <= x < knots[i+1]`` (last cell closed).

    Only meaningful for ``x`` inside ``[a, b]``.
    """
    lk = t._lookup
    if t.kind == "uniform":
        return min(math.floor((x - t.a) * lk.scale), t.n_segments - 1)
    i = 0
    for step in lk.steps:
        j = i + step
        i = j if lk.padded[j] <= x else i
    return i


def evaluate(t, x):
    """Evaluate the table at a scalar abscissa."""
    x = float(x)
    lk = t._lookup
    vals = lk.values
    if not t.a <= x <= t.b:
        if t.policy == "clamp" and not math.isnan(x):
            return vals[0] if x < t.a else vals[-1]
        raise OutOfDomain(x, t.a, t.b)
    if t.kind == "uniform":
        s = (x - t.a) * lk.scale
        i = min(math.floor(s), t.n_segments - 1)
        w1 = min(max(s - i, 0.0), 1.0)
        w0 = min(max(i + 1 - s, 0.0), 1.0)
    else:
        i = locate(t, x)
        k0, k1 = lk.knots[i], lk.knots[i + 1]
        h = k1 - k0
        w0, w1 = (k1 - x) / h, (x - k0) / h
    return w0 * vals[i] + w1 * vals[i + 1]


def eval_batch(t, xs):
    """Elementwise :func:`evaluate`; output order matches input order."""
    xs = np.asarray(xs, dtype=float)
    shape = xs.shape
    xs = xs.ravel()
    if xs.size == 0:
        return np.empty(shape)
    inside = (xs >= t.a) & (xs <= t.b)
    if not np.all(inside):
        bad = xs[~inside]
        if t.policy == "strict" or np.any(np.isnan(bad)):
            first = bad[np.isnan(bad)][0] if np.any(np.isnan(bad)) else bad[0]
            raise OutOfDomain(float(first), t.a, t.b)
        xs = np.clip(xs, t.a, t.b)
    vals = t.values
    lk = t._lookup
    if t.kind == "uniform":
        s = (xs - t.a) * lk.scale
        i = np.minimum(np.floor(s), t.n_segments - 1).astype(np.intp)
        w1 = np.clip(s - i, 0.0, 1.0)
        w0 = np.clip(i + 1 - s, 0.0, 1.0)
    else:
        i = np.zeros(xs.size, dtype=np.intp)
        for step in lk.steps:
            j = i + step
            i = np.where(lk.padded_array[j] <= xs, j, i)
        k0, k1 = t.knots[i], t.knots[i + 1]
        h = k1 - k0
        w0, w1 = (k1 - xs) / h, (xs - k0) / h
    out = w0 * vals[i] + w1 * vals[i + 1]
    return out.reshape(shape)

"""Target functions with their second derivatives.

A :class:`FunctionSpec` bundles a vectorised ``f`` with ``fpp`` (f'') and a
default domain.  Built-ins carry closed-form second derivatives; functions
parsed from text fall back to :func:`numeric_fpp`.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _bessel_coeffs as _bc
from .errors import EvaluationError, UnknownFunction

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

Func = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FunctionSpec:
    id: str
    f: Func
    fpp: Func
    default_domain: Optional[tuple] = None
    analytic_fpp: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.f(x)


def numeric_fpp(f, x):
    """Fourth-order central second difference of ``f`` at ``x``.

    Step ``h = eps**0.25 * max(1, |x|)``.  Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    h = np.finfo(float).eps ** 0.25 * np.maximum(1.0, np.abs(x))
    with np.errstate(all="ignore"):
        stencil = [np.asarray(f(x + k * h), dtype=float) for k in (-2, -1, 0, 1, 2)]
    if not all(np.all(np.isfinite(s)) for s in stencil):
        raise EvaluationError(f"non-finite value in second-difference stencil near x={x}")
    fm2, fm1, f0, fp1, fp2 = stencil
    out = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)
    return out if out.ndim else float(out)


def numeric_spec(id, f, default_domain=None):
    return FunctionSpec(id, f, lambda x: numeric_fpp(f, x), default_domain,
                        analytic_fpp=False)


# -- Gaussian ---------------------------------------------------------------

def _gaussian(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) * INV_SQRT_2PI


def _gaussian_fpp(x):
    x = np.asarray(x, dtype=float)
    return (x * x - 1.0) * np.exp(-0.5 * x * x) * INV_SQRT_2PI


# -- Lorentzian -------------------------------------------------------------

def _lorentzian(x0, gamma):
    scale = gamma / math.pi
    g2 = gamma * gamma

    def f(x):
        u = np.asarray(x, dtype=float) - x0
        return scale / (u * u + g2)

    def fpp(x):
        u = np.asarray(x, dtype=float) - x0
        d = u * u + g2
        return scale * (6.0 * u * u - 2.0 * g2) / (d * d * d)

    return f, fpp


# -- Quintic with roots -4, -2, -1, 1, 3 ------------------------------------

_QUINTIC = np.polynomial.Polynomial.fromroots([-4.0, -2.0, -1.0, 1.0, 3.0])
_QUINTIC_PP = _QUINTIC.deriv(2)


def _quintic(x):
    return _QUINTIC(np.asarray(x, dtype=float))


def _quintic_fpp(x):
    return _QUINTIC_PP(np.asarray(x, dtype=float))


# -- Bessel J0, J1 ----------------------------------------------------------

_SERIES_TERMS = 48  # (x/2)^(2k)/(k!)^2 < 1e-20 for x <= 8 well before this


def _series(x, order):
    """Power series of J0(x) (order 0) or J1(x)/x (order 1) for |x| <= 8."""
    q = -0.25 * x * x
    term = np.ones_like(x) if order == 0 else np.full_like(x, 0.5)
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * (k + order))
        total = total + term
    return total


def _cheb(coeffs, w):
    # Clenshaw recurrence for sum c_k T_k(w).
    b1 = np.zeros_like(w)
    b2 = np.zeros_like(w)
    for c in coeffs[:0:-1]:
        b1, b2 = 2.0 * w * b1 - b2 + c, b1
    return w * b1 - b2 + coeffs[0]


def _asymptotic(x, order):
    """J0 or J1 for x >= 8 from fitted modulus-phase factors."""
    z = 8.0 / x
    w = 2.0 * z * z - 1.0
    if order == 0:
        p, q = _cheb(_bc.P0, w), z * _cheb(_bc.Q0_OVER_Z, w)
    else:
        p, q = _cheb(_bc.P1, w), z * _cheb(_bc.Q1_OVER_Z, w)
    s, c = np.sin(x), np.cos(x)
    if order == 0:
        # cos(x - pi/4), sin(x - pi/4)
        cx, sx = (c + s) / math.sqrt(2.0), (s - c) / math.sqrt(2.0)
    else:
        # cos(x - 3pi/4), sin(x - 3pi/4)
        cx, sx = (s - c) / math.sqrt(2.0), -(s + c) / math.sqrt(2.0)
    return np.sqrt(2.0 / (math.pi * x)) * (p * cx - q * sx)


def _split(x, small, large):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    flat = np.atleast_1d(ax)
    out = np.empty_like(flat)
    near = flat <= _bc.X_SWITCH
    if np.any(near):
        out[near] = small(flat[near])
    if np.any(~near):
        out[~near] = large(flat[~near])
    return out.reshape(x.shape) if x.ndim else float(out[0])


def j0(x):
    """Bessel function of the first kind, order 0."""
    return _split(x, lambda t: _series(t, 0), lambda t: _asymptotic(t, 0))


def j1_over_x(x):
    """J1(x)/x, continuous at 0 with limit 1/2."""
    return _split(x, lambda t: _series(t, 1), lambda t: _asymptotic(t, 1) / t)


def j1(x):
    """Bessel function of the first kind, order 1."""
    x = np.asarray(x, dtype=float)
    out = x * np.asarray(j1_over_x(x))
    return out if out.ndim else float(out)


def _j0_fpp(x):
    # J0'' = -J1' = J1/x - J0
    out = np.asarray(j1_over_x(x)) - np.asarray(j0(x))
    return out if out.ndim else float(out)


# -- Registry ---------------------------------------------------------------

BUILTIN_NAMES = ("gaussian", "lorentzian", "bessel_j0", "quintic")


def builtin(name, x0=0.0, gamma=1.0):
    """Return the built-in :class:`FunctionSpec` called ``name``.

    ``x0`` and ``gamma`` only apply to ``lorentzian``; its default domain is
    ``[x0, x0 + 6 gamma]``.
    """
    if name == "gaussian":
        return FunctionSpec("gaussian", _gaussian, _gaussian_fpp, (0.0, 8.0))
    if name == "lorentzian":
        if not gamma > 0:
            raise ValueError("lorentzian needs gamma > 0")
        f, fpp = _lorentzian(float(x0), float(gamma))
        return FunctionSpec(f"lorentzian({x0:g},{gamma:g})", f, fpp,
                            (float(x0), float(x0) + 6.0 * gamma),
                            params={"x0": x0, "gamma": gamma})
    if name == "bessel_j0":
        return FunctionSpec("bessel_j0", j0, _j0_fpp, (0.0, 20.0))
    if name == "quintic":
        return FunctionSpec("quintic", _quintic, _quintic_fpp, (-4.0, 3.0))
    raise UnknownFunction(name)

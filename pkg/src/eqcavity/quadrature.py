"""Quadrature for integrands with inverse square-root endpoint behaviour.

All slit integrals reduce, after ``x = mid + half*cos(theta)``, to integrals of
smooth even ``2*pi``-periodic functions over ``[0, pi]``; Gauss-Chebyshev nodes
(midpoint rule in ``theta``) converge geometrically for those. Node counts are
doubled until two successive levels agree.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.fft import dct

from .errors import NonConvergence
from .radicals import SlitConfig, cofactor, interval_nodes

DEFAULT_TOL = float(os.environ.get("ESC_TOL", "1e-11"))
N_START = 32
N_MAX = 2 ** 17


def default_tol() -> float:
    return float(os.environ.get("ESC_TOL", DEFAULT_TOL))


def chebyshev_nodes(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) * (math.pi / n)


@dataclass
class QuadResult:
    value: complex
    error: float
    nodes: int


def chebyshev_weighted(g: Callable[[np.ndarray], np.ndarray], tol: float = None,
                       rtol: float = None, n_start: int = N_START,
                       n_max: int = N_MAX) -> QuadResult:
    """``int_0^pi g(theta) dtheta`` for ``g`` smooth and even about 0 and pi.

    Converged when two levels differ by at most ``max(tol, rtol * L1)``, where
    ``L1`` is the quadrature of ``|g|``.
    """
    tol = default_tol() if tol is None else tol
    rtol = 0.0 if rtol is None else rtol
    n = n_start
    prev = None
    while n <= n_max:
        vals = np.asarray(g(chebyshev_nodes(n)), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise NonConvergence("non-finite integrand value at a quadrature node")
        q = vals.sum() * (math.pi / n)
        if prev is not None:
            err = abs(q - prev)
            scale = np.abs(vals).sum() * (math.pi / n)
            if err <= max(tol, rtol * scale):
                return QuadResult(complex(q), err, n)
        prev = q
        n *= 2
    raise NonConvergence(f"no convergence with {n_max} nodes (last change {err:.3e})")


def cosine_series(g: Callable[[np.ndarray], np.ndarray], tol: float = None,
                  rtol: float = 1e-13, n_start: int = 64, n_max: int = N_MAX) -> np.ndarray:
    """Cosine coefficients ``a_k`` of ``g(theta) = sum a_k cos(k theta)``.

    Levels are doubled until the integral (``pi * a_0``) and the tail of the
    coefficient vector are both below tolerance.
    """
    tol = default_tol() if tol is None else tol
    n = n_start
    prev = None
    while n <= n_max:
        vals = np.asarray(g(chebyshev_nodes(n)), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise NonConvergence("non-finite integrand value at a trace node")
        coef = (dct(vals.real, type=2) + 1j * dct(vals.imag, type=2)) / n
        coef[0] *= 0.5
        scale = max(np.abs(coef).max(), 1e-300)
        if prev is not None:
            m = len(prev)
            diff = np.abs(coef[:m] - prev).max()
            tail = np.abs(coef[m:]).max()
            if max(diff, tail) <= max(tol, rtol * scale):
                return coef
        prev = coef
        n *= 2
    raise NonConvergence(f"cosine series did not converge with {n_max} nodes")


def cumulative_from_pi(coef: np.ndarray, theta) -> np.ndarray:
    """``int_theta^pi g`` for the cosine series ``coef``."""
    theta = np.asarray(theta, dtype=float)
    k = np.arange(1, len(coef))
    out = coef[0] * (math.pi - theta)
    s = np.sin(np.outer(theta, k)) / k
    return out - s @ coef[1:]


# -- public slit integral -----------------------------------------------------

@dataclass(frozen=True)
class SlitIntegral:
    """``int_lo^hi integrand(x) dx`` with optional inverse-sqrt endpoint growth."""

    lo: float
    hi: float
    integrand: Callable[[np.ndarray], np.ndarray]
    left_singular: bool = True
    right_singular: bool = True
    avoid: Sequence[complex] = ()

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")


@lru_cache(maxsize=32)
def _legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _legendre_doubling(h: Callable[[np.ndarray], np.ndarray], tol: float,
                       rtol: float = 0.0, n_start: int = 16, n_max: int = 2 ** 12) -> complex:
    """``int_0^1 h(t) dt`` for smooth ``h`` by Gauss-Legendre doubling."""
    n, prev = n_start, None
    while n <= n_max:
        x, w = _legendre(n)
        t = 0.5 * (x + 1.0)
        vals = np.asarray(h(t), dtype=complex)
        q = 0.5 * np.dot(w, vals)
        if prev is not None:
            scale = 0.5 * np.dot(w, np.abs(vals))
            if abs(q - prev) <= max(tol, rtol * scale):
                return complex(q)
        prev, n = q, 2 * n
    raise NonConvergence("Gauss-Legendre doubling did not converge")


def _guard(lo: float, hi: float, avoid: Sequence[complex]) -> None:
    for z in avoid:
        if z is None:
            continue
        z = complex(z)
        nearest = min(max(z.real, lo), hi)
        if abs(complex(nearest, 0.0) - z) < 1e-8:
            raise NonConvergence(f"singular point {z} lies on the integration interval")


def integrate_slit(si: SlitIntegral, tol: float = None) -> complex:
    """Integrate ``si.integrand`` over ``[lo, hi]`` to absolute accuracy ``tol``."""
    tol = default_tol() if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    _guard(si.lo, si.hi, si.avoid)
    lo, hi, F = si.lo, si.hi, si.integrand
    L = hi - lo
    if si.left_singular and si.right_singular:
        def g(theta):
            x, w = interval_nodes(lo, hi, theta)
            return np.asarray(F(x)) * w
        return chebyshev_weighted(g, tol=tol).value
    if si.left_singular:
        # x = lo + L s^2 removes the inverse-sqrt growth at lo
        return _legendre_doubling(lambda s: np.asarray(F(lo + L * s * s)) * 2 * L * s, tol)
    if si.right_singular:
        return _legendre_doubling(lambda s: np.asarray(F(hi - L * s * s)) * 2 * L * s, tol)
    return _legendre_doubling(lambda t: np.asarray(F(lo + L * t)) * L, tol)


def interval_weighted(config: SlitConfig, lo: float, hi: float,
                      numerator: Callable[[np.ndarray], np.ndarray],
                      tol: float = None, rtol: float = 1e-13, avoid=()) -> complex:
    """``int_lo^hi numerator(x) / |f(x)| dx`` over a slit or gap ``[lo, hi]``."""
    _guard(lo, hi, avoid)

    def g(theta):
        x, _ = interval_nodes(lo, hi, theta)
        return np.asarray(numerator(x)) / cofactor(config, lo, hi, x)

    return chebyshev_weighted(g, tol=tol, rtol=rtol).value


def loop_integral(config: SlitConfig, m: int,
                  numerator: Callable[[np.ndarray], np.ndarray],
                  tol: float = None, rtol: float = 1e-13, avoid=()) -> complex:
    """Closed-loop integral of ``numerator / f`` around slit ``m``.

    The loop runs along the upper side from left to right and back along the
    lower side (clockwise); with ``f(x - i0) = -f(x + i0)`` it equals twice
    the upper-side integral, i.e. ``-2 i s_m int numerator/|f|``.
    """
    lo, hi = config.slits[m]
    val = interval_weighted(config, lo, hi, numerator, tol=tol, rtol=rtol, avoid=avoid)
    return -2j * config.upper_sign(m) * val


def loop_integral_of(config: SlitConfig, m: int,
                     func: Callable[[np.ndarray, np.ndarray], np.ndarray],
                     tol: float = None, rtol: float = 1e-13) -> tuple:
    """Loop integral of a black-box function of ``(z, f(z))`` around slit ``m``.

    Returns ``(value, scale)`` where ``scale`` is the integral of ``|func|``
    along the loop, for use in relative residuals.
    """
    from .radicals import slit_side_values

    lo, hi = config.slits[m]
    scale_acc = {}

    def g(theta):
        x, w, fp = slit_side_values(config, m, theta, +1)
        _, _, fm = slit_side_values(config, m, theta, -1)
        up = np.asarray(func(x + 0j, fp)) * w
        dn = np.asarray(func(x + 0j, fm)) * w
        scale_acc["s"] = (np.abs(up) + np.abs(dn)).sum() * math.pi / len(theta)
        return up - dn

    res = chebyshev_weighted(g, tol=tol, rtol=rtol)
    return res.value, scale_acc["s"]


def segment_integral(func: Callable[[np.ndarray], np.ndarray], start: complex, end: complex,
                     end_singular: bool = True, tol: float = None, rtol: float = 1e-13) -> complex:
    """``int func(z) dz`` along the straight segment ``start -> end``.

    With ``end_singular`` the endpoint may carry inverse-sqrt growth (a branch
    point); the substitution ``z = end + (start - end) s^2`` smooths it.
    """
    tol = default_tol() if tol is None else tol
    d = start - end
    if end_singular:
        return _legendre_doubling(lambda s: -np.asarray(func(end + d * s * s)) * 2 * d * s,
                                  tol, rtol=rtol)
    return _legendre_doubling(lambda t: -np.asarray(func(end + d * (1 - t))) * d, tol, rtol=rtol)


def branch_segment_integral(config: SlitConfig, numerator: Callable[[np.ndarray], np.ndarray],
                            start: complex, root: float, tol: float = None,
                            rtol: float = 1e-13) -> complex:
    """``int numerator(z) / f(z) dz`` along the segment from ``start`` to a branch point.

    With ``z = root + d s^2`` (``d = start - root``) the vanishing factor of
    ``f`` is ``sqrt(z - root) = s sqrt(d)`` exactly, so it cancels against
    ``dz = 2 d s ds`` analytically instead of through rounding near ``s = 0``.
    """
    tol = default_tol() if tol is None else tol
    d = complex(start) - root
    sd = np.sqrt(d)
    others = [r for r in config.roots if r != root]
    if len(others) != len(config.roots) - 1:
        raise ValueError(f"{root} is not a simple root of the slit polynomial")

    def h(s):
        z = root + d * s * s
        rest = np.ones(z.shape, dtype=complex)
        for r in others:
            rest = rest * np.sqrt(z - r)
        return -2.0 * sd * np.asarray(numerator(z)) / rest

    return _legendre_doubling(h, tol, rtol=rtol)

"""Cavity contours traced from the slit sides."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import cosine_series, cumulative_from_pi, interval_weighted
from .radicals import SlitConfig, cofactor, interval_nodes


@dataclass
class Contour:
    """Closed polyline ``L_j`` traced as the image of both sides of slit ``j``.

    ``points[i] = omega(xi[i] + side[i]*i0)``. The upper side is walked from the
    left slit end to the right one, then the lower side back, so the last
    point repeats the first.
    """

    cavity: int
    points: np.ndarray
    xi: np.ndarray
    side: np.ndarray
    closure_gap: float

    def __post_init__(self):
        seg = np.abs(np.diff(self.points))
        self.s = np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def diameter(self) -> float:
        p = self.points
        return float(np.abs(p[:, None] - p[None, :]).max()) if len(p) < 4000 else float(
            max(np.ptp(p.real), np.ptp(p.imag)) * np.sqrt(2))

    @property
    def closed(self) -> bool:
        return self.closure_gap <= 1e-8 * max(self.diameter, 1e-300)

    @property
    def length(self) -> float:
        return float(self.s[-1])

    @property
    def signed_area(self) -> float:
        x, y = self.points.real, self.points.imag
        return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))

    def translated(self, shift: complex) -> "Contour":
        return Contour(self.cavity, self.points + shift, self.xi, self.side, self.closure_gap)


def trace_slit(config: SlitConfig, m: int, numerator: Callable, single_valued: Callable,
               base: complex, two_abar: complex, points_per_side: int,
               tol: float = None) -> Contour:
    """Image of both sides of slit ``m`` under

    ``omega(x +/- i0) = single_valued(x) + base + (1/two_abar) int_lo^x numerator/f(t +/- i0) dt``.
    """
    if points_per_side < 16:
        raise ValueError("points_per_side must be >= 16")
    lo, hi = config.slits[m]

    def g(theta):
        x, _ = interval_nodes(lo, hi, theta)
        return np.asarray(numerator(x)) / cofactor(config, lo, hi, x)

    coef = cosine_series(g, tol=tol)
    theta = np.linspace(np.pi, 0.0, points_per_side + 1)
    x, _ = interval_nodes(lo, hi, theta)
    x[0], x[-1] = lo, hi
    jcum = cumulative_from_pi(coef, theta)
    sig = config.upper_sign(m)
    sv = np.asarray(single_valued(x + 0j)) + base
    upper = sv - 1j * sig * jcum / two_abar
    lower = sv + 1j * sig * jcum / two_abar
    gap = abs(upper[-1] - lower[-1])
    pts = np.concatenate([upper, lower[::-1][1:]])
    xi = np.concatenate([x, x[::-1][1:]])
    side = np.concatenate([np.ones(len(x), int), -np.ones(len(x) - 1, int)])
    return Contour(m, pts, xi, side, float(gap))


def trace_along_axis(config: SlitConfig, numerator: Callable, single_valued: Callable,
                     two_abar: complex, points_per_side: int, tol: float = None,
                     avoid=()) -> list:
    """Trace every contour with the integration path running along the real axis.

    The path starts at the leftmost branch point and crosses the gaps, where
    the branch is real with sign ``config.gap_sign``; full slit sides are
    skipped since their integrals vanish by the single-valuedness conditions.
    """
    out = []
    base = 0j
    for m in range(config.n):
        out.append(trace_slit(config, m, numerator, single_valued, base, two_abar,
                              points_per_side, tol=tol))
        if m < config.n - 1:
            lo, hi = config.gaps[m]
            val = interval_weighted(config, lo, hi, numerator, tol=tol, avoid=avoid)
            base += config.gap_sign(m) * val / two_abar
    return out

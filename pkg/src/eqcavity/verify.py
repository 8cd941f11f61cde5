"""Physical and geometric checks of a constructed map.

The boundary identity ``psi omega' + a conj(omega') = 0`` on the slits, the
stresses along the traced contours, behaviour at the preimage of infinity,
contour intersections and the overall existence verdict.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from shapely.geometry import LineString, Point
from shapely.ops import unary_union

from .contours import Contour
from .errors import PoleProximity
from .radicals import branch_values
from .zerocount import classify

log = logging.getLogger(__name__)


# -- boundary identity ----------------------------------------------------------

def boundary_values(sol, samples: int = 256):
    """Concatenated ``(x, side, omega', F_+, F_-)`` on both sides of every slit."""
    xs, sides, wp, fp, fm = [], [], [], [], []
    for _, side, x, f in sol.boundary_samples(samples):
        Fp, Fm = sol.F_pair(x, f)
        xs.append(x.real)
        sides.append(np.full(x.shape, side))
        wp.append(sol.omega_prime_f(x, f))
        fp.append(Fp)
        fm.append(Fm)
    return tuple(np.concatenate(v) for v in (xs, sides, wp, fp, fm))


def boundary_residual(sol, load=None, config=None, samples: int = 256,
                      report: dict = None) -> float:
    """``max |psi w + a conj(w)| / (|a| max(|w|, eps))`` over sampled slit points.

    ``psi = (F_+ + F_-) / (2 w)`` with ``w`` the map's own ``omega'``, so an
    inconsistent ``omega'`` shows up here. Points where ``|w|`` is tiny are
    counted into ``report['near_zero']`` instead of dominating the maximum.
    """
    if samples < 64:
        raise ValueError("samples must be >= 64")
    load = load or sol.load
    _, _, w, Fp, Fm = boundary_values(sol, samples)
    psi = (Fp + Fm) / (2.0 * w)
    eps = 1e-12 * np.abs(w).max()
    small = np.abs(w) < 1e-8 * np.abs(w).max()
    r = np.abs(psi * w + load.a * np.conj(w)) / (abs(load.a) * np.maximum(np.abs(w), eps))
    if report is not None:
        report["near_zero"] = int(small.sum())
        report["samples"] = int(r.size)
    return float(r[~small].max()) if np.any(~small) else 0.0


# -- stresses ---------------------------------------------------------------------

@dataclass
class StressSample:
    s: float
    sigma1: float
    sigma2: float
    tau12: float
    sigma_t: float
    sigma_n: float
    tau_nt: float

    def as_row(self) -> list:
        return [self.s, self.sigma1, self.sigma2, self.tau12, self.sigma_t, self.sigma_n, self.tau_nt]


STRESS_HEADER = ["s", "sigma1", "sigma2", "tau12", "sigma_t", "sigma_n", "tau_nt"]


def stresses_from_psi(load, psi, w) -> dict:
    """Cartesian and boundary-aligned stresses from ``Psi`` and ``omega'``.

    ``sigma_2 - sigma_1 + 2 i tau_12 = 2 Psi`` and rotating onto the boundary
    normal gives ``sigma_t - sigma_n + 2 i tau_nt = 2 e^{2 i alpha} Psi`` with
    ``e^{2 i alpha} = -w / conj(w)``.
    """
    mean = 0.5 * (load.sigma + load.p)
    rot = 2.0 * (-w / np.conj(w)) * psi
    return {
        "sigma1": mean - psi.real,
        "sigma2": mean + psi.real,
        "tau12": psi.imag,
        "sigma_t": mean + 0.5 * rot.real,
        "sigma_n": mean - 0.5 * rot.real,
        "tau_nt": 0.5 * rot.imag,
    }


def stress_profile(sol, cavity: int, samples: int = 512, side: Optional[int] = None,
                   zeros=(), contour=None, tol: float = None) -> list:
    """Stresses along contour ``cavity`` in tracing order.

    ``side=+1`` keeps only the image of the upper slit side (walked from the
    left slit end to the right one), ``-1`` the lower side; arclength ``s``
    restarts at 0 for the selected part.
    """
    if contour is None:
        contour = sol.trace(samples, tol=tol)[cavity]
    xi, sd = contour.xi, contour.side
    for z0 in zeros:
        if np.min(np.abs(xi - complex(z0))) < 1e-6:
            raise PoleProximity(f"zero of omega' at {z0} lies on the contour preimage")
    # drop the branch points themselves, where omega' vanishes or blows up
    lo, hi = sol.config.slits[cavity]
    keep = (xi > lo) & (xi < hi)
    if side is not None:
        keep &= sd == side
    xi, sd, s = xi[keep], sd[keep], contour.s[keep]
    z = xi + 0j
    f = branch_values(sol.config, z, sd)
    w = sol.omega_prime_f(z, f)
    Fp, Fm = sol.F_pair(z, f)
    psi = sol.load.a_bar * (Fp + Fm) / (Fp - Fm)
    st = stresses_from_psi(sol.load, psi, w)
    s = s - s[0]
    return [StressSample(float(s[i]), *(float(st[k][i]) for k in STRESS_HEADER[1:]))
            for i in range(len(s))]


def refine_trace(sol, points_per_side: int = 512, rtol: float = 1e-8,
                 max_points: int = 1 << 17, tol: float = None) -> list:
    """Trace with doubling sample counts until every chord length settles to ``rtol``."""
    n = points_per_side
    contours = sol.trace(n, tol=tol)
    while 2 * n <= max_points:
        finer = sol.trace(2 * n, tol=tol)
        change = max(abs(a.length - b.length) / max(b.length, 1e-300)
                     for a, b in zip(contours, finer))
        contours, n = finer, 2 * n
        if change < rtol:
            return contours
    log.warning("arclength not converged to %.1e at %d points per side", rtol, n)
    return contours


def subsample(contour, points_per_side: int):
    """Every ``stride``-th node of a finer trace, keeping the fine arclength."""
    fine = (len(contour.points) - 1) // 2
    stride = max(fine // points_per_side, 1)
    sl = slice(None, None, stride)
    out = Contour(contour.cavity, contour.points[sl], contour.xi[sl], contour.side[sl],
                  contour.closure_gap)
    out.s = contour.s[sl]
    return out


# -- far field --------------------------------------------------------------------

def far_field(sol, eps: float = 1e-3, radius: float = 1e3) -> dict:
    """Errors of the behaviour at the preimage of infinity.

    Four samples on a circle, ``centre + r i^q``, are averaged; the average
    removes the first three Laurent (or Taylor) terms, leaving an ``O(r^-4)``
    (or ``O(eps^4)``) extrapolation to the limit. For ``zeta_inf = infinity``
    the radius is ``radius`` times the largest slit endpoint.
    """
    load = sol.load
    zi = sol.config.zeta_inf
    out = {}
    if zi is None:
        R = radius * max(abs(r) for r in sol.config.roots)
        big = R * np.exp(1j * (0.3 + 0.5 * np.pi * np.arange(4)))
        out["psi_limit"] = complex(np.mean(sol.psi(big)))
        out["omega_prime_inf"] = complex(np.mean(sol.omega_prime(big)))
        out["omega_prime_inf_error"] = float(abs(out["omega_prime_inf"] - sol.c) / abs(sol.c))
    else:
        pts = zi + eps * (1j ** np.arange(4))
        out["psi_limit"] = complex(np.mean(sol.psi(pts)))
        dbl = np.mean((pts - zi) ** 2 * sol.omega_prime(pts))
        out["double_pole"] = complex(dbl)
        out["double_pole_error"] = float(abs(dbl + sol.c) / abs(sol.c))
    out["psi_error"] = float(abs(out["psi_limit"] - load.b) / max(abs(load.b), abs(load.a)))
    return out


# -- geometry -----------------------------------------------------------------------

def _witnesses(geom) -> list:
    if geom.is_empty:
        return []
    if isinstance(geom, Point):
        return [complex(geom.x, geom.y)]
    if hasattr(geom, "geoms"):
        out = []
        for g in geom.geoms:
            out += _witnesses(g)
        return out
    return [complex(x, y) for x, y in geom.coords]


def contours_intersect(contours) -> tuple:
    """``(intersects, witnesses)`` over all pairs and every self-crossing."""
    lines = []
    for cn in contours:
        pts = np.asarray(cn.points if hasattr(cn, "points") else cn)
        if len(pts) < 4:
            raise ValueError("contours need at least 4 points")
        gap = abs(pts[-1] - pts[0])
        if 0 < gap <= 1e-8 * np.ptp(np.column_stack([pts.real, pts.imag])):
            pts = np.concatenate([pts[:-1], pts[:1]])
        lines.append(LineString(np.column_stack([pts.real, pts.imag])))
    witnesses = []
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            if lines[i].intersects(lines[j]):
                witnesses += _witnesses(lines[i].intersection(lines[j]))
    for ln in lines:
        if not ln.is_simple:
            # noding splits the line at every crossing; crossings are the
            # nodes shared by more than two pieces
            ends = Counter()
            for g in getattr(unary_union(ln), "geoms", []):
                ends[g.coords[0]] += 1
                ends[g.coords[-1]] += 1
            found = [complex(*p) for p, c in ends.items() if c >= 3]
            witnesses += found or [complex(*ln.coords[0])]
    uniq = []
    for p in witnesses:
        if all(abs(p - q) > 1e-12 * (1 + abs(p)) for q in uniq):
            uniq.append(p)
    return bool(uniq), uniq


def is_degenerate_segment(contour, rtol: float = 1e-8) -> bool:
    d = contour.diameter
    return abs(contour.signed_area) < rtol * d * d


# -- verdict -------------------------------------------------------------------------

def existence_verdict(Z: Optional[int], intersects: bool, gamma: float) -> str:
    base = classify(Z, gamma)
    if base in ("degenerate", "degenerate-adjacent", "unknown"):
        return base
    return "exists" if Z == 0 and not intersects else "nonexistent"


@dataclass
class VerificationReport:
    gamma: float
    boundary_residual: float
    loop_residuals: list
    far_field: dict
    Z: Optional[int]
    intersects: bool
    witnesses: list = field(default_factory=list)
    degenerate_segments: Optional[bool] = None
    zero_reports: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return existence_verdict(self.Z, self.intersects, self.gamma)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["witnesses"] = [[p.real, p.imag] for p in self.witnesses[:20]]
        d["far_field"] = {k: ([v.real, v.imag] if isinstance(v, complex) else v)
                          for k, v in self.far_field.items()}
        d["verdict"] = self.verdict
        return d


def verify_map(sol, samples: int = 256, points_per_side: int = 512, zero_reports: dict = None,
               contours=None) -> VerificationReport:
    """Run every check on ``sol``; ``zero_reports`` maps method names to reports."""
    contours = contours if contours is not None else sol.trace(points_per_side)
    hit, wit = contours_intersect(contours)
    zero_reports = zero_reports or {}
    Z = None
    for key in ("argument-principle", "closed-form", "oracle"):
        if key in zero_reports and zero_reports[key].get("Z") is not None:
            Z = zero_reports[key]["Z"]
            break
    degenerate = None
    if sol.load.is_degenerate:
        degenerate = all(is_degenerate_segment(cn) for cn in contours)
        hit, wit = False, []
    return VerificationReport(
        gamma=sol.load.gamma,
        boundary_residual=boundary_residual(sol, samples=samples),
        loop_residuals=[float(r) for r in sol.loop_residuals()],
        far_field=far_field(sol),
        Z=Z,
        intersects=hit,
        witnesses=wit,
        degenerate_segments=degenerate,
        zero_reports=zero_reports,
    )

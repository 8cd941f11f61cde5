"""Counting and locating zeros of ``omega'`` in the slit domain.

Zeros of ``omega'`` are the inadmissible poles of ``psi``. Each map family
supplies an entire-on-the-slit-plane function ``eta`` sharing those zeros.
Three independent counts are provided: the argument principle along the
slit sides, a residue formula for the symmetric two-cavity map with
``zeta_inf = infinity``, and a brute-force box-winding search.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import (BoundarySampleFailure, DegenerateLoading, NonConvergence, NonIntegerCount,
                     OnContourZero, RootSelectionError)
from .loading import LoadingParams
from .quadrature import chebyshev_weighted, interval_weighted
from .radicals import SlitConfig, interval_nodes

log = logging.getLogger(__name__)

#: half-width of the ``gamma`` window around 1 where counts are not trusted
ADJACENT_WINDOW = 0.02
INTEGER_SLACK = 0.05


@dataclass
class ZeroReport:
    Z: Optional[int]
    method: str
    gamma: Optional[float] = None
    zeros: list = field(default_factory=list)
    raw: Optional[float] = None
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return classify(self.Z, self.gamma)

    def as_dict(self) -> dict:
        return {
            "Z": self.Z,
            "method": self.method,
            "gamma": self.gamma,
            "verdict": self.verdict,
            "raw": self.raw,
            "zeros": [[z.real, z.imag] for z in self.zeros],
            "details": self.details,
        }


def classify(Z: Optional[int], gamma: Optional[float]) -> str:
    if gamma is not None:
        if abs(gamma - 1.0) <= 1e-12:
            return "degenerate"
        if abs(gamma - 1.0) < ADJACENT_WINDOW:
            return "degenerate-adjacent"
    if Z is None:
        return "unknown"
    return "exists" if Z == 0 else "nonexistent"


def _round_count(raw: float, method: str) -> int:
    Z = int(round(raw))
    if abs(raw - Z) > INTEGER_SLACK:
        raise NonIntegerCount(f"{method}: count {raw:.6f} is not within {INTEGER_SLACK} of an integer")
    return Z


# -- argument principle -------------------------------------------------------

def count_argument_principle(eta: Callable, eta_prime: Callable, config: SlitConfig, n_bg: int,
                             gamma: float = None, tol: float = 1e-10,
                             zero_guard: float = 1e-10) -> ZeroReport:
    """``Z = n_bg + (1/2 pi i) sum_m oint_{l_m} eta'/eta``.

    ``eta(x, side)`` and ``eta_prime(x, side)`` return one-sided values on the
    slits. Each loop runs clockwise (domain on the left), i.e. along the upper
    side from left to right and back along the lower side.
    """
    total = 0j
    per_slit = []
    for lo, hi in config.slits:
        probe = {}

        def g(theta, lo=lo, hi=hi):
            x, w = interval_nodes(lo, hi, theta)
            ep, em = eta(x, 1), eta(x, -1)
            probe.update(x=x, up=np.abs(ep), dn=np.abs(em))
            probe["max"] = max(probe.get("max", 0.0), probe["up"].max(), probe["dn"].max())
            return (eta_prime(x, 1) / ep - eta_prime(x, -1) / em) * w

        val = chebyshev_weighted(g, tol=tol, n_max=2 ** 16).value
        low = min(_side_minimum(eta, eta_prime, probe["x"], probe[key], side, lo, hi)
                  for key, side in (("up", 1), ("dn", -1)))
        if low < zero_guard * probe["max"]:
            raise OnContourZero(f"|eta| drops to {low:.3e} on slit [{lo}, {hi}]")
        contrib = val / (2j * math.pi)
        per_slit.append(contrib)
        total += contrib
    raw = n_bg + total.real
    Z = _round_count(raw, "argument principle")
    return ZeroReport(Z=Z, method="argument-principle", gamma=gamma, raw=float(raw),
                      details={"background": n_bg,
                               "per_slit": [[c.real, c.imag] for c in per_slit],
                               "imag_part": float(total.imag)})


def _side_minimum(eta, eta_prime, x, mags, side, lo, hi, candidates: int = 3) -> float:
    """Smallest ``|eta|`` on one slit side, polished between sample nodes.

    Brent's bracket search only resolves ``x`` to about ``sqrt(eps)``, so a few
    Gauss-Newton steps on the linear model ``eta + eta' dx`` finish the job.
    """
    order = np.argsort(x)
    x, mags = x[order], mags[order]
    best = float(mags.min())

    def at(fn, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return complex(fn(np.array([t + 0j]), side)[0])

    for i in np.argsort(mags)[:candidates]:
        a = x[i - 1] if i > 0 else lo
        b = x[i + 1] if i + 1 < len(x) else hi
        res = optimize.minimize_scalar(lambda t: abs(at(eta, t)), bounds=(a, b), method="bounded")
        t = float(res.x)
        best = min(best, float(res.fun))
        for _ in range(4):
            e, d = at(eta, t), at(eta_prime, t)
            if not np.isfinite(d) or d == 0:
                break
            t = float(np.clip(t - (np.conj(d) * e).real / abs(d) ** 2, a, b))
            best = min(best, abs(at(eta, t)))
    return best


def count_map(sol, tol: float = 1e-10) -> ZeroReport:
    """Argument-principle count for a solved map."""
    return count_argument_principle(sol.eta_at, sol.eta_prime_at, sol.config,
                                    sol.degree_at_infinity, gamma=sol.load.gamma, tol=tol)


# -- closed form: symmetric two cavities, zeta_inf = infinity -------------------

def residue_roots_n2inf(alpha0: float, alpha1: float, k: float, rho: float) -> np.ndarray:
    mu_p, mu_m = 0.5 * (1 / k ** 2 + 1), 0.5 * (1 / k ** 2 - 1)
    diff = alpha1 ** 2 - alpha0 ** 2
    disc = np.sqrt(complex(alpha1 ** 2 * (mu_p - rho) ** 2 - mu_m ** 2 * diff))
    deltas = [(alpha1 ** 2 * (rho - mu_p) + s * alpha0 * disc) / (mu_m * diff) for s in (1, -1)]
    roots = []
    for sgn in (1, -1):
        for d in deltas:
            roots.append(d + sgn * np.sqrt(d * d - 1))
    # order w1, w2 (plus branch), w3, w4 (minus branch)
    return np.array(roots)


def closed_form_integral_n2inf(alpha0: float, alpha1: float, k: float, rho: float,
                               tol: float = None) -> float:
    """The real integral ``I`` entering ``Z = 2 - alpha0 alpha1 I / pi``."""
    from .radicals import SlitConfig as _SC

    config = _SC.n2_sym_inf(k)
    lo, hi = config.slits[1]
    kk = 1 / k ** 2

    def num(x):
        p = (x * x - 1) * (kk - x * x)
        return 2 * ((x * x - rho) * (2 * x * x - 1 - kk) + 2 * p) * x / (
            alpha1 ** 2 * (x * x - rho) ** 2 + alpha0 ** 2 * p)

    return interval_weighted(config, lo, hi, num, tol=tol).real


def count_closed_form_n2inf(load: LoadingParams, k: float, rho: float) -> ZeroReport:
    if load.is_degenerate:
        raise DegenerateLoading("gamma = 1: the poles are removable points on the slits")
    a0, a1 = load.alpha_minus, load.alpha_plus
    if a1 == 0 or abs(abs(a1) - abs(a0)) <= 1e-14 * max(abs(a0), abs(a1)):
        raise DegenerateLoading("the residue formula needs alpha_plus != +-alpha_minus")
    mu_p, mu_m = 0.5 * (1 / k ** 2 + 1), 0.5 * (1 / k ** 2 - 1)
    w = residue_roots_n2inf(a0, a1, k, rho)
    inside = np.abs(w) < 1.0
    if inside.sum() != 2:
        raise RootSelectionError(f"{inside.sum()} residue roots inside the unit disc, expected 2")
    ast = a0 / a1
    total = 0j
    for wj in w[inside]:
        num = (mu_m * (wj * wj + 1) + 2 * mu_p * wj) * (mu_p - rho) + 2 * wj * (rho * mu_p - 1 / k ** 2)
        gj = mu_m ** 2 * (1 - ast ** 2) * wj * (wj * wj + 1) + mu_m * (mu_p - rho) * (3 * wj * wj + 1) \
            + 2 * wj * ((mu_p - rho) ** 2 + ast ** 2 * mu_m ** 2)
        total += num / gj
    # the residue sum enters with a plus sign: with a minus sign the count
    # comes out as 4 - Z, contradicting the argument principle and the oracle
    raw = 2 + ast * total
    Z = _round_count(raw.real, "closed form")
    I = closed_form_integral_n2inf(a0, a1, k, rho)
    raw_I = 2 + a0 * a1 * I / math.pi
    return ZeroReport(Z=Z, method="closed-form", gamma=load.gamma, raw=float(raw.real),
                      details={"roots": [[x.real, x.imag] for x in w],
                               "inside": inside.tolist(),
                               "residue_sum": [total.real, total.imag],
                               "integral_I": I,
                               "Z_from_integral": float(raw_I),
                               "agree": bool(abs(raw_I - raw.real) < INTEGER_SLACK)})


# -- box-winding oracle -------------------------------------------------------

class _Winder:
    """Winding numbers of ``eta`` along polygonal box boundaries."""

    def __init__(self, eta: Callable, config: SlitConfig, scale: float):
        self.eta = eta
        self.config = config
        self.scale = scale
        self.slits = np.array(config.slits)

    def _sides(self, z: np.ndarray, region: int) -> np.ndarray:
        on_axis = z.imag == 0.0
        x = z.real[:, None]
        inside = ((x > self.slits[:, 0]) & (x < self.slits[:, 1])).any(axis=1)
        return np.where(on_axis & inside, region, 0)

    def values(self, z: np.ndarray, region: int) -> np.ndarray:
        side = self._sides(z, region)
        out = np.empty(z.shape, dtype=complex)
        for s in (-1, 0, 1):
            sel = side == s
            if np.any(sel):
                out[sel] = self.eta(z[sel], s)
        return out

    def edge_phase(self, p: complex, q: complex, region: int, n0: int = 64,
                   max_rounds: int = 60) -> float:
        t = np.linspace(0.0, 1.0, n0 + 1)
        vals = self.values(p + (q - p) * t, region)
        for _ in range(max_rounds):
            if np.any(vals == 0) or not np.all(np.isfinite(vals)):
                raise BoundarySampleFailure("eta vanishes on a box edge")
            ratio = vals[1:] / vals[:-1]
            dphi = np.angle(ratio)
            # large modulus jumps may hide a full turn between two samples
            bad = (np.abs(dphi) > math.pi / 4) | (np.abs(np.log(np.abs(ratio))) > 0.5)
            if not bad.any():
                return float(dphi.sum())
            if np.min(np.diff(t)[bad]) < 1e-10 or len(t) > 50000:
                raise BoundarySampleFailure("edge passes through a zero of eta")
            mids = 0.5 * (t[:-1] + t[1:])[bad]
            t_new = np.concatenate([t, mids])
            v_new = np.concatenate([vals, self.values(p + (q - p) * mids, region)])
            order = np.argsort(t_new)
            t, vals = t_new[order], v_new[order]
        raise BoundarySampleFailure("edge sampling did not resolve the phase")

    def winding(self, corners: list, region: int) -> int:
        total = 0.0
        for p, q in zip(corners, corners[1:] + corners[:1]):
            if p != q:
                total += self.edge_phase(p, q, region)
        w = total / (2 * math.pi)
        n = int(round(w))
        if abs(w - n) > 1e-3:
            raise BoundarySampleFailure(f"non-integer winding {w:.4f}")
        return n


def _box_corners(x0, x1, y0, y1):
    return [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]


def _newton(eta, eta_prime, z0: complex, mult: int, iters: int = 60) -> Optional[complex]:
    z = complex(z0)
    for _ in range(iters):
        e = complex(eta(np.array([z]), 0)[0])
        de = complex(eta_prime(np.array([z]), 0)[0])
        if de == 0 or not np.isfinite(de):
            return None
        step = mult * e / de
        z -= step
        if abs(step) <= 1e-14 * max(1.0, abs(z)):
            return z
    # a multiple zero is only as well conditioned as sqrt(eps)
    loose = 1e-10 if mult == 1 else 1e-6
    return z if abs(step) <= loose * max(1.0, abs(z)) else None


def locate_zeros_oracle(eta: Callable, config: SlitConfig, search_radius: float = None,
                        eta_prime: Callable = None, gamma: float = None, seed: int = 0,
                        min_size: float = 1e-8, columns: int = 13, retries: int = 3) -> ZeroReport:
    """Quadtree search for zeros of ``eta`` in ``|Re|, |Im| <= search_radius`` off the slits.

    The square is split into an upper region, whose bottom follows the upper
    slit sides and dips just below the axis across the gaps, and a lower
    region below it. Boxes with nonzero winding are quartered until they are
    small; simple zeros are then polished by Newton's method when a
    derivative is available.
    """
    if search_radius is None:
        k = config.k
        search_radius = 10.0 / k if k else 10.0 * max(1.0, config.extent)
    R = float(search_radius)
    rng = np.random.default_rng(seed)
    last_err = None
    for attempt in range(retries + 1):
        try:
            return _oracle_once(eta, eta_prime, config, R, gamma, rng, min_size, columns, attempt)
        except BoundarySampleFailure as exc:
            last_err = exc
            log.info("oracle retry %d after boundary failure: %s", attempt + 1, exc)
    raise BoundarySampleFailure(f"box search failed after {retries} perturbations: {last_err}")


def _oracle_once(eta, eta_prime, config, R, gamma, rng, min_size, columns, attempt):
    ring = R * np.exp(2j * np.pi * (np.arange(64) + 0.37) / 64)
    scale = float(np.abs(eta(ring, 0)).max())
    w = _Winder(eta, config, scale)
    dip = 1e-9 * max(1.0, config.extent)
    jitter = 0.0 if attempt == 0 else rng.uniform(-0.3, 0.3)

    # column breaks: slit endpoints plus a jittered uniform grid
    grid = np.linspace(-R, R, columns + 1)
    step = grid[1] - grid[0]
    inner = grid[1:-1] + jitter * step
    breaks = np.unique(np.concatenate([[-R, R], config.roots, inner]))
    breaks = breaks[(breaks >= -R) & (breaks <= R)]
    ysplit = 0.5 * R * (1.0 + 0.2 * jitter)
    # off-centre bisection keeps symmetric zeros off the box edges
    fx, fy = 0.5137 + 0.05 * jitter, 0.4871 - 0.05 * jitter

    boxes = []
    for x0, x1 in zip(breaks[:-1], breaks[1:]):
        on_slit = config.slit_index(0.5 * (x0 + x1)) is not None
        edge = 0.0 if on_slit else -dip
        boxes += [(x0, x1, edge, ysplit, 1), (x0, x1, ysplit, R, 1),
                  (x0, x1, -ysplit, edge, -1), (x0, x1, -R, -ysplit, -1)]

    zeros, mults = [], []
    stack = []
    for b in boxes:
        n = w.winding(_box_corners(*b[:4]), b[4])
        if n:
            stack.append((b, n))
    visited = 0
    while stack:
        (x0, x1, y0, y1, region), n = stack.pop()
        visited += 1
        if visited > 20000:
            raise NonConvergence("box search did not isolate the zeros")
        size = max(x1 - x0, y1 - y0)
        center = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
        if eta_prime is not None and size < 1e-3 * R:
            z = _newton(eta, eta_prime, center, n)
            pad = 1e-12 * max(1.0, abs(center))
            if z is not None and x0 - pad <= z.real <= x1 + pad and y0 - pad <= z.imag <= y1 + pad \
                    and not _on_slit(config, z):
                zeros.append(z)
                mults.append(n)
                continue
        if size < min_size * max(1.0, abs(center)):
            zeros.append(center)
            mults.append(n)
            continue
        xm, ym = x0 + fx * (x1 - x0), y0 + fy * (y1 - y0)
        found = 0
        for sub in ((x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)):
            m = w.winding(_box_corners(*sub), region)
            if m:
                stack.append(((*sub, region), m))
                found += m
        if found != n:
            raise BoundarySampleFailure(f"winding {n} split into {found}")
    located = []
    for z, m in zip(zeros, mults):
        located += [z] * m
    return ZeroReport(Z=len(located), method="oracle", gamma=gamma, zeros=located,
                      details={"search_radius": R, "boxes": visited, "multiplicities": mults})


def _on_slit(config: SlitConfig, z: complex) -> bool:
    return abs(z.imag) < 1e-12 and config.slit_index(z.real) is not None


def oracle_map(sol, search_radius: float = None, seed: int = 0) -> ZeroReport:
    return locate_zeros_oracle(sol.eta_at, sol.config, search_radius,
                               eta_prime=sol.eta_prime_at, gamma=sol.load.gamma, seed=seed)

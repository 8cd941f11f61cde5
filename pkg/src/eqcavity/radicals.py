"""Branch-fixed square roots of the slit polynomials.

Every slit polynomial used here has only real simple roots
``k_0 < k_1 < ... < k_{2n-1}`` and the slits are ``[k_{2m}, k_{2m+1}]``. The
branch ``f`` with ``f(z) ~ z**n`` at infinity is realised as the product of the
principal roots ``sqrt(z - k_j)``: each factor has its cut along
``(-inf, k_j]`` and the cuts cancel pairwise on every gap, so the product is
analytic off the slits. No single ``sqrt`` of the product is ever taken.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, NotOnCutError, OnCutError

VARIANTS = ("n1", "n2-finite", "n2-sym-finite", "n2-sym-inf", "n3-finite", "n-line")


@dataclass(frozen=True)
class SlitConfig:
    """Slit geometry of the parametric plane.

    ``zeta_inf is None`` encodes the preimage of infinity at ``zeta = inf``.
    """

    variant: str
    roots: tuple
    zeta_inf: Optional[complex] = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        r = tuple(float(x) for x in self.roots)
        if len(r) < 2 or len(r) % 2:
            raise ConfigError("need an even number (>= 2) of slit endpoints")
        if any(not np.isfinite(x) for x in r):
            raise ConfigError("slit endpoints must be finite")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ConfigError(f"slit endpoints must be strictly increasing: {r}")
        object.__setattr__(self, "roots", r)
        if self.zeta_inf is not None:
            z = complex(self.zeta_inf)
            object.__setattr__(self, "zeta_inf", z)
            if z.imag == 0.0 and self.slit_index(z.real) is not None:
                raise ConfigError(f"zeta_inf={z} lies on a slit")

    # -- constructors -----------------------------------------------------
    @classmethod
    def n1(cls) -> "SlitConfig":
        return cls("n1", (-1.0, 1.0), None)

    @classmethod
    def n2_finite(cls, k: float, zeta_inf: float) -> "SlitConfig":
        _check_k(k)
        z = complex(zeta_inf)
        if z.imag != 0.0 or not -1.0 < z.real < 1.0:
            raise ConfigError(f"zeta_inf must be real in (-1, 1), got {zeta_inf}")
        return cls("n2-finite", (-1 / k, -1.0, 1.0, 1 / k), z, {"k": k})

    @classmethod
    def n2_sym_finite(cls, k: float) -> "SlitConfig":
        _check_k(k)
        return cls("n2-sym-finite", (-1 / k, -1.0, 1.0, 1 / k), 0j, {"k": k})

    @classmethod
    def n2_sym_inf(cls, k: float) -> "SlitConfig":
        _check_k(k)
        return cls("n2-sym-inf", (-1 / k, -1.0, 1.0, 1 / k), None, {"k": k})

    @classmethod
    def n3_finite(cls, k: float, k1: float, k2: float, zeta_inf: complex) -> "SlitConfig":
        _check_k(k)
        if not -1.0 < k1 < k2 < 1.0:
            raise ConfigError(f"need -1 < k1 < k2 < 1, got k1={k1}, k2={k2}")
        z = complex(zeta_inf)
        if z.imag == 0.0:
            # the real-axis integration path would run through the pole
            raise ConfigError("n3-finite requires a non-real zeta_inf")
        return cls("n3-finite", (-1 / k, -1.0, k1, k2, 1.0, 1 / k), z,
                   {"k": k, "k1": k1, "k2": k2})

    @classmethod
    def n_line(cls, endpoints: Sequence[float]) -> "SlitConfig":
        e = tuple(float(x) for x in endpoints)
        if len(e) < 6 or len(e) % 2:
            raise ConfigError("n-line needs 2n endpoints with n >= 3")
        if e[0] != -1.0 or e[-1] != 1.0:
            raise ConfigError("n-line endpoints must start at -1 and end at 1")
        return cls("n-line", e, None)

    # -- geometry ---------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.roots) // 2

    @property
    def slits(self) -> list:
        r = self.roots
        return [(r[2 * m], r[2 * m + 1]) for m in range(self.n)]

    @property
    def gaps(self) -> list:
        r = self.roots
        return [(r[2 * m + 1], r[2 * m + 2]) for m in range(self.n - 1)]

    @property
    def k(self) -> Optional[float]:
        return self.params.get("k")

    @property
    def at_infinity(self) -> bool:
        return self.zeta_inf is None

    @property
    def extent(self) -> float:
        return max(abs(self.roots[0]), abs(self.roots[-1]))

    def slit_index(self, x: float) -> Optional[int]:
        """Index of the slit whose open interior contains ``x``."""
        for m, (lo, hi) in enumerate(self.slits):
            if lo < x < hi:
                return m
        return None

    def upper_sign(self, m: int) -> int:
        """``s`` with ``f(x + i0) = s * i * |f(x)|`` on slit ``m``."""
        return -1 if (self.n - 1 - m) % 2 else 1

    def gap_sign(self, g: int) -> int:
        """Sign of the (real) branch on the gap between slits ``g`` and ``g+1``."""
        return -1 if (self.n - 1 - g) % 2 else 1

    def describe(self) -> dict:
        zi = self.zeta_inf
        return {
            "variant": self.variant,
            "roots": list(self.roots),
            "zeta_inf": "infinity" if zi is None else [zi.real, zi.imag],
            **self.params,
        }


def _check_k(k: float) -> None:
    if not 0.0 < k < 1.0:
        raise ConfigError(f"k must lie in (0, 1), got {k}")


@dataclass(frozen=True)
class CutSide:
    """One side of slit ``m``: ``side=+1`` upper (approach from Im > 0)."""

    m: int
    side: int

    def __post_init__(self):
        if self.side not in (1, -1):
            raise ValueError("side must be +1 or -1")


def _roots(config: SlitConfig) -> np.ndarray:
    return np.asarray(config.roots, dtype=float)


def _product_branch(roots: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.ones(z.shape, dtype=complex)
    for r in roots:
        out = out * np.sqrt(z - r)
    return out


def branch_values(config: SlitConfig, z, side=0) -> np.ndarray:
    """Vectorised branch: off-cut values, or one-sided values where ``side != 0``.

    Points with ``side = +1/-1`` are taken as real and evaluated as the limit
    from the upper/lower half plane; they may lie anywhere on the real axis.
    """
    z = np.asarray(z, dtype=complex)
    side = np.broadcast_to(np.asarray(side, dtype=float), z.shape)
    # normalise signed zeros so real points on gaps see the upper limit
    zz = np.where(z.imag == 0.0, z.real + 0j, z)
    on_side = side != 0
    if np.any(on_side):
        x = zz.real
        zz = np.where(on_side, x + 0j, zz)
    roots = _roots(config)
    out = np.ones(z.shape, dtype=complex)
    for r in roots:
        d = zz - r
        fac = np.sqrt(d)
        if np.any(on_side):
            neg = on_side & (d.real < 0)
            fac = np.where(neg, side * 1j * np.sqrt(np.abs(d.real)), fac)
        out = out * fac
    return out


def branch_eval(config: SlitConfig, zeta):
    """``f(zeta)`` off the cuts. Raises :class:`OnCutError` inside a slit."""
    z = np.asarray(zeta, dtype=complex)
    flat = np.atleast_1d(z)
    real_pts = flat[flat.imag == 0.0].real
    for lo, hi in config.slits:
        if np.any((real_pts > lo) & (real_pts < hi)):
            raise OnCutError(f"point lies strictly inside slit [{lo}, {hi}]")
    out = branch_values(config, z)
    return complex(out) if np.ndim(zeta) == 0 else out


def branch_eval_side(config: SlitConfig, xi: float, side: CutSide) -> complex:
    """One-sided limit ``f(xi +/- i0)`` for ``xi`` interior to slit ``side.m``."""
    lo, hi = config.slits[side.m]
    xi = float(xi)
    if not lo < xi < hi:
        raise NotOnCutError(f"xi={xi} is not interior to slit {side.m} = [{lo}, {hi}]")
    return complex(branch_values(config, xi, side.side))


def polynomial(config: SlitConfig, z):
    z = np.asarray(z, dtype=complex)
    out = np.ones(z.shape, dtype=complex)
    for r in config.roots:
        out = out * (z - r)
    return out


def branch_dlog(config: SlitConfig, z):
    """Logarithmic derivative ``f'/f = (1/2) sum 1/(z - k_j)``."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for r in config.roots:
        out = out + 1.0 / (z - r)
    return 0.5 * out


def branch_derivative(config: SlitConfig, zeta: complex) -> complex:
    """``f'(zeta)`` at an off-cut point away from branch points."""
    f = complex(branch_eval(config, zeta))
    return f * complex(branch_dlog(config, zeta))


# -- interval parametrisation -------------------------------------------------

def interval_nodes(lo: float, hi: float, theta):
    """``x = mid + half cos(theta)`` and ``w = sqrt((x - lo)(hi - x))`` exactly."""
    theta = np.asarray(theta, dtype=float)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid + half * np.cos(theta), half * np.sin(theta)


def cofactor(config: SlitConfig, lo: float, hi: float, x) -> np.ndarray:
    """``sqrt|p(x)| / sqrt((x - lo)(hi - x))`` for an interval between two roots."""
    x = np.asarray(x, dtype=float)
    out = np.ones(x.shape)
    for r in config.roots:
        if r == lo or r == hi:
            continue
        out = out * np.abs(x - r)
    return np.sqrt(out)


def slit_side_values(config: SlitConfig, m: int, theta, side: int):
    """Nodes on slit ``m`` with exact one-sided branch values.

    Returns ``(x, w, f)`` where ``f = side * s_m * i * w * cofactor``.
    """
    lo, hi = config.slits[m]
    x, w = interval_nodes(lo, hi, theta)
    f = side * config.upper_sign(m) * 1j * w * cofactor(config, lo, hi, x)
    return x, w, f


def gap_values(config: SlitConfig, g: int, theta):
    """Nodes on gap ``g`` with the (real) branch values."""
    lo, hi = config.gaps[g]
    x, w = interval_nodes(lo, hi, theta)
    f = config.gap_sign(g) * w * cofactor(config, lo, hi, x)
    return x, w, f.astype(complex)

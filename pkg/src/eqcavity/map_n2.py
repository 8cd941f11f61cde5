"""Two cavities.

Finite preimage of infinity ``zeta_inf`` in ``(-1, 1)``:

    F_+ = (i A0+ + h_+(z)/f) / (z - zeta_inf)^2,
    F_- = (A0- + i h_-(z)/f) / (z - zeta_inf)^2,

with ``h_+-`` real quadratics, and the symmetric ``zeta_inf = infinity`` case,
which is the line family with ``n = 2`` and roots ``+-1, +-1/k``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .base import SlitMap
from .contours import trace_slit
from .errors import ConfigError, DegenerateGeometry
from .loading import LoadingParams
from .map_n_line import NLineCoefficients
from .quadrature import branch_segment_integral, interval_weighted
from .radicals import SlitConfig, branch_values, polynomial

log = logging.getLogger(__name__)

#: start of the integration path used to pin the contour positions
ZETA_0 = -1j


def _rel(value, *terms) -> float:
    scale = sum(abs(t) for t in terms)
    return abs(value) / scale if scale > 0 else abs(value)


@dataclass
class N2Coefficients(SlitMap):
    """Two-cavity solution with finite ``zeta_inf``.

    ``A_plus``/``A_minus`` hold ``A_1..A_3`` (index 0 unused and zero);
    ``A[0] = i A0+ - A0-`` and ``A[j] = Aj+ - i Aj-``.
    """

    config: SlitConfig
    load: LoadingParams
    c: complex
    A0_plus: float
    A0_minus: float
    A_plus: np.ndarray
    A_minus: np.ndarray
    d_plus: float
    d_minus: float
    lambda0: float
    lambda1: float
    I_minus: np.ndarray = field(repr=False, default=None)
    I_plus: np.ndarray = field(repr=False, default=None)
    B: complex = 0j
    residuals: dict = field(default_factory=dict)

    degree_at_infinity = 2

    def __post_init__(self):
        self.A = self.A_plus - 1j * self.A_minus
        self.A[0] = 1j * self.A0_plus - self.A0_minus

    @property
    def zeta_inf(self) -> float:
        return self.config.zeta_inf.real

    @property
    def k(self) -> float:
        return self.config.k

    @property
    def c_prime(self) -> float:
        return self.c.real

    @property
    def c_dblprime(self) -> float:
        return self.c.imag

    def F_pair(self, z, f):
        d2 = (z - self.zeta_inf) ** 2
        hp = P.polyval(z, self.A_plus[1:])
        hm = P.polyval(z, self.A_minus[1:])
        return (1j * self.A0_plus + hp / f) / d2, (self.A0_minus + 1j * hm / f) / d2

    def omega_prime_f(self, z, f):
        return (self.A[0] + P.polyval(z, self.A[1:]) / f) / (self.two_abar * (z - self.zeta_inf) ** 2)

    def eta(self, z, f):
        return P.polyval(z, self.A[1:]) + self.A[0] * f

    def eta_prime(self, z, f, df):
        return P.polyval(z, P.polyder(self.A[1:])) + self.A[0] * df

    def numerator(self, x):
        return P.polyval(x, self.A[1:]) / (x - self.zeta_inf) ** 2

    def base_constants(self, tol: float = None) -> tuple:
        """``(I_-, I_+)``: integrals from ``zeta_0 = -i`` to ``-1`` and ``+1``."""
        cfg = self.config
        return (branch_segment_integral(cfg, self.numerator, ZETA_0, -1.0, tol=tol),
                branch_segment_integral(cfg, self.numerator, ZETA_0, 1.0, tol=tol))

    def trace(self, points_per_side: int = 512, tol: float = None) -> list:
        I_m, I_p = self.base_constants(tol)
        zi, a0 = self.zeta_inf, self.A[0]

        def sv(x):
            return -a0 / ((x - zi) * self.two_abar)

        out = []
        for m, base in enumerate((I_m, I_p)):
            cn = trace_slit(self.config, m, self.numerator, sv, base / self.two_abar,
                            self.two_abar, points_per_side, tol=tol)
            out.append(cn.translated(self.B))
        return out

    def coefficients(self) -> dict:
        return {
            "A0_plus": self.A0_plus,
            "A0_minus": self.A0_minus,
            "A_plus": self.A_plus[1:].tolist(),
            "A_minus": self.A_minus[1:].tolist(),
            "d_plus": self.d_plus,
            "d_minus": self.d_minus,
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "c": [self.c.real, self.c.imag],
            "zeta_inf": self.zeta_inf,
            "B": [complex(self.B).real, complex(self.B).imag],
        }


def _moments(config: SlitConfig, shift: float, tol: float = None) -> np.ndarray:
    """``int_1^{1/k} x^j / ((x + shift)^2 sqrt|p2|) dx`` for ``j = 0, 1, 2``."""
    lo, hi = config.slits[1]
    return np.array([
        interval_weighted(config, lo, hi, lambda x, j=j: x ** j / (x + shift) ** 2, tol=tol).real
        for j in range(3)
    ])


def solve_n2_general(load: LoadingParams, k: float, zeta_inf: float, c: complex = 1.0,
                     B: complex = 0j, tol: float = None, _config: SlitConfig = None) -> N2Coefficients:
    """Closed-form coefficients for two cavities with finite ``zeta_inf``."""
    config = _config or SlitConfig.n2_finite(k, zeta_inf)
    c = complex(c)
    if c == 0:
        raise ConfigError("scale c must be nonzero")
    zi = float(np.real(zeta_inf))
    c1, c2 = c.real, c.imag
    ap, am, bp, bm = load.alpha_plus, load.alpha_minus, load.beta_plus, load.beta_minus

    p_zi = polynomial(config, zi).real
    dp_zi = sum(np.prod([zi - s for s in config.roots if s != r]) for r in config.roots)
    root = np.sqrt(abs(p_zi))
    d_plus = root * (c1 * ap - c2 * bp)
    d_minus = root * (c1 * bm + c2 * am)
    lam1 = dp_zi / (2.0 * p_zi)

    Im = _moments(config, -zi, tol)
    Ip = _moments(config, zi, tol)
    lam0 = zi ** 2 * Im[0] - 2.0 * zi * Im[1] + Im[2]
    if abs(lam0) < 1e-13:
        raise DegenerateGeometry(f"lambda0 = {lam0:.3e} vanishes")

    def coeffs(d):
        return np.array([
            0.0,
            d / lam0 * (zi * (lam1 * zi - 2.0) * Im[1] + (1.0 - lam1 * zi) * Im[2]),
            d / lam0 * (zi * (2.0 - lam1 * zi) * Im[0] + lam1 * Im[2]),
            -d / lam0 * ((1.0 - lam1 * zi) * Im[0] + lam1 * Im[1]),
        ])

    Ap, Am = coeffs(d_plus), coeffs(d_minus)
    A0p = -c1 * bp - c2 * ap
    A0m = -c1 * am + c2 * bm

    res = {}
    for tag, A, d in (("plus", Ap, d_plus), ("minus", Am, d_minus)):
        _, a1, a2, a3 = A
        res[f"value_{tag}"] = _rel(a1 + zi * a2 + zi ** 2 * a3 - d, a1, zi * a2, zi ** 2 * a3, d)
        res[f"slope_{tag}"] = _rel(a2 + 2 * zi * a3 - d * lam1, a2, 2 * zi * a3, d * lam1)
        t = (a1 * Im[0], a2 * Im[1], a3 * Im[2])
        res[f"loop1_{tag}"] = _rel(sum(t), *t)
        t = (a1 * Ip[0], -a2 * Ip[1], a3 * Ip[2])
        res[f"loop0_{tag}"] = _rel(sum(t), *t)
    return N2Coefficients(config=config, load=load, c=c, A0_plus=A0p, A0_minus=A0m,
                          A_plus=Ap, A_minus=Am, d_plus=d_plus, d_minus=d_minus,
                          lambda0=lam0, lambda1=lam1, I_minus=Im, I_plus=Ip, B=complex(B),
                          residuals=res)


def _require_symmetric(load: LoadingParams) -> None:
    if not load.is_symmetric:
        raise ConfigError("the symmetric two-cavity cases need tau = tau_inf = 0")


def solve_n2_sym_finite(load: LoadingParams, k: float, c_prime: float = 1.0,
                        B: complex = 0j, tol: float = None) -> N2Coefficients:
    """Symmetric case ``zeta_inf = 0``, ``c'' = 0`` from its simplified closed form."""
    _require_symmetric(load)
    config = SlitConfig.n2_sym_finite(k)
    c1 = float(c_prime)
    if c1 == 0.0:
        raise ConfigError("c_prime must be nonzero")
    ap, am = load.alpha_plus, load.alpha_minus
    Im = _moments(config, 0.0, tol)
    Ip = Im.copy()
    Ap = np.array([0.0, c1 * ap / k, 0.0, -c1 * ap * Im[0] / (k * Im[2])])
    Am = np.zeros(4)
    lam0 = Im[2]
    return N2Coefficients(config=config, load=load, c=complex(c1), A0_plus=0.0, A0_minus=-c1 * am,
                          A_plus=Ap, A_minus=Am, d_plus=c1 * ap / k, d_minus=0.0,
                          lambda0=lam0, lambda1=0.0, I_minus=Im, I_plus=Ip, B=complex(B))


def omega_prime_sym_finite(load: LoadingParams, k: float, c_prime: float, zeta, tol: float = None):
    """Simplified ``omega'`` of the symmetric finite case, evaluated directly."""
    config = SlitConfig.n2_sym_finite(k)
    Im = _moments(config, 0.0, tol)
    z = np.asarray(zeta, dtype=complex)
    f = branch_values(config, z)
    a = load.a.real
    return c_prime / (2 * a * z ** 2) * (
        load.alpha_minus + load.alpha_plus * (1 - z ** 2 * Im[0] / Im[2]) / (k * f))


def rho_n2(k: float, tol: float = None) -> float:
    """``I_2 / I_0`` with ``I_j = int_1^{1/k} x^j / sqrt|p2| dx``."""
    config = SlitConfig.n2_sym_inf(k)
    lo, hi = config.slits[1]
    I0 = interval_weighted(config, lo, hi, np.ones_like, tol=tol).real
    I2 = interval_weighted(config, lo, hi, lambda x: x ** 2, tol=tol).real
    return I2 / I0


def solve_n2_sym_inf(load: LoadingParams, k: float, c_prime: float = 1.0, B: complex = 0j,
                     tol: float = None) -> NLineCoefficients:
    """Symmetric two cavities with ``zeta_inf = infinity``.

    ``F_- = c' alpha_-`` and ``F_+ = c' alpha_+ (z^2 - rho) / f`` with
    ``rho = I_2 / I_0``.
    """
    _require_symmetric(load)
    config = SlitConfig.n2_sym_inf(k)
    c1 = float(c_prime)
    if c1 == 0.0:
        raise ConfigError("c_prime must be nonzero")
    rho = rho_n2(k, tol)
    ap, am = load.alpha_plus, load.alpha_minus
    Ap = np.array([0.0, -c1 * ap * rho, 0.0, c1 * ap])
    Am = np.array([c1 * am, 0.0, 0.0, 0.0])
    sol = NLineCoefficients(config=config, load=load, c=complex(c1), A_plus=Ap, A_minus=Am,
                            B=complex(B), k_bar=0.0)
    sol.rho = rho
    return sol


def omega_prime_n2(coeffs, zeta):
    return coeffs.omega_prime(zeta)


def trace_n2(coeffs, points_per_side: int = 512, tol: float = None) -> list:
    return coeffs.trace(points_per_side, tol=tol)

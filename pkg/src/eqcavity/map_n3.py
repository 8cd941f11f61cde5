"""Three cavities with a finite, non-real preimage of infinity.

With ``d = z - zeta_inf``, ``e = z - conj(zeta_inf)``, ``P = A4 + i A5`` and
``Q = A4 - i A5``,

    2 conj(a) f omega' = A1 + A2 z + P (f + f_inf + f'_inf d)/d^2
                                   - Q (f - conj(f_inf) - conj(f'_inf) e)/e^2.

The term at ``conj(zeta_inf)`` is regular there. ``A1`` and ``A2`` come from
two of the three loop conditions; the third is checked, not imposed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import SlitMap
from .contours import trace_along_axis
from .errors import ConfigError, SingularPeriods
from .loading import LoadingParams
from .quadrature import interval_weighted
from .radicals import SlitConfig, branch_dlog, branch_eval


@dataclass
class N3Coefficients(SlitMap):
    config: SlitConfig
    load: LoadingParams
    c: complex
    A1: complex
    A2: complex
    A4_plus: float
    A4_minus: float
    A5_plus: float
    A5_minus: float
    f_inf: complex
    df_inf: complex
    B: complex = 0j
    periods: np.ndarray = field(default=None, repr=False)
    J: np.ndarray = field(default=None, repr=False)
    residuals: dict = field(default_factory=dict)

    degree_at_infinity = 5
    A3_plus = A3_minus = 0.0

    def __post_init__(self):
        self.A4 = complex(self.A4_plus, -self.A4_minus)
        self.A5 = complex(self.A5_plus, -self.A5_minus)

    @property
    def zeta_inf(self) -> complex:
        return self.config.zeta_inf

    @property
    def P(self) -> complex:
        return self.A4 + 1j * self.A5

    @property
    def Q(self) -> complex:
        return self.A4 - 1j * self.A5

    def _pole_parts(self, z, f, P, Q):
        zi = self.zeta_inf
        d, e = z - zi, z - zi.conjugate()
        fi, dfi = self.f_inf, self.df_inf
        return (P * (f + fi + dfi * d) / d ** 2
                - Q * (f - fi.conjugate() - dfi.conjugate() * e) / e ** 2)

    def bracket(self, z, f):
        return self.A1 + self.A2 * z + self._pole_parts(z, f, self.P, self.Q)

    def omega_prime_f(self, z, f):
        return self.bracket(z, f) / (self.two_abar * f)

    def F_pair(self, z, f):
        # F_+ - F_- = bracket / f, and F_+ + F_- is the same expression with
        # conjugated real-part combinations (A_j+ + i A_j-)
        A1c, A2c = np.conj(self.A1), np.conj(self.A2)
        A4c, A5c = np.conj(self.A4), np.conj(self.A5)
        Pc, Qc = A4c + 1j * A5c, A4c - 1j * A5c
        diff = self.bracket(z, f) / f
        summ = (A1c + A2c * z + self._pole_parts(z, f, Pc, Qc)) / f
        return 0.5 * (summ + diff), 0.5 * (summ - diff)

    def eta(self, z, f):
        zi = self.zeta_inf
        d, e = z - zi, z - zi.conjugate()
        fi, dfi = self.f_inf, self.df_inf
        return ((self.A1 + self.A2 * z) * d ** 2 * e ** 2
                + self.P * e ** 2 * (f + fi + dfi * d)
                - self.Q * d ** 2 * (f - fi.conjugate() - dfi.conjugate() * e))

    def eta_prime(self, z, f, df):
        zi = self.zeta_inf
        d, e = z - zi, z - zi.conjugate()
        fi, dfi = self.f_inf, self.df_inf
        lin = self.A1 + self.A2 * z
        return (self.A2 * d ** 2 * e ** 2 + lin * (2 * d * e ** 2 + 2 * d ** 2 * e)
                + self.P * (2 * e * (f + fi + dfi * d) + e ** 2 * (df + dfi))
                - self.Q * (2 * d * (f - fi.conjugate() - dfi.conjugate() * e)
                            + d ** 2 * (df - dfi.conjugate())))

    def regular_integrand(self, x):
        """Integrand ``G`` left after the single-valued pole terms are split off."""
        zi = self.zeta_inf
        d, e = x - zi, x - zi.conjugate()
        fi, dfi = self.f_inf, self.df_inf
        return (self.A1 + self.A2 * x + self.P * (fi + dfi * d) / d ** 2
                + self.Q * (fi.conjugate() + dfi.conjugate() * e) / e ** 2)

    def single_valued(self, z):
        zi = self.zeta_inf
        return (-self.P / (z - zi) + self.Q / (z - zi.conjugate())) / self.two_abar

    def trace(self, points_per_side: int = 512, tol: float = None) -> list:
        contours = trace_along_axis(self.config, self.regular_integrand, self.single_valued,
                                    self.two_abar, points_per_side, tol=tol,
                                    avoid=(self.zeta_inf, self.zeta_inf.conjugate()))
        return [cn.translated(self.B) for cn in contours]

    def coefficients(self) -> dict:
        def pair(v):
            return [complex(v).real, complex(v).imag]

        return {
            "A1": pair(self.A1), "A2": pair(self.A2),
            "A3_plus": 0.0, "A3_minus": 0.0,
            "A4_plus": self.A4_plus, "A4_minus": self.A4_minus,
            "A5_plus": self.A5_plus, "A5_minus": self.A5_minus,
            "f_inf": pair(self.f_inf), "df_inf": pair(self.df_inf),
            "zeta_inf": pair(self.zeta_inf), "c": pair(self.c), "B": pair(self.B),
        }


def solve_n3_finite(load: LoadingParams, k: float, k1: float, k2: float, zeta_inf: complex,
                    c: complex = 1.0, B: complex = 0j, tol: float = None,
                    delta_min: float = 1e-12) -> N3Coefficients:
    config = SlitConfig.n3_finite(k, k1, k2, zeta_inf)
    c = complex(c)
    if c == 0:
        raise ConfigError("scale c must be nonzero")
    c1, c2 = c.real, c.imag
    ap, am, bp, bm = load.alpha_plus, load.alpha_minus, load.beta_plus, load.beta_minus
    A4p, A4m = -0.5 * (c1 * ap - c2 * bp), -0.5 * (c1 * bm + c2 * am)
    A5p, A5m = -0.5 * (c1 * bp + c2 * ap), 0.5 * (c1 * am - c2 * bm)
    zi = config.zeta_inf
    fi = complex(branch_eval(config, zi))
    dfi = fi * complex(branch_dlog(config, zi))
    sol = N3Coefficients(config=config, load=load, c=c, A1=0j, A2=0j, A4_plus=A4p, A4_minus=A4m,
                         A5_plus=A5p, A5_minus=A5m, f_inf=fi, df_inf=dfi, B=complex(B))
    P, Q = sol.P, sol.Q

    def tail(x):
        d, e = x - zi, x - zi.conjugate()
        return P * (fi + dfi * d) / d ** 2 + Q * (fi.conjugate() + dfi.conjugate() * e) / e ** 2

    # integrals over the upper side of each slit, 1/f = -i s_m / |f| there
    I = np.empty((3, 2), dtype=complex)
    J = np.empty(3, dtype=complex)
    for m, (lo, hi) in enumerate(config.slits):
        w = -1j * config.upper_sign(m)
        I[m, 0] = w * interval_weighted(config, lo, hi, np.ones_like, tol=tol)
        I[m, 1] = w * interval_weighted(config, lo, hi, lambda x: x, tol=tol)
        J[m] = w * interval_weighted(config, lo, hi, tail, tol=tol, avoid=(zi, zi.conjugate()))
    delta = I[0, 0] * I[1, 1] - I[0, 1] * I[1, 0]
    if abs(delta) < delta_min * max(abs(I[:2, :2]).max() ** 2, 1e-300):
        raise SingularPeriods(f"period determinant {delta:.3e} is numerically zero")
    # I A = -J for the first two rows
    sol.A1 = (J[1] * I[0, 1] - J[0] * I[1, 1]) / delta
    sol.A2 = (J[0] * I[1, 0] - J[1] * I[0, 0]) / delta
    sol.periods, sol.J = I, J
    third = J[1] * (I[0, 1] * I[2, 0] - I[0, 0] * I[2, 1]) + J[0] * (I[1, 0] * I[2, 1] - I[1, 1] * I[2, 0]) \
        + J[2] * delta
    scale = abs(J[1] * I[0, 1] * I[2, 0]) + abs(J[1] * I[0, 0] * I[2, 1]) \
        + abs(J[0] * I[1, 0] * I[2, 1]) + abs(J[0] * I[1, 1] * I[2, 0]) + abs(J[2] * delta)
    sol.residuals = {
        "delta": [delta.real, delta.imag],
        "third_condition": float(abs(third) / scale),
        "loops": [float(abs(I[m, 0] * sol.A1 + I[m, 1] * sol.A2 + J[m])
                        / (abs(I[m, 0] * sol.A1) + abs(I[m, 1] * sol.A2) + abs(J[m])))
                  for m in range(3)],
    }
    return sol


def omega_prime_n3(coeffs: N3Coefficients, zeta):
    z = np.asarray(zeta, dtype=complex)
    zc = coeffs.zeta_inf.conjugate()
    if np.any(np.abs(z - zc) < 1e-10):
        # removable point: average over a small circle
        eps = 1e-4
        pts = z[..., None] + eps * np.exp(2j * np.pi * np.arange(8) / 8)
        out = coeffs.omega_prime(pts).mean(axis=-1)
        return complex(out) if np.ndim(zeta) == 0 else out
    return coeffs.omega_prime(zeta)


def trace_n3_finite(coeffs: N3Coefficients, points_per_side: int = 512, tol: float = None):
    return coeffs.trace(points_per_side, tol=tol)

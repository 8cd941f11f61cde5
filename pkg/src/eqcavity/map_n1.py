"""Single cavity: the map onto the exterior of an ellipse in closed form.

``omega(z) = (c/2) [m_- z + m_+ f(z)] + B`` with ``f(z) = sqrt(z**2 - 1)`` and
``m_+- = 1 +- conj(b)/conj(a)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .base import SlitMap
from .contours import Contour
from .errors import ConfigError, DegenerateLoading, PoleHit
from .loading import LoadingParams
from .radicals import SlitConfig, branch_eval, branch_values


@dataclass
class N1Solution(SlitMap):
    load: LoadingParams
    c_minus1: float
    m_plus: complex
    m_minus: complex
    a1: float
    b1: float
    a2: float
    b2: float
    B: complex = 0j

    degree_at_infinity = 1

    def __post_init__(self):
        self.config = SlitConfig.n1()

    @property
    def c(self) -> complex:
        return complex(self.c_minus1)

    def F_pair(self, z, f):
        a, b, c = self.load.a, self.load.b, self.c_minus1
        Fp = c * (a + b).real * z / f + 1j * c * (b.imag - a.imag)
        Fm = 1j * c * (b - a.conjugate()).imag * z / f + c * (b - a.conjugate()).real
        return Fp, Fm

    def omega_prime_f(self, z, f):
        return 0.5 * self.c_minus1 * (self.m_minus + self.m_plus * z / f)

    def psi_f(self, z, f):
        a, b = self.load.a, self.load.b
        num = (a + b) * z - (a - b) * f
        den = (a.conjugate() + b.conjugate()) * z + (a.conjugate() - b.conjugate()) * f
        return a.conjugate() * num / den

    def eta(self, z, f):
        return self.m_minus * f + self.m_plus * z

    def eta_prime(self, z, f, df):
        return self.m_minus * df + self.m_plus

    def omega_f(self, z, f):
        return 0.5 * self.c_minus1 * (self.m_minus * z + self.m_plus * f) + self.B

    def omega(self, zeta):
        z = np.asarray(zeta, dtype=complex)
        out = self.omega_f(z, branch_eval(self.config, z))
        return complex(out) if np.ndim(zeta) == 0 else out

    def trace(self, points_per_side: int = 512, tol: float = None) -> list:
        if points_per_side < 16:
            raise ValueError("points_per_side must be >= 16")
        x = np.cos(np.linspace(np.pi, 0.0, points_per_side + 1))
        x[0], x[-1] = -1.0, 1.0
        up = self.omega_f(x + 0j, branch_values(self.config, x + 0j, 1))
        dn = self.omega_f(x + 0j, branch_values(self.config, x + 0j, -1))
        pts = np.concatenate([up, dn[::-1][1:]])
        xi = np.concatenate([x, x[::-1][1:]])
        side = np.concatenate([np.ones(len(x), int), -np.ones(len(x) - 1, int)])
        return [Contour(0, pts, xi, side, float(abs(up[-1] - dn[-1])))]

    def conic_residual(self, points) -> np.ndarray:
        """Residual of the ellipse equation at the given points.

        Scaled by the size of the individual terms, which stays meaningful for
        the thin ellipses near gamma = 1 where the right-hand side collapses.
        """
        z = np.asarray(points, dtype=complex) - self.B
        x, y = z.real, z.imag
        a1, b1, a2, b2 = self.a1, self.b1, self.a2, self.b2
        rhs = (a1 * a2 + b1 * b2) ** 2
        terms = [(a2 ** 2 + b1 ** 2) * x ** 2, (a1 ** 2 + b2 ** 2) * y ** 2,
                 -2 * (a1 * b1 - a2 * b2) * x * y]
        scale = np.abs(terms[0]) + np.abs(terms[1]) + np.abs(terms[2]) + abs(rhs)
        return np.abs(sum(terms) - rhs) / np.maximum(scale, 1e-300)

    def invert_parameter(self, points) -> np.ndarray:
        """Recover the slit parameter ``xi`` from contour points."""
        z = np.asarray(points, dtype=complex) - self.B
        return (self.a2 * z.real + self.b2 * z.imag) / (self.a1 * self.a2 + self.b1 * self.b2)

    def conic_discriminant(self) -> float:
        """``B^2 - 4AC`` of the implied quadratic form; negative for an ellipse."""
        a1, b1, a2, b2 = self.a1, self.b1, self.a2, self.b2
        A, C, Bxy = a2 ** 2 + b1 ** 2, a1 ** 2 + b2 ** 2, -2 * (a1 * b1 - a2 * b2)
        return Bxy ** 2 - 4 * A * C

    def coefficients(self) -> dict:
        return {
            "c_minus1": self.c_minus1,
            "B": [self.B.real, self.B.imag],
            "m_plus": [self.m_plus.real, self.m_plus.imag],
            "m_minus": [self.m_minus.real, self.m_minus.imag],
            "a1": self.a1, "b1": self.b1, "a2": self.a2, "b2": self.b2,
        }


def build_n1(load: LoadingParams, c_minus1: float = 1.0, B: complex = 0j) -> N1Solution:
    c = complex(c_minus1)
    if c.imag != 0.0:
        raise ConfigError("the single-cavity scale c_minus1 must be real")
    c = c.real
    if c == 0.0:
        raise ConfigError("c_minus1 must be nonzero")
    r = load.b.conjugate() / load.a.conjugate()
    mp, mm = 1 + r, 1 - r
    lo = 0.5 * c * mm
    hi = 0.5 * c * mp
    return N1Solution(load=load, c_minus1=c, B=complex(B), m_plus=mp, m_minus=mm,
                      a1=lo.real, b1=lo.imag, a2=hi.real, b2=hi.imag)


def psi_n1(sol: N1Solution, load: LoadingParams, zeta) -> complex:
    z = np.asarray(zeta, dtype=complex)
    f = branch_eval(sol.config, z)
    a, b = load.a, load.b
    den = (a.conjugate() + b.conjugate()) * z + (a.conjugate() - b.conjugate()) * f
    scale = abs(a) * (np.abs(z) + np.abs(f))
    if np.any(np.abs(den) < 1e-13 * scale):
        raise PoleHit("psi denominator vanishes at the requested point")
    out = a.conjugate() * ((a + b) * z - (a - b) * f) / den
    return complex(out) if np.ndim(zeta) == 0 else out


def removable_points_n1(load: LoadingParams) -> list:
    """For ``gamma = 1`` the would-be poles sit on the slit and are removable."""
    phi = cmath.phase(load.a) - cmath.phase(load.b)
    s = math.sin(0.5 * phi)
    return [complex(s), complex(-s)]


def poles_n1(load: LoadingParams) -> tuple:
    """``(Z, locations)`` of the zeros of ``omega'`` off the slit."""
    if load.is_degenerate:
        err = DegenerateLoading("gamma = 1: the singular points lie on the slit and are removable")
        err.points = removable_points_n1(load)
        raise err
    if load.gamma < 1.0:
        return 0, []
    # s and 1/s rather than two principal roots: they disagree for negative ratios
    s = cmath.sqrt(load.b.conjugate() / load.a.conjugate())
    z = 0.5j * (s - 1.0 / s)
    return 2, [z, -z]

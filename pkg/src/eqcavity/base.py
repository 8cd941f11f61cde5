"""Behaviour shared by every map family.

A concrete map supplies the two Schwarz-problem solutions ``F_+`` and ``F_-``
as functions of ``(z, f(z))``; derivative of the map, potential ``psi``,
one-sided boundary values and loop integrals all follow from them.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import PoleHit
from .loading import LoadingParams
from .quadrature import loop_integral_of
from .radicals import (CutSide, SlitConfig, branch_dlog, branch_eval, branch_values,
                       slit_side_values)


class SlitMap:
    config: SlitConfig
    load: LoadingParams
    c: complex
    B: complex = 0j
    #: winding of ``eta`` on a large circle
    degree_at_infinity: int = 0

    # -- to be provided by subclasses -----------------------------------
    def F_pair(self, z, f):
        raise NotImplementedError

    def eta(self, z, f):
        raise NotImplementedError

    def eta_prime(self, z, f, df):
        raise NotImplementedError

    def trace(self, points_per_side: int = 512, tol: float = None) -> list:
        raise NotImplementedError

    def coefficients(self) -> dict:
        raise NotImplementedError

    # -- derived quantities ---------------------------------------------
    @property
    def two_abar(self) -> complex:
        return 2.0 * self.load.a_bar

    def omega_prime_f(self, z, f):
        Fp, Fm = self.F_pair(z, f)
        return (Fp - Fm) / self.two_abar

    def psi_f(self, z, f):
        Fp, Fm = self.F_pair(z, f)
        return self.load.a_bar * (Fp + Fm) / (Fp - Fm)

    def _off_cut(self, zeta):
        z = np.asarray(zeta, dtype=complex)
        zi = self.config.zeta_inf
        if zi is not None and np.any(np.abs(z - zi) < 1e-10):
            raise PoleHit(f"evaluation within 1e-10 of zeta_inf={zi}")
        return z, branch_eval(self.config, z)

    def omega_prime(self, zeta):
        z, f = self._off_cut(zeta)
        out = self.omega_prime_f(z, f)
        return complex(out) if np.ndim(zeta) == 0 else out

    def psi(self, zeta):
        z, f = self._off_cut(zeta)
        out = self.psi_f(z, f)
        return complex(out) if np.ndim(zeta) == 0 else out

    def F(self, zeta):
        z, f = self._off_cut(zeta)
        return self.F_pair(z, f)

    def omega_prime_side(self, xi, side: CutSide):
        z = np.asarray(xi, dtype=float) + 0j
        f = branch_values(self.config, z, side.side)
        return self.omega_prime_f(z, f)

    def psi_side(self, xi, side: CutSide):
        z = np.asarray(xi, dtype=float) + 0j
        f = branch_values(self.config, z, side.side)
        return self.psi_f(z, f)

    # -- zero counting handles --------------------------------------------
    def eta_at(self, z, side=0):
        z = np.asarray(z, dtype=complex)
        return self.eta(z, branch_values(self.config, z, side))

    def eta_prime_at(self, z, side=0):
        z = np.asarray(z, dtype=complex)
        f = branch_values(self.config, z, side)
        return self.eta_prime(z, f, f * branch_dlog(self.config, z))

    # -- identities -----------------------------------------------------
    def loop_residuals(self, tol: float = None) -> list:
        """Relative ``|loop integral of omega'|`` for every slit."""
        out = []
        for m in range(self.config.n):
            val, scale = loop_integral_of(self.config, m, self.omega_prime_f, tol=tol)
            out.append(abs(val) / max(scale, 1e-300))
        return out

    def loop_values(self, tol: float = None) -> list:
        return [loop_integral_of(self.config, m, self.omega_prime_f, tol=tol)[0]
                for m in range(self.config.n)]

    def boundary_samples(self, samples: int = 256):
        """``(x, side, f)`` at Chebyshev-distributed points on both sides of every slit."""
        theta = (np.arange(samples) + 0.5) * math.pi / samples
        for m in range(self.config.n):
            for side in (1, -1):
                x, _, f = slit_side_values(self.config, m, theta, side)
                yield m, side, x + 0j, f

    def scale(self) -> float:
        return abs(self.c)

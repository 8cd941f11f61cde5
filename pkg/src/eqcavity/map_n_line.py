"""Collinear slits with ``omega(inf) = inf``.

``F_+ = h_+(z)/f + i A0+`` and ``F_- = i h_-(z)/f + A0-`` where ``h_+-`` are
polynomials of degree ``n`` with real coefficients. The two leading
coefficients and ``A0+-`` follow from the behaviour at infinity; the remaining
``n - 1`` are fixed by ``n - 1`` single-valuedness conditions, the last one
holding automatically.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .base import SlitMap
from .contours import trace_along_axis
from .errors import ConfigError, NonConvergence, SingularPeriods
from .loading import LoadingParams
from .quadrature import interval_weighted
from .radicals import SlitConfig

log = logging.getLogger(__name__)

#: relative gap below which a quadrature failure is attributed to merging slits
MERGE_GAP = 1e-4


@dataclass
class NLineCoefficients(SlitMap):
    """Coefficients ``A_0..A_{n+1}`` (real ``+``/``-`` parts and combined).

    ``A[0] = i A0+ - A0-`` and ``A[j] = Aj+ - i Aj-`` for ``j >= 1``.
    """

    config: SlitConfig
    load: LoadingParams
    c: complex
    A_plus: np.ndarray
    A_minus: np.ndarray
    B: complex = 0j
    k_bar: float = 0.0
    periods: np.ndarray = field(default=None, repr=False)
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        self.A = self.A_plus - 1j * self.A_minus
        self.A[0] = 1j * self.A_plus[0] - self.A_minus[0]
        self.degree_at_infinity = self.config.n

    @property
    def n(self) -> int:
        return self.config.n

    def F_pair(self, z, f):
        hp = P.polyval(z, self.A_plus[1:])
        hm = P.polyval(z, self.A_minus[1:])
        return hp / f + 1j * self.A_plus[0], 1j * hm / f + self.A_minus[0]

    def omega_prime_f(self, z, f):
        return (self.A[0] + P.polyval(z, self.A[1:]) / f) / self.two_abar

    def eta(self, z, f):
        return P.polyval(z, self.A[1:]) + self.A[0] * f

    def eta_prime(self, z, f, df):
        return P.polyval(z, P.polyder(self.A[1:])) + self.A[0] * df

    def numerator(self, x):
        return P.polyval(x, self.A[1:])

    def omega_at_infinity(self) -> complex:
        """Limit of ``omega'`` at infinity; equals ``c_{-1}``."""
        return (self.A[0] + self.A[-1]) / self.two_abar

    def trace(self, points_per_side: int = 512, tol: float = None) -> list:
        a0 = self.A[0]
        contours = trace_along_axis(self.config, self.numerator,
                                    lambda x: a0 * x / self.two_abar,
                                    self.two_abar, points_per_side, tol=tol)
        return [cn.translated(self.B) for cn in contours]

    def coefficients(self) -> dict:
        return {
            "A_plus": self.A_plus.tolist(),
            "A_minus": self.A_minus.tolist(),
            "k_bar": self.k_bar,
            "c": [self.c.real, self.c.imag],
            "B": [complex(self.B).real, complex(self.B).imag],
        }


def period_matrix(config: SlitConfig, tol: float = None) -> np.ndarray:
    """``I[m, j] = int_{l_m} x^j / |f(x)| dx`` for ``j = 0..n``."""
    n = config.n
    I = np.empty((n, n + 1))
    for m, (lo, hi) in enumerate(config.slits):
        for j in range(n + 1):
            I[m, j] = interval_weighted(config, lo, hi, lambda x, j=j: x ** j, tol=tol).real
    return I


def asymptotic_coefficients(load: LoadingParams, c: complex):
    """``(A0+, A0-, A_{n+1}+, A_{n+1}-)`` from ``F_+- -> c (b +- conj(a))``."""
    c1, c2 = complex(c).real, complex(c).imag
    ap, am, bp, bm = load.alpha_plus, load.alpha_minus, load.beta_plus, load.beta_minus
    return (ap * c2 + bp * c1, am * c1 - bm * c2, ap * c1 - bp * c2, am * c2 + bm * c1)


def solve_line(load: LoadingParams, config: SlitConfig, c: complex = 1.0, B: complex = 0j,
               tol: float = None, cond_max: float = 1e12) -> NLineCoefficients:
    """Solve the ``omega(inf) = inf`` family on any real slit configuration."""
    if not config.at_infinity:
        raise ConfigError("line family requires zeta_inf = infinity")
    c = complex(c)
    if c == 0:
        raise ConfigError("scale c must be nonzero")
    n = config.n
    k_bar = 0.5 * sum(config.roots)
    a0p, a0m, anp, anm = asymptotic_coefficients(load, c)
    Ap = np.zeros(n + 2)
    Am = np.zeros(n + 2)
    Ap[0], Am[0], Ap[n + 1], Am[n + 1] = a0p, a0m, anp, anm
    Ap[n], Am[n] = -k_bar * anp, -k_bar * anm
    residuals = {}
    I = None
    if n >= 2:
        try:
            I = period_matrix(config, tol=tol)
        except NonConvergence as exc:
            gap = min(hi - lo for lo, hi in config.gaps)
            if gap < MERGE_GAP * (config.roots[-1] - config.roots[0]):
                # the periods blow up only logarithmically as two slits merge,
                # so quadrature gives out long before the condition number does
                raise SingularPeriods(f"slits nearly merged (gap {gap:.1e}): {exc}") from exc
            raise
        M = I[: n - 1, : n - 1]
        last = I[:, n] - k_bar * I[:, n - 1]
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > cond_max:
            raise SingularPeriods(f"period matrix condition number {cond:.3e}")
        rhs = -np.outer(last[: n - 1], [anp, anm])
        sol = np.linalg.solve(M, rhs)
        Ap[1:n], Am[1:n] = sol[:, 0], sol[:, 1]
        full = np.column_stack([I[:, : n - 1], last])
        sv = np.linalg.svd(full, compute_uv=False)
        residuals["period_matrix_cond"] = float(cond)
        residuals["full_matrix_sv_ratio"] = float(sv[-1] / sv[0])
        for tag, vec in (("plus", Ap), ("minus", Am)):
            terms = I[:, : n - 1] * vec[1:n] + 0.0
            r = terms.sum(axis=1) + last * vec[n + 1]
            s = np.abs(terms).sum(axis=1) + np.abs(last * vec[n + 1])
            residuals[f"loop_{tag}"] = (np.abs(r) / np.maximum(s, 1e-300)).tolist()
    sol = NLineCoefficients(config=config, load=load, c=c, A_plus=Ap, A_minus=Am, B=complex(B),
                            k_bar=k_bar, periods=I, residuals=residuals)
    return sol


def solve_n_line(load: LoadingParams, endpoints, c: complex = 1.0, B: complex = 0j,
                 tol: float = None) -> NLineCoefficients:
    """``n >= 3`` collinear slits ``[k_{2j}, k_{2j+1}]`` with ``k_0 = -1``, ``k_{2n-1} = 1``."""
    config = SlitConfig.n_line(endpoints)
    return solve_line(load, config, c=c, B=B, tol=tol)


def omega_prime_n_line(coeffs: NLineCoefficients, zeta):
    return coeffs.omega_prime(zeta)


def trace_n3_line(coeffs: NLineCoefficients, points_per_side: int = 512, tol: float = None):
    if coeffs.n != 3:
        log.info("tracing n=%d line configuration with the generalised path bookkeeping", coeffs.n)
    return coeffs.trace(points_per_side, tol=tol)


def normalize_endpoints(endpoints) -> tuple:
    """Affinely rescale so the first endpoint is -1 and the last is 1."""
    e = np.asarray(endpoints, dtype=float)
    lo, hi = e[0], e[-1]
    if hi <= lo:
        raise ConfigError("endpoints must be increasing")
    if lo == -1.0 and hi == 1.0:
        return tuple(e.tolist())
    out = -1.0 + 2.0 * (e - lo) / (hi - lo)
    out[0], out[-1] = -1.0, 1.0
    if not np.array_equal(out, e):
        log.warning("rescaled slit endpoints %s -> %s", e.tolist(), out.tolist())
    return tuple(out.tolist())

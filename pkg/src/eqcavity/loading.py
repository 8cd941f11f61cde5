"""Loading data and the complex parameters derived from it."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NullLoading

#: relative tolerance used to classify ``gamma == 1``
GAMMA_ONE_RTOL = 1e-12


@dataclass(frozen=True)
class LoadingParams:
    """Far-field stresses, hole traction and the derived complex parameters.

    ``a = (sigma - p)/2 + i tau`` and ``b = (sigma2_inf - sigma1_inf)/2 + i tau_inf``
    where ``sigma = sigma1_inf + sigma2_inf - p`` is the prescribed tangential
    stress on every contour. ``b + conj(a) = alpha_plus + i beta_plus`` and
    ``b - conj(a) = alpha_minus + i beta_minus``.
    """

    sigma1_inf: float
    sigma2_inf: float
    tau_inf: float
    p: float
    tau: float
    sigma: float
    a: complex
    b: complex
    alpha_plus: float
    alpha_minus: float
    beta_plus: float
    beta_minus: float
    gamma: float

    @property
    def a_bar(self) -> complex:
        return self.a.conjugate()

    @property
    def is_degenerate(self) -> bool:
        return abs(self.gamma - 1.0) <= GAMMA_ONE_RTOL

    @property
    def is_symmetric(self) -> bool:
        return self.tau == 0.0 and self.tau_inf == 0.0

    @classmethod
    def from_complex(cls, a: complex, b: complex, p: float = 0.0) -> "LoadingParams":
        """Back out the five stresses that produce the given ``a`` and ``b``."""
        a, b = complex(a), complex(b)
        sigma = 2.0 * a.real + p
        total = sigma + p
        sigma1 = 0.5 * (total - 2.0 * b.real)
        sigma2 = 0.5 * (total + 2.0 * b.real)
        return derive_loading(sigma1, sigma2, b.imag, p, a.imag)

    def as_dict(self) -> dict:
        return {
            "sigma1_inf": self.sigma1_inf,
            "sigma2_inf": self.sigma2_inf,
            "tau_inf": self.tau_inf,
            "p": self.p,
            "tau": self.tau,
            "sigma": self.sigma,
            "a": [self.a.real, self.a.imag],
            "b": [self.b.real, self.b.imag],
            "alpha_plus": self.alpha_plus,
            "alpha_minus": self.alpha_minus,
            "beta_plus": self.beta_plus,
            "beta_minus": self.beta_minus,
            "gamma": self.gamma,
        }


def derive_loading(sigma1_inf: float, sigma2_inf: float, tau_inf: float,
                   p: float, tau: float) -> LoadingParams:
    values = [float(v) for v in (sigma1_inf, sigma2_inf, tau_inf, p, tau)]
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"non-finite loading input: {values}")
    s1, s2, tinf, p, tau = values
    sigma = s1 + s2 - p
    a = complex(0.5 * (sigma - p), tau)
    b = complex(0.5 * (s2 - s1), tinf)
    if a == 0:
        raise NullLoading("a = (sigma - p)/2 + i tau vanishes; the map scale degenerates")
    return LoadingParams(
        sigma1_inf=s1,
        sigma2_inf=s2,
        tau_inf=tinf,
        p=p,
        tau=tau,
        sigma=sigma,
        a=a,
        b=b,
        alpha_plus=s2 - p,
        alpha_minus=p - s1,
        beta_plus=tinf - tau,
        beta_minus=tinf + tau,
        gamma=abs(b) / abs(a),
    )

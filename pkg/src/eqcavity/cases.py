"""Dispatch from a case tag and parameter blocks to a solved map."""
from __future__ import annotations

import logging

from .errors import ConfigError, EqCavityError
from .loading import LoadingParams
from .map_n1 import build_n1, poles_n1
from .map_n2 import solve_n2_general, solve_n2_sym_finite, solve_n2_sym_inf
from .map_n3 import solve_n3_finite
from .map_n_line import normalize_endpoints, solve_n_line
from .zerocount import (ADJACENT_WINDOW, ZeroReport, count_closed_form_n2inf, count_map,
                        oracle_map)

log = logging.getLogger(__name__)

GEOMETRY_KEYS = {
    "n1": set(),
    "n2-finite": {"k", "zeta_inf"},
    "n2-sym-finite": {"k"},
    "n2-sym-inf": {"k"},
    "n3-finite": {"k", "k1", "k2", "zeta_inf"},
    "n-line": {"endpoints"},
}


def as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex values are given as [re, im], got {v}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def build_map(case: str, load: LoadingParams, geometry: dict, c: complex = 1.0, B: complex = 0j):
    if case not in GEOMETRY_KEYS:
        raise ConfigError(f"unknown case {case!r}; expected one of {sorted(GEOMETRY_KEYS)}")
    need = GEOMETRY_KEYS[case]
    extra = set(geometry) - need
    missing = need - set(geometry)
    if extra:
        raise ConfigError(f"unknown geometry keys for {case}: {sorted(extra)}")
    if missing:
        raise ConfigError(f"missing geometry keys for {case}: {sorted(missing)}")
    g = geometry
    c = complex(c)
    if case == "n1":
        if c.imag != 0:
            raise ConfigError("n1 needs a real scale (c_dblprime = 0)")
        return build_n1(load, c.real, B)
    if case == "n2-finite":
        zi = as_complex(g["zeta_inf"])
        if zi.imag != 0:
            raise ConfigError("n2-finite needs a real zeta_inf")
        return solve_n2_general(load, float(g["k"]), zi.real, c=c, B=B)
    if case in ("n2-sym-finite", "n2-sym-inf"):
        if c.imag != 0:
            raise ConfigError(f"{case} needs c_dblprime = 0")
        solver = solve_n2_sym_finite if case == "n2-sym-finite" else solve_n2_sym_inf
        return solver(load, float(g["k"]), c.real, B=B)
    if case == "n3-finite":
        return solve_n3_finite(load, float(g["k"]), float(g["k1"]), float(g["k2"]),
                               as_complex(g["zeta_inf"]), c=c, B=B)
    return solve_n_line(load, normalize_endpoints(g["endpoints"]), c=c, B=B)


def zero_reports(sol, case: str, oracle: bool = True, seed: int = 0) -> dict:
    """Every applicable count, keyed by method, plus an ``agree`` flag."""
    out = {}
    gamma = sol.load.gamma
    if sol.load.is_degenerate:
        out["argument-principle"] = ZeroReport(None, "argument-principle", gamma,
                                               details={"skipped": "gamma = 1"}).as_dict()
        return {"methods": out, "agree": True, "Z": None}

    def attempt(name, fn):
        try:
            rep = fn()
            out[name] = rep.as_dict()
        except EqCavityError as exc:
            out[name] = {"Z": None, "method": name, "error": type(exc).__name__, "message": str(exc)}

    attempt("argument-principle", lambda: count_map(sol))
    if case == "n1":
        def closed():
            Z, locs = poles_n1(sol.load)
            return ZeroReport(Z, "closed-form", gamma, zeros=locs)
        attempt("closed-form", closed)
    elif case == "n2-sym-inf":
        attempt("closed-form", lambda: count_closed_form_n2inf(sol.load, sol.config.k, sol.rho))
    if oracle:
        attempt("oracle", lambda: oracle_map(sol, seed=seed))
    counts = {v["Z"] for v in out.values() if v.get("Z") is not None}
    Z = out["argument-principle"].get("Z")
    result = {"methods": out, "agree": len(counts) <= 1, "Z": Z}
    if case == "n3-finite" and Z is not None:
        # eta carries a double zero at conj(zeta_inf) where omega' is regular
        result["eta_zeros_at_conj_zeta_inf"] = 2
        result["omega_prime_zeros"] = Z - 2
    if abs(gamma - 1.0) < ADJACENT_WINDOW:
        result["note"] = "gamma within the degenerate-adjacent window; counts are not trusted"
    return result

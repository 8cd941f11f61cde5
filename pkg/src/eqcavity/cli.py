"""Command-line front end.

Every subcommand reads a JSON run configuration with the blocks ``case``,
``loading``, ``geometry``, ``scale`` and ``output`` (plus ``stress`` and
``sweep`` where relevant), writes its files under the output directory and a
``manifest.json`` that embeds the fully resolved configuration. A manifest is
itself a valid configuration, so a run can be repeated from it.

Exit codes: 0 success (a "nonexistent" verdict is a valid answer), 2 invalid
configuration, 3 numerical failure.
"""
from __future__ import annotations

import copy
import hashlib
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from .cases import GEOMETRY_KEYS, as_complex, build_map, zero_reports
from .errors import ConfigError, EqCavityError, NullLoading
from .loading import LoadingParams, derive_loading
from .quadrature import default_tol
from .verify import (STRESS_HEADER, contours_intersect, existence_verdict, refine_trace,
                     stress_profile, subsample, verify_map)
from .zerocount import count_map

log = logging.getLogger("eqcavity")

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

CONTOUR_HEADER = ["cavity", "side", "xi", "s", "x", "y"]

LOADING_KEYS = ("sigma1_inf", "sigma2_inf", "tau_inf", "p", "tau")
SCALE_DEFAULTS = {"c_prime": 1.0, "c_dblprime": 0.0, "B": [0.0, 0.0]}
OUTPUT_DEFAULTS = {
    "dir": "out",
    "formats": ["csv"],
    "points_per_side": 512,
    "samples": 256,
    "arclength_rtol": 1e-8,
    "tol": None,
    "oracle": True,
    "seed": 0,
}
STRESS_DEFAULTS = {"cavity": 0, "side": None}
SWEEP_DEFAULTS = {"gamma": [0.1, 2.0, 8], "param": None, "values": [None], "workers": 1,
                  "oracle": False}
TOP_KEYS = {"case", "loading", "geometry", "scale", "output", "stress", "sweep"}


# -- configuration -----------------------------------------------------------------

def _merge(block: str, given, defaults: dict) -> dict:
    given = given or {}
    if not isinstance(given, dict):
        raise ConfigError(f"block {block!r} must be an object")
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown keys in {block!r}: {sorted(unknown)}")
    out = copy.deepcopy(defaults)
    out.update(given)
    return out


def resolve_config(raw: dict) -> dict:
    """Validate ``raw`` and fill every default; the result is what the manifest stores."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(raw) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    case = raw.get("case")
    if case not in GEOMETRY_KEYS:
        raise ConfigError(f"case must be one of {sorted(GEOMETRY_KEYS)}, got {case!r}")
    loading = raw.get("loading")
    if not isinstance(loading, dict):
        raise ConfigError("missing loading block")
    extra = set(loading) - set(LOADING_KEYS)
    if extra:
        raise ConfigError(f"unknown keys in 'loading': {sorted(extra)}")
    missing = [k for k in ("sigma1_inf", "sigma2_inf") if k not in loading]
    if missing:
        raise ConfigError(f"missing loading keys: {missing}")
    loading = {k: float(loading.get(k, 0.0)) for k in LOADING_KEYS}
    geometry = raw.get("geometry") or {}
    if not isinstance(geometry, dict):
        raise ConfigError("block 'geometry' must be an object")
    need = GEOMETRY_KEYS[case]
    if set(geometry) != need:
        raise ConfigError(f"{case} geometry needs exactly {sorted(need)}, got {sorted(geometry)}")
    cfg = {
        "case": case,
        "loading": loading,
        "geometry": copy.deepcopy(geometry),
        "scale": _merge("scale", raw.get("scale"), SCALE_DEFAULTS),
        "output": _merge("output", raw.get("output"), OUTPUT_DEFAULTS),
    }
    if "stress" in raw:
        cfg["stress"] = _merge("stress", raw["stress"], STRESS_DEFAULTS)
    if "sweep" in raw:
        cfg["sweep"] = _merge("sweep", raw["sweep"], SWEEP_DEFAULTS)
    out = cfg["output"]
    if out["tol"] is None:
        out["tol"] = default_tol()
    out["tol"] = float(out["tol"])
    if not out["tol"] > 0:
        raise ConfigError("output.tol must be positive")
    fmts = out["formats"]
    if not isinstance(fmts, list) or not set(fmts) <= {"csv", "svg"}:
        raise ConfigError("output.formats must be a list drawn from ['csv', 'svg']")
    for key in ("points_per_side", "samples"):
        if not isinstance(out[key], int) or out[key] < 64:
            raise ConfigError(f"output.{key} must be an integer >= 64")
    return cfg


def apply_overrides(raw: dict, overrides) -> dict:
    """``key.sub=value`` assignments; values are parsed as JSON when possible."""
    raw = copy.deepcopy(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, text = item.split("=", 1)
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        parts = key.strip().split(".")
        node = raw
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set {key}: {p!r} is not a block")
        node[parts[-1]] = value
    return raw


def load_config(path: str, overrides=(), out_dir: str = None, svg: bool = False) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    if isinstance(raw, dict) and "config" in raw and "command" in raw:
        raw = raw["config"]  # re-run from a manifest
    raw = apply_overrides(raw, overrides)
    if out_dir is not None:
        raw.setdefault("output", {})["dir"] = out_dir
    if svg:
        fm = raw.setdefault("output", {}).setdefault("formats", ["csv"])
        if "svg" not in fm:
            fm.append("svg")
    return resolve_config(raw)


def loading_of(cfg: dict) -> LoadingParams:
    ld = cfg["loading"]
    return derive_loading(*(ld[k] for k in LOADING_KEYS))


def solve(cfg: dict, load: LoadingParams = None, geometry: dict = None):
    sc = cfg["scale"]
    c = complex(float(sc["c_prime"]), float(sc["c_dblprime"]))
    return build_map(cfg["case"], load or loading_of(cfg), geometry or cfg["geometry"], c,
                     as_complex(sc["B"]))


# -- output -------------------------------------------------------------------------

def jsonable(v):
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return jsonable(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return [jsonable(float(v.real)), jsonable(float(v.imag))]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def _num(x) -> str:
    return repr(float(x))


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(r if isinstance(r, str) else _num(r) if not isinstance(r, (int, np.integer))
                       else str(int(r)) for r in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_svg(path: Path, contours, size: int = 800, margin: float = 0.05) -> None:
    """One path per cavity in a square viewport fitted to all contours."""
    pts = np.concatenate([cn.points for cn in contours])
    x0, x1, y0, y1 = pts.real.min(), pts.real.max(), pts.imag.min(), pts.imag.max()
    span = max(x1 - x0, y1 - y0, 1e-300) * (1 + 2 * margin)
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)

    def px(z):
        return (size * (0.5 + (z.real - cx) / span), size * (0.5 - (z.imag - cy) / span))

    colours = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    for cn in contours:
        xy = [px(z) for z in cn.points]
        d = "M " + " L ".join(f"{x:.3f} {y:.3f}" for x, y in xy)
        out.append(f'<path id="cavity{cn.cavity}" d="{d}" fill="none" '
                   f'stroke="{colours[cn.cavity % len(colours)]}" stroke-width="1.5"/>')
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n")


def contour_rows(cn):
    return [[cn.cavity, int(sd), float(xi), float(s), float(z.real), float(z.imag)]
            for sd, xi, s, z in zip(cn.side, cn.xi, cn.s, cn.points)]


def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Run:
    """Collects derived values and written files, then emits the manifest."""

    def __init__(self, command: str, cfg: dict):
        self.command = command
        self.cfg = cfg
        self.dir = Path(cfg["output"]["dir"])
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []
        self.derived = {}
        self.status = "ok"
        self.error = None

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.dir / name

    def write_json(self, name: str, data) -> None:
        self.path(name).write_text(json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n")

    def record_solution(self, sol) -> None:
        self.derived["loading"] = sol.load.as_dict()
        self.derived["coefficients"] = sol.coefficients()
        res = dict(getattr(sol, "residuals", {}) or {})
        res["loops"] = [float(r) for r in sol.loop_residuals()]
        self.derived["residuals"] = res

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "config": self.cfg,
            "status": self.status,
            "error": self.error,
            "derived": self.derived,
            "files": {name: _sha(self.dir / name) for name in sorted(set(self.files))},
        }
        (self.dir / "manifest.json").write_text(
            json.dumps(jsonable(manifest), indent=2, sort_keys=True) + "\n")


def execute(command: str, cfg: dict, body) -> int:
    os.environ["ESC_TOL"] = repr(cfg["output"]["tol"])
    run = Run(command, cfg)
    code = 0
    try:
        body(run)
    except (ConfigError, NullLoading) as exc:
        run.status, run.error = "config-error", {"name": type(exc).__name__, "message": str(exc)}
        code = EXIT_CONFIG
    except (EqCavityError, ArithmeticError, np.linalg.LinAlgError) as exc:
        run.status, run.error = "numerical-error", {"name": type(exc).__name__, "message": str(exc)}
        code = EXIT_NUMERICAL
    run.finish()
    if code:
        click.echo(f"error: {run.error['name']}: {run.error['message']}", err=True)
    return code


def _emit_contours(run: Run, contours) -> None:
    for cn in contours:
        write_csv(run.path(f"contour_{cn.cavity}.csv"), CONTOUR_HEADER, contour_rows(cn))
    if "svg" in run.cfg["output"]["formats"]:
        write_svg(run.path("contours.svg"), contours)


# -- command bodies ----------------------------------------------------------------------

def body_map(run: Run) -> None:
    cfg = run.cfg
    sol = solve(cfg)
    run.record_solution(sol)
    out = cfg["output"]
    fine = refine_trace(sol, out["points_per_side"], rtol=out["arclength_rtol"])
    contours = [subsample(cn, out["points_per_side"]) for cn in fine]
    _emit_contours(run, contours)
    rep = verify_map(sol, samples=out["samples"], contours=contours,
                     zero_reports={} if sol.load.is_degenerate else {"argument-principle": _ap(sol)})
    run.derived["geometry"] = {
        "closure_gaps": [cn.closure_gap for cn in contours],
        "lengths": [cn.length for cn in contours],
        "arclength_points_per_side": (len(fine[0].points) - 1) // 2,
        "intersects": rep.intersects,
        "degenerate_segments": rep.degenerate_segments,
    }
    run.derived["Z"] = rep.Z
    run.derived["verdict"] = rep.verdict


def _ap(sol) -> dict:
    try:
        return count_map(sol).as_dict()
    except EqCavityError as exc:
        return {"Z": None, "error": type(exc).__name__, "message": str(exc)}


def body_zeros(run: Run) -> None:
    cfg = run.cfg
    sol = solve(cfg)
    run.record_solution(sol)
    out = cfg["output"]
    zr = zero_reports(sol, cfg["case"], oracle=out["oracle"], seed=out["seed"])
    contours = sol.trace(out["points_per_side"])
    hit, _ = contours_intersect(contours)
    if sol.load.is_degenerate:
        hit = False
    zr["intersects"] = hit
    zr["verdict"] = existence_verdict(zr["Z"], hit, sol.load.gamma)
    run.write_json("zeros.json", zr)
    run.derived["Z"] = zr["Z"]
    run.derived["agree"] = zr["agree"]
    run.derived["verdict"] = zr["verdict"]


def body_stress(run: Run) -> None:
    cfg = run.cfg
    st = cfg.get("stress") or dict(STRESS_DEFAULTS)
    cfg["stress"] = st
    sol = solve(cfg)
    run.record_solution(sol)
    cav = st["cavity"]
    if not isinstance(cav, int) or not 0 <= cav < sol.config.n:
        raise ConfigError(f"stress.cavity must be in [0, {sol.config.n - 1}]")
    if st["side"] not in (None, 1, -1):
        raise ConfigError("stress.side must be 1, -1 or null")
    out = cfg["output"]
    contours = refine_trace(sol, out["points_per_side"], rtol=out["arclength_rtol"])
    rows = stress_profile(sol, cav, side=st["side"],
                          contour=subsample(contours[cav], out["points_per_side"]))
    write_csv(run.path("stress.csv"), STRESS_HEADER, [r.as_row() for r in rows])
    arr = np.array([r.as_row() for r in rows])
    total = arr[:, 1] + arr[:, 2]
    run.derived["stress"] = {
        "rows": len(rows),
        "sum_sigma12": float(sol.load.sigma + sol.load.p),
        "sum_deviation": float(np.max(np.abs(total - (sol.load.sigma + sol.load.p)))),
        "sigma_t_deviation": float(np.max(np.abs(arr[:, 4] - sol.load.sigma))),
        "sigma_n_deviation": float(np.max(np.abs(arr[:, 5] - sol.load.p))),
        "tau_nt_deviation": float(np.max(np.abs(arr[:, 6] - sol.load.tau))),
    }


def body_verify(run: Run) -> None:
    cfg = run.cfg
    sol = solve(cfg)
    run.record_solution(sol)
    out = cfg["output"]
    zr = zero_reports(sol, cfg["case"], oracle=out["oracle"], seed=out["seed"])
    rep = verify_map(sol, samples=out["samples"], points_per_side=out["points_per_side"],
                     zero_reports=zr["methods"])
    data = rep.as_dict()
    data["agree"] = zr["agree"]
    for key in ("omega_prime_zeros", "eta_zeros_at_conj_zeta_inf", "note"):
        if key in zr:
            data[key] = zr[key]
    run.write_json("verify.json", data)
    run.derived["verdict"] = rep.verdict
    run.derived["Z"] = rep.Z


# -- sweep -------------------------------------------------------------------------------

def rescale_gamma(load: LoadingParams, gamma: float) -> LoadingParams:
    """Same ``a`` and ``p``; ``b`` rescaled (or set real if zero) to reach ``gamma``."""
    b = load.b if load.b != 0 else 1.0 + 0j
    b = b / abs(b) * gamma * abs(load.a)
    return LoadingParams.from_complex(load.a, b, load.p)


def sweep_cell(args) -> dict:
    cfg, gamma, value = args
    os.environ["ESC_TOL"] = repr(cfg["output"]["tol"])
    sw = cfg["sweep"]
    geometry = copy.deepcopy(cfg["geometry"])
    if sw["param"] is not None:
        geometry[sw["param"]] = value
    rec = {"gamma": gamma, "value": value, "Z": None, "intersects": None, "verdict": None,
           "error": None}
    try:
        load = rescale_gamma(loading_of(cfg), gamma)
        rec["gamma"] = load.gamma
        sol = solve(cfg, load, geometry)
        zr = zero_reports(sol, cfg["case"], oracle=bool(sw["oracle"]), seed=cfg["output"]["seed"])
        contours = sol.trace(cfg["output"]["points_per_side"])
        hit = False if load.is_degenerate else contours_intersect(contours)[0]
        rec.update(Z=zr["Z"], intersects=hit, agree=zr["agree"],
                   verdict=existence_verdict(zr["Z"], hit, load.gamma))
    except EqCavityError as exc:
        rec["error"] = type(exc).__name__
    return rec


def sweep_grid(cfg: dict) -> list:
    sw = cfg["sweep"]
    g = sw["gamma"]
    gammas = g if isinstance(g, list) and len(g) != 3 else np.linspace(*g).tolist()
    if sw["param"] is not None and sw["param"] not in GEOMETRY_KEYS[cfg["case"]]:
        raise ConfigError(f"sweep.param {sw['param']!r} is not a geometry key of {cfg['case']}")
    return [(cfg, float(gm), v) for v in sw["values"] for gm in gammas]


def summarize_sweep(records: list) -> dict:
    """Whether the verdict flips from exists to nonexistent exactly across ``gamma = 1``."""
    by_value = {}
    for r in records:
        by_value.setdefault(json.dumps(r["value"]), []).append(r)
    rows = {}
    for key, recs in by_value.items():
        below = [r["verdict"] for r in recs if r["gamma"] < 1 and r["verdict"] != "degenerate-adjacent"]
        above = [r["verdict"] for r in recs if r["gamma"] > 1 and r["verdict"] != "degenerate-adjacent"]
        rows[key] = {
            "Z_values": sorted({r["Z"] for r in recs if r["Z"] is not None}),
            "transition_at_gamma_one": bool(below) and bool(above)
            and all(v == "exists" for v in below) and all(v == "nonexistent" for v in above),
            "errors": sum(r["error"] is not None for r in recs),
        }
    return {"per_value": rows,
            "transition_at_gamma_one": all(v["transition_at_gamma_one"] for v in rows.values()),
            "Z_values": sorted({r["Z"] for r in records if r["Z"] is not None})}


def body_sweep(run: Run) -> None:
    cfg = run.cfg
    if "sweep" not in cfg:
        cfg["sweep"] = dict(SWEEP_DEFAULTS)
    tasks = sweep_grid(cfg)
    workers = int(cfg["sweep"]["workers"])
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(sweep_cell, tasks))
    else:
        records = [sweep_cell(t) for t in tasks]
    rows = [[repr(float(r["gamma"])), json.dumps(r["value"]),
             "" if r["Z"] is None else str(r["Z"]),
             "" if r["intersects"] is None else str(r["intersects"]).lower(),
             r["verdict"] or "", r["error"] or ""] for r in records]
    write_csv(run.path("sweep.csv"), ["gamma", "value", "Z", "intersects", "verdict", "error"], rows)
    summary = summarize_sweep(records)
    run.write_json("sweep.json", {"records": records, "summary": summary})
    run.derived["sweep"] = summary


# -- click wiring ------------------------------------------------------------------------

def _common(f):
    f = click.option("--verbose", "-v", is_flag=True, help="Log progress to stderr.")(f)
    f = click.option("--svg", is_flag=True, help="Also write contours.svg.")(f)
    f = click.option("--out", "out_dir", default=None,
                     help="Output directory (default ./out or output.dir).")(f)
    f = click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
                     help="Override a configuration key, e.g. geometry.k=0.1.")(f)
    f = click.argument("config", type=click.Path(dir_okay=False))(f)
    return f


def _run(command, body, config, overrides, out_dir, svg, verbose, tweak=None):
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(config, overrides, out_dir, svg)
        if tweak:
            tweak(cfg)
    except (ConfigError, ValueError, TypeError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    sys.exit(execute(command, cfg, body))


@click.group()
@click.version_option(package_name="eqcavity")
def main():
    """Equal-strength cavity maps: contours, zero counts, stresses and sweeps."""


@main.command("map")
@_common
def cmd_map(config, overrides, out_dir, svg, verbose):
    """Solve the map and write one contour CSV per cavity."""
    _run("map", body_map, config, overrides, out_dir, svg, verbose)


@main.command("zeros")
@_common
def cmd_zeros(config, overrides, out_dir, svg, verbose):
    """Count zeros of omega' in the slit domain by every applicable method."""
    _run("zeros", body_zeros, config, overrides, out_dir, svg, verbose)


@main.command("stress")
@_common
def cmd_stress(config, overrides, out_dir, svg, verbose):
    """Write boundary stresses along one contour as CSV."""
    _run("stress", body_stress, config, overrides, out_dir, svg, verbose)


@main.command("verify")
@_common
def cmd_verify(config, overrides, out_dir, svg, verbose):
    """Run every identity, far-field, geometry and zero-count check."""
    _run("verify", body_verify, config, overrides, out_dir, svg, verbose)


@main.command("sweep")
@_common
@click.option("--workers", type=int, default=None, help="Worker processes for the grid.")
def cmd_sweep(config, overrides, out_dir, svg, verbose, workers):
    """Existence map over gamma and one geometry parameter."""
    def tweak(cfg):
        cfg.setdefault("sweep", dict(SWEEP_DEFAULTS))
        if workers is not None:
            if workers < 1:
                raise ConfigError("--workers must be >= 1")
            cfg["sweep"]["workers"] = workers

    _run("sweep", body_sweep, config, overrides, out_dir, svg, verbose, tweak)


if __name__ == "__main__":
    main()

import json
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from eqcavity.cases import build_map
from eqcavity.loading import derive_loading

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def figure_config(name: str) -> dict:
    return json.loads((CONFIGS / f"{name}.json").read_text())


@lru_cache(maxsize=None)
def figure_map(name: str):
    cfg = figure_config(name)
    ld = cfg["loading"]
    load = derive_loading(ld["sigma1_inf"], ld["sigma2_inf"], ld["tau_inf"], ld["p"], ld["tau"])
    sc = cfg.get("scale", {})
    c = complex(sc.get("c_prime", 1.0), sc.get("c_dblprime", 0.0))
    return build_map(cfg["case"], load, cfg["geometry"], c)


@lru_cache(maxsize=None)
def figure_trace(name: str, points_per_side: int = 512):
    return figure_map(name).trace(points_per_side)


@pytest.fixture
def fig():
    return figure_map


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])

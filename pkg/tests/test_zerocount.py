import numpy as np
import pytest

from eqcavity import zerocount
from eqcavity.cases import build_map, zero_reports
from eqcavity.errors import (BoundarySampleFailure, DegenerateLoading, OnContourZero,
                             RootSelectionError)
from eqcavity.loading import LoadingParams
from eqcavity.map_n1 import build_n1
from eqcavity.map_n2 import solve_n2_sym_inf
from eqcavity.radicals import SlitConfig
from eqcavity.zerocount import (ADJACENT_WINDOW, classify, count_closed_form_n2inf, count_map,
                                locate_zeros_oracle, oracle_map, residue_roots_n2inf)

from conftest import figure_map
from families import EXPECTED_Z, FAMILIES, draw_map
from oracles import grid_winding_zeros, n1_eta_zeros


@pytest.mark.parametrize("name, Z", [("fig6b", 0), ("fig6d", 4), ("fig7d", 8), ("fig3d", 4)])
def test_figure_counts(name, Z):
    sol = figure_map(name)
    assert count_map(sol).Z == Z
    assert oracle_map(sol).Z == Z


@pytest.mark.parametrize("gamma, Z", [(0.3, 0), (0.8, 0), (1.3, 4), (2.5, 4)])
@pytest.mark.parametrize("k", [0.05, 0.3])
def test_closed_form_n2inf(gamma, Z, k):
    load = LoadingParams.from_complex(1.0, -gamma)
    sol = solve_n2_sym_inf(load, k)
    rep = count_closed_form_n2inf(load, k, sol.rho)
    assert rep.Z == Z
    assert rep.details["agree"]
    assert sum(rep.details["inside"]) == 2
    # homogeneous in the loading
    doubled = LoadingParams.from_complex(2.0, -2 * gamma)
    assert count_closed_form_n2inf(doubled, k, solve_n2_sym_inf(doubled, k).rho).Z == Z


def test_oracle_n1_zero_locations():
    sol = build_n1(LoadingParams.from_complex(1.0, 2.0))
    rep = oracle_map(sol)
    assert rep.Z == 2
    got = sorted(rep.zeros, key=lambda z: z.imag)
    want = [-1j / (2 * np.sqrt(2)), 1j / (2 * np.sqrt(2))]
    assert np.allclose(got, want, atol=1e-7)
    ref = n1_eta_zeros(sol.m_minus, sol.m_plus)
    assert np.allclose(sorted(ref, key=lambda z: z.imag), want, atol=1e-12)


def test_grid_oracle_agrees_on_n1():
    sol = build_n1(LoadingParams.from_complex(1.0, 1.7 * np.exp(0.4j)))
    cells = grid_winding_zeros(sol.eta_at, (-3.1, 2.9, -3.05, 2.95), (12, 12))
    assert sum(w for _, w in cells) == count_map(sol).Z == 2


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("below", [True, False])
def test_argument_principle_matches_oracle(family, below):
    rng = np.random.default_rng(100 + 2 * FAMILIES.index(family) + below)
    for _ in range(4):
        case, sol = draw_map(family, rng, below)
        rep = zero_reports(sol, case, oracle=True, seed=1)
        assert rep["agree"], rep["methods"]
        assert rep["Z"] == EXPECTED_Z[family][0 if below else 1]
        # every count is even: zeros come in pairs under the loading symmetry
        assert rep["Z"] % 2 == 0


def test_no_zeros_below_one_n2():
    sol = solve_n2_sym_inf(LoadingParams.from_complex(1.0, 0.5), 0.2)
    rep = oracle_map(sol)
    assert rep.Z == 0 and rep.zeros == []


@pytest.mark.parametrize("phase", [0.0, 0.7, 2.2])
def test_count_flips_once_along_gamma_ray(phase):
    a = 1.2 * np.exp(0.3j)
    counts = []
    gammas = [0.2, 0.5, 0.9, 1.1, 1.6, 2.8]
    for g in gammas:
        load = LoadingParams.from_complex(a, g * abs(a) * np.exp(1j * phase))
        counts.append(count_map(build_n1(load)).Z)
    assert counts == [0, 0, 0, 2, 2, 2]


def test_on_contour_zero_at_gamma_one():
    # b = i a puts an exact zero of eta on the upper slit side
    sol = build_n1(LoadingParams.from_complex(1.0, 1j))
    with pytest.raises(OnContourZero):
        count_map(sol)


def test_degenerate_loading_in_closed_form():
    load = LoadingParams.from_complex(1.0, 1.0)
    with pytest.raises(DegenerateLoading):
        count_closed_form_n2inf(load, 0.2, 0.5)
    # b = 0 makes the residue formula singular
    load = LoadingParams.from_complex(1.0, 0.0)
    with pytest.raises(DegenerateLoading):
        count_closed_form_n2inf(load, 0.2, solve_n2_sym_inf(load, 0.2).rho)


def test_root_selection_error(monkeypatch):
    load = LoadingParams.from_complex(1.0, 0.5)
    rho = solve_n2_sym_inf(load, 0.2).rho
    monkeypatch.setattr(zerocount, "residue_roots_n2inf",
                        lambda *args: np.array([2.0, 3.0, -2.0, 0.1]))
    with pytest.raises(RootSelectionError):
        count_closed_form_n2inf(load, 0.2, rho)


def test_residue_roots_pair_up():
    # roots come as w and 1/w on each branch
    w = residue_roots_n2inf(-0.7, 1.3, 0.2, 0.4)
    assert np.allclose(w[0] * w[2], 1) and np.allclose(w[1] * w[3], 1)


def test_boundary_sample_failure():
    with pytest.raises(BoundarySampleFailure, match="eta vanishes on a box edge"):
        locate_zeros_oracle(lambda z, side: np.zeros(np.shape(z), complex), SlitConfig.n1(), 3.0)


@pytest.mark.parametrize("Z, gamma, verdict", [
    (0, 0.5, "exists"),
    (4, 1.5, "nonexistent"),
    (0, 1.0, "degenerate"),
    (0, 1.0 + ADJACENT_WINDOW / 2, "degenerate-adjacent"),
    (2, 1.0 - ADJACENT_WINDOW / 2, "degenerate-adjacent"),
    (None, 0.5, "unknown"),
])
def test_classify(Z, gamma, verdict):
    assert classify(Z, gamma) == verdict


def test_zero_reports_skip_gamma_one():
    sol = build_map("n1", LoadingParams.from_complex(1.0, 1.0), {})
    rep = zero_reports(sol, "n1")
    assert rep["Z"] is None and rep["agree"]


def test_n3_reports_spurious_double_zero():
    rep = zero_reports(figure_map("fig7a"), "n3-finite", oracle=False)
    assert rep["Z"] == 2
    assert rep["omega_prime_zeros"] == 0

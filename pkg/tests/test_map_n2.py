import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from shapely.geometry import LineString, Point

import eqcavity.map_n2 as n2
from eqcavity.errors import ConfigError, DegenerateGeometry, PoleHit
from eqcavity.loading import LoadingParams, derive_loading
from eqcavity.map_n2 import (omega_prime_sym_finite, rho_n2, solve_n2_general,
                             solve_n2_sym_finite, solve_n2_sym_inf)
from eqcavity.map_n_line import solve_line
from eqcavity.radicals import SlitConfig
from eqcavity.verify import boundary_residual, far_field, is_degenerate_segment, stress_profile

from conftest import figure_map, figure_trace
from oracles import gk_weighted, laurent_leading

loads = st.builds(lambda r, t, g, s, p: LoadingParams.from_complex(r * np.exp(1j * t),
                                                                   g * r * np.exp(1j * s), p),
                  st.floats(0.3, 3), st.floats(0, 2 * np.pi), st.floats(0, 0.95),
                  st.floats(0, 2 * np.pi), st.floats(-1, 1))
ks = st.floats(0.02, 0.6)
zetas = st.floats(-0.85, 0.85)
cs = st.builds(complex, st.floats(0.3, 2), st.floats(-1, 1))


def test_symmetric_specialisation():
    load = derive_loading(2, 1, 0, 0, 0)
    k = 0.05
    gen = solve_n2_general(load, k, 0.0, c=1.0)
    sym = solve_n2_sym_finite(load, k, 1.0)
    ap = load.alpha_plus
    I0 = gk_weighted(sym.config.roots, 1, 1 / k, lambda x: 1 / x ** 2).real
    I2 = gk_weighted(sym.config.roots, 1, 1 / k, lambda x: 1.0).real
    expected_plus = [ap / k, 0.0, -ap * I0 / (k * I2)]
    assert gen.A_plus[1:] == pytest.approx(expected_plus, rel=1e-10, abs=1e-12)
    assert gen.A_minus[1:] == pytest.approx([0, 0, 0], abs=1e-12)
    assert gen.d_minus == pytest.approx(0, abs=1e-14)
    assert gen.d_plus == pytest.approx(ap / k, rel=1e-13)
    assert sym.A_plus == pytest.approx(gen.A_plus, rel=1e-12, abs=1e-12)
    assert sym.A_minus == pytest.approx(gen.A_minus, abs=1e-12)
    assert sym.A0_plus == pytest.approx(gen.A0_plus, abs=1e-14)
    assert sym.A0_minus == pytest.approx(gen.A0_minus, rel=1e-14)


def test_symmetric_infinite_specialisation_matches_line_solver():
    load = derive_loading(1.5, 0.5, 0, 0, 0)
    sym = solve_n2_sym_inf(load, 0.1)
    gen = solve_line(load, SlitConfig.n2_sym_inf(0.1))
    assert np.allclose(sym.A, gen.A, rtol=1e-11, atol=1e-11)


@given(loads, ks, zetas, cs)
def test_general_identities(load, k, zi, c):
    sol = solve_n2_general(load, k, zi, c=c)
    for key, val in sol.residuals.items():
        assert val < 1e-12, key
    assert max(sol.loop_residuals()) < 1e-10
    assert boundary_residual(sol) < 1e-9
    ff = far_field(sol)
    assert ff["psi_error"] < 1e-8
    assert ff["double_pole_error"] < 1e-7


def test_omega_prime_decay_at_infinity():
    sol = figure_map("fig3c")
    r = [abs(R ** 2 * sol.omega_prime(R * np.exp(0.7j))) for R in (1e6, 1e7)]
    assert r[1] == pytest.approx(r[0], rel=1e-5)


@pytest.mark.parametrize("name", ["fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig4"])
def test_double_pole_coefficient(name):
    sol = figure_map(name)
    zi = sol.zeta_inf
    lead = laurent_leading(lambda z: (z - zi) ** 2 * sol.omega_prime(z), zi)
    assert lead == pytest.approx(-sol.c, abs=1e-8)


def test_sym_finite_closed_form_pointwise():
    load = derive_loading(2, 1, 0, 0, 0)
    sol = solve_n2_sym_finite(load, 0.01, 1.0)
    z = np.array([0.3 + 0.4j, -2 + 5j, 150 - 20j, 0.01j, -0.5 - 0.5j])
    assert np.allclose(sol.omega_prime(z), omega_prime_sym_finite(load, 0.01, 1.0, z),
                       rtol=1e-12, atol=0)


def _mirror_distance(points, target):
    line = LineString(np.column_stack([target.real, target.imag]))
    return max(line.distance(Point(p.real, p.imag)) for p in points)


def test_figure4_double_mirror_symmetry():
    c0, c1 = figure_trace("fig4")
    d = max(c0.diameter, c1.diameter)
    # the additive constant of the map is arbitrary: reflect about the
    # axes through the centre of the pair
    pts = np.concatenate([c0.points, c1.points])
    centre = complex(0.5 * (pts.real.min() + pts.real.max()), 0.5 * (pts.imag.min() + pts.imag.max()))
    p0, p1 = c0.points - centre, c1.points - centre
    assert _mirror_distance(-np.conj(p0), p1) < 1e-8 * d
    for p, cn in ((p0, c0), (p1, c1)):
        assert _mirror_distance(np.conj(p), p) < 1e-8 * d
        assert cn.closure_gap < 1e-8 * cn.diameter


@pytest.mark.parametrize("name", ["fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig6a", "fig6b"])
def test_contours_close(name):
    for cn in figure_trace(name):
        assert cn.closure_gap < 1e-8 * cn.diameter


@pytest.mark.parametrize("solver", ["general", "sym-finite", "sym-inf"])
def test_gamma_one_gives_segments(solver):
    load = LoadingParams.from_complex(1.0, -1.0)
    assert load.is_degenerate
    sol = {"general": lambda: solve_n2_general(load, 0.1, 0.0),
           "sym-finite": lambda: solve_n2_sym_finite(load, 0.1),
           "sym-inf": lambda: solve_n2_sym_inf(load, 0.1)}[solver]()
    for cn in sol.trace(512):
        assert is_degenerate_segment(cn)


def test_figure6a():
    sol = figure_map("fig6a")
    assert sol.load.gamma == 0
    assert len(figure_trace("fig6a")) == 2


@given(st.floats(0.001, 0.95))
def test_rho_bounds(k):
    assert 1 < rho_n2(k) < 1 / k ** 2


@given(st.floats(0.01, 0.6), st.floats(0.3, 3), st.floats(-0.95, 0.95))
def test_sym_inf_loops(k, a, g):
    sol = solve_n2_sym_inf(LoadingParams.from_complex(a, g * a), k)
    assert max(sol.loop_residuals()) < 1e-10
    assert boundary_residual(sol) < 1e-9


def test_pole_hit_near_zeta_inf():
    sol = figure_map("fig3b")
    with pytest.raises(PoleHit):
        sol.omega_prime(sol.zeta_inf + 1e-12)


def test_symmetric_variants_need_symmetric_loading():
    with pytest.raises(ConfigError):
        solve_n2_sym_finite(derive_loading(2, 1, 0.5, 0, 0), 0.1)
    with pytest.raises(ConfigError):
        solve_n2_sym_inf(derive_loading(2, 1, 0, 0, 0.1), 0.1)


def test_vanishing_lambda0(monkeypatch):
    monkeypatch.setattr(n2, "_moments", lambda config, shift, tol=None: np.zeros(3))
    with pytest.raises(DegenerateGeometry):
        solve_n2_general(derive_loading(2, 1, 0, 0, 0), 0.1, 0.2)


@given(loads, ks, zetas)
def test_boundary_stresses(load, k, zi):
    sol = solve_n2_general(load, k, zi)
    cns = sol.trace(128)
    for m in range(2):
        rows = np.array([r.as_row() for r in stress_profile(sol, m, contour=cns[m])])
        assert np.allclose(rows[:, 4], load.sigma, atol=1e-8)
        assert np.allclose(rows[:, 5], load.p, atol=1e-8)
        assert np.allclose(rows[:, 6], load.tau, atol=1e-8)
        assert np.allclose(rows[:, 1] + rows[:, 2], load.sigma + load.p, atol=1e-10)

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqcavity.errors import NullLoading
from eqcavity.loading import LoadingParams, derive_loading

stress = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def test_figure3_loading():
    ld = derive_loading(2, 1, -1, 0, 0)
    assert ld.a == pytest.approx(1.5)
    assert ld.b == pytest.approx(-0.5 - 1j)
    assert ld.gamma == pytest.approx(math.sqrt(5) / 3, abs=1e-15)
    assert round(ld.gamma, 5) == 0.74536


def test_figure8a_loading():
    ld = derive_loading(0, 1, 0, 5, 0)
    assert ld.sigma == -4
    assert ld.a == -4.5
    assert ld.b == 0.5
    assert ld.gamma == pytest.approx(1 / 9, abs=1e-15)


def test_equibiaxial_has_zero_deviator():
    ld = derive_loading(1, 1, 0, 0, 0)
    assert ld.b == 0 and ld.gamma == 0


def test_alpha_beta_combinations():
    ld = derive_loading(0.3, -1.2, 0.7, 0.4, -0.25)
    assert complex(ld.alpha_plus, ld.beta_plus) == pytest.approx(ld.b + ld.a.conjugate())
    assert complex(ld.alpha_minus, ld.beta_minus) == pytest.approx(ld.b - ld.a.conjugate())


def test_null_loading():
    # sigma = p and tau = 0 give a = 0
    with pytest.raises(NullLoading):
        derive_loading(1, 1, 0, 1, 0)


def test_rejects_nonfinite():
    with pytest.raises(ValueError):
        derive_loading(float("nan"), 1, 0, 0, 0)


@given(stress, stress, stress, stress, stress)
def test_round_trip(s1, s2, ti, p, tau):
    try:
        ld = derive_loading(s1, s2, ti, p, tau)
    except NullLoading:
        return
    back = LoadingParams.from_complex(ld.a, ld.b, ld.p)
    for name in ("sigma1_inf", "sigma2_inf", "tau_inf", "p", "tau"):
        assert getattr(back, name) == pytest.approx(getattr(ld, name), abs=1e-12, rel=1e-12)


@given(stress, stress, stress, stress, stress, st.floats(0.01, 100))
def test_gamma_scale_invariant(s1, s2, ti, p, tau, lam):
    try:
        ld = derive_loading(s1, s2, ti, p, tau)
    except NullLoading:
        return
    scaled = derive_loading(lam * s1, lam * s2, lam * ti, lam * p, lam * tau)
    assert scaled.gamma == pytest.approx(ld.gamma, rel=1e-12, abs=1e-12)

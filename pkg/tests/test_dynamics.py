import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvcl.core import Units
from cvcl.dynamics import (
    NewtonianScenario,
    classical_center,
    coherence_time_series,
    delta_crel_bound,
    delta_crel_taylor_coefficient,
    grid_consistency_check,
    kappa,
    sigma_t,
    sigma_t_direct,
)
from cvcl.errors import DomainError

SCENARIO = NewtonianScenario.point_source_default()
G_SI = 6.67430e-11
HBAR_SI = 1.054571817e-34


def _natural(M=1.0, t_max=1.0, **kw):
    base = dict(m=1.0, M=M, x0=100.0, sigma0=1.0, ell_g=2.0, t_max=t_max, units=Units.natural())
    base.update(kw)
    return NewtonianScenario(**base)


def test_kappa_values():
    assert kappa(_natural(M=0.0)) == 0.0
    assert kappa(SCENARIO) == pytest.approx(np.sqrt(2 * G_SI * 1e-14 / (200e-6) ** 3), rel=1e-15)
    assert kappa(SCENARIO) == pytest.approx(4.0848e-7, rel=1e-4)
    assert kappa(_natural(M=2.0)) == pytest.approx(np.sqrt(2) * kappa(_natural(M=1.0)), rel=1e-15)


def test_scenario_validation():
    with pytest.raises(DomainError):
        _natural(sigma0=20.0)
    with pytest.raises(DomainError):
        _natural(m=0.0)
    with pytest.raises(DomainError):
        _natural(t_max=-1.0)


def test_sigma_t_initial_and_onset():
    assert sigma_t(SCENARIO, 0.0) == SCENARIO.sigma0
    t = 1e-3
    v = HBAR_SI / (2 * SCENARIO.m * SCENARIO.sigma0)
    onset = (SCENARIO.sigma0**2 * kappa(SCENARIO) ** 2 + v**2) * t**2
    assert sigma_t(SCENARIO, t) ** 2 - SCENARIO.sigma0**2 == pytest.approx(onset, rel=1e-6)


def test_sigma_t_out_of_range():
    with pytest.raises(DomainError):
        sigma_t(SCENARIO, 2.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 10.0), st.floats(0.01, 10.0), st.floats(0.1, 5.0))
def test_sigma_t_nondecreasing(M, m, t_max):
    sc = _natural(M=M, m=m, t_max=t_max)
    s = sigma_t(sc, sc.times())
    assert np.all(np.diff(s) >= 0)


def test_branch_consistency():
    sc = _natural(M=1.0, t_max=1.0)
    k = kappa(sc)
    t = 1e-4 / k
    assert sigma_t(sc, t) == pytest.approx(float(sigma_t_direct(sc, t)), rel=1e-12)


def test_direct_branch_needs_curvature():
    with pytest.raises(DomainError):
        sigma_t_direct(_natural(M=0.0), 0.5)


def test_free_limit_matches_spreading_formula():
    sc = _natural(M=0.0, m=0.3, t_max=4.0)
    t = sc.times()
    free = np.sqrt(sc.sigma0**2 + (t / (2 * sc.m * sc.sigma0)) ** 2)
    np.testing.assert_allclose(sigma_t(sc, t), free, rtol=1e-14)


def test_curvature_enhances_spreading():
    t = np.linspace(0.1, 1.0, 10)
    bound = _natural(M=5.0)
    free = _natural(M=0.0)
    assert np.all(sigma_t(bound, t) > sigma_t(free, t))


def test_classical_center():
    assert classical_center(SCENARIO, 0.0) == SCENARIO.x0
    assert np.all(classical_center(_natural(M=0.0), np.linspace(0, 1, 5)) == 100.0)
    # one half a0 t^2 with a0 = -G M / x0^2, at t = 1 s
    displacement = SCENARIO.x0 - classical_center(SCENARIO, 1.0)
    assert displacement == pytest.approx(0.5 * G_SI * 1e-14 / (200e-6) ** 2, rel=1e-6)
    assert displacement == pytest.approx(8.3429e-18, rel=1e-4)


def test_time_series_columns_monotone():
    data = coherence_time_series(SCENARIO)
    assert data["t"].size == 201
    assert data["delta_crel_bound"][0] == 0.0
    for col in ("sigma_t", "c2", "crel_bound", "delta_crel_bound"):
        assert np.all(np.diff(data[col]) >= 0)
    assert np.all(data["delta_crel_bound"] >= 0)


def test_delta_crel_taylor_coefficient():
    coeff = delta_crel_taylor_coefficient(SCENARIO)
    t = np.array([1e-3, 1e-2, 0.1])
    ratio = delta_crel_bound(SCENARIO, t) / t**2
    np.testing.assert_allclose(ratio, coeff, rtol=1e-6)


def test_zero_duration_single_row():
    sc = NewtonianScenario(m=1e-14, M=1e-14, x0=200e-6, sigma0=10e-6, ell_g=20e-6, t_max=0.0)
    data = coherence_time_series(sc)
    assert data["t"].tolist() == [0.0]
    assert data["delta_crel_bound"].tolist() == [0.0]


def test_grid_consistency():
    sc = _natural(M=3.0, t_max=2.0)
    rep = grid_consistency_check(sc, 1.5)
    assert rep.rel_error < 1e-5
    assert rep.center_shift_change < 1e-10


def test_no_dephasing_limit():
    sc = _natural(ell_g=1e8, t_max=1.0)
    data = coherence_time_series(sc)
    assert np.max(data["c2"]) < 1e-14
    assert grid_consistency_check(sc, 1.0).c2_numeric < 1e-12


def test_validity_report():
    v = SCENARIO.validity()
    assert v["x0_over_sigma0"] == pytest.approx(20.0)
    assert v["kappa_t_max"] == pytest.approx(kappa(SCENARIO))

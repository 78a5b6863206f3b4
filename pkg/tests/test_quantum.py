import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extch import quantum as qm
from extch.core import ALL_SELECTORS, AngleConfig, Outcome, OutcomeSelector
from extch.quantum import DetectorParams

PHI_STAR = math.acos((math.sqrt(3) - 1) / 2)
G_MAX = 2 * math.sqrt(2) - 2

unit = st.floats(0.0, 1.0)
params = st.builds(DetectorParams, unit, unit, unit, unit)
positive = st.floats(0.05, 1.0)

P, M, Z = Outcome.PLUS, Outcome.MINUS, Outcome.NODETECT


def test_params_validated():
    with pytest.raises(ValueError):
        DetectorParams(eta1=1.2)
    with pytest.raises(ValueError):
        DetectorParams(F=-0.1)


# -- outcome tables


def test_ideal_table():
    t = qm.outcome_table(DetectorParams(), 0.0)
    assert t.entry(P, P) == 0.5 and t.entry(M, M) == 0.5
    assert t.probs.sum() == 1.0
    assert np.count_nonzero(t.probs) == 2


def test_dead_side_one():
    dp = DetectorParams(eta1=0.0, eta2=0.7, f=0.6, F=0.9)
    t = qm.outcome_table(dp, 0.3)
    assert (t.probs[:2, :] == 0).all()
    assert t.entry(Z, Z) == pytest.approx((1 - 0.6) + 0.6 * (1 - 0.7), abs=1e-15)
    assert t.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_lossy_plus_plus_entry():
    # 1/4 * 0.8 * 0.8 * 0.9 = 0.144, times 1 + 0.95 cos(pi/4)
    t = qm.outcome_table(DetectorParams(0.8, 0.8, 0.9, 0.95), math.pi / 8)
    assert t.entry(P, P) == pytest.approx(0.2407322076663198, abs=1e-12)


@given(params, st.floats(-10, 10))
def test_table_is_distribution(dp, delta):
    t = qm.outcome_table(dp, delta)
    assert (t.probs >= 0).all()
    assert t.probs.sum() == pytest.approx(1.0, abs=1e-12)


@given(params, st.lists(st.floats(-10, 10), min_size=2, max_size=6))
def test_detection_sum_independent_of_angle(dp, deltas):
    for d in deltas:
        assert qm.outcome_table(dp, d).m == pytest.approx(dp.eta1 * dp.eta2 * dp.f, abs=1e-12)


@given(params, st.floats(0, 1))
def test_marginals_match_model(dp, delta):
    t = qm.outcome_table(dp, delta)
    # side-1 detection probability is f * eta1 whatever happens on side 2
    assert t.probs[:2, :].sum() == pytest.approx(dp.f * dp.eta1, abs=1e-12)
    assert t.probs[:, :2].sum() == pytest.approx(dp.f * dp.eta2, abs=1e-12)


# -- assembled prediction


@given(st.builds(DetectorParams, unit, unit, unit, st.just(0.0)), st.floats(0, math.pi), st.sampled_from(ALL_SELECTORS))
def test_zero_correlation_cancels(dp, phi, sel):
    # six terms of weight eta1 eta2 f / 4 with signs + - + + - -
    assert qm.sprime_exp_qm(dp, AngleConfig.from_phi(phi), sel) == pytest.approx(0.0, abs=1e-15)


def test_zero_phi_gives_zero():
    assert qm.sprime_exp_qm(DetectorParams(0.7, 0.6, 0.8, 0.9), AngleConfig.from_phi(0.0)) == pytest.approx(0.0, abs=1e-15)


@given(params, st.floats(0, math.pi))
def test_assembly_matches_closed_form(dp, phi):
    assembled = qm.sprime_exp_qm(dp, AngleConfig.from_phi(phi))
    assert assembled == pytest.approx(qm.sprime_closed_form(dp, phi), abs=1e-12)


def test_closed_form_examples():
    one = DetectorParams()
    assert qm.sprime_closed_form(one, 0.0) == 0.0
    assert qm.sprime_closed_form(one, math.pi / 4) == pytest.approx(0.25 * G_MAX, abs=1e-15)
    assert qm.sprime_closed_form(one, math.pi / 2) == pytest.approx(-0.5, abs=1e-15)


@given(st.floats(0, math.pi), st.lists(st.tuples(positive, positive, positive, positive), min_size=3, max_size=3))
def test_normalized_curve_parameter_free(phi, sets):
    curves = [qm.sprime_closed_form(DetectorParams(*s), phi) / math.prod(s) for s in sets]
    assert max(curves) - min(curves) <= 1e-12


# -- margin


def test_margin_examples():
    assert qm.violation_margin(0.0) == 0.0
    assert qm.violation_margin(math.pi / 4) == pytest.approx(G_MAX, abs=1e-15)
    assert qm.violation_margin(math.pi / 2) == pytest.approx(-2.0, abs=1e-15)


@given(st.floats(-10, 10))
def test_margin_even(phi):
    assert qm.violation_margin(phi) == pytest.approx(qm.violation_margin(-phi), abs=1e-15)


@given(st.floats(0.01, 3.0))
def test_slope_matches_finite_difference(phi):
    h = 1e-6
    fd = (qm.violation_margin(phi + h) - qm.violation_margin(phi - h)) / (2 * h)
    assert qm.margin_slope(phi) == pytest.approx(fd, abs=1e-6)


def test_cubic_factorization_oracle():
    # g = -2 (2c^3 - 3c + 1) with c = cos phi; the admissible root of the
    # quadratic factor 2c^2 + 2c - 1 is (sqrt 3 - 1) / 2
    roots = np.roots([2.0, 0.0, -3.0, 1.0])
    inside = sorted(r.real for r in roots if abs(r.imag) < 1e-12 and -1 < r.real < 1 - 1e-6)
    assert inside == pytest.approx([(math.sqrt(3) - 1) / 2])
    for phi in np.linspace(0, math.pi, 97):
        c = math.cos(phi)
        assert qm.violation_margin(phi) == pytest.approx(-2 * (2 * c**3 - 3 * c + 1), abs=1e-13)


def test_violation_interval():
    lo, hi = qm.find_violation_interval(1e-10)
    assert lo == pytest.approx(0.0, abs=1e-10)
    assert hi == pytest.approx(PHI_STAR, abs=1e-9)
    assert qm.violation_margin(hi + 0.01) < 0
    assert qm.violation_margin(0.5 * (lo + hi)) > 0


def test_max_violation_against_dense_grid():
    phi, g = qm.find_max_violation(1e-10)
    grid = np.linspace(0, math.pi, 1_000_001)
    values = qm.violation_margin(grid)
    k = int(np.argmax(values))
    assert g >= values.max() - 1e-15
    assert phi == pytest.approx(grid[k], abs=2 * math.pi / 1e6)
    assert phi == pytest.approx(math.pi / 4, abs=1e-10)
    assert g == pytest.approx(G_MAX, abs=1e-12)


@pytest.mark.parametrize("grid", [1001, 4001, 20001])
def test_max_violation_grid_refinement(grid):
    phi, g = qm.find_max_violation(1e-10, grid=grid)
    assert phi == pytest.approx(math.pi / 4, abs=1e-10)


def test_bisect_rejects_missing_sign_change():
    with pytest.raises(ValueError):
        qm._bisect(qm.violation_margin, 1.5, 3.0, 1e-10)


# -- scan


def test_scan_examples():
    s = qm.scan(DetectorParams(), [0.0, math.pi / 4, math.pi / 2])
    assert s.margins == pytest.approx((0.0, G_MAX, -2.0), abs=1e-12)
    assert s.sprimes == pytest.approx((0.0, G_MAX / 4, -0.5), abs=1e-12)
    assert s.phi_star == math.pi / 4
    assert len(s.phis) == 3


def test_scan_without_correlation_is_flat():
    s = qm.scan(DetectorParams(0.9, 0.8, 0.7, 0.0), np.linspace(0, math.pi, 50))
    assert max(s.sprimes) == min(s.sprimes)


def test_scan_errors():
    with pytest.raises(qm.EmptyGridError):
        qm.scan(DetectorParams(), [])
    with pytest.raises(ValueError):
        qm.scan(DetectorParams(), [0.0, 0.0])


def test_scan_csv_header():
    text = qm.scan(DetectorParams(0.5, 0.5, 0.5, 0.5), [0.1, 0.2]).to_csv()
    lines = text.splitlines()
    assert lines[0] == "phi,margin_g,sprime,eta1,eta2,f,F"
    assert len(lines) == 3

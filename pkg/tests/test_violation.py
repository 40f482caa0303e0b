import math

import numpy as np
import pytest

from batteries import (DUMMY_CONFIG, brute_force_deviation, random_nondiagonal_state,
                       violation_result)
from udwcov.detector import DetectorConfig, PointlikeSmearingError, QubitState, SmearingKind
from udwcov.geometry import FrameSpec
from udwcov.numerics import QuadratureSpec
from udwcov.violation import (DeviationMatrix, ViolationPath, config_from_triple, multi_detector_deviation,
                              pointlike_trace_e, single_detector_deviation, trace_e, trace_e_dimensionless,
                              trace_e_ei_2d, trace_e_reduced3d, trace_e_reference_mc)

REDUCED = (ViolationPath.REDUCED_3D, ViolationPath.EI_CLOSED_FORM_2D, ViolationPath.DIMENSIONLESS_2D)
ALL_PATHS = REDUCED + (ViolationPath.MONTE_CARLO_REFERENCE,)


# ------------------------------------------------------------ exact zeros

def test_pointlike_is_exact_zero():
    cfg = DetectorConfig(omega=2.0, t_switch=3.0, v=0.9, smearing_kind=SmearingKind.POINTLIKE)
    res = pointlike_trace_e(cfg)
    assert res.value == 0 and res.is_exact_zero and res.path is ViolationPath.ANALYTIC_POINTLIKE
    for path in ALL_PATHS:
        assert trace_e(cfg, path).path is ViolationPath.ANALYTIC_POINTLIKE


def test_pointlike_helper_rejects_gaussian():
    with pytest.raises(ValueError):
        pointlike_trace_e(DUMMY_CONFIG)
    with pytest.raises(PointlikeSmearingError):
        trace_e_ei_2d(DetectorConfig(omega=1, t_switch=1, v=0.5, smearing_kind=SmearingKind.POINTLIKE))


@pytest.mark.parametrize("path", ALL_PATHS)
def test_comoving_detector_is_exact_zero(path):
    res = trace_e(DetectorConfig(omega=1.0, t_switch=2.0, v=0.0), path)
    assert res.value == 0 and res.error_estimate == 0


@pytest.mark.parametrize("path", ALL_PATHS)
def test_zero_gap_is_exact_zero(path):
    assert trace_e(DetectorConfig(omega=0.0, t_switch=2.0, v=0.7), path).is_exact_zero


def test_mc_with_t_frame_equal_to_rest_frame():
    cfg = DetectorConfig(omega=1.0, t_switch=2.0, v=0.6)
    assert trace_e_reference_mc(cfg, frame_t=FrameSpec(0.6)).is_exact_zero


def test_reduced_paths_refuse_other_t_frames():
    with pytest.raises(ValueError):
        trace_e(DUMMY_CONFIG, ViolationPath.EI_CLOSED_FORM_2D, frame_t=FrameSpec(0.2))


# ------------------------------------------------------ values and paths

def test_reduced_paths_match_pinned_mc_oracle(mc_oracle):
    o = mc_oracle["oracle"]
    cfg = DetectorConfig(omega=o["omega"], t_switch=o["t_switch"], ell=o["ell"], v=o["v"])
    for path in REDUCED:
        res = trace_e(cfg, path)
        assert abs(res.value.real) <= res.error_estimate
        assert abs(res.imag - o["im_value"]) <= 3 * math.hypot(o["std_error"], res.error_estimate)


def test_live_mc_matches_pinned_oracle(mc_oracle):
    o = mc_oracle["oracle"]
    cfg = DetectorConfig(omega=o["omega"], t_switch=o["t_switch"], ell=o["ell"], v=o["v"])
    res = trace_e_reference_mc(cfg, samples=10**6, seed=1)
    assert abs(res.imag - o["im_value"]) <= 3 * math.hypot(o["std_error"], res.error_estimate)
    assert res.value.real == 0.0


def test_pinned_calibration_ratios(mc_oracle):
    for row in mc_oracle["calibration"]:
        for key in ("reduced3d_ratio", "ei2d_ratio", "dimensionless_ratio"):
            assert abs(row[key] - 1) <= 3 * row["rel_mc_error"]


def test_paths_agree_at_high_speed():
    cfg = config_from_triple(0.99, 10.0, 0.5)
    a, b, c = (trace_e(cfg, p).imag for p in REDUCED)
    assert b == pytest.approx(a, rel=1e-6) and c == pytest.approx(a, rel=1e-6)


def test_scale_invariance():
    base = trace_e_dimensionless(0.6, 10.0, 1.0)
    for ell in (0.2, 1.0, 7.0):
        cfg = config_from_triple(0.6, 10.0, 1.0, ell=ell)
        assert trace_e_ei_2d(cfg).imag == pytest.approx(base.imag, rel=1e-6)


def test_odd_in_gap():
    plus = trace_e_dimensionless(0.6, 1.0, 1.5)
    minus = trace_e_dimensionless(0.6, 1.0, -1.5)
    assert minus.value == pytest.approx(-plus.value, rel=1e-12)


def test_negative_speed_mirrors():
    a = trace_e_ei_2d(config_from_triple(0.6, 1.0, 1.0))
    b = trace_e_ei_2d(DetectorConfig(omega=1.0, t_switch=1.0, v=-0.6))
    assert a.value == b.value


def test_small_speed_limit_monotone():
    vals = [abs(trace_e_dimensionless(v, 1.0, 1.0).imag) for v in (0.2, 0.1, 0.05, 0.025)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    assert vals[-1] < 0.02 * vals[0]


def test_value_is_negative_imaginary_for_small_gap():
    res = trace_e_dimensionless(0.9, 10.0, 0.5)
    assert res.value.real == 0 and res.imag < 0


@pytest.mark.parametrize("v", [0.3, 0.6, 0.9])
def test_decays_with_switching_time(v):
    """|value| at fixed Omega T strictly decreases past its maximum over
    T/l in {1, 10, 1e2, 1e3} and reaches 1e-6 of that maximum."""
    mags = [abs(trace_e_dimensionless(v, tl, 1.0).imag) for tl in (1.0, 10.0, 100.0, 1000.0)]
    k = int(np.argmax(mags))
    assert all(x > y for x, y in zip(mags[k:], mags[k + 1:]))
    assert mags[-1] <= 1e-6 * mags[k]


def test_nonconvergence_reported():
    from udwcov.numerics import NonConvergenceError
    with pytest.raises(NonConvergenceError):
        trace_e_reduced3d(config_from_triple(0.6, 1.0, 1.0), quad=QuadratureSpec(max_subdivisions=2))


def test_dimensionless_validation():
    with pytest.raises(ValueError):
        trace_e_dimensionless(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        trace_e_dimensionless(0.5, 0.0, 1.0)


def test_mc_sample_floor():
    with pytest.raises(ValueError):
        trace_e_reference_mc(DUMMY_CONFIG, samples=100)


# ------------------------------------------------------------ deviations

def test_single_detector_example():
    plus = QubitState(0.5 * np.ones((2, 2)))
    dev = single_detector_deviation(plus, violation_result(-0.01j))
    np.testing.assert_allclose(dev.coeff, [[0, -0.01j], [0.01j, 0]])
    assert single_detector_deviation(plus, violation_result(-0.01j), lam=0.1).full == pytest.approx(
        0.01 * dev.coeff)


@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_diagonal_states_cancel(p):
    state = QubitState(np.diag([p, 1 - p]))
    assert not single_detector_deviation(state, violation_result(-0.3j)).coeff.any()
    dets = [(DUMMY_CONFIG, state)] * 3
    assert not multi_detector_deviation(dets, [violation_result(-0.3j)] * 3).coeff.any()


def test_multi_detector_matches_brute_force():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        states = [random_nondiagonal_state(rng) for _ in range(n)]
        values = [1j * rng.normal() for _ in range(n)]
        dev = multi_detector_deviation([(DUMMY_CONFIG, s) for s in states], [violation_result(v) for v in values])
        np.testing.assert_allclose(dev.coeff, brute_force_deviation(states, values), atol=1e-12)


def test_multi_detector_single_matches_single():
    s = QubitState.from_bloch(0.3, -0.2, 0.5)
    r = violation_result(-0.02j)
    assert np.array_equal(multi_detector_deviation([(DUMMY_CONFIG, s)], [r]).coeff,
                          single_detector_deviation(s, r).coeff)


def test_multi_detector_limits():
    s = QubitState.excited()
    with pytest.raises(ValueError):
        multi_detector_deviation([(DUMMY_CONFIG, s)] * 7, [violation_result(0)] * 7)
    with pytest.raises(ValueError):
        multi_detector_deviation([(DUMMY_CONFIG, s)] * 2, [violation_result(0)])
    with pytest.raises(ValueError):
        multi_detector_deviation([], [])


def test_deviation_matrix_validation():
    with pytest.raises(ValueError):
        DeviationMatrix(np.array([[1, 0], [0, 0]]))
    with pytest.raises(ValueError):
        DeviationMatrix(np.array([[0, 1], [0, 0]]))

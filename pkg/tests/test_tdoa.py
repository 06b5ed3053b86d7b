import numpy as np
import pytest
from hypothesis import given, strategies as st

from echo_tdoa.channel import AcquisitionConfig, AttenuationModel, simulate_reception
from echo_tdoa.detection import ToaEstimate, detect_toa
from echo_tdoa.geometry import Point3, Scene, linear_array, true_range_diff
from echo_tdoa.tdoa import (CorrectionConfig, MissingReferenceError, RangeDiff, RangeDiffSet,
                            correct_range_difference, form_corrected_set, raw_range_diff)

# v * Tc = 5.145 exactly as in the worked examples
CFG = CorrectionConfig(d_M=0.1, Tc=0.015, v=343.0)
D = 2.0


def toa(i, t):
    return ToaEstimate(i, t, 1.0, 250e3)


def test_raw_range_diff():
    assert raw_range_diff(toa(1, 3e-3), toa(2, 3e-3), 343) == 0.0
    assert raw_range_diff(toa(1, 14e-3), toa(2, 13e-3), 343) == pytest.approx(0.343)
    a, b = toa(1, 2.2e-3), toa(2, 11.9e-3)
    assert raw_range_diff(a, b, 343) == -raw_range_diff(b, a, 343)


def test_algorithm_examples():
    assert correct_range_difference(1.5, D, CFG) == 1.5
    assert correct_range_difference(5.0, D, CFG) == 5.0 - 5.145
    assert correct_range_difference(5.0, D, CFG) == pytest.approx(-0.145, abs=1e-12)
    assert correct_range_difference(-4.0, D, CFG) == -4.0 + 5.145
    assert correct_range_difference(-4.0, D, CFG) == pytest.approx(1.145, abs=1e-12)


def test_decidability():
    assert CFG.decidable(2.0)
    assert not CFG.decidable(2.5)


@given(st.floats(-D - 0.1, D + 0.1))
def test_no_op_region(d):
    assert correct_range_difference(d, D, CFG) == d


def test_exact_unwrap_grid():
    d0s = np.arange(-2000, 2001) / 1000.0  # 1 mm grid on [-D, D]
    wrap = CFG.v * CFG.Tc
    for w in (-wrap, 0.0, wrap):
        got = np.array([correct_range_difference(d0 + w, D, CFG) for d0 in d0s])
        # d0 + w - w is d0 up to one rounding of the wrap-sized sum
        assert np.max(np.abs(got - d0s)) <= 4 * np.spacing(wrap)


def test_idempotence_on_reachable_inputs():
    wrap = CFG.v * CFG.Tc
    base = np.linspace(-D - CFG.d_M, D + CFG.d_M, 2001)
    for d in np.concatenate((base, base + wrap, base - wrap)):
        once = correct_range_difference(d, D, CFG)
        assert correct_range_difference(once, D, CFG) == once


def _scene2(mobile):
    return Scene(linear_array((-0.5, 0.5)), mobile)


def _toas(scene, spec, template, latency):
    acq = AcquisitionConfig(sigma=0.0, latency=latency)
    return [detect_toa(simulate_reception(scene, a.id, spec, AttenuationModel(), acq), template,
                       spec.Tc, a.id) for a in scene.anchors]


def test_raw_diff_is_truth_or_one_wrap(spec, template):
    scene = _scene2(Point3(0.8, 1.3))
    d_true = true_range_diff(scene, 2, 1)
    wrap = CFG.v * CFG.Tc
    for k in range(31):
        toas = _toas(scene, spec, template, k * 0.5e-3)
        d = raw_range_diff(toas[1], toas[0], 343)
        assert min(abs(d - d_true - w) for w in (-wrap, 0.0, wrap)) < 0.01


def test_form_corrected_set_no_wrap(spec, template):
    scene = _scene2(Point3(0.2, 1.5))
    # both arrivals inside the window: the latency sits before either delay
    toas = _toas(scene, spec, template, 0.0)
    rds = form_corrected_set(toas, scene, CFG)
    assert rds.reference_id == 1
    assert rds[2] == pytest.approx(true_range_diff(scene, 2, 1), abs=0.01)
    assert not rds.any_corrected


def test_form_corrected_set_straddle(spec, template):
    scene = _scene2(Point3(0.2, 1.5))
    tau = [np.hypot(0.2 - x, 1.5) / 343 for x in (-0.5, 0.5)]
    lat = 0.5 * (tau[0] + tau[1])  # the window boundary falls between the two arrivals
    toas = _toas(scene, spec, template, lat)
    truth = true_range_diff(scene, 2, 1)
    raw = form_corrected_set(toas, scene, CFG, apply_correction=False)
    assert abs(abs(raw[2] - truth) - CFG.v * CFG.Tc) < 0.01
    fixed = form_corrected_set(toas, scene, CFG)
    assert fixed[2] == pytest.approx(truth, abs=0.01)
    assert fixed.diffs[0].corrected


def test_form_corrected_set_errors():
    scene = _scene2(Point3(0.0, 1.0))
    with pytest.raises(MissingReferenceError):
        form_corrected_set([toa(1, 0.0), toa(2, 1e-3)], scene, CFG, reference_id=9)
    with pytest.raises(ValueError):
        form_corrected_set([toa(1, 0.0)], scene, CFG)


def test_range_diff_set_invariants():
    with pytest.raises(ValueError):
        RangeDiffSet(1, (RangeDiff(1, 0.2),))
    with pytest.raises(ValueError):
        RangeDiffSet(1, (RangeDiff(2, float("nan")),))

import math

import numpy as np
import pytest

from echo_tdoa.channel import (AcquisitionConfig, AttenuationModel, attenuation_gain,
                               simulate_reception, snr_at)
from echo_tdoa.geometry import Anchor, Point3, Scene
from echo_tdoa.signal import chirp_train_value


@pytest.fixture
def model():
    return AttenuationModel()


def test_gain_examples(model):
    assert attenuation_gain(model, 1.0, 0.0) == pytest.approx(0.08 * 10 ** (-1.3 / 20), rel=1e-12)
    assert attenuation_gain(model, 1.0, 0.0) == pytest.approx(0.06889, abs=2e-5)
    assert attenuation_gain(model, 4.5, 0.0) == pytest.approx(0.00907, abs=1e-5)


def test_gain_directivity_interp_and_clamp():
    m = AttenuationModel(directivity_table=((0, 0), (40, -6), (90, -20)))
    base = attenuation_gain(m, 2.0, 0.0)
    assert attenuation_gain(m, 2.0, math.radians(20)) == pytest.approx(base * 10 ** (-3 / 20))
    assert attenuation_gain(m, 2.0, math.radians(170)) == pytest.approx(base * 10 ** (-20 / 20))


def test_gain_monotone(model):
    rs = np.linspace(0.05, 6, 200)
    g = [attenuation_gain(model, r, 0.3) for r in rs]
    assert np.all(np.diff(g) < 0)
    th = np.linspace(0, math.pi, 200)
    g = [attenuation_gain(model, 2.0, t) for t in th]
    assert np.all(np.diff(g) <= 0)


def test_gain_nonpositive_range(model):
    with pytest.raises(ValueError):
        attenuation_gain(model, 0.0, 0.0)


def test_snr_examples(model):
    s1 = snr_at(model, 4.5, 0.0, 0.01)
    assert -5 <= s1 <= -3
    assert snr_at(model, 4.5, 0.0, 0.001) == pytest.approx(s1 + 20, abs=1e-12)
    for k in (2.0, 0.3, 17.0):
        assert snr_at(model, 3.0, 0.2, 0.01 * k) == pytest.approx(
            snr_at(model, 3.0, 0.2, 0.01) - 20 * math.log10(k), abs=1e-12)
    with pytest.raises(ValueError):
        snr_at(model, 4.5, 0.0, 0.0)


@pytest.mark.parametrize("table", [((0, 0), (40, 3)), ((10, 0),), ((0, 0), (40, -6), (30, -8))])
def test_model_validation(table):
    with pytest.raises(ValueError):
        AttenuationModel(directivity_table=table)


def _scene(mobile):
    return Scene((Anchor(1, Point3(0.0, 0.0)), Anchor(2, Point3(1.0, 0.0))), mobile)


def test_reception_noise_free_shift(spec, model):
    # r = 0.343 m -> 1 ms propagation delay
    scene = _scene(Point3(0.0, 0.343))
    acq = AcquisitionConfig(sigma=0.0, latency=0.0)
    w = simulate_reception(scene, 1, spec, model, acq)
    g = attenuation_gain(model, 0.343, 0.0)
    t = np.arange(3750) / 250e3 - 1e-3
    want = [0.0 if tk < 0 else g * chirp_train_value(spec, tk) for tk in t]
    assert len(w) == 3750
    np.testing.assert_allclose(w.samples, want, atol=1e-12)


def test_reception_pointwise_unit_gain(spec, model):
    scene = _scene(Point3(0.3, 0.4))  # r = 0.5 m
    acq = AcquisitionConfig(sigma=0.0, latency=0.005)
    w = simulate_reception(scene, 1, spec, model, acq, gain=1.0)
    assert w.samples[0] == pytest.approx(chirp_train_value(spec, 0.005 - 0.5 / 343), abs=1e-12)
    assert w.t0 == 0.005


def test_reception_noise_streams(spec, model):
    scene = _scene(Point3(0.2, 1.0))
    acq = AcquisitionConfig(sigma=0.01, seed=99)
    n1 = simulate_reception(scene, 1, spec, model, acq, gain=0.0).samples
    n1b = simulate_reception(scene, 1, spec, model, acq, gain=0.0).samples
    n2 = simulate_reception(scene, 2, spec, model, acq, gain=0.0).samples
    assert np.array_equal(n1, n1b)
    assert not np.allclose(n1, n2)


def test_reception_deterministic(spec, model):
    scene = _scene(Point3(-0.7, 2.1))
    acq = AcquisitionConfig(sigma=0.01, latency=3.5e-3, per_anchor_jitter=2e-6, seed=7)
    a = simulate_reception(scene, 2, spec, model, acq)
    b = simulate_reception(scene, 2, spec, model, acq)
    assert a.samples.tobytes() == b.samples.tobytes()


def test_reception_circular_shift_property(spec, model):
    # once the window starts after the first arrival it is a rotation of one period
    scene = _scene(Point3(0.4, 1.2))
    fs = 250e3
    tau = math.hypot(0.4, 1.2) / 343
    ref = simulate_reception(scene, 1, spec, model, AcquisitionConfig(sigma=0.0, latency=tau + 0.4e-3))
    for shift in (1, 250, 1999):
        acq = AcquisitionConfig(sigma=0.0, latency=tau + 0.4e-3 + shift / fs)
        w = simulate_reception(scene, 1, spec, model, acq)
        assert np.max(np.abs(w.samples - np.roll(ref.samples, -shift))) < 1e-9


def test_noise_variance(spec, model):
    scene = _scene(Point3(0.0, 1.0))
    acq = AcquisitionConfig(Tw=0.4, sigma=0.01, seed=3)  # 100 000 samples
    x = simulate_reception(scene, 1, spec, model, acq, gain=0.0).samples
    assert len(x) == 100_000
    assert np.var(x) == pytest.approx(1e-4, rel=0.05)


def test_jitter_moves_window(spec, model):
    scene = _scene(Point3(0.0, 1.0))
    base = simulate_reception(scene, 1, spec, model, AcquisitionConfig(sigma=0.0, seed=5))
    jit = simulate_reception(scene, 1, spec, model,
                             AcquisitionConfig(sigma=0.0, seed=5, per_anchor_jitter=5e-6))
    assert jit.t0 != base.t0
    assert abs(jit.t0 - base.t0) < 50e-6


def test_window_shorter_than_period(spec, model):
    with pytest.raises(ValueError):
        simulate_reception(_scene(Point3(0, 1)), 1, spec, model, AcquisitionConfig(Tw=0.01))


@pytest.mark.parametrize("kwargs", [dict(Tw=0), dict(latency=-1e-3), dict(sigma=-0.1),
                                    dict(per_anchor_jitter=-1e-6), dict(seed=-1)])
def test_acquisition_validation(kwargs):
    with pytest.raises(ValueError):
        AcquisitionConfig(**kwargs)

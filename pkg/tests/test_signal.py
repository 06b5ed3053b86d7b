import math

import numpy as np
import pytest

from echo_tdoa.signal import (ChirpSpec, SampleRateTooLowError, SampledSignal, chirp_train_value,
                              chirp_value, synthesize_template, train_samples)


def eq3(t, f0=38e3, f1=42e3, Tc=15e-3, A=1.0):
    """Direct transcription of the pulse formula, used as the oracle."""
    if not 0 <= t <= Tc:
        return 0.0
    return A * math.sin(2 * math.pi * (f0 + (f1 - f0) / (2 * Tc) * t) * t)


def test_chirp_value_examples(spec):
    assert chirp_value(spec, 0.0) == 0.0
    # 2 pi * 40 kHz * 15 ms = 2 pi * 600: whole cycles
    assert abs(chirp_value(spec, spec.Tc)) < 1e-9
    assert chirp_value(spec, -1e-3) == 0.0
    assert chirp_value(spec, 0.02) == 0.0


@pytest.mark.parametrize("t", [1e-5, 3.3e-3, 7.5e-3, 14.9e-3])
def test_chirp_value_matches_formula(spec, t):
    assert chirp_value(spec, t) == pytest.approx(eq3(t), abs=1e-12)


def test_chirp_train_examples(spec):
    assert chirp_train_value(spec, spec.Tc) == pytest.approx(0.0, abs=1e-9)
    assert chirp_train_value(spec, 2.5 * spec.Tc) == pytest.approx(
        chirp_value(spec, 0.5 * spec.Tc), abs=1e-9)
    assert chirp_train_value(spec, 20e-3) == pytest.approx(eq3(5e-3), abs=1e-9)


def test_train_periodicity(spec, rng):
    ts = rng.uniform(0, 10 * spec.Tc, 2000)
    diff = [abs(chirp_train_value(spec, t + spec.Tc) - chirp_train_value(spec, t)) for t in ts]
    assert max(diff) < 1e-9 * spec.A


def test_train_samples_match_scalar(spec):
    fs = 250e3
    got = train_samples(spec, -2e-3, fs, 3750)
    want = [0.0 if t < 0 else chirp_train_value(spec, t) for t in -2e-3 + np.arange(3750) / fs]
    np.testing.assert_allclose(got, want, atol=1e-9)
    assert np.all(got[:500] == 0.0)


def test_template_shape(spec, template):
    assert len(template) == 3750  # 0.015 s * 250 kHz
    assert template.samples[0] == 0.0
    assert template.t0 == 0.0
    assert np.sum(template.samples ** 2) > 0
    np.testing.assert_allclose(template.samples, [eq3(k / 250e3) for k in range(3750)], atol=1e-12)


def test_template_rate_too_low(spec):
    with pytest.raises(SampleRateTooLowError):
        synthesize_template(spec, 50e3)


def test_zero_crossing_spacing_shrinks(template):
    s = template.samples
    idx = np.nonzero(np.signbit(s[1:]) != np.signbit(s[:-1]))[0]
    spacing = np.diff(idx)
    # coarse: mean spacing in the first tenth exceeds that in the last tenth
    tenth = len(spacing) // 10
    assert spacing[:tenth].mean() > spacing[-tenth:].mean()
    # average half-period at each end is within 5 % of 1/(2 f)
    assert spacing[:tenth].mean() / 250e3 == pytest.approx(1 / (2 * 38.2e3), rel=0.05)
    assert spacing[-tenth:].mean() / 250e3 == pytest.approx(1 / (2 * 41.8e3), rel=0.05)


@pytest.mark.parametrize("kwargs", [dict(f0=42e3, f1=38e3), dict(Tc=0.0), dict(A=-1.0)])
def test_chirp_spec_validation(kwargs):
    with pytest.raises(ValueError):
        ChirpSpec(**kwargs)


def test_sampled_signal_validation():
    with pytest.raises(ValueError):
        SampledSignal(0.0, [1.0])
    with pytest.raises(ValueError):
        SampledSignal(1.0, [])
    with pytest.raises(ValueError):
        SampledSignal(1.0, [1.0, math.inf])

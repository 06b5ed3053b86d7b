"""What an anchor records: delayed, attenuated chirp train plus white noise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Scene, anchor_range, incidence_angle
from .signal import ChirpSpec, SampledSignal, train_samples

DEFAULT_DIRECTIVITY = ((0.0, 0.0), (40.0, -6.0), (90.0, -20.0), (180.0, -30.0))

# stream tags keep noise and jitter draws independent of each other
_NOISE_STREAM = 0
_JITTER_STREAM = 1


@dataclass(frozen=True, slots=True)
class AttenuationModel:
    """Spherical spreading, absorption and receiver directivity.

    ``A0`` is the amplitude at 1 m before absorption, ``alpha`` the absorption
    in dB/m and ``directivity_table`` a list of ``(angle_deg, gain_db)`` knots
    interpolated linearly in dB.
    """

    A0: float = 0.08
    alpha: float = 1.3
    directivity_table: tuple[tuple[float, float], ...] = DEFAULT_DIRECTIVITY

    def __post_init__(self):
        table = tuple((float(a), float(g)) for a, g in self.directivity_table)
        object.__setattr__(self, "directivity_table", table)
        if not self.A0 > 0:
            raise ValueError(f"A0 must be positive, got {self.A0}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if not table or table[0] != (0.0, 0.0):
            raise ValueError("directivity table must start at (0 deg, 0 dB)")
        angles = [a for a, _ in table]
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise ValueError("directivity angles must be strictly increasing")
        if any(g > 0 for _, g in table):
            raise ValueError("directivity gains must be <= 0 dB")

    def directivity_db(self, theta: float) -> float:
        angles, gains = zip(*self.directivity_table)
        return float(np.interp(math.degrees(theta), angles, gains))


@dataclass(frozen=True, slots=True)
class AcquisitionConfig:
    Tw: float = 15e-3
    fs: float = 250e3
    latency: float = 0.0
    per_anchor_jitter: float = 0.0
    sigma: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not self.Tw > 0:
            raise ValueError(f"Tw must be positive, got {self.Tw}")
        if not self.fs > 0:
            raise ValueError(f"fs must be positive, got {self.fs}")
        if not self.latency >= 0:
            raise ValueError(f"latency must be non-negative, got {self.latency}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.per_anchor_jitter >= 0:
            raise ValueError(f"jitter must be non-negative, got {self.per_anchor_jitter}")

    @property
    def n_samples(self) -> int:
        return int(round(self.fs * self.Tw))


def attenuation_gain(model: AttenuationModel, r: float, theta: float) -> float:
    """Amplitude gain (A0/r) 10^(-alpha r/20) 10^(D(theta)/20)."""
    if not r > 0:
        raise ValueError(f"range must be positive, got {r}")
    db = -model.alpha * r + model.directivity_db(theta)
    return model.A0 / r * 10.0 ** (db / 20.0)


def snr_at(model: AttenuationModel, r: float, theta: float, sigma: float) -> float:
    """Per-sample SNR in dB for a unit-amplitude sinusoid received at (r, theta)."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    g = attenuation_gain(model, r, theta)
    return 10.0 * math.log10(g * g / 2.0) - 20.0 * math.log10(sigma)


def _stream(seed: int, anchor_id: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, anchor_id, tag)))


def simulate_reception(scene: Scene, anchor_id: int, spec: ChirpSpec,
                       model: AttenuationModel, acq: AcquisitionConfig,
                       gain: float | None = None) -> SampledSignal:
    """Window of ``acq.Tw`` seconds recorded by one anchor.

    Transmission starts at t = 0 (master trigger); the window opens at
    ``acq.latency`` plus an optional per-anchor trigger jitter. ``gain``
    overrides the attenuation model (for tests and calibration).
    """
    if acq.Tw < spec.Tc:
        raise ValueError(f"observation window Tw={acq.Tw} shorter than Tc={spec.Tc}")
    anchor = scene.anchor(anchor_id)
    r = anchor_range(anchor.position, scene.mobile)
    if gain is None:
        gain = attenuation_gain(model, r, incidence_angle(anchor, scene.mobile))
    jitter = 0.0
    if acq.per_anchor_jitter > 0:
        jitter = float(_stream(acq.seed, anchor_id, _JITTER_STREAM).normal(0.0, acq.per_anchor_jitter))
    t_start = acq.latency + jitter - r / scene.v
    n = acq.n_samples
    samples = train_samples(spec, t_start, acq.fs, n)
    if gain != 1.0:
        samples *= gain
    if acq.sigma > 0:
        samples += _stream(acq.seed, anchor_id, _NOISE_STREAM).normal(0.0, acq.sigma, n)
    return SampledSignal(acq.fs, samples, acq.latency + jitter)

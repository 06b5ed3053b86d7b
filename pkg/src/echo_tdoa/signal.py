"""Linear-chirp pulse, its periodic train, and the receiver template."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._core import kernels


class SampleRateTooLowError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class ChirpSpec:
    f0: float = 38e3
    f1: float = 42e3
    Tc: float = 15e-3
    A: float = 1.0

    def __post_init__(self):
        if not 0 < self.f0 < self.f1:
            raise ValueError(f"need 0 < f0 < f1, got f0={self.f0}, f1={self.f1}")
        if not self.Tc > 0:
            raise ValueError(f"Tc must be positive, got {self.Tc}")
        if not self.A > 0:
            raise ValueError(f"amplitude must be positive, got {self.A}")


@dataclass(frozen=True, slots=True, eq=False)
class SampledSignal:
    fs: float
    samples: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if not self.fs > 0:
            raise ValueError(f"sample rate must be positive, got {self.fs}")
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain non-finite values")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self)) / self.fs


def chirp_value(spec: ChirpSpec, t: float) -> float:
    """Single pulse: A sin(2 pi f(t) t) on [0, Tc], zero elsewhere."""
    if t < 0.0 or t > spec.Tc:
        return 0.0
    f = spec.f0 + (spec.f1 - spec.f0) / (2.0 * spec.Tc) * t
    return spec.A * math.sin(2.0 * math.pi * f * t)


def chirp_train_value(spec: ChirpSpec, t: float) -> float:
    """Periodic train s(t) = s0(Tc * frac(t / Tc)), for t >= 0."""
    q = t / spec.Tc
    return chirp_value(spec, spec.Tc * (q - math.floor(q)))


def train_samples(spec: ChirpSpec, t_start: float, fs: float, n: int) -> np.ndarray:
    """Vectorised train at t_start + k/fs (k < n); zero before t = 0."""
    return kernels.train_window(float(t_start), float(fs), int(n),
                                spec.f0, spec.f1, spec.Tc, spec.A)


def synthesize_template(spec: ChirpSpec, fs: float = 250e3) -> SampledSignal:
    """One unit-amplitude pulse sampled at k/fs, round(fs * Tc) samples."""
    if fs < 2.0 * spec.f1:
        raise SampleRateTooLowError(
            f"fs={fs:g} Hz is below the Nyquist rate for f1={spec.f1:g} Hz")
    n = int(round(fs * spec.Tc))
    t = np.arange(n) / fs
    f = spec.f0 + (spec.f1 - spec.f0) / (2.0 * spec.Tc) * t
    samples = spec.A * np.sin(2.0 * np.pi * f * t)
    return SampledSignal(fs, samples, 0.0)

"""Correlation time-of-arrival estimation with highest-peak selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .signal import SampledSignal


@dataclass(frozen=True, slots=True)
class ToaEstimate:
    anchor_id: int
    toa_mod: float
    peak_value: float
    fs: float

    def __post_init__(self):
        if not math.isfinite(self.peak_value):
            raise ValueError("peak value must be finite")


def _check_pair(window: SampledSignal, template: SampledSignal):
    if len(window) != len(template):
        raise ValueError(
            f"window has {len(window)} samples, template {len(template)}")
    if window.fs != template.fs:
        raise ValueError(f"sample rates differ: {window.fs} vs {template.fs}")


def template_spectrum(template: SampledSignal) -> np.ndarray:
    """Conjugate half-spectrum of the template, reusable across windows."""
    return np.conj(np.fft.rfft(template.samples))


@dataclass(frozen=True, eq=False)
class MatchedFilter:
    """Template spectrum plus the carrier geometry used for peak picking."""

    template: SampledSignal
    spectrum: np.ndarray
    half_cycle: int

    @classmethod
    def from_template(cls, template: SampledSignal) -> MatchedFilter:
        spectrum = template_spectrum(template)
        power = np.abs(spectrum) ** 2
        freqs = np.fft.rfftfreq(len(template), 1.0 / template.fs)
        carrier = float(np.sum(freqs * power) / np.sum(power))
        half_cycle = max(1, int(round(template.fs / (2.0 * carrier))))
        return cls(template, spectrum, half_cycle)

    def analytic_xcorr(self, window: SampledSignal) -> np.ndarray:
        """Complex correlation whose real part is :func:`circular_xcorr`."""
        _check_pair(window, self.template)
        L = len(window)
        half = np.fft.rfft(window.samples) * self.spectrum
        full = np.zeros(L, dtype=complex)
        full[:half.shape[0]] = half
        full[1:(L + 1) // 2] *= 2.0
        return np.fft.ifft(full)


def circular_xcorr(window: SampledSignal, template: SampledSignal,
                   spectrum: np.ndarray | None = None) -> np.ndarray:
    """c[k] = sum_n window[(n + k) mod L] * template[n], via the FFT.

    ``spectrum`` may carry a precomputed :func:`template_spectrum`.
    """
    _check_pair(window, template)
    if spectrum is None:
        spectrum = template_spectrum(template)
    L = len(window)
    return np.fft.irfft(np.fft.rfft(window.samples) * spectrum, n=L)


def circular_xcorr_direct(window: SampledSignal, template: SampledSignal) -> np.ndarray:
    """Time-domain O(L^2) evaluation of :func:`circular_xcorr`."""
    _check_pair(window, template)
    return kernels.xcorr_direct(window.samples, template.samples)


def parabolic_refine(c_prev: float, c_peak: float, c_next: float) -> float:
    """Vertex offset of the parabola through three samples, clamped to +-0.5."""
    return kernels.parabolic_offset(float(c_prev), float(c_peak), float(c_next))


def detect_toa(window: SampledSignal, template: SampledSignal, Tc: float,
               anchor_id: int = 0, matched: MatchedFilter | None = None) -> ToaEstimate:
    """Window-relative arrival time of the strongest correlation peak, modulo Tc.

    The strongest peak is taken on the correlation envelope, which picks the
    pulse replica; the sample index is then the largest real-correlation value
    within half a carrier cycle of it, refined by a three-point parabola.
    Selecting directly on the real correlation is unreliable for narrowband
    chirps: neighbouring carrier cycles sit within a few percent of the true
    peak and sampling can push the true one below them.
    """
    if matched is None:
        matched = MatchedFilter.from_template(template)
    z = matched.analytic_xcorr(window)
    c = np.ascontiguousarray(z.real)
    k, delta = kernels.guided_peak_refine(c, np.abs(z), matched.half_cycle)
    toa = ((k + delta) / window.fs) % Tc
    # fmod can round up to Tc for tiny negative offsets
    if toa >= Tc:
        toa -= Tc
    return ToaEstimate(anchor_id, toa, float(c[k]), window.fs)

"""Monte Carlo protocol: latency sweeps over a grid, error fractions, CDFs."""

from __future__ import annotations

import bisect
import enum
import functools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import AcquisitionConfig, AttenuationModel, simulate_reception
from .detection import MatchedFilter, ToaEstimate, detect_toa
from .geometry import Anchor, Point3, Scene, anchor_range, linear_array
from .signal import ChirpSpec, synthesize_template
from .solver import SolverError, solve_linear_array
from .tdoa import CorrectionConfig, RangeDiffSet, form_corrected_set

# one BLE frequency-hopping slot (1600 hops/s)
BLE_SLOT_S = 625e-6


class Mode(str, enum.Enum):
    TDOA_2ANCHOR = "tdoa_2anchor"
    POSITION_3ANCHOR = "position_3anchor"


DEFAULT_ANCHORS = {
    Mode.POSITION_3ANCHOR: (-1.0, 0.0, 1.0),
    Mode.TDOA_2ANCHOR: (-0.5, 0.5),
}


def latency_sweep(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic sweep; 0 .. 15 ms in 0.5 ms steps gives 31 values."""
    if not step > 0:
        raise ValueError(f"latency step must be positive, got {step}")
    n = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 12) for i in range(n))


def grid_axis(lo: float, hi: float, pitch: float) -> list[float]:
    n = int(round((hi - lo) / pitch)) + 1
    return [round(lo + i * pitch, 10) for i in range(n)]


@dataclass(frozen=True)
class ExperimentConfig:
    area: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0)
    pitch: float = 0.02
    latencies: tuple[float, ...] = latency_sweep(0.0, 15e-3, 0.5e-3)
    sigma: float = 0.01
    heuristic_on: bool = True
    mode: Mode = Mode.POSITION_3ANCHOR
    error_threshold_m: float = 0.01
    tdoa_error_threshold_s: float = 30e-6
    master_seed: int = 0
    anchors: tuple[Anchor, ...] | None = None
    v: float = 343.0
    chirp: ChirpSpec = field(default_factory=ChirpSpec)
    attenuation: AttenuationModel = field(default_factory=AttenuationModel)
    fs: float = 250e3
    d_M: float = 0.1
    per_anchor_jitter: float = 0.0
    reference_id: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "latencies", tuple(float(t) for t in self.latencies))
        if self.anchors is None:
            object.__setattr__(self, "anchors", linear_array(DEFAULT_ANCHORS[self.mode]))
        else:
            object.__setattr__(self, "anchors", tuple(self.anchors))
        x0, x1, y0, y1 = self.area
        if not (x1 >= x0 and y1 >= y0):
            raise ValueError(f"area bounds out of order: {self.area}")
        if not self.pitch > 0:
            raise ValueError(f"pitch must be positive, got {self.pitch}")
        if not self.latencies:
            raise ValueError("latencies must be non-empty")
        if any(t < 0 for t in self.latencies):
            raise ValueError("latencies must be non-negative")
        if not (self.error_threshold_m > 0 and self.tdoa_error_threshold_s > 0):
            raise ValueError("error thresholds must be positive")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master seed must be a 64-bit unsigned integer")
        need = 3 if self.mode is Mode.POSITION_3ANCHOR else 2
        if len(self.anchors) != need:
            raise ValueError(f"mode {self.mode.value} needs exactly {need} anchors")
        if self.reference_id is not None and self.reference_id not in {a.id for a in self.anchors}:
            raise ValueError(f"reference anchor {self.reference_id} not in scene")
        # validates the anchor set itself (distinct ids/positions, v > 0)
        Scene(self.anchors, Point3(0.0, 0.0, 1.0), self.v)

    @property
    def ref_id(self) -> int:
        return self.anchors[0].id if self.reference_id is None else self.reference_id

    @property
    def ordered_anchors(self) -> tuple[Anchor, ...]:
        """Reference anchor first, others in scene order."""
        ref = self.ref_id
        return tuple(sorted(self.anchors, key=lambda a: a.id != ref))

    @property
    def correction(self) -> CorrectionConfig:
        return CorrectionConfig(self.d_M, self.chirp.Tc, self.v)

    @property
    def xs(self) -> list[float]:
        return grid_axis(self.area[0], self.area[1], self.pitch)

    @property
    def ys(self) -> list[float]:
        return grid_axis(self.area[2], self.area[3], self.pitch)

    def grid_points(self) -> list[tuple[float, float]]:
        """Row-major: y ascending outer, x ascending inner."""
        return [(x, y) for y in self.ys for x in self.xs]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        d["anchors"] = [
            {"id": a.id, "position": [a.position.x, a.position.y, a.position.z],
             "boresight": list(a.boresight)} for a in self.anchors]
        return d


@dataclass
class GridResult:
    points: list[tuple[float, float, float]]
    per_trial_errors: list[tuple[float, float, float, float]]
    metadata: dict

    def fractions(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])

    def errors(self) -> np.ndarray:
        return np.array([t[3] for t in self.per_trial_errors])


@dataclass(frozen=True)
class TrialDetail:
    """Everything a single trial computed, for debugging dumps."""

    toas: tuple[ToaEstimate, ...]
    raw: RangeDiffSet
    used: RangeDiffSet
    estimate: Point3 | None
    error: float


@functools.lru_cache(maxsize=8)
def _template(spec: ChirpSpec, fs: float):
    tpl = synthesize_template(spec, fs)
    return tpl, MatchedFilter.from_template(tpl)


def trial_seed(master_seed: int, point_index: int, latency_index: int) -> int:
    ss = np.random.SeedSequence((master_seed, point_index, latency_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _coincides(config: ExperimentConfig, mobile: Point3) -> bool:
    return any(anchor_range(a.position, mobile) < 1e-9 for a in config.anchors)


def trial_detail(config: ExperimentConfig, mobile: Point3, latency: float,
                 seed: int) -> TrialDetail:
    template, matched = _template(config.chirp, config.fs)
    scene = Scene(config.anchors, mobile, config.v)
    acq = AcquisitionConfig(Tw=config.chirp.Tc, fs=config.fs, latency=latency,
                            per_anchor_jitter=config.per_anchor_jitter,
                            sigma=config.sigma, seed=seed)
    toas = tuple(
        detect_toa(simulate_reception(scene, a.id, config.chirp, config.attenuation, acq),
                   template, config.chirp.Tc, a.id, matched)
        for a in config.anchors)
    cfg = config.correction
    raw = form_corrected_set(toas, scene, cfg, config.ref_id, apply_correction=False)
    used = form_corrected_set(toas, scene, cfg, config.ref_id, config.heuristic_on)
    ordered = config.ordered_anchors

    if config.mode is Mode.TDOA_2ANCHOR:
        other = ordered[1]
        d_true = (anchor_range(other.position, mobile)
                  - anchor_range(ordered[0].position, mobile))
        return TrialDetail(toas, raw, used, None, abs(used[other.id] - d_true) / config.v)

    try:
        fix = solve_linear_array(ordered, used[ordered[1].id], used[ordered[2].id],
                                 tol=config.d_M)
    except SolverError:
        return TrialDetail(toas, raw, used, None, math.inf)
    return TrialDetail(toas, raw, used, fix.position,
                       anchor_range(fix.position, mobile))


def run_trial(config: ExperimentConfig, mobile: Point3, latency: float, seed: int) -> float:
    """Position error (m) or absolute TDoA error (s) of one trial, inf on failure."""
    if _coincides(config, mobile):
        return math.inf
    return trial_detail(config, mobile, latency, seed).error


def is_error_event(config: ExperimentConfig, error: float) -> bool:
    if config.mode is Mode.TDOA_2ANCHOR:
        return not error <= config.tdoa_error_threshold_s
    return not error <= config.error_threshold_m


def _sweep_points(config: ExperimentConfig, indexed_points) -> list[tuple[int, list[float]]]:
    out = []
    for idx, x, y in indexed_points:
        mobile = Point3(x, y)
        errs = [run_trial(config, mobile, lat, trial_seed(config.master_seed, idx, li))
                for li, lat in enumerate(config.latencies)]
        out.append((idx, errs))
    return out


def worker_count() -> int:
    raw = os.environ.get("ECHO_TDOA_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("ECHO_TDOA_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def grid_sweep(config: ExperimentConfig, workers: int | None = None,
               progress: Callable[[int, int], None] | None = None) -> GridResult:
    """Run every latency at every grid point.

    Trial seeds depend only on (master seed, point index, latency index), so
    the result is independent of how points are scheduled across workers.
    """
    pts = [(i, x, y) for i, (x, y) in enumerate(config.grid_points())]
    workers = worker_count() if workers is None else workers
    chunk = max(1, len(config.xs))
    chunks = [pts[i:i + chunk] for i in range(0, len(pts), chunk)]

    results: list[tuple[int, list[float]]] = []
    if workers <= 1 or len(chunks) == 1:
        for n, c in enumerate(chunks):
            results.extend(_sweep_points(config, c))
            if progress:
                progress(n + 1, len(chunks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_points, config, c) for c in chunks]
            for n, fut in enumerate(futures):
                results.extend(fut.result())
                if progress:
                    progress(n + 1, len(chunks))
    results.sort(key=lambda r: r[0])

    points, trials = [], []
    n_lat = len(config.latencies)
    for idx, errs in results:
        _, x, y = pts[idx]
        events = sum(is_error_event(config, e) for e in errs)
        points.append((x, y, events / n_lat))
        trials.extend((x, y, lat, e) for lat, e in zip(config.latencies, errs))
    return GridResult(points, trials, {"config": config.to_dict()})


def empirical_cdf(errors: Sequence[float]) -> list[tuple[float, float]]:
    """Right-continuous ECDF as (value, P(error <= value)) at each distinct value."""
    if len(errors) == 0:
        raise ValueError("empirical CDF of an empty sample")
    xs = sorted(errors)
    n = len(xs)
    out = []
    for i, x in enumerate(xs):
        if i + 1 < n and xs[i + 1] == x:
            continue
        out.append((x, (i + 1) / n))
    return out


def cdf_at(cdf: Sequence[tuple[float, float]], x: float) -> float:
    """Evaluate an :func:`empirical_cdf` result at an arbitrary abscissa."""
    values = [v for v, _ in cdf]
    i = bisect.bisect_right(values, x)
    return 0.0 if i == 0 else cdf[i - 1][1]


def ble_slot_range_equivalent(v: float, slot: float) -> float:
    """Range error produced by a timing offset of ``slot`` seconds."""
    if v <= 0 or slot < 0:
        raise ValueError("speed must be positive and slot non-negative")
    return v * slot

"""Range differences from per-anchor ToAs, with the period-wrap correction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .detection import ToaEstimate
from .geometry import Scene, anchor_separation


class MissingReferenceError(KeyError):
    pass


@dataclass(frozen=True, slots=True)
class CorrectionConfig:
    d_M: float = 0.1
    Tc: float = 15e-3
    v: float = 343.0

    def __post_init__(self):
        if not self.d_M >= 0:
            raise ValueError(f"distance margin must be non-negative, got {self.d_M}")
        if not (self.Tc > 0 and self.v > 0):
            raise ValueError("Tc and v must be positive")

    @property
    def wrap(self) -> float:
        return self.Tc * self.v

    def decidable(self, D: float) -> bool:
        """Whether a single wrap is distinguishable for anchors D metres apart."""
        return self.wrap > 2.0 * (D + self.d_M)


@dataclass(frozen=True, slots=True)
class RangeDiff:
    anchor_id: int
    d: float
    corrected: bool = False


@dataclass(frozen=True, slots=True)
class RangeDiffSet:
    reference_id: int
    diffs: tuple[RangeDiff, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "diffs", tuple(self.diffs))
        if any(e.anchor_id == self.reference_id for e in self.diffs):
            raise ValueError("reference anchor cannot appear among the differences")
        if not all(math.isfinite(e.d) for e in self.diffs):
            raise ValueError("range differences must be finite")

    def __getitem__(self, anchor_id: int) -> float:
        for e in self.diffs:
            if e.anchor_id == anchor_id:
                return e.d
        raise KeyError(anchor_id)

    @property
    def ids(self) -> list[int]:
        return [e.anchor_id for e in self.diffs]

    @property
    def any_corrected(self) -> bool:
        return any(e.corrected for e in self.diffs)


def raw_range_diff(toa_i: ToaEstimate, toa_j: ToaEstimate, v: float) -> float:
    return v * (toa_i.toa_mod - toa_j.toa_mod)


def correct_range_difference(d: float, D: float, cfg: CorrectionConfig) -> float:
    """Undo a single +-v*Tc wrap when |d| cannot be a feasible difference.

    A range difference between anchors D apart is bounded by D; anything
    beyond ``D + d_M`` is taken as one period off and shifted back toward zero.
    """
    if abs(d) <= D + cfg.d_M:
        return d
    if d > 0:
        return d - cfg.Tc * cfg.v
    return d + cfg.Tc * cfg.v


def form_corrected_set(toas: Iterable[ToaEstimate], scene: Scene, cfg: CorrectionConfig,
                       reference_id: int | None = None,
                       apply_correction: bool = True) -> RangeDiffSet:
    by_id = {t.anchor_id: t for t in toas}
    if len(by_id) < 2:
        raise ValueError("need at least two ToA estimates")
    if reference_id is None:
        reference_id = scene.anchors[0].id
    if reference_id not in by_id:
        raise MissingReferenceError(reference_id)
    ref = by_id[reference_id]
    ref_anchor = scene.anchor(reference_id)
    diffs = []
    for a in scene.anchors:
        if a.id == reference_id or a.id not in by_id:
            continue
        d = raw_range_diff(by_id[a.id], ref, cfg.v)
        fired = False
        if apply_correction:
            d_new = correct_range_difference(d, anchor_separation(a, ref_anchor), cfg)
            fired = d_new != d
            d = d_new
        diffs.append(RangeDiff(a.id, d, fired))
    return RangeDiffSet(reference_id, tuple(diffs))

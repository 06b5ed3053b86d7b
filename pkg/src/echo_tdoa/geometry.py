"""Planar/3-D scene geometry: anchors, ranges and receiver incidence angles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class UnknownAnchorError(KeyError):
    pass


class CoincidentPointsError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Point3:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinate in {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array((self.x, self.y, self.z), dtype=float)

    def __sub__(self, other: Point3) -> np.ndarray:
        return np.array((self.x - other.x, self.y - other.y, self.z - other.z))


@dataclass(frozen=True, slots=True)
class Anchor:
    id: int
    position: Point3
    boresight: tuple[float, float, float] = (0.0, 1.0, 0.0)

    def __post_init__(self):
        norm = math.sqrt(sum(c * c for c in self.boresight))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"anchor {self.id}: boresight norm {norm} is not 1")


@dataclass(frozen=True, slots=True)
class Scene:
    anchors: tuple[Anchor, ...]
    mobile: Point3
    v: float = 343.0
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "anchors", tuple(self.anchors))
        if len(self.anchors) < 2:
            raise ValueError("a scene needs at least two anchors")
        if not self.v > 0:
            raise ValueError(f"speed of sound must be positive, got {self.v}")
        ids = [a.id for a in self.anchors]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate anchor ids: {ids}")
        for i, a in enumerate(self.anchors):
            for b in self.anchors[i + 1:]:
                if a.position == b.position:
                    raise ValueError(f"anchors {a.id} and {b.id} share a position")
        object.__setattr__(self, "_index", {a.id: a for a in self.anchors})

    def anchor(self, anchor_id: int) -> Anchor:
        try:
            return self._index[anchor_id]
        except KeyError:
            raise UnknownAnchorError(anchor_id) from None

    def with_mobile(self, mobile: Point3) -> Scene:
        return Scene(self.anchors, mobile, self.v)


def anchor_range(anchor: Point3, mobile: Point3) -> float:
    """Euclidean anchor-to-mobile distance in metres."""
    return math.sqrt(
        (anchor.x - mobile.x) ** 2 + (anchor.y - mobile.y) ** 2 + (anchor.z - mobile.z) ** 2
    )


def true_range_diff(scene: Scene, i: int, j: int) -> float:
    """R_i - R_j for the scene's mobile node."""
    if i == j:
        raise ValueError("range difference needs two distinct anchors")
    ai, aj = scene.anchor(i), scene.anchor(j)
    return anchor_range(ai.position, scene.mobile) - anchor_range(aj.position, scene.mobile)


def incidence_angle(anchor: Anchor, mobile: Point3) -> float:
    """Angle in [0, pi] between the anchor boresight and the anchor->mobile line."""
    p = anchor.position
    lx, ly, lz = mobile.x - p.x, mobile.y - p.y, mobile.z - p.z
    if lx == 0.0 and ly == 0.0 and lz == 0.0:
        raise CoincidentPointsError(f"mobile coincides with anchor {anchor.id}")
    bx, by, bz = anchor.boresight
    cross = math.sqrt((by * lz - bz * ly) ** 2 + (bz * lx - bx * lz) ** 2 + (bx * ly - by * lx) ** 2)
    return math.atan2(cross, bx * lx + by * ly + bz * lz)


def anchor_separation(a: Anchor, b: Anchor) -> float:
    return anchor_range(a.position, b.position)


def linear_array(xs: Sequence[float], boresight=(0.0, 1.0, 0.0)) -> tuple[Anchor, ...]:
    """Anchors on the x axis with ids 1..N."""
    return tuple(Anchor(k + 1, Point3(float(x), 0.0), boresight) for k, x in enumerate(xs))

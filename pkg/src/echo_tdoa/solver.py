"""Planar position fixes from range differences."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Anchor, Point3
from .tdoa import RangeDiffSet


class SolverError(ArithmeticError):
    pass


class SingularSystemError(SolverError):
    pass


class InfeasibleError(SolverError):
    pass


class DivergenceError(SolverError):
    pass


class RankDeficientError(SolverError):
    pass


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    ITERATIVE = "iterative"


@dataclass(frozen=True, slots=True)
class PositionFix:
    position: Point3
    method: Method
    residual_norm: float
    half_plane_selected: bool = False
    near_singular: bool = False


def residual(position: Point3, anchors: Sequence[Anchor], diffs: RangeDiffSet) -> float:
    """Norm over i of R_i - R_ref - d_i at ``position``."""
    by_id = {a.id: a for a in anchors}
    p = position.as_array()
    r_ref = np.linalg.norm(p - by_id[diffs.reference_id].position.as_array())
    res = [np.linalg.norm(p - by_id[e.anchor_id].position.as_array()) - r_ref - e.d
           for e in diffs.diffs]
    return float(np.linalg.norm(res))


def solve_linear_array(anchors: Sequence[Anchor], d21: float, d31: float,
                       tol: float = 0.1) -> PositionFix:
    """Closed-form fix for three anchors on the x axis, y >= 0 half-plane.

    With R_i = R_1 + d_i1 and R_i^2 - R_1^2 = x_i^2 - x_1^2 - 2 (x_i - x_1) x,
    each pair gives 2 d_i1 R_1 + 2 (x_i - x_1) x = x_i^2 - x_1^2 - d_i1^2,
    linear in (R_1, x). y then follows from R_1.

    Raises
    ------
    InfeasibleError
        If a difference exceeds its anchor separation by more than ``tol``,
        or the solved R_1 is negative.
    SingularSystemError
        If the 2x2 system is (numerically) singular.
    """
    if len(anchors) != 3:
        raise ValueError("the linear-array solver takes exactly three anchors")
    a1, a2, a3 = anchors
    for a in anchors:
        if a.position.y != 0.0 or a.position.z != 0.0:
            raise ValueError(f"anchor {a.id} is not on the x axis")
    x1, x2, x3 = (a.position.x for a in anchors)
    if len({x1, x2, x3}) != 3:
        raise ValueError("anchors must be pairwise distinct")
    if abs(d21) > abs(x2 - x1) + tol or abs(d31) > abs(x3 - x1) + tol:
        raise InfeasibleError(f"range differences ({d21:.6g}, {d31:.6g}) exceed anchor spacing")

    # rows: [2 d_i1, 2 (x_i - x_1)] . [R_1, x] = rhs_i
    m11, m12, b1 = 2.0 * d21, 2.0 * (x2 - x1), x2 * x2 - x1 * x1 - d21 * d21
    m21, m22, b2 = 2.0 * d31, 2.0 * (x3 - x1), x3 * x3 - x1 * x1 - d31 * d31
    det = m11 * m22 - m12 * m21
    scale = max(abs(x2 - x1), abs(x3 - x1), abs(x3 - x2)) ** 2
    if abs(det) < 1e-12 * scale:
        raise SingularSystemError(f"determinant {det:.3g} too small")
    r1 = (b1 * m22 - m12 * b2) / det
    x = (m11 * b2 - b1 * m21) / det
    if r1 < 0:
        raise InfeasibleError(f"negative reference range {r1:.6g}")
    y2 = r1 * r1 - (x - x1) ** 2
    near_singular = y2 <= 1e-12 * scale
    y = math.sqrt(y2) if y2 > 0 else 0.0
    pos = Point3(x, y)
    res = _diff_residuals(pos, anchors, (d21, d31))
    return PositionFix(pos, Method.CLOSED_FORM, res, half_plane_selected=True,
                       near_singular=near_singular)


def _diff_residuals(pos: Point3, anchors: Sequence[Anchor], diffs) -> float:
    p = pos.as_array()
    r = [np.linalg.norm(p - a.position.as_array()) for a in anchors]
    return float(math.hypot(*(r[i + 1] - r[0] - d for i, d in enumerate(diffs))))


def solve_iterative(anchors: Sequence[Anchor], diffs: RangeDiffSet, initial: Point3,
                    max_iter: int = 50, step_tol: float = 1e-10) -> PositionFix:
    """Gauss-Newton on f_i(p) = R_i(p) - R_ref(p) - d_i over planar p."""
    by_id = {a.id: a for a in anchors}
    if len(diffs.diffs) < 2:
        raise RankDeficientError("need at least two range differences")
    ref = by_id[diffs.reference_id].position.as_array()[:2]
    pts = np.array([by_id[e.anchor_id].position.as_array()[:2] for e in diffs.diffs])
    d = np.array([e.d for e in diffs.diffs])
    p = np.array([initial.x, initial.y], dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError("initial guess must be finite")

    prev_step = math.inf
    growth = 0
    for _ in range(max_iter):
        to_ref = p - ref
        to_pts = p - pts
        r_ref = np.linalg.norm(to_ref)
        r_pts = np.linalg.norm(to_pts, axis=1)
        if r_ref == 0 or np.any(r_pts == 0):
            raise SolverError("iterate landed on an anchor")
        f = (r_pts - r_ref) - d
        J = to_pts / r_pts[:, None] - to_ref / r_ref
        step, _, rank, _ = np.linalg.lstsq(J, -f, rcond=None)
        if rank < 2:
            raise RankDeficientError("Jacobian lost rank")
        p = p + step
        norm = float(np.linalg.norm(step))
        if norm < step_tol:
            break
        growth = growth + 1 if norm > prev_step else 0
        if growth >= 5:
            raise DivergenceError("step norm grew for 5 consecutive iterations")
        prev_step = norm
    pos = Point3(float(p[0]), float(p[1]))
    return PositionFix(pos, Method.ITERATIVE, residual(pos, anchors, diffs))

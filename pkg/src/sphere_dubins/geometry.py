"""Sabban-frame geometry for curvature-constrained paths on the unit sphere.

A vehicle state is the rotation matrix ``[X T N]`` whose columns are the
position on the unit sphere, the unit tangent, and the frame normal
``N = X x T``.  Moving along a segment of constant geodesic curvature
right-multiplies the frame by a fixed-axis rotation, so whole paths are
products of Rodrigues rotations and never need numerical integration.

Segment alphabet:

* ``G`` -- great-circle arc (zero geodesic curvature), axis ``(0, 0, 1)``.
* ``L`` / ``R`` -- tight turns of unit-sphere radius ``r``, axes
  ``(+/-sqrt(1 - r^2), 0, r)``.

Arc *angles* are measured about the segment axis; the corresponding arc
*length* is the angle for ``G`` segments and ``r`` times the angle for turns.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateAlignment,
    InconsistentPair,
    InvalidInput,
    MalformedConfiguration,
)

TWO_PI = 2.0 * math.pi

# Segment angles below this are canonicalized to exactly zero (absent segment).
ANGLE_EPS = 1e-9
# Maximum axial-component mismatch tolerated by align_angle.
ALIGN_TOL = 1e-7
# Minimum off-axis component required for angle recovery.
PERP_EPS = 1e-7

_EX = np.array([1.0, 0.0, 0.0])
_EY = np.array([0.0, 1.0, 0.0])
_EZ = np.array([0.0, 0.0, 1.0])


class SegmentKind(str, Enum):
    """Segment alphabet: left turn, right turn, great-circle arc."""

    L = "L"
    R = "R"
    G = "G"

    @property
    def is_turn(self) -> bool:
        return self is not SegmentKind.G


def canonical_angle(angle: float) -> float:
    """Reduce an angle to [0, 2*pi), snapping near-zero values to exactly 0."""
    if not math.isfinite(angle):
        raise InvalidInput(f"angle must be finite, got {angle!r}")
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a < ANGLE_EPS or TWO_PI - a < ANGLE_EPS:
        return 0.0
    return a


@dataclass(frozen=True)
class Segment:
    """A typed arc with its arc angle in [0, 2*pi)."""

    kind: SegmentKind
    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SegmentKind(self.kind))
        object.__setattr__(self, "angle", canonical_angle(float(self.angle)))

    def arc_length(self, geom: "TurnGeometry") -> float:
        return self.angle if self.kind is SegmentKind.G else geom.r * self.angle


def L(angle: float) -> Segment:
    return Segment(SegmentKind.L, angle)


def R(angle: float) -> Segment:
    return Segment(SegmentKind.R, angle)


def G(angle: float) -> Segment:
    return Segment(SegmentKind.G, angle)


@dataclass(frozen=True)
class TurnGeometry:
    """Turning radius r on the unit sphere and the matching curvature bound.

    The two fields are redundant (``r = 1 / sqrt(1 + u_max^2)``); the
    constructor enforces consistency so either one determines the other.
    """

    r: float
    u_max: float

    def __post_init__(self) -> None:
        if not (0.0 < self.r < 1.0):
            raise InvalidInput(f"turning radius must be in (0, 1), got {self.r}")
        if self.u_max <= 0.0:
            raise InvalidInput(f"curvature bound must be positive, got {self.u_max}")
        if abs(self.r - 1.0 / math.sqrt(1.0 + self.u_max**2)) > 1e-12:
            raise InvalidInput(
                f"inconsistent pair r={self.r}, u_max={self.u_max}: "
                "expected r = 1/sqrt(1 + u_max^2)"
            )

    @classmethod
    def from_radius(cls, r: float) -> "TurnGeometry":
        if not (0.0 < r < 1.0):
            raise InvalidInput(f"turning radius must be in (0, 1), got {r}")
        return cls(r=r, u_max=math.sqrt(1.0 - r * r) / r)

    @classmethod
    def from_curvature_bound(cls, u_max: float) -> "TurnGeometry":
        if u_max <= 0.0:
            raise InvalidInput(f"curvature bound must be positive, got {u_max}")
        return cls(r=1.0 / math.sqrt(1.0 + u_max**2), u_max=u_max)


def turn_axis(kind: SegmentKind | str, geom: TurnGeometry) -> np.ndarray:
    """Unit rotation axis of a segment kind for the given turn geometry."""
    kind = SegmentKind(kind)
    if kind is SegmentKind.G:
        return _EZ.copy()
    s = math.sqrt(1.0 - geom.r**2)
    if kind is SegmentKind.L:
        return np.array([s, 0.0, geom.r])
    return np.array([-s, 0.0, geom.r])


def skew(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix with ``skew(v) @ w == cross(v, w)``."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def segment_generator(kind: SegmentKind | str, geom: TurnGeometry) -> np.ndarray:
    """Unit-axis skew generator of a segment: d(rotation)/d(angle) at 0."""
    return skew(turn_axis(kind, geom))


def frame_generator(u_g: float) -> np.ndarray:
    """Frame velocity matrix: the moving frame obeys R'(s) = R(s) @ frame_generator(u_g)."""
    return np.array([[0.0, -1.0, 0.0], [1.0, 0.0, -u_g], [0.0, u_g, 0.0]])


def rotation_about_axis(axis: np.ndarray, angle: float) -> np.ndarray:
    """Proper rotation by `angle` about a unit `axis` (Rodrigues formula)."""
    axis = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
        raise InvalidInput(f"rotation axis must be unit, got norm {np.linalg.norm(axis)}")
    k = skew(axis)
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def rotations_about_axis(axis: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Vectorized Rodrigues: rotations (n, 3, 3) about one unit axis."""
    axis = np.asarray(axis, dtype=float)
    angles = np.asarray(angles, dtype=float)
    k = skew(axis)
    k2 = k @ k
    s = np.sin(angles)[:, None, None]
    c = (1.0 - np.cos(angles))[:, None, None]
    return np.eye(3) + s * k + c * k2


def segment_rotation(kind: SegmentKind | str, angle: float, geom: TurnGeometry) -> np.ndarray:
    """Net rotation of one segment, as a function of its arc angle."""
    return rotation_about_axis(turn_axis(kind, geom), angle)


def compose_path(segments: Iterable[Segment], geom: TurnGeometry) -> np.ndarray:
    """Product of segment rotations in traversal order (identity if empty)."""
    m = np.eye(3)
    for seg in segments:
        if seg.angle != 0.0:
            m = m @ segment_rotation(seg.kind, seg.angle, geom)
    return m


def path_length(
    segments: Iterable[Segment], geom: TurnGeometry, sphere_radius: float = 1.0
) -> float:
    """Arc length of a path, scaled to a sphere of the given radius."""
    if sphere_radius <= 0.0:
        raise InvalidInput(f"sphere radius must be positive, got {sphere_radius}")
    return sphere_radius * sum(seg.arc_length(geom) for seg in segments)


@dataclass(frozen=True)
class Configuration:
    """A point on the unit sphere plus its unit tangent direction.

    The frame normal is always derived as ``position x tangent`` so the
    orthonormality of the full frame holds by construction.
    """

    position: np.ndarray
    tangent: np.ndarray

    def __post_init__(self) -> None:
        pos = np.array(self.position, dtype=float)
        tan = np.array(self.tangent, dtype=float)
        if pos.shape != (3,) or tan.shape != (3,):
            raise MalformedConfiguration("position and tangent must be 3-vectors")
        if abs(np.linalg.norm(pos) - 1.0) > 1e-12 or abs(np.linalg.norm(tan) - 1.0) > 1e-12:
            raise MalformedConfiguration("position and tangent must be unit vectors")
        if abs(float(pos @ tan)) > 1e-10:
            raise MalformedConfiguration("tangent must be orthogonal to position")
        pos.setflags(write=False)
        tan.setflags(write=False)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "tangent", tan)

    @property
    def normal(self) -> np.ndarray:
        return np.cross(self.position, self.tangent)

    def frame(self) -> np.ndarray:
        """3x3 frame with columns (position, tangent, normal)."""
        return np.column_stack([self.position, self.tangent, self.normal])

    @classmethod
    def from_frame(cls, frame: np.ndarray) -> "Configuration":
        frame = np.asarray(frame, dtype=float)
        if frame.shape != (3, 3):
            raise MalformedConfiguration("frame must be a 3x3 matrix")
        if np.max(np.abs(frame.T @ frame - np.eye(3))) > 1e-10:
            raise MalformedConfiguration("frame must be orthonormal")
        if np.linalg.det(frame) < 0.0:
            raise MalformedConfiguration("frame must be proper (det = +1)")
        return cls(position=frame[:, 0], tangent=frame[:, 1])

    @classmethod
    def canonical(cls) -> "Configuration":
        return cls(position=_EX, tangent=_EY)


def relative_rotation(initial: Configuration, final: Configuration) -> np.ndarray:
    """Rotation M with ``initial_frame @ M == final_frame``."""
    return initial.frame().T @ final.frame()


class PathSample(NamedTuple):
    s: float
    configuration: Configuration
    segment_index: int


def sample_path(
    start: Configuration,
    segments: Sequence[Segment],
    geom: TurnGeometry,
    step: float,
) -> list[PathSample]:
    """Closed-form samples of a path at arc-length increments.

    Samples sit at multiples of `step` plus every segment boundary (and the
    path end).  A sample exactly on a boundary is reported with the index of
    the segment that starts there, except the final sample which belongs to
    the last segment.  An empty path yields the single sample (0, start, -1).
    """
    if step <= 0.0:
        raise InvalidInput(f"step must be positive, got {step}")
    lengths = [seg.arc_length(geom) for seg in segments]
    total = sum(lengths)
    if not segments or total == 0.0:
        return [PathSample(0.0, start, -1)]

    bounds = np.concatenate([[0.0], np.cumsum(lengths)])
    s_values = {0.0, total}
    s_values.update(float(b) for b in bounds[1:-1])
    n_steps = int(total / step)
    s_values.update(k * step for k in range(1, n_steps + 1) if k * step < total)
    ordered = sorted(s_values)
    # merge values that collide within rounding
    merged: list[float] = []
    for s in ordered:
        if merged and s - merged[-1] <= 1e-12:
            continue
        merged.append(s)

    prefixes = [np.eye(3)]
    for seg in segments:
        prefixes.append(prefixes[-1] @ segment_rotation(seg.kind, seg.angle, geom))
    inner = list(bounds[1:-1])
    start_frame = start.frame()

    samples: list[PathSample] = []
    for s in merged:
        k = bisect_right(inner, s + 1e-12)
        k = min(k, len(segments) - 1)
        ds = s - bounds[k]
        seg = segments[k]
        local = ds if seg.kind is SegmentKind.G else ds / geom.r
        frame = start_frame @ prefixes[k] @ segment_rotation(seg.kind, local, geom)
        samples.append(PathSample(s, Configuration.from_frame(frame), k))
    return samples


def align_angle(axis: np.ndarray, v: np.ndarray, w: np.ndarray) -> float:
    """Angle in [0, 2*pi) whose rotation about `axis` maps `v` onto `w`.

    Raises DegenerateAlignment when `v` is (nearly) parallel to the axis and
    InconsistentPair when the axial components of `v` and `w` disagree, i.e.
    no such rotation exists.
    """
    axis = np.asarray(axis, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    av = float(axis @ v)
    aw = float(axis @ w)
    if abs(av - aw) > ALIGN_TOL:
        raise InconsistentPair(
            f"axial components differ by {abs(av - aw):.3e} (tolerance {ALIGN_TOL})"
        )
    v_perp = v - av * axis
    w_perp = w - aw * axis
    if np.linalg.norm(v_perp) < PERP_EPS:
        raise DegenerateAlignment("probe vector is parallel to the rotation axis")
    angle = math.atan2(float(axis @ np.cross(v_perp, w_perp)), float(v_perp @ w_perp))
    if angle < 0.0:
        angle += TWO_PI
    if TWO_PI - angle < 1e-12:
        angle = 0.0
    return angle


def probe_orthogonal(axis: np.ndarray) -> np.ndarray:
    """Deterministic unit vector orthogonal to `axis` (y-axis preferred)."""
    for e in (_EY, _EX, _EZ):
        p = e - float(e @ axis) * axis
        n = np.linalg.norm(p)
        if n >= PERP_EPS:
            return p / n
    raise InvalidInput("axis has no orthogonal complement (not a unit vector?)")


def orthonormalize_pose(
    position: np.ndarray, tangent: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Project a near-valid pose onto the sphere (modified Gram-Schmidt).

    Returns the unit position, the unit tangent re-orthogonalized against it,
    and the largest adjustment that was needed (0 means input was exact).
    """
    position = np.asarray(position, dtype=float)
    tangent = np.asarray(tangent, dtype=float)
    pn = np.linalg.norm(position)
    tn = np.linalg.norm(tangent)
    if pn == 0.0 or tn == 0.0:
        raise MalformedConfiguration("position and tangent must be nonzero")
    x = position / pn
    t = tangent / tn
    ortho = float(x @ t)
    t = t - ortho * x
    t_norm = np.linalg.norm(t)
    if t_norm < 1e-6:
        raise MalformedConfiguration("tangent is parallel to position")
    t = t / t_norm
    deviation = max(abs(pn - 1.0), abs(tn - 1.0), abs(ortho))
    return x, t, deviation

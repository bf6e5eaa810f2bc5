"""End-to-end planning: normalize, enumerate families, solve, filter, rank.

The planner scales the problem to the unit sphere, enumerates the candidate
family catalog for the turning-radius regime, solves every family through the
linkage solver, applies per-family feasibility filters, and ranks the
surviving candidates by physical length.  Output is deterministic for fixed
inputs and options.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MalformedConfiguration, NoCandidateFound, RadiusOutOfRange
from .geometry import (
    Configuration,
    Segment,
    SegmentKind,
    TurnGeometry,
    compose_path,
    orthonormalize_pose,
    path_length,
    relative_rotation,
)
from .linkage import (
    TOL_RESIDUAL,
    solve_equal_middle,
    solve_one,
    solve_three,
    solve_two,
)

HALF_RADIUS = 0.5
BOUNDARY_SQRT2 = 1.0 / math.sqrt(2.0)
MAX_RADIUS = math.sqrt(3.0) / 2.0
REGIME_BAND = 1e-12          # quotients this close to a boundary get the larger catalog
MIDDLE_PI_BAND = 1e-9        # free-middle roots this close to pi belong to the fixed-pi family
OUTER_PI_SLACK = 1e-9        # numerical slack on the fixed-pi family outer bound
DEDUP_ANGLE_TOL = 1e-7
INPUT_FRAME_TOL = 1e-6       # worst pose inconsistency accepted (re-orthonormalized)


@dataclass(frozen=True)
class Pose:
    """Raw position/tangent pair in physical units (validated when planning)."""

    position: np.ndarray
    tangent: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "tangent", np.asarray(self.tangent, dtype=float))


@dataclass(frozen=True)
class PlanRequest:
    sphere_radius: float
    turning_radius: float
    initial: Pose
    final: Pose


@dataclass(frozen=True)
class FamilyTemplate:
    """One candidate family: an axis pattern plus its middle-arc constraint."""

    tag: str
    kinds: tuple[SegmentKind, ...]
    fixed_middle: float | None = None   # three-segment chains with a pinned middle arc
    equal_middles: bool = False         # 4/5-chains share one interior angle

    @property
    def is_free_middle_turn_triple(self) -> bool:
        return (
            len(self.kinds) == 3
            and self.fixed_middle is None
            and all(k.is_turn for k in self.kinds)
        )


def _template(tag: str, pattern: str, fixed_middle: float | None = None) -> FamilyTemplate:
    kinds = tuple(SegmentKind(c) for c in pattern)
    return FamilyTemplate(
        tag=tag,
        kinds=kinds,
        fixed_middle=fixed_middle,
        equal_middles=len(kinds) >= 4,
    )


_COMMON = (
    FamilyTemplate("EMPTY", ()),
    _template("G", "G"),
    _template("L", "L"),
    _template("R", "R"),
    _template("LG", "LG"),
    _template("RG", "RG"),
    _template("GL", "GL"),
    _template("GR", "GR"),
    _template("LR", "LR"),
    _template("RL", "RL"),
    _template("LGL", "LGL"),
    _template("LGR", "LGR"),
    _template("RGL", "RGL"),
    _template("RGR", "RGR"),
    _template("LRL", "LRL"),
    _template("RLR", "RLR"),
)

_FOUR_CHAINS = (
    _template("LRLR", "LRLR"),
    _template("RLRL", "RLRL"),
)

_HIGH_EXTRAS = (
    _template("LRpiL", "LRL", fixed_middle=math.pi),
    _template("RLpiR", "RLR", fixed_middle=math.pi),
    _template("LRLR", "LRLR"),
    _template("RLRL", "RLRL"),
    _template("LRLRL", "LRLRL"),
    _template("RLRLR", "RLRLR"),
)

_AUDIT = (
    _template("GLG", "GLG"),
    _template("GRG", "GRG"),
    _template("GLR", "GLR"),
    _template("GRL", "GRL"),
    _template("LRG", "LRG"),
    _template("RLG", "RLG"),
    _template("LRLR", "LRLR"),
    _template("RLRL", "RLRL"),
    _template("LRLRL", "LRLRL"),
    _template("RLRLR", "RLRLR"),
)


def catalog_regime(r: float) -> str:
    """Regime key for the candidate catalog.

    Classification is by exact comparison on the computed quotient; values
    within REGIME_BAND of an interval boundary (but not exactly on it) get
    the larger neighboring catalog so boundary roundoff never drops families.
    """
    if r == BOUNDARY_SQRT2:
        return "sqrt2"
    if r > BOUNDARY_SQRT2 or abs(r - BOUNDARY_SQRT2) <= REGIME_BAND:
        return "high"
    if r == HALF_RADIUS:
        return "low"
    if r > HALF_RADIUS or abs(r - HALF_RADIUS) <= REGIME_BAND:
        return "four"
    return "low"


def family_catalog(r: float, mode: str = "table") -> list[FamilyTemplate]:
    """Ordered candidate families for unit-sphere turning radius r.

    mode="table" returns the proven catalog for the regime of r and raises
    RadiusOutOfRange beyond sqrt(3)/2.  mode="all" additionally appends audit
    families (great-circle sandwiches and 4/5-chains regardless of regime).
    """
    if mode not in ("table", "all"):
        raise ValueError(f"mode must be 'table' or 'all', got {mode!r}")
    if r <= 0.0:
        raise RadiusOutOfRange(f"turning radius must be positive, got {r}")
    if mode == "table" and r > MAX_RADIUS:
        raise RadiusOutOfRange(
            f"unit turning radius {r:.6g} exceeds sqrt(3)/2; "
            "use best-effort mode for a heuristic answer"
        )

    if r > MAX_RADIUS:
        regime = "high"  # best-effort: largest proven catalog plus audit families
    else:
        regime = catalog_regime(r)
    families = list(_COMMON)
    if regime == "four":
        families.extend(_FOUR_CHAINS)
    elif regime == "high":
        families.extend(_HIGH_EXTRAS)

    if mode == "all":
        present = {f.tag for f in families}
        families.extend(f for f in _AUDIT if f.tag not in present)
    return families


@dataclass(frozen=True)
class PathCandidate:
    family: str
    segments: tuple[Segment, ...]
    unit_length: float
    physical_length: float
    residual: float


@dataclass(frozen=True)
class PlanResult:
    unit_r: float
    sphere_radius: float
    turning_radius: float
    candidates: tuple[PathCandidate, ...]
    best: int
    heuristic: bool = False
    input_adjustment: float = 0.0

    @property
    def best_candidate(self) -> PathCandidate:
        return self.candidates[self.best]


def _validated_configuration(pose: Pose, sphere_radius: float, label: str) -> tuple[Configuration, float]:
    position = pose.position
    tangent = pose.tangent
    if position.shape != (3,) or tangent.shape != (3,):
        raise MalformedConfiguration(f"{label}: position and tangent must be 3-vectors")
    if not (np.all(np.isfinite(position)) and np.all(np.isfinite(tangent))):
        raise MalformedConfiguration(f"{label}: position and tangent must be finite")
    norm = float(np.linalg.norm(position))
    if norm == 0.0 or abs(norm - sphere_radius) / sphere_radius > INPUT_FRAME_TOL:
        raise MalformedConfiguration(
            f"{label}.position: norm {norm:.9g} not within {INPUT_FRAME_TOL:g} "
            f"relative of sphere_radius {sphere_radius:.9g}"
        )
    t_norm = float(np.linalg.norm(tangent))
    if t_norm == 0.0 or abs(t_norm - 1.0) > INPUT_FRAME_TOL:
        raise MalformedConfiguration(f"{label}.tangent: norm {t_norm:.9g} is not unit")
    unit_pos = position / sphere_radius
    ortho = abs(float(unit_pos @ tangent)) / (np.linalg.norm(unit_pos) * t_norm)
    if ortho > INPUT_FRAME_TOL:
        raise MalformedConfiguration(
            f"{label}: tangent not orthogonal to position (|cos| = {ortho:.3e})"
        )
    x, t, deviation = orthonormalize_pose(unit_pos, tangent)
    return Configuration(position=x, tangent=t), deviation


def normalize_problem(
    req: PlanRequest, best_effort: bool = False
) -> tuple[np.ndarray, TurnGeometry, Configuration, Configuration, float]:
    """Full normalization: target rotation, geometry, unit-sphere endpoint
    configurations, and the largest pose adjustment applied on input."""
    if not (req.sphere_radius > 0.0) or not math.isfinite(req.sphere_radius):
        raise MalformedConfiguration(f"sphere_radius must be positive, got {req.sphere_radius}")
    if not (req.turning_radius > 0.0) or not math.isfinite(req.turning_radius):
        raise MalformedConfiguration(f"turning_radius must be positive, got {req.turning_radius}")
    r = req.turning_radius / req.sphere_radius
    if r >= 1.0:
        raise RadiusOutOfRange(
            f"unit turning radius {r:.6g} is not below 1; no tight turn exists"
        )
    if r > MAX_RADIUS and not best_effort:
        raise RadiusOutOfRange(
            f"unit turning radius {r:.6g} exceeds sqrt(3)/2 "
            "(pass best_effort for a heuristic answer)"
        )
    initial, dev_i = _validated_configuration(req.initial, req.sphere_radius, "initial")
    final, dev_f = _validated_configuration(req.final, req.sphere_radius, "final")
    m = relative_rotation(initial, final)
    return m, TurnGeometry.from_radius(r), initial, final, max(dev_i, dev_f)


def normalize_request(
    req: PlanRequest, best_effort: bool = False
) -> tuple[np.ndarray, TurnGeometry]:
    """Scale a physical request onto the unit sphere.

    Returns the target relative rotation and the unit-sphere turn geometry.
    Raises MalformedConfiguration for inconsistent poses and RadiusOutOfRange
    when the radius quotient leaves the supported interval.
    """
    m, geom, _, _, _ = normalize_problem(req, best_effort)
    return m, geom


def _middle_ok(template: FamilyTemplate, middle: float, regime_has_fixed_pi: bool) -> bool:
    if regime_has_fixed_pi and abs(middle - math.pi) <= MIDDLE_PI_BAND:
        return False  # the root belongs to the fixed-pi family
    return middle >= math.pi - MIDDLE_PI_BAND


def solve_family(
    template: FamilyTemplate,
    m: np.ndarray,
    geom: TurnGeometry,
    regime_has_fixed_pi: bool,
    residual_tol: float = TOL_RESIDUAL,
) -> list[tuple[Segment, ...]]:
    """Feasible segment sequences of one family reaching the target."""
    kinds = template.kinds
    n = len(kinds)
    if n == 0:
        if float(np.linalg.norm(m - np.eye(3))) <= residual_tol:
            return [()]
        return []
    if n == 1:
        sol = solve_one(m, kinds[0], geom, residual_tol=residual_tol)
        sols = [sol] if sol is not None else []
    elif n == 2:
        sols = solve_two(m, kinds, geom, residual_tol=residual_tol)
    elif n == 3:
        sols = solve_three(
            m, kinds, geom, fixed_middle=template.fixed_middle, residual_tol=residual_tol
        )
    else:
        sols = solve_equal_middle(m, kinds, geom, residual_tol=residual_tol)

    feasible: list[tuple[Segment, ...]] = []
    for sol in sols:
        if template.fixed_middle is not None:
            alpha, _, gamma = sol.angles
            if alpha > math.pi + OUTER_PI_SLACK or gamma > math.pi + OUTER_PI_SLACK:
                continue
        elif template.is_free_middle_turn_triple:
            if not _middle_ok(template, sol.angles[1], regime_has_fixed_pi):
                continue
        feasible.append(sol.segments(kinds))
    return feasible


def _candidate_sort_key(segments: tuple[Segment, ...], geom: TurnGeometry) -> tuple:
    turn_sum = sum(s.angle for s in segments if s.kind.is_turn)
    return (path_length(segments, geom), turn_sum, tuple(s.angle for s in segments))


def _is_duplicate(a: tuple[Segment, ...], b: tuple[Segment, ...]) -> bool:
    sa = [s for s in a if s.angle > 0.0]
    sb = [s for s in b if s.angle > 0.0]
    if len(sa) != len(sb):
        return False
    return all(
        x.kind is y.kind and abs(x.angle - y.angle) <= DEDUP_ANGLE_TOL
        for x, y in zip(sa, sb)
    )


def plan(
    req: PlanRequest,
    mode: str = "table",
    best_effort: bool = False,
    residual_tol: float = TOL_RESIDUAL,
) -> PlanResult:
    """Solve every catalog family against the request and rank by length.

    Candidates appear in catalog order (solutions within a family ordered by
    length, then total turning, then angles); `best` indexes the minimum
    physical length with ties already resolved by that ordering.  Raises
    NoCandidateFound when filtering leaves nothing, which cannot happen for
    valid targets at the default tolerance.
    """
    m, geom, _, _, adjustment = normalize_problem(req, best_effort)
    heuristic = geom.r > MAX_RADIUS
    if heuristic:
        mode = "all"
    families = family_catalog(geom.r, mode=mode)
    regime_has_fixed_pi = any(f.fixed_middle is not None for f in families)

    candidates: list[PathCandidate] = []
    for template in families:
        solved = solve_family(template, m, geom, regime_has_fixed_pi, residual_tol)
        solved.sort(key=lambda segs: _candidate_sort_key(segs, geom))
        for segments in solved:
            if any(_is_duplicate(segments, c.segments) for c in candidates):
                continue
            unit_len = path_length(segments, geom)
            residual = float(np.linalg.norm(compose_path(segments, geom) - m))
            candidates.append(
                PathCandidate(
                    family=template.tag,
                    segments=segments,
                    unit_length=unit_len,
                    physical_length=req.sphere_radius * unit_len,
                    residual=residual,
                )
            )

    if not candidates:
        raise NoCandidateFound(
            "no candidate family produced a residual-passing path; "
            "this indicates pathological tolerances"
        )
    best = min(range(len(candidates)), key=lambda i: (candidates[i].physical_length, i))
    return PlanResult(
        unit_r=geom.r,
        sphere_radius=req.sphere_radius,
        turning_radius=req.turning_radius,
        candidates=tuple(candidates),
        best=best,
        heuristic=heuristic,
        input_adjustment=adjustment,
    )

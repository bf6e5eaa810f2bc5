import math

import numpy as np

from sphere_dubins import geometry as geo
from sphere_dubins.planner import PlanRequest, Pose


def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_configuration(rng: np.random.Generator) -> geo.Configuration:
    x = random_unit(rng)
    t = rng.standard_normal(3)
    t -= (t @ x) * x
    t /= np.linalg.norm(t)
    return geo.Configuration(position=x, tangent=t)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def request_from_segments(
    segments, unit_r: float, sphere_radius: float = 1.0
) -> PlanRequest:
    """Forward-compose a unit-sphere path into a physical plan request."""
    geom = geo.TurnGeometry.from_radius(unit_r)
    start = geo.Configuration.canonical()
    final_frame = start.frame() @ geo.compose_path(segments, geom)
    return PlanRequest(
        sphere_radius=sphere_radius,
        turning_radius=unit_r * sphere_radius,
        initial=Pose(start.position * sphere_radius, start.tangent),
        final=Pose(final_frame[:, 0] * sphere_radius, final_frame[:, 1]),
    )


def request_from_rotation(m, unit_r: float, sphere_radius: float = 1.0) -> PlanRequest:
    start = geo.Configuration.canonical()
    final_frame = start.frame() @ m
    return PlanRequest(
        sphere_radius=sphere_radius,
        turning_radius=unit_r * sphere_radius,
        initial=Pose(start.position * sphere_radius, start.tangent),
        final=Pose(final_frame[:, 0] * sphere_radius, final_frame[:, 1]),
    )


def random_in_bounds_path(template, rng: np.random.Generator) -> list[geo.Segment]:
    """Random angle assignment satisfying the family's feasibility bounds."""
    kinds = template.kinds
    if template.equal_middles:
        beta = rng.uniform(0.05, math.pi - 0.05)
        middle = math.pi + beta
        alpha = rng.uniform(0.0, middle)
        gamma = rng.uniform(0.0, middle)
        angles = [alpha] + [middle] * (len(kinds) - 2) + [gamma]
    elif template.fixed_middle is not None:
        angles = [rng.uniform(0.0, math.pi), template.fixed_middle, rng.uniform(0.0, math.pi)]
    else:
        angles = list(rng.uniform(0.0, 2.0 * math.pi, size=len(kinds)))
        if template.is_free_middle_turn_triple:
            angles[1] = rng.uniform(math.pi + 1e-6, 2.0 * math.pi - 1e-6)
    return [geo.Segment(k, a) for k, a in zip(kinds, angles)]

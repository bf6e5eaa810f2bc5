import math

import numpy as np
import pytest

from conftest import random_configuration, random_unit
from sphere_dubins import geometry as geo
from sphere_dubins.errors import DegenerateAlignment, InconsistentPair, InvalidInput
from sphere_dubins.lemmas import triple_turn_pi_entries

GEOM = geo.TurnGeometry.from_radius(0.5)


def test_rotation_zero_angle_is_identity():
    axis = np.array([0.3, -0.4, math.sqrt(0.75)])
    assert np.allclose(geo.rotation_about_axis(axis, 0.0), np.eye(3), atol=0.0)


def test_rotation_elementary_quarter_turn():
    r = geo.rotation_about_axis(np.array([0.0, 0.0, 1.0]), math.pi / 2)
    assert np.allclose(r @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)


def test_rotation_full_turn_is_identity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        axis = random_unit(rng)
        assert np.max(np.abs(geo.rotation_about_axis(axis, 2 * math.pi) - np.eye(3))) <= 1e-12


def test_rotation_rejects_non_unit_axis():
    with pytest.raises(InvalidInput):
        geo.rotation_about_axis(np.array([1.0, 1.0, 0.0]), 0.5)


def test_turn_axes():
    g = geo.TurnGeometry.from_radius(0.6)
    assert np.allclose(geo.turn_axis("G", g), [0.0, 0.0, 1.0])
    assert np.allclose(geo.turn_axis("L", g), [0.8, 0.0, 0.6])
    assert np.allclose(geo.turn_axis("R", g), [-0.8, 0.0, 0.6])


def test_turn_geometry_consistency():
    g = geo.TurnGeometry.from_radius(0.71)
    assert abs(g.r - 1.0 / math.sqrt(1.0 + g.u_max**2)) <= 1e-12
    with pytest.raises(InvalidInput):
        geo.TurnGeometry(r=0.5, u_max=1.0)


def test_segment_generators_are_skew_with_matching_axis():
    g = geo.TurnGeometry.from_radius(0.71)
    for kind in ("L", "R", "G"):
        gen = geo.segment_generator(kind, g)
        assert np.max(np.abs(gen + gen.T)) == 0.0
        axis = geo.turn_axis(kind, g)
        recovered = np.array([gen[2, 1], gen[0, 2], gen[1, 0]])
        assert np.max(np.abs(recovered - axis)) <= 1e-15
        assert abs(np.linalg.norm(axis) - 1.0) <= 1e-12


def test_great_circle_x_column():
    r = geo.segment_rotation("G", math.pi / 2, GEOM)
    assert np.allclose(r[:, 0], [0.0, 1.0, 0.0], atol=1e-15)


def test_full_turn_segment_rotation_identity():
    r = geo.segment_rotation("L", 2 * math.pi, GEOM)
    assert np.max(np.abs(r - np.eye(3))) <= 1e-12


@pytest.mark.parametrize("r,beta", [(0.3, 0.7), (0.5, 1.9), (0.62, 0.25), (0.71, 2.8)])
def test_pi_sandwich_center_entry_is_minus_cos_beta(r, beta):
    g = geo.TurnGeometry.from_radius(r)
    m = geo.compose_path([geo.L(math.pi), geo.R(math.pi + beta), geo.L(math.pi)], g)
    assert abs(m[1, 1] + math.cos(beta)) <= 1e-12


def test_compose_empty_is_identity():
    assert np.array_equal(geo.compose_path([], GEOM), np.eye(3))


def test_one_parameter_subgroup():
    a = geo.segment_rotation("L", 0.7, GEOM) @ geo.segment_rotation("L", 1.1, GEOM)
    b = geo.segment_rotation("L", 1.8, GEOM)
    assert np.max(np.abs(a - b)) <= 1e-13


def test_pi_sandwich_matches_closed_form_entries():
    # frozen from the entrywise closed form at (r, beta) = (0.6, 0.8)
    expected = np.array(
        [
            [-0.4864779612322142, -0.6714453010819533, -0.5590173529420293],
            [0.6714453010819533, -0.6967067093471654, 0.252509343996632],
            [-0.5590173529420293, -0.252509343996632, 0.7897712518850489],
        ]
    )
    g = geo.TurnGeometry.from_radius(0.6)
    product = geo.compose_path([geo.L(math.pi), geo.R(math.pi + 0.8), geo.L(math.pi)], g)
    assert np.max(np.abs(product - expected)) <= 1e-10
    assert np.max(np.abs(triple_turn_pi_entries(0.6, 0.8) - expected)) <= 1e-15


def test_relative_rotation_identity_and_definition():
    cfg = geo.Configuration.canonical()
    assert np.allclose(geo.relative_rotation(cfg, cfg), np.eye(3), atol=0.0)
    g = GEOM
    target = geo.segment_rotation("G", math.pi / 2, g)
    reached = geo.Configuration.from_frame(cfg.frame() @ target)
    assert np.max(np.abs(geo.relative_rotation(cfg, reached) - target)) <= 1e-14


def test_relative_rotation_is_orthonormal():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = random_configuration(rng)
        b = random_configuration(rng)
        m = geo.relative_rotation(a, b)
        assert np.max(np.abs(m.T @ m - np.eye(3))) <= 1e-10
        assert np.linalg.det(m) > 0.0


def test_segment_angle_canonicalization():
    assert geo.Segment("L", 5e-10).angle == 0.0
    assert geo.Segment("L", 2 * math.pi - 5e-10).angle == 0.0
    assert geo.Segment("L", -0.5).angle == pytest.approx(2 * math.pi - 0.5)


def test_sample_path_single_great_arc():
    start = geo.Configuration.canonical()
    samples = geo.sample_path(start, [geo.G(math.pi)], GEOM, math.pi / 2)
    assert len(samples) == 3
    mid = samples[1].configuration
    rotated = geo.rotation_about_axis(start.normal, math.pi / 2) @ start.position
    assert np.max(np.abs(mid.position - rotated)) <= 1e-12


def test_sample_path_empty():
    start = geo.Configuration.canonical()
    samples = geo.sample_path(start, [], GEOM, 0.5)
    assert len(samples) == 1
    assert samples[0].s == 0.0
    assert samples[0].segment_index == -1
    assert samples[0].configuration is start


def test_sample_path_end_frame_matches_compose():
    g = geo.TurnGeometry.from_radius(0.71)
    segs = [geo.R(0.7), geo.L(math.pi), geo.R(0.7)]
    start = geo.Configuration.canonical()
    samples = geo.sample_path(start, segs, g, 0.05)
    end = samples[-1].configuration.frame()
    expected = start.frame() @ geo.compose_path(segs, g)
    assert np.max(np.abs(end - expected)) <= 1e-9


def test_path_length_arithmetic_and_scaling():
    segs = [geo.G(math.pi / 2), geo.L(math.pi)]
    assert geo.path_length(segs, GEOM) == pytest.approx(math.pi, abs=1e-15)
    assert geo.path_length(segs, GEOM, sphere_radius=2.0) == pytest.approx(2 * math.pi, abs=1e-14)


def test_path_length_matches_published_example():
    g = geo.TurnGeometry.from_radius(0.71)
    segs = [geo.R(0.7), geo.L(math.pi), geo.R(0.7)]
    assert abs(geo.path_length(segs, g) - 3.2245) <= 5e-4


def test_align_angle_basics():
    z = np.array([0.0, 0.0, 1.0])
    v = np.array([1.0, 0.0, 0.0])
    assert geo.align_angle(z, v, v) == 0.0
    assert geo.align_angle(z, v, np.array([0.0, 1.0, 0.0])) == pytest.approx(math.pi / 2)


def test_align_angle_errors():
    z = np.array([0.0, 0.0, 1.0])
    with pytest.raises(DegenerateAlignment):
        geo.align_angle(z, z, z)
    with pytest.raises(InconsistentPair):
        geo.align_angle(z, np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]))


def test_align_angle_roundtrip_property():
    rng = np.random.default_rng(11)
    for _ in range(200):
        axis = random_unit(rng)
        v = random_unit(rng)
        if np.linalg.norm(v - (v @ axis) * axis) < 1e-3:
            continue
        angle = rng.uniform(0.0, 2 * math.pi)
        w = geo.rotation_about_axis(axis, angle) @ v
        recovered = geo.align_angle(axis, v, w)
        assert np.max(np.abs(geo.rotation_about_axis(axis, recovered) @ v - w)) <= 1e-7


# ---------------------------------------------------------------------------
# randomized invariants
# ---------------------------------------------------------------------------

def test_segment_rotations_orthonormal_10k():
    rng = np.random.default_rng(2024)
    kinds = rng.integers(0, 3, size=10_000)
    angles = rng.uniform(0.0, 2 * math.pi, size=10_000)
    radii = rng.uniform(0.05, 0.85, size=10_000)
    for kind_idx, angle, r in zip(kinds, angles, radii):
        kind = "LRG"[kind_idx]
        g = geo.TurnGeometry.from_radius(float(r))
        rot = geo.segment_rotation(kind, float(angle), g)
        assert np.max(np.abs(rot.T @ rot - np.eye(3))) <= 1e-12
        assert abs(np.linalg.det(rot) - 1.0) <= 1e-12


def test_subgroup_property_random():
    rng = np.random.default_rng(3)
    for _ in range(500):
        r = float(rng.uniform(0.05, 0.85))
        g = geo.TurnGeometry.from_radius(r)
        kind = "LRG"[int(rng.integers(0, 3))]
        p1, p2 = rng.uniform(0.0, 2 * math.pi, size=2)
        lhs = geo.segment_rotation(kind, p1, g) @ geo.segment_rotation(kind, p2, g)
        rhs = geo.segment_rotation(kind, (p1 + p2) % (2 * math.pi), g)
        assert np.max(np.abs(lhs - rhs)) <= 1e-11


def test_axis_fixed_point_random():
    rng = np.random.default_rng(4)
    for _ in range(500):
        r = float(rng.uniform(0.05, 0.85))
        g = geo.TurnGeometry.from_radius(r)
        kind = "LRG"[int(rng.integers(0, 3))]
        angle = float(rng.uniform(0.0, 2 * math.pi))
        axis = geo.turn_axis(kind, g)
        assert np.max(np.abs(geo.segment_rotation(kind, angle, g) @ axis - axis)) <= 1e-12


def test_forward_sampling_consistency_random():
    rng = np.random.default_rng(5)
    kinds_pool = ["L", "R", "G"]
    for _ in range(50):
        r = float(rng.uniform(0.2, 0.85))
        g = geo.TurnGeometry.from_radius(r)
        n = int(rng.integers(1, 6))
        segs = []
        prev = None
        for _ in range(n):
            choices = [k for k in kinds_pool if k != prev]
            kind = choices[int(rng.integers(0, len(choices)))]
            segs.append(geo.Segment(kind, float(rng.uniform(0.1, 2 * math.pi - 0.1))))
            prev = kind
        start = random_configuration(rng)
        samples = geo.sample_path(start, segs, g, 0.3)
        end = samples[-1].configuration.frame()
        expected = start.frame() @ geo.compose_path(segs, g)
        assert np.max(np.abs(end - expected)) <= 1e-9


@pytest.mark.parametrize(
    "kind,r,angle",
    [("G", 0.5, 2.0), ("L", 0.5, 2.4), ("R", 0.71, 1.3), ("L", 0.3, 5.9)],
)
def test_rk4_frame_integration_matches_rodrigues(kind, r, angle):
    # independent oracle: integrate R' = R Omega(u) with classical RK4
    g = geo.TurnGeometry.from_radius(r)
    u = {"G": 0.0, "L": g.u_max, "R": -g.u_max}[kind]
    omega = geo.frame_generator(u)
    arc = angle if kind == "G" else r * angle
    h = 1e-4
    n = int(round(arc / h))
    h = arc / n
    k = h * omega
    one_step = (
        np.eye(3) + k + (k @ k) / 2.0 + (k @ k @ k) / 6.0 + (k @ k @ k @ k) / 24.0
    )
    integrated = np.linalg.matrix_power(one_step, n)
    assert np.max(np.abs(integrated - geo.segment_rotation(kind, angle, g))) <= 1e-6

"""Constructive non-optimality checks and closed-form product oracles.

Four families of turn chains admit strictly shorter replacements inside known
turning-radius regimes:

* ``grg``  -- L_d R_pi L_d          ->  G_p1 R_(pi+p2) G_p1        (r <= 1/sqrt(2))
* ``rgl``  -- L_d R_pi L_pi R_d     ->  R_(pi+p1) G_p2 L_(pi+p1)   (r in (1/sqrt(2), sqrt(3)/2])
* ``lrl5`` -- L_pi R_(pi+b) L_pi    ->  L_p R_(pi-b) L_p           (r <= 1/sqrt(2))
* ``lrlr6``-- L_pi R_(pi+b) L_(pi+b) R_pi -> L_p R_(pi-b) L_(pi-b) R_p
                                                         (r in (1/sqrt(2), sqrt(3)/2])

The first two are solved through the linkage solver and carry first-order
Taylor coefficients of the replacement angles in the perturbation; the last
two use closed-form replacement angles.  This module also evaluates the
entrywise closed forms of the triple and quadruple turn products so they can
be compared against direct rotation products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfRegime
from .geometry import L, R, Segment, TurnGeometry, compose_path, path_length
from .linkage import solve_three

HALF_SQRT2 = 1.0 / math.sqrt(2.0)
SQRT3_OVER_2 = math.sqrt(3.0) / 2.0
MAX_SHORTCUT_DELTA = 0.6    # perturbation range over which the constructions are exercised
TAYLOR_DELTA = 1e-4         # probe size for finite-difference slope checks

RESIDUAL_PASS = 1e-8        # endpoint agreement required for a passing report


@dataclass(frozen=True)
class CoefficientCheck:
    name: str
    closed_form: float
    numeric: float

    @property
    def abs_error(self) -> float:
        return abs(self.closed_form - self.numeric)

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.closed_form), 1e-12)
        return self.abs_error / scale


@dataclass(frozen=True)
class LemmaReport:
    """Outcome of one replacement construction."""

    kind: str
    r: float
    param: float
    original: tuple[Segment, ...]
    replacement: tuple[Segment, ...]
    endpoint_residual: float
    length_delta: float
    coefficient_checks: tuple[CoefficientCheck, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return self.endpoint_residual <= RESIDUAL_PASS and self.length_delta > 0.0

    def format(self) -> str:
        lines = [
            f"lemma {self.kind}: r={self.r:.6g} param={self.param:.6g}",
            "  original:    " + " ".join(f"{s.kind.value}({s.angle:.9g})" for s in self.original),
            "  replacement: "
            + (" ".join(f"{s.kind.value}({s.angle:.9g})" for s in self.replacement) or "(none)"),
            f"  endpoint residual: {self.endpoint_residual:.3e}",
            f"  length delta:      {self.length_delta:.9g}",
        ]
        if self.coefficient_checks:
            lines.append("  coefficients:")
            for c in self.coefficient_checks:
                lines.append(
                    f"    {c.name:<12} closed={c.closed_form:+.9e} "
                    f"numeric={c.numeric:+.9e} abs_err={c.abs_error:.3e}"
                )
        lines.append(f"  verdict: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _in_low_regime(r: float) -> bool:
    return 0.0 < r <= HALF_SQRT2


def _in_high_regime(r: float) -> bool:
    return HALF_SQRT2 < r <= SQRT3_OVER_2


BOUNDARY_BAND = 1e-3  # sweep grids stay this far from regime endpoints


def sweep_grid(kind: str, n_r: int = 20, n_param: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Radius and parameter grids for lemma sweeps, avoiding the 1e-3
    neighborhoods of the regime endpoints where replacements degenerate."""
    kind = kind.lower()
    if kind in ("grg", "lrl5"):
        r_values = np.linspace(0.02, HALF_SQRT2 - BOUNDARY_BAND, n_r)
    elif kind in ("rgl", "lrlr6"):
        r_values = np.linspace(HALF_SQRT2 + BOUNDARY_BAND, SQRT3_OVER_2 - BOUNDARY_BAND, n_r)
    else:
        raise OutOfRegime(f"unknown lemma kind {kind!r}")
    if kind in ("grg", "rgl"):
        params = np.linspace(0.03, MAX_SHORTCUT_DELTA, n_param)
    else:
        params = np.linspace(0.05, math.pi - 0.05, n_param)
    return r_values, params


# ---------------------------------------------------------------------------
# shortcut constructions solved through the linkage solver
# ---------------------------------------------------------------------------

def _grg_offsets(geom: TurnGeometry, delta: float) -> tuple[float, float, tuple[Segment, ...]]:
    """Replacement offsets (p1, p2) and segments for the L_d R_pi L_d shortcut."""
    original = (L(delta), R(math.pi), L(delta))
    m = compose_path(original, geom)
    best = None
    for sol in solve_three(m, ("G", "R", "G"), geom, equal_outer=True):
        t1, t2, _ = sol.angles
        if t2 > math.pi + 1e-9:
            continue
        length = path_length(sol.segments(("G", "R", "G")), geom)
        if best is None or length < best[0]:
            best = (length, t1, t2, sol)
    if best is None:
        return math.nan, math.nan, ()
    _, t1, t2, sol = best
    return t1, t2 - math.pi, sol.segments(("G", "R", "G"))


def _rgl_offsets(geom: TurnGeometry, delta: float) -> tuple[float, float, tuple[Segment, ...]]:
    """Replacement offsets (p1, p2) and segments for the L_d R_pi L_pi R_d shortcut."""
    original = (L(delta), R(math.pi), L(math.pi), R(delta))
    m = compose_path(original, geom)
    best = None
    for sol in solve_three(m, ("R", "G", "L"), geom, equal_outer=True):
        t1, t2, _ = sol.angles
        if t1 > math.pi + 1e-9:
            continue
        length = path_length(sol.segments(("R", "G", "L")), geom)
        if best is None or length < best[0]:
            best = (length, t1, t2, sol)
    if best is None:
        return math.nan, math.nan, ()
    _, t1, t2, sol = best
    return t1 - math.pi, t2, sol.segments(("R", "G", "L"))


def _taylor_slopes(kind: str, geom: TurnGeometry) -> tuple[float, float, float, float]:
    """First and second derivatives of the replacement offsets at zero perturbation.

    Two-point Richardson extrapolation at TAYLOR_DELTA removes the O(delta)
    bias of the one-sided slope, so the estimate carries only O(delta^2) error.
    """
    solver = _grg_offsets if kind == "grg" else _rgl_offsets
    d = TAYLOR_DELTA
    p1_d, p2_d, _ = solver(geom, d)
    p1_h, p2_h, _ = solver(geom, d / 2.0)
    a1 = (4.0 * p1_h - p1_d) / d
    a2 = (4.0 * p2_h - p2_d) / d

    def second(p_d: float, p_h: float, a: float) -> float:
        b_d = 2.0 * (p_d - a * d) / d**2
        b_h = 2.0 * (p_h - a * d / 2.0) / (d / 2.0) ** 2
        return 2.0 * b_h - b_d

    return a1, a2, second(p1_d, p1_h, a1), second(p2_d, p2_h, a2)


def shortcut_construction(kind: str, r: float, delta: float) -> LemmaReport:
    """Build a turn chain and its strictly shorter replacement.

    ``grg`` replaces L_delta R_pi L_delta with a great-circle sandwich for
    r <= 1/sqrt(2); ``rgl`` replaces L_delta R_pi L_pi R_delta with a
    turn/great-circle/turn path for r in (1/sqrt(2), sqrt(3)/2].  The report
    carries the finite-difference Taylor slopes of the replacement offsets
    against their closed forms.
    """
    kind = kind.lower()
    if kind not in ("grg", "rgl"):
        raise OutOfRegime(f"unknown shortcut kind {kind!r}")
    if not (0.0 < delta <= MAX_SHORTCUT_DELTA):
        raise OutOfRegime(f"delta must be in (0, {MAX_SHORTCUT_DELTA}], got {delta}")
    if kind == "grg" and not _in_low_regime(r):
        raise OutOfRegime(f"grg construction needs r in (0, 1/sqrt(2)], got {r}")
    if kind == "rgl" and not _in_high_regime(r):
        raise OutOfRegime(f"rgl construction needs r in (1/sqrt(2), sqrt(3)/2], got {r}")

    geom = TurnGeometry.from_radius(r)
    if kind == "grg":
        original = (L(delta), R(math.pi), L(delta))
        _, _, replacement = _grg_offsets(geom, delta)
        s = math.sqrt(max(0.0, 1.0 - 2.0 * r * r))
        a1_closed = s * (1.0 - s) / r
        a2_closed = -2.0 * s
        identity_closed = 2.0 * (2.0 * r * r - 1.0)
    else:
        original = (L(delta), R(math.pi), L(math.pi), R(delta))
        _, _, replacement = _rgl_offsets(geom, delta)
        s = math.sqrt(max(0.0, 3.0 - 4.0 * r * r))
        a1_closed = 4.0 * r * r - 3.0 - math.sqrt(2.0) * s
        a2_closed = 2.0 * math.sqrt(2.0) * r * s
        identity_closed = 2.0 * r * (4.0 * r * r - 3.0)

    if replacement:
        residual = float(
            np.linalg.norm(compose_path(original, geom) - compose_path(replacement, geom))
        )
        delta_len = path_length(original, geom) - path_length(replacement, geom)
    else:
        residual = math.inf
        delta_len = -math.inf

    a1_num, a2_num, b1_num, b2_num = _taylor_slopes(kind, geom)
    checks = [
        CoefficientCheck("a1", a1_closed, a1_num),
        CoefficientCheck("a2", a2_closed, a2_num),
        CoefficientCheck("2r*a1+a2", identity_closed, 2.0 * r * a1_closed + a2_closed),
    ]
    first_order_ok = all(c.rel_error <= 1e-3 for c in checks[:2])
    if first_order_ok:
        checks.append(CoefficientCheck("2r*b1+b2", 0.0, 2.0 * r * b1_num + b2_num))

    return LemmaReport(
        kind=kind,
        r=r,
        param=delta,
        original=original,
        replacement=replacement,
        endpoint_residual=residual,
        length_delta=delta_len,
        coefficient_checks=tuple(checks),
    )


# ---------------------------------------------------------------------------
# closed-form replacements for the 5- and 6-chain reductions
# ---------------------------------------------------------------------------

def closed_form_phi(variant: str, r: float, beta: float) -> float:
    """Replacement outer angle for the triple/quad reductions, in (0, pi]."""
    cb, sb = math.cos(beta), math.sin(beta)
    if variant == "triple":
        a = 4.0 * r * r * (r * r - 1.0) + cb * (1.0 + (1.0 - 2.0 * r * r) ** 2)
        b = 2.0 * sb * (1.0 - 2.0 * r * r)
        theta = math.atan2(b, a)
        return math.pi - theta
    if variant == "quad":
        c = (
            2.0 * (3.0 * r * r - 2.0) * (r * r - 1.0)
            + 4.0 * (2.0 * r * r - 1.0) * (r * r - 1.0) * cb
            + (2.0 * r**4 - 2.0 * r * r + 1.0) * math.cos(2.0 * beta)
        )
        d = 2.0 * sb * (2.0 * (r * r - 1.0) + (2.0 * r * r - 1.0) * cb)
        angle = math.atan2(d, c)
        if angle < 0.0:
            angle += 2.0 * math.pi
        return angle - math.pi
    raise OutOfRegime(f"unknown variant {variant!r}")


def closed_replacement(kind: str, r: float, beta: float) -> LemmaReport:
    """Replace a chain of half-turn-plus arcs with the closed-form shorter chain.

    ``lrl5`` handles L_pi R_(pi+beta) L_pi for r <= 1/sqrt(2); ``lrlr6``
    handles L_pi R_(pi+beta) L_(pi+beta) R_pi for r in (1/sqrt(2), sqrt(3)/2].
    """
    kind = kind.lower()
    if kind not in ("lrl5", "lrlr6"):
        raise OutOfRegime(f"unknown replacement kind {kind!r}")
    if not (0.0 < beta < math.pi):
        raise OutOfRegime(f"beta must be in (0, pi), got {beta}")
    if kind == "lrl5" and not _in_low_regime(r):
        raise OutOfRegime(f"lrl5 construction needs r in (0, 1/sqrt(2)], got {r}")
    if kind == "lrlr6" and not _in_high_regime(r):
        raise OutOfRegime(f"lrlr6 construction needs r in (1/sqrt(2), sqrt(3)/2], got {r}")

    geom = TurnGeometry.from_radius(r)
    if kind == "lrl5":
        phi = closed_form_phi("triple", r, beta)
        original = (L(math.pi), R(math.pi + beta), L(math.pi))
        replacement = (L(phi), R(math.pi - beta), L(phi))
        sp_closed, cp_closed = _triple_phi_sincos(r, beta)
    else:
        phi = closed_form_phi("quad", r, beta)
        original = (L(math.pi), R(math.pi + beta), L(math.pi + beta), R(math.pi))
        replacement = (L(phi), R(math.pi - beta), L(math.pi - beta), R(phi))
        sp_closed, cp_closed = _quad_phi_sincos(r, beta)

    residual = float(
        np.linalg.norm(compose_path(original, geom) - compose_path(replacement, geom))
    )
    delta_len = path_length(original, geom) - path_length(replacement, geom)
    checks = (
        CoefficientCheck("phi", phi, phi),
        CoefficientCheck("sin(phi)", sp_closed, math.sin(phi)),
        CoefficientCheck("cos(phi)", cp_closed, math.cos(phi)),
    )
    return LemmaReport(
        kind=kind,
        r=r,
        param=beta,
        original=original,
        replacement=replacement,
        endpoint_residual=residual,
        length_delta=delta_len,
        coefficient_checks=checks,
    )


def _triple_phi_sincos(r: float, beta: float) -> tuple[float, float]:
    """Sine/cosine of the triple replacement angle in rationalized form."""
    cb, sb = math.cos(beta), math.sin(beta)
    d = 1.0 - 2.0 * r * r * (1.0 - r * r) * (1.0 + cb)
    sp = sb * (1.0 - 2.0 * r * r) / d
    cp = -(4.0 * r * r * (r * r - 1.0) + cb * (1.0 + (1.0 - 2.0 * r * r) ** 2)) / (2.0 * d)
    return sp, cp


def _quad_phi_sincos(r: float, beta: float) -> tuple[float, float]:
    """Sine/cosine of the quad replacement angle in rationalized form."""
    cb = math.cos(beta)
    c2b = math.cos(2.0 * beta)
    sb = math.sin(beta)
    g = (
        5.0 - 10.0 * r * r + 6.0 * r**4
        + 4.0 * (2.0 * r * r - 1.0) * (r * r - 1.0) * cb
        - 2.0 * r * r * (1.0 - r * r) * c2b
    )
    c = (
        2.0 * (3.0 * r * r - 2.0) * (r * r - 1.0)
        + 4.0 * (2.0 * r * r - 1.0) * (r * r - 1.0) * cb
        + (2.0 * r**4 - 2.0 * r * r + 1.0) * c2b
    )
    d = 2.0 * sb * (2.0 * (r * r - 1.0) + (2.0 * r * r - 1.0) * cb)
    return -d / g, -c / g


# ---------------------------------------------------------------------------
# entrywise closed forms of the turn-chain products
# ---------------------------------------------------------------------------

def triple_turn_pi_entries(r: float, beta: float) -> np.ndarray:
    """Closed form of the product L_pi R_(pi+beta) L_pi."""
    cb, sb = math.cos(beta), math.sin(beta)
    r2 = r * r
    sq = math.sqrt(1.0 - r2)
    b11 = (1.0 - 4.0 * r2) ** 2 * (1.0 - r2) - r2 * (3.0 - 4.0 * r2) ** 2 * cb
    b12 = r * (4.0 * r2 - 3.0) * sb
    b13 = r * sq * (4.0 * r2 - 1.0) * (4.0 * r2 - 3.0) * (1.0 + cb)
    b22 = -cb
    b23 = sq * (4.0 * r2 - 1.0) * sb
    b33 = r2 * (3.0 - 4.0 * r2) ** 2 - (4.0 * r2 - 1.0) ** 2 * (1.0 - r2) * cb
    return np.array([[b11, b12, b13], [-b12, b22, b23], [b13, -b23, b33]])


def triple_turn_entries(r: float, beta: float, phi: float) -> np.ndarray:
    """Closed form of the product L_phi R_(pi-beta) L_phi."""
    cb, sb = math.cos(beta), math.sin(beta)
    cp, sp = math.cos(phi), math.sin(phi)
    r2 = r * r
    sq = math.sqrt(1.0 - r2)
    one_m2 = 1.0 - 2.0 * r2
    a11 = (
        (2.0 * r2 - 1.0) ** 2 * (1.0 - r2)
        - 4.0 * r2 * (1.0 - r2) ** 2 * cb
        + 4.0 * r2 * (1.0 - r2) * one_m2 * (1.0 + cb) * cp
        + 4.0 * r2 * (r2 - 1.0) * sb * sp
        + r2 * cb * sp * sp
        + (4.0 * r2 * r2 * (1.0 - r2) - r2 * (2.0 * r2 - 1.0) ** 2 * cb) * cp * cp
        + 2.0 * r2 * one_m2 * sb * sp * cp
    )
    a12 = (
        2.0 * r * (1.0 - r2) * (2.0 * r2 - 1.0) * (1.0 + cb) * sp
        + 2.0 * r * (r2 - 1.0) * sb * cp
        + r * (2.0 * r2 - 1.0) * sb * sp * sp
        - r * sb * (2.0 * r2 - 1.0) * cp * cp
        + 2.0 * (-2.0 * r2 * r * (1.0 - r2) + r * cb * (2.0 * r2 * r2 - 2.0 * r2 + 1.0)) * sp * cp
    )
    a13 = (
        (2.0 * r2 - 1.0) ** 2 * r * sq
        - 4.0 * r2 * r * (1.0 - r2) * sq * cb
        - 2.0 * r * sq * (2.0 * r2 - 1.0) ** 2 * (1.0 + cb) * cp
        - 2.0 * r * sq * (2.0 * r2 - 1.0) * sb * sp
        + 2.0 * r * sq * (2.0 * r2 - 1.0) * sb * sp * cp
        - r * sq * cb * sp * sp
        + ((2.0 * r2 - 1.0) ** 2 * r * sq * cb - 4.0 * r2 * r * (1.0 - r2) * sq) * cp * cp
    )
    a22 = (
        4.0 * r2 * sp * sp * (r2 - 1.0)
        + cb * (-cp * cp + one_m2 * one_m2 * sp * sp)
        + 2.0 * sb * sp * cp * one_m2
    )
    a23 = (
        2.0 * r2 * sq * (one_m2 * (1.0 + cb) * sp + sb * cp)
        - one_m2 * sq * sb * (sp * sp - cp * cp)
        + sq * (-4.0 * r2 * (1.0 - r2) + (1.0 + one_m2 * one_m2) * cb) * sp * cp
    )
    a33 = (
        r2 * (2.0 * r2 - 1.0) ** 2
        + 4.0 * r2 * r2 * (r2 - 1.0) * cb
        + 4.0 * r2 * (1.0 - r2) * (2.0 * r2 - 1.0) * (1.0 + cb) * cp
        + 4.0 * r2 * (1.0 - r2) * sb * sp
        + (1.0 - r2) * (4.0 * r2 * (1.0 - r2) - (2.0 * r2 - 1.0) ** 2 * cb) * cp * cp
        + (1.0 - r2) * cb * sp * sp
        + 2.0 * sb * (1.0 - r2) * one_m2 * sp * cp
    )
    return np.array([[a11, a12, a13], [-a12, a22, a23], [a13, -a23, a33]])


def quad_turn_pi_entries(r: float, beta: float) -> np.ndarray:
    """Closed form of the product L_pi R_(pi+beta) L_(pi+beta) R_pi."""
    cb, sb = math.cos(beta), math.sin(beta)
    c2b = math.cos(2.0 * beta)
    r2 = r * r
    r4 = r2 * r2
    r6 = r4 * r2
    r8 = r4 * r4
    sq = math.sqrt(1.0 - r2)
    b11 = (
        1.0 - 20.0 * r2 + 75.0 * r4 - 104.0 * r6 + 48.0 * r8
        + 4.0 * r2 * (16.0 * r6 - 32.0 * r4 + 19.0 * r2 - 3.0) * cb
        + r4 * (3.0 - 4.0 * r2) ** 2 * c2b
    )
    b12 = -2.0 * r * (1.0 - 5.0 * r2 + 4.0 * r4 + r2 * (4.0 * r2 - 3.0) * cb) * sb
    b13 = r * sq * (
        -6.0 + 41.0 * r2 - 80.0 * r4 + 48.0 * r6
        + (-2.0 + 36.0 * r2 - 96.0 * r4 + 64.0 * r6) * cb
        + r2 * (3.0 - 16.0 * r2 + 16.0 * r4) * c2b
    )
    b22 = 1.0 - r2 + r2 * c2b
    b23 = 2.0 * r2 * sq * (4.0 * r2 - 3.0 + (4.0 * r2 - 1.0) * cb) * sb
    b33 = (
        1.0 - 19.0 * r2 + 75.0 * r4 - 104.0 * r6 + 48.0 * r8
        + 4.0 * r2 * (-3.0 + 19.0 * r2 - 32.0 * r4 + 16.0 * r6) * cb
        + r2 * (1.0 - 4.0 * r2) ** 2 * (r2 - 1.0) * c2b
    )
    return np.array([[b11, b12, b13], [-b12, b22, b23], [-b13, b23, b33]])


def quad_turn_entries(r: float, beta: float, phi: float) -> np.ndarray:
    """Closed form of the product L_phi R_(pi-beta) L_(pi-beta) R_phi."""
    cb, sb = math.cos(beta), math.sin(beta)
    c2b = math.cos(2.0 * beta)
    cp, sp = math.cos(phi), math.sin(phi)
    c2p = math.cos(2.0 * phi)
    r2 = r * r
    r4 = r2 * r2
    r6 = r4 * r2
    r8 = r4 * r4
    sq = math.sqrt(1.0 - r2)
    e11 = (
        1.0 - 12.0 * r2 + 35.0 * r4 - 42.0 * r6 + 18.0 * r8
        + 4.0 * r2 * (-2.0 + 9.0 * r2 - 13.0 * r4 + 6.0 * r6) * cb
        + 2.0 * r4 * (3.0 * r2 - 2.0) * (r2 - 1.0) * c2b
        - 4.0 * r2 * (r2 - 1.0) * sb * ((2.0 * r2 - 1.0) + 2.0 * r2 * cb) * sp
        - 4.0 * r2 * (r2 - 1.0) * (
            (2.0 * r2 - 1.0) * ((3.0 * r2 - 2.0) + r2 * c2b)
            + (8.0 * r4 - 8.0 * r2 + 1.0) * cb
        ) * cp
        + r4 * (
            2.0 * (3.0 * r2 - 2.0) * (r2 - 1.0)
            + 4.0 * (2.0 * r2 - 1.0) * (r2 - 1.0) * cb
            + (1.0 - 2.0 * r2 + 2.0 * r4) * c2b
        ) * (cp * cp - sp * sp)
        + 4.0 * r4 * sb * (2.0 * (r2 - 1.0) + (2.0 * r2 - 1.0) * cb) * sp * cp
    )
    e12 = (
        2.0 * r * (
            -2.0 + 9.0 * r2 - 13.0 * r4 + 6.0 * r6
            + (-1.0 + 9.0 * r2 - 16.0 * r4 + 8.0 * r6) * cb
            + r2 * (1.0 - 3.0 * r2 + 2.0 * r4) * c2b
        ) * sp
        + 2.0 * r * (-1.0 + 3.0 * r2 - 2.0 * r4 + 2.0 * r2 * (1.0 - r2) * cb) * sb * cp
        + 2.0 * r2 * r * sb * (2.0 * (r2 - 1.0) + (2.0 * r2 - 1.0) * cb) * (cp * cp - sp * sp)
        + 2.0 * r2 * r * (
            -4.0 + 10.0 * r2 - 6.0 * r4
            + (-4.0 + 12.0 * r2 - 8.0 * r4) * cb
            + (-1.0 + 2.0 * r2 - 2.0 * r4) * c2b
        ) * sp * cp
    )
    e13 = (
        r * sq * (
            -2.0 + 15.0 * r2 - 30.0 * r4 + 18.0 * r6
            + 12.0 * r2 * (1.0 - 3.0 * r2 + 2.0 * r4) * cb
            + 6.0 * r4 * (r2 - 1.0) * c2b
        )
        + 2.0 * r * sq * (-1.0 + 4.0 * r2 - 4.0 * r4 + 2.0 * r2 * (1.0 - 2.0 * r2) * cb) * sb * sp
        + 2.0 * r * sq * (
            2.0 - 11.0 * r2 + 20.0 * r4 - 12.0 * r6
            + (1.0 - 10.0 * r2 + 24.0 * r4 - 16.0 * r6) * cb
            + r2 * (-1.0 + 4.0 * r2 - 4.0 * r4) * c2b
        ) * cp
        + r2 * r * sq * c2p * (
            4.0 - 10.0 * r2 + 6.0 * r4
            + 4.0 * (1.0 - 3.0 * r2 + 2.0 * r4) * cb
            + (1.0 - 2.0 * r2 + 2.0 * r4) * c2b
        )
        + 4.0 * r2 * r * sq * (2.0 * (r2 - 1.0) + (2.0 * r2 - 1.0) * cb) * sb * sp * cp
    )
    e22 = (
        1.0 - 5.0 * r2 + 10.0 * r4 - 6.0 * r6
        - 4.0 * r2 * (2.0 * r2 - 1.0) * (r2 - 1.0) * cb
        + 2.0 * r4 * (1.0 - r2) * c2b
        + 4.0 * r4 * (r2 - 1.0) * math.cos(beta - 2.0 * phi)
        + 2.0 * r2 * (3.0 * r2 - 2.0) * (r2 - 1.0) * c2p
        + r6 * math.cos(2.0 * beta - 2.0 * phi)
        + r2 * (r2 - 1.0) ** 2 * math.cos(2.0 * beta + 2.0 * phi)
        + 4.0 * r2 * (r2 - 1.0) ** 2 * math.cos(beta + 2.0 * phi)
    )
    e23 = (
        2.0 * r2 * sq * (2.0 * r2 - 1.0 + 2.0 * r2 * cb) * sb * cp
        + 2.0 * r2 * sq * sp * (
            -2.0 + 7.0 * r2 - 6.0 * r4
            + (-1.0 + 8.0 * r2 - 8.0 * r4) * cb
            + r2 * (1.0 - 2.0 * r2) * c2b
        )
        + 2.0 * r2 * sq * (cp * cp - sp * sp) * sb * (2.0 * (1.0 - r2) + (1.0 - 2.0 * r2) * cb)
        + 2.0 * r2 * sq * sp * cp * (
            4.0 - 10.0 * r2 + 6.0 * r4
            + (4.0 - 12.0 * r2 + 8.0 * r4) * cb
            + (1.0 - 2.0 * r2 + 2.0 * r4) * c2b
        )
    )
    e33 = (
        1.0 - 7.0 * r2 + 25.0 * r4 - 36.0 * r6 + 18.0 * r8
        + 4.0 * r2 * (-1.0 + 6.0 * r2 - 11.0 * r4 + 6.0 * r6) * cb
        + 2.0 * r4 * (1.0 - 4.0 * r2 + 3.0 * r4) * c2b
        + 4.0 * r2 * (-1.0 + 3.0 * r2 - 2.0 * r4 + 2.0 * r2 * (1.0 - r2) * cb) * sb * sp
        + 4.0 * r2 * (
            2.0 - 9.0 * r2 + 13.0 * r4 - 6.0 * r6
            + (1.0 - 9.0 * r2 + 16.0 * r4 - 8.0 * r6) * cb
            + r2 * (-1.0 + 3.0 * r2 - 2.0 * r4) * c2b
        ) * cp
        + r2 * (
            -4.0 + 14.0 * r2 - 16.0 * r4 + 6.0 * r6
            + 4.0 * (-1.0 + 4.0 * r2 - 5.0 * r4 + 2.0 * r6) * cb
            + (-1.0 + 3.0 * r2 - 4.0 * r4 + 2.0 * r6) * c2b
        ) * c2p
        + 4.0 * r2 * (2.0 - 4.0 * r2 + 2.0 * r4 + (1.0 - 3.0 * r2 + 2.0 * r4) * cb) * sb * sp * cp
    )
    return np.array([[e11, e12, e13], [-e12, e22, e23], [-e13, e23, e33]])


@dataclass(frozen=True)
class AppendixTables:
    """Closed-form entry tables next to their direct rotation products."""

    variant: str
    r: float
    beta: float
    phi: float
    original_formula: np.ndarray
    original_product: np.ndarray
    replacement_formula: np.ndarray
    replacement_product: np.ndarray

    @property
    def formula_vs_product(self) -> float:
        return max(
            float(np.max(np.abs(self.original_formula - self.original_product))),
            float(np.max(np.abs(self.replacement_formula - self.replacement_product))),
        )

    @property
    def replacement_vs_original(self) -> float:
        return float(np.max(np.abs(self.replacement_product - self.original_product)))


def appendix_products(
    variant: str, r: float, beta: float, phi: float | None = None
) -> AppendixTables:
    """Evaluate the published entry formulas and the direct rotation products.

    With `phi` omitted, the closed-form replacement angle is used, in which
    case the replacement product reproduces the original product entrywise.
    """
    if variant == "triple":
        if not _in_low_regime(r):
            raise OutOfRegime(f"triple tables need r in (0, 1/sqrt(2)], got {r}")
    elif variant == "quad":
        if not _in_high_regime(r):
            raise OutOfRegime(f"quad tables need r in (1/sqrt(2), sqrt(3)/2], got {r}")
    else:
        raise OutOfRegime(f"unknown variant {variant!r}")
    if not (0.0 < beta < math.pi):
        raise OutOfRegime(f"beta must be in (0, pi), got {beta}")

    if phi is None:
        phi = closed_form_phi(variant, r, beta)
    geom = TurnGeometry.from_radius(r)
    if variant == "triple":
        original = (L(math.pi), R(math.pi + beta), L(math.pi))
        replacement = (L(phi), R(math.pi - beta), L(phi))
        original_formula = triple_turn_pi_entries(r, beta)
        replacement_formula = triple_turn_entries(r, beta, phi)
    else:
        original = (L(math.pi), R(math.pi + beta), L(math.pi + beta), R(math.pi))
        replacement = (L(phi), R(math.pi - beta), L(math.pi - beta), R(phi))
        original_formula = quad_turn_pi_entries(r, beta)
        replacement_formula = quad_turn_entries(r, beta, phi)
    return AppendixTables(
        variant=variant,
        r=r,
        beta=beta,
        phi=phi,
        original_formula=original_formula,
        original_product=compose_path(original, geom),
        replacement_formula=replacement_formula,
        replacement_product=compose_path(replacement, geom),
    )

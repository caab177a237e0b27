"""Exact ground-state energies of model cones at unit coupling.

Every boundary point of a corner domain sees, infinitesimally, a model cone:
a full plane at interior points, a half-plane at regular boundary points, and
an infinite sector at corners.  The attractive Robin problem on each model
cone at coupling one has an explicit ground-state energy, and the strong
coupling limit of the domain eigenvalue is governed by the worst (most
negative) of these local energies.  This module provides that calculus in
closed form: no meshes, no linear algebra.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .errors import ValidationError
from .geometry import ANGLE_TOL, Corner, DomainSpec, corner_openings

# Ground-state energy of the half-plane model problem at unit coupling, and
# of the line delta interaction; both enter as regular-boundary thresholds.
HALF_PLANE_ENERGY = -1.0
LINE_DELTA_ENERGY = -0.25


@dataclass(frozen=True)
class ConeDescriptor2D:
    """A planar model cone: full plane, half-plane, or sector of given opening."""

    kind: str
    theta: float | None = None

    def __post_init__(self):
        if self.kind in ("full_plane", "half_plane"):
            if self.theta is not None:
                raise ValidationError(f"{self.kind} carries no opening angle")
        elif self.kind == "sector":
            t = self.theta
            if t is None or not (0.0 < t < 2.0 * math.pi) or abs(t - math.pi) <= ANGLE_TOL:
                raise ValidationError(
                    "sector opening must lie in (0, 2*pi) away from the straight angle"
                )
        else:
            raise ValidationError(f"unknown cone kind {self.kind!r}")

    @classmethod
    def full_plane(cls) -> "ConeDescriptor2D":
        return cls(kind="full_plane")

    @classmethod
    def half_plane(cls) -> "ConeDescriptor2D":
        return cls(kind="half_plane")

    @classmethod
    def sector(cls, theta: float) -> "ConeDescriptor2D":
        return cls(kind="sector", theta=float(theta))


def sector_energy(theta: float) -> float:
    """Ground-state energy of the infinite sector of opening ``theta``.

    Convex sectors bind at the tip: the energy is -1/sin^2(theta/2), strictly
    below the half-plane value.  Reflex sectors do not bind and stay at the
    half-plane value -1.  The straight angle is excluded; both one-sided
    limits equal -1, so callers should treat near-straight openings as
    regular boundary (see :data:`robincorner.geometry.ANGLE_TOL`).
    """
    t = float(theta)
    if not (0.0 < t < 2.0 * math.pi):
        raise ValidationError(f"sector opening {t!r} outside (0, 2*pi)")
    if abs(t - math.pi) <= ANGLE_TOL:
        raise ValidationError("sector opening indistinguishable from the straight angle")
    if t < math.pi:
        s2 = _half_angle_sin_sq(t)
        return -1.0 / s2
    return HALF_PLANE_ENERGY


# sin^2(theta/2) is a dyadic-friendly rational at these openings; evaluating
# the closed form through it keeps right-angle energies exact in doubles
# (sin(pi/4) alone is off by one ulp, which would turn -2 into
# -2.0000000000000004).  The snap window is a few ulps wide, far below any
# geometric tolerance.
_EXACT_HALF_ANGLE_SIN_SQ = ((1.0 / 3.0, 0.25), (0.5, 0.5), (2.0 / 3.0, 0.75))


def _half_angle_sin_sq(t: float) -> float:
    r = t / math.pi
    for r0, s2 in _EXACT_HALF_ANGLE_SIN_SQ:
        if abs(r - r0) <= 4.0 * sys.float_info.epsilon:
            return s2
    s = math.sin(0.5 * t)
    return s * s


def local_energy(cone: ConeDescriptor2D) -> float:
    """Ground-state energy of a model cone at unit coupling."""
    if cone.kind == "full_plane":
        return 0.0
    if cone.kind == "half_plane":
        return HALF_PLANE_ENERGY
    return sector_energy(cone.theta)


def second_energy_level(cone: ConeDescriptor2D) -> float:
    """Lowest energy among the strictly coarser model cones.

    Flattening a sector ever so slightly away from its tip produces a
    half-plane, so every sector sees -1 at the next level; half-planes and
    full planes already flatten to the full space, whose energy is zero.
    The ground state of a cone is an isolated eigenvalue exactly when its
    own energy lies strictly below this level.
    """
    if cone.kind == "sector":
        return HALF_PLANE_ENERGY
    return 0.0


def has_discrete_ground_state(cone: ConeDescriptor2D) -> bool:
    """Whether the cone's ground state is a genuine eigenvalue.

    True for convex sectors, whose energy -1/sin^2(theta/2) < -1 drops
    below the half-plane threshold, and for the half-plane itself, whose
    1-D reduction has E = -1 below its second level 0.  Reflex sectors
    and the full plane sit at the bottom of their essential spectrum.
    """
    return local_energy(cone) < second_energy_level(cone)


@dataclass(frozen=True)
class DomainEnergyReport:
    """Where the boundary energy landscape of a domain attains its minimum.

    ``energy`` is the infimum over boundary points of weight^2 times the
    local cone energy; ``minimizer_kind`` is ``"corner"`` when a corner
    attains it (``minimizer_index`` = vertex index) and
    ``"regular_boundary"`` otherwise (``minimizer_index`` = edge index for
    polygons, None for disks).  ``per_corner`` lists every true corner with
    its weighted local energy.
    """

    energy: float
    minimizer_kind: str
    minimizer_index: int | None
    per_corner: tuple[tuple[Corner, float], ...]

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "minimizer_kind": self.minimizer_kind,
            "minimizer_index": self.minimizer_index,
            "per_corner": [
                {
                    "vertex": c.index,
                    "position": [float(t) for t in c.position],
                    "opening": float(c.opening),
                    "weighted_energy": float(e),
                }
                for c, e in self.per_corner
            ],
        }


def domain_energy(spec: DomainSpec) -> DomainEnergyReport:
    """Infimum of weighted local cone energies over the boundary.

    For a polygon the infimum is attained either at a corner, contributing
    min(w, w')^2 * sector_energy(opening) with w, w' the adjacent edge
    weights, or on an edge interior, contributing -w^2.  Disks have no
    corners and sit at the half-plane value everywhere.
    """
    if spec.kind == "disk":
        return DomainEnergyReport(
            energy=HALF_PLANE_ENERGY,
            minimizer_kind="regular_boundary",
            minimizer_index=None,
            per_corner=(),
        )

    p = spec.polygon
    corners = corner_openings(p)
    w = p.weights()
    n = p.n

    best = math.inf
    best_kind = "regular_boundary"
    best_index: int | None = None
    per_corner: list[tuple[Corner, float]] = []
    for c in corners:
        w_in = w[(c.index - 1) % n]
        w_out = w[c.index]
        value = min(w_in, w_out) ** 2 * sector_energy(c.opening)
        per_corner.append((c, value))
        if value < best:
            best = value
            best_kind = "corner"
            best_index = c.index
    for e in range(n):
        value = -(w[e] ** 2)
        if value < best:
            best = value
            best_kind = "regular_boundary"
            best_index = e

    return DomainEnergyReport(
        energy=float(best),
        minimizer_kind=best_kind,
        minimizer_index=best_index,
        per_corner=tuple(per_corner),
    )


@dataclass(frozen=True)
class Cone3DSection:
    """Cross-section of a three-dimensional cone on the unit sphere.

    Either a smooth spherical domain (``kind="smooth"``) or a spherical
    polygon described by the openings of its vertices (``kind="polygon"``).
    """

    kind: str
    openings: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "smooth":
            if self.openings:
                raise ValidationError("smooth section carries no openings")
        elif self.kind == "polygon":
            if not self.openings:
                raise ValidationError("spherical polygon needs at least one opening")
            for t in self.openings:
                if not (0.0 < t < 2.0 * math.pi) or abs(t - math.pi) <= ANGLE_TOL:
                    raise ValidationError(f"invalid spherical polygon opening {t!r}")
        else:
            raise ValidationError(f"unknown section kind {self.kind!r}")

    @classmethod
    def smooth(cls) -> "Cone3DSection":
        return cls(kind="smooth")

    @classmethod
    def spherical_polygon(cls, openings) -> "Cone3DSection":
        return cls(kind="polygon", openings=tuple(float(t) for t in openings))


def essential_spectrum_bottom_3d(section: Cone3DSection) -> float:
    """Bottom of the essential spectrum of a 3-D cone at unit coupling.

    Equals the boundary-energy infimum of the cone's spherical cross-section:
    smooth sections give the half-plane value -1; spherical polygons give the
    minimum of -1 and the planar sector energies of their vertex openings.
    A reflex vertex on the section keeps the bottom at -1 while the convex
    vertices of its complement push it lower, so complementary cones need
    not share the value.
    """
    if section.kind == "smooth":
        return HALF_PLANE_ENERGY
    values = [HALF_PLANE_ENERGY]
    values.extend(sector_energy(t) for t in section.openings)
    return min(values)

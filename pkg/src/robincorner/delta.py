"""Delta-interaction eigenproblem: an attractive term on a closed polygon.

The quadratic form is ||grad u||^2 on a bounding box minus alpha times the
L^2 norm of the trace on the interface polygon S.  The continuous P1 space
across the conforming interface realizes the derivative-jump condition
weakly, so the solve reuses the standard assembly with the interface mass
matrix in place of the boundary one.  The box is artificial: its size is
tied to the e^{-alpha d / 2} decay of the ground state away from S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, MeshError
from .geometry import Polygon, DomainSpec, corner_openings, diameter, require_valid
from . import mesher
from . import fem
from . import cone_oracle

REGULAR_DELTA_ENERGY = -0.25


def required_margin(interface: Polygon, alpha: float) -> float:
    """Smallest admissible box margin for the given interface strength."""
    d = 0.25 * diameter(interface)
    if alpha > 0:
        return max(4.0 / alpha, d)
    return d


@dataclass(frozen=True)
class DeltaProblem:
    """Interface polygon, interaction strength, and the bounding box.

    The box defaults to the interface bounding box grown by ``margin`` on
    every side; an explicit box must contain the polygon strictly.  The
    margin adequacy check (at least max(4/alpha, diameter/4)) happens at
    solve time, so undersized experimental meshes can still be built.
    """

    interface: Polygon
    alpha: float
    margin: float | None = None
    box: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        require_valid(self.interface)
        if self.alpha < 0:
            raise ValidationError("interface strength alpha must be nonnegative")
        lo = self.interface.vertices.min(axis=0)
        hi = self.interface.vertices.max(axis=0)
        if self.box is None:
            m = self.margin
            if m is None:
                m = required_margin(self.interface, self.alpha)
            if not m > 0:
                raise ValidationError("box margin must be positive")
            object.__setattr__(self, "margin", float(m))
            object.__setattr__(
                self,
                "box",
                (float(lo[0] - m), float(lo[1] - m), float(hi[0] + m), float(hi[1] + m)),
            )
        else:
            try:
                xmin, ymin, xmax, ymax = (float(v) for v in self.box)
            except (TypeError, ValueError):
                raise ValidationError(
                    "box must be a flat (xmin, ymin, xmax, ymax) tuple"
                ) from None
            gap = min(lo[0] - xmin, lo[1] - ymin, xmax - hi[0], ymax - hi[1])
            if not gap > 0:
                raise ValidationError("interface polygon touches or leaves the box")
            object.__setattr__(self, "box", (xmin, ymin, xmax, ymax))
            object.__setattr__(self, "margin", float(gap))

    def check_margin(self) -> None:
        need = required_margin(self.interface, self.alpha)
        if self.margin < need * (1.0 - 1e-12):
            raise ValidationError(
                f"box margin {self.margin:g} below the decay requirement {need:g}"
            )


def _area_centroid(p: Polygon) -> np.ndarray:
    v = p.vertices
    w = np.roll(v, -1, axis=0)
    cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
    a = cross.sum() / 2.0
    return ((v + w) * cross[:, None]).sum(axis=0) / (6.0 * a)


def _check_star_shaped(p: Polygon, center: np.ndarray) -> None:
    ang = np.arctan2(p.vertices[:, 1] - center[1], p.vertices[:, 0] - center[0])
    ang = np.unwrap(ang - ang[0])
    if np.any(np.diff(ang) <= 0):
        raise MeshError(
            "interface must be star-shaped around its centroid for the radial decomposition"
        )


def _box_exit(v: np.ndarray, c: np.ndarray, box) -> np.ndarray:
    """Exit point of the ray from the centroid through a vertex, snapped
    onto the box wall it crosses."""
    xmin, ymin, xmax, ymax = box
    d = v - c
    t_best = math.inf
    for axis, (wlo, whi) in enumerate(((xmin, xmax), (ymin, ymax))):
        if d[axis] > 0:
            t = (whi - v[axis]) / d[axis]
        elif d[axis] < 0:
            t = (wlo - v[axis]) / d[axis]
        else:
            continue
        t_best = min(t_best, t)
    p = v + t_best * d
    tol = 1e-9 * max(xmax - xmin, ymax - ymin)
    for val, wall in ((0, xmin), (0, xmax), (1, ymin), (1, ymax)):
        if abs(p[val] - wall) <= tol:
            p[val] = wall
    return p


def _perimeter_coord(p: np.ndarray, box) -> float:
    """Arc-length position of a box-wall point along the CCW box loop."""
    xmin, ymin, xmax, ymax = box
    w, h = xmax - xmin, ymax - ymin
    tol = 1e-9 * max(w, h)
    if abs(p[1] - ymin) <= tol:
        return p[0] - xmin
    if abs(p[0] - xmax) <= tol:
        return w + (p[1] - ymin)
    if abs(p[1] - ymax) <= tol:
        return w + h + (xmax - p[0])
    if abs(p[0] - xmin) <= tol:
        return 2 * w + h + (ymax - p[1])
    raise MeshError("spoke exit point missed the box wall")


def _delta_box_loops(p: DeltaProblem):
    """Radial decomposition: the interface interior plus one quad per edge.

    Each interface vertex is joined to the box along the ray from the
    interface centroid, cutting the region between polygon and box into
    simple loops; box corners are threaded into the outer chains.
    """
    poly = p.interface
    box = p.box
    c = _area_centroid(poly)
    _check_star_shaped(poly, c)
    v = poly.vertices
    n = poly.n
    exits = [_box_exit(v[k], c, box) for k in range(n)]
    s_exit = [_perimeter_coord(e, box) for e in exits]

    xmin, ymin, xmax, ymax = box
    w, h = xmax - xmin, ymax - ymin
    total = 2.0 * (w + h)
    corners = [
        (np.array([xmax, ymin]), w),
        (np.array([xmax, ymax]), w + h),
        (np.array([xmin, ymax]), w + h + w),
        (np.array([xmin, ymin]), 0.0),
    ]
    tol = 1e-9 * max(w, h)

    loops = [v.copy()]
    for k in range(n):
        k2 = (k + 1) % n
        s0, s1 = s_exit[k], s_exit[k2]
        span = (s1 - s0) % total
        chain = [exits[k]]
        between = []
        for pt, s in corners:
            ds = (s - s0) % total
            if tol < ds < span - tol:
                between.append((ds, pt))
        chain.extend(pt for _, pt in sorted(between, key=lambda t: t[0]))
        chain.append(exits[k2])
        # Quad loop runs CCW: inner edge backwards, outer chain forwards.
        loops.append(np.vstack([v[k2], v[k]] + chain))
    return loops


def default_delta_policy(alpha: float) -> mesher.GradingPolicy:
    """Band sized for the e^{-alpha d / 2} interface layer.

    The shallow growth ratio keeps the mid-field resolved: the delta
    ground state decays at half the Robin rate, so triangles a few layer
    widths out still carry visible mass.
    """
    return mesher.GradingPolicy(alpha=alpha, layers=3, ratio=0.8, c_bl=0.4)


def _sharp_corners(interface: Polygon, tol: float = 0.2) -> np.ndarray:
    """Vertices whose opening differs from pi enough to concentrate mass."""
    keep = [
        c.position
        for c in corner_openings(interface)
        if abs(c.opening - math.pi) > tol
    ]
    return np.asarray(keep, dtype=float).reshape(-1, 2)


def build_delta_mesh(
    p: DeltaProblem,
    policy: mesher.GradingPolicy | None = None,
    node_budget: int = mesher.DEFAULT_NODE_BUDGET,
) -> mesher.Mesh:
    """Conforming box triangulation with the interface tagged and graded.

    The interface polygon edges appear verbatim as tagged interface edge
    chains; grading refines toward the interface with extra levels in
    zones around its sharp corners per the policy (near-straight vertices
    of chord-approximated smooth curves get no zone).
    """
    if policy is None:
        policy = default_delta_policy(p.alpha) if p.alpha > 0 else None
    loops = _delta_box_loops(p)
    xmin, ymin, xmax, ymax = p.box
    sides = np.array(
        [
            [[xmin, ymin], [xmax, ymin]],
            [[xmax, ymin], [xmax, ymax]],
            [[xmax, ymax], [xmin, ymax]],
            [[xmin, ymax], [xmin, ymin]],
        ]
    )
    mesh = mesher.triangulate_regions(
        loops=loops,
        boundary_segments=sides,
        boundary_weights=np.zeros(4),
        interface_segments=p.interface.edges(),
        interface_weights=p.interface.weights(),
    )
    if policy is not None:
        mesh = mesher.refine_graded(
            mesh,
            policy,
            corners=_sharp_corners(p.interface),
            toward="interface",
            node_budget=node_budget,
        )
    return mesh


def solve_delta(
    p: DeltaProblem, mesh: mesher.Mesh, tol: float = 1e-8
) -> fem.SpectralResult:
    """Ground state of (K - alpha B_S) u = lambda M u, Neumann outer box."""
    p.check_margin()
    K = fem.assemble_stiffness(mesh)
    M = fem.assemble_mass(mesh)
    B = fem.assemble_interface_mass(mesh)
    estimate = REGULAR_DELTA_ENERGY * 1.3 if p.alpha > 0 else None
    return fem.smallest_eig(K, B, M, alpha=p.alpha, tol=tol, energy_estimate=estimate)


_CORNER_CACHE: dict[float, tuple[float, str]] = {}


def _corner_key(theta: float) -> float:
    # The interface of opening theta and 2*pi - theta is the same point set.
    return round(min(theta, 2.0 * math.pi - theta), 9)


def seed_corner_cache(values: dict[float, tuple[float, str]]) -> None:
    """Preload broken-line corner energies (e.g. frozen oracle outputs)."""
    for theta, entry in values.items():
        _CORNER_CACHE[_corner_key(theta)] = entry


def clear_corner_cache() -> None:
    """Drop all cached corner energies (seeded and computed alike)."""
    _CORNER_CACHE.clear()


def corner_energy_cached(
    theta: float, spec: cone_oracle.TruncationSpec | None = None
) -> tuple[float, str]:
    key = _corner_key(theta)
    hit = _CORNER_CACHE.get(key)
    if hit is None:
        hit = cone_oracle.delta_corner_energy_numeric(theta, spec)
        _CORNER_CACHE[key] = hit
    return hit


@dataclass(frozen=True)
class DeltaEnergyPrediction:
    """Predicted leading coefficient for lambda(S, alpha) ~ alpha^2 E.

    ``energy`` is min(-1/4, corner energies); corners whose oracle run
    stayed at the essential threshold contribute the regular value and
    widen ``error_bar`` by however far below -1/4 their raw value dipped.
    """

    energy: float
    error_bar: float
    flagged: bool
    per_corner: tuple


def delta_energy_prediction(
    spec_or_interface, oracle_spec: cone_oracle.TruncationSpec | None = None
) -> DeltaEnergyPrediction:
    """Leading-order energy of the delta interaction on a closed curve.

    Smooth interfaces (disk kind) sit at the regular value -1/4; polygon
    corners are scanned with the broken-line oracle and can only lower the
    energy.  Near-straight corners are reclassified as regular.
    """
    if isinstance(spec_or_interface, DomainSpec):
        if spec_or_interface.kind == "disk":
            return DeltaEnergyPrediction(REGULAR_DELTA_ENERGY, 0.0, False, ())
        interface = spec_or_interface.polygon
    else:
        interface = spec_or_interface
    require_valid(interface)

    energy = REGULAR_DELTA_ENERGY
    bar = 0.0
    flagged = False
    rows = []
    for corner in corner_openings(interface):
        theta = corner.opening
        if abs(theta - math.pi) <= 1e-6:
            rows.append((corner.index, theta, REGULAR_DELTA_ENERGY, "regular"))
            continue
        value, status = corner_energy_cached(theta, oracle_spec)
        rows.append((corner.index, theta, value, status))
        if status == "below-threshold":
            energy = min(energy, value)
        elif value < REGULAR_DELTA_ENERGY:
            bar = max(bar, REGULAR_DELTA_ENERGY - value)
            flagged = True
    return DeltaEnergyPrediction(energy, bar, flagged, tuple(rows))

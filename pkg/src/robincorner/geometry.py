"""Planar polygonal domains, corner extraction, and domain descriptions.

A :class:`Polygon` is a simple closed polygon with counterclockwise vertex
order and optional positive per-edge weights.  Corners are classified by
their interior opening angle; openings within ``ANGLE_TOL`` of the straight
angle are treated as regular boundary points so that nearly-flat vertices
(chord approximations of smooth arcs, split edges) do not masquerade as
corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

# Tolerance for classifying an opening as the straight angle pi.  The local
# energy is continuous across the straight angle, so the reclassification is
# harmless for energies while keeping corner lists stable under edge splits.
ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class Corner:
    """A polygon vertex together with its interior opening angle."""

    index: int
    position: tuple[float, float]
    opening: float

    @property
    def is_convex(self) -> bool:
        return self.opening < math.pi


@dataclass(eq=False)
class Polygon:
    """Simple closed polygon, counterclockwise, with optional edge weights.

    Parameters
    ----------
    vertices : array_like, shape (n, 2)
        Vertex coordinates in order.  Edge ``i`` joins vertex ``i`` to
        vertex ``(i + 1) % n``.
    edge_weights : array_like, shape (n,), optional
        Positive weight attached to each edge.  Omitted means weight one
        everywhere.
    """

    vertices: np.ndarray
    edge_weights: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValidationError("polygon needs an (n, 2) vertex array with n >= 3")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if self.edge_weights is not None:
            w = np.asarray(self.edge_weights, dtype=float).copy()
            if w.shape != (v.shape[0],):
                raise ValidationError("edge_weights must have one entry per edge")
            w.setflags(write=False)
            object.__setattr__(self, "edge_weights", w)

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    def weights(self) -> np.ndarray:
        """Per-edge weights, defaulting to ones."""
        if self.edge_weights is None:
            return np.ones(self.n)
        return np.asarray(self.edge_weights)

    def edges(self) -> np.ndarray:
        """Edge segments as an (n, 2, 2) array of endpoint pairs."""
        v = self.vertices
        return np.stack([v, np.roll(v, -1, axis=0)], axis=1)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`; empty ``violations`` means valid."""

    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def signed_area(p: Polygon) -> float:
    """Shoelace signed area; positive for counterclockwise order."""
    v = p.vertices
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def area(p: Polygon) -> float:
    return abs(signed_area(p))


def perimeter(p: Polygon) -> float:
    e = p.edges()
    return float(np.sum(np.linalg.norm(e[:, 1] - e[:, 0], axis=1)))


def diameter(p: Polygon) -> float:
    """Largest pairwise vertex distance (equals the set diameter)."""
    v = p.vertices
    d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=2)
    return float(np.sqrt(d2.max()))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_cross(a, b, c, d, eps: float) -> bool:
    """Whether open segments ab and cd intersect (shared endpoints excluded)."""
    o1 = _orient(a, b, c)
    o2 = _orient(a, b, d)
    o3 = _orient(c, d, a)
    o4 = _orient(c, d, b)
    if ((o1 > eps and o2 < -eps) or (o1 < -eps and o2 > eps)) and (
        (o3 > eps and o4 < -eps) or (o3 < -eps and o4 > eps)
    ):
        return True
    # Collinear overlap: project onto the dominant axis and look for overlap
    # of more than a point.
    if max(abs(o1), abs(o2), abs(o3), abs(o4)) <= eps:
        axis = 0 if abs(b[0] - a[0]) >= abs(b[1] - a[1]) else 1
        lo1, hi1 = sorted((a[axis], b[axis]))
        lo2, hi2 = sorted((c[axis], d[axis]))
        return min(hi1, hi2) - max(lo1, lo2) > eps
    return False


def validate(p: Polygon) -> ValidationReport:
    """Check all polygon invariants and report every violation found."""
    violations: list[str] = []
    v = p.vertices
    n = p.n
    scale = max(1.0, float(np.abs(v).max()))
    eps = 1e-12 * scale * scale

    for i in range(n):
        j = (i + 1) % n
        if np.allclose(v[i], v[j], rtol=0.0, atol=1e-14 * scale):
            violations.append(f"vertices {i} and {j} coincide")

    sa = signed_area(p)
    if sa <= 0:
        violations.append(
            "vertex order is clockwise or degenerate (signed area "
            f"{sa:.3e}); counterclockwise order is required"
        )

    # Self-intersection: any crossing pair of non-adjacent edges, or adjacent
    # edges overlapping beyond their shared vertex.
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                # Adjacent edges: flag only a collinear fold-back.
                c, d = v[j], v[(j + 1) % n]
                if _segments_cross(a, b, c, d, eps):
                    violations.append(f"edges {i} and {j} overlap")
                continue
            c, d = v[j], v[(j + 1) % n]
            if _segments_cross(a, b, c, d, eps):
                violations.append(f"edges {i} and {j} intersect")

    # Degenerate spikes: a zero opening means the boundary doubles back.
    if sa > 0:
        for i in range(n):
            prev_v = v[(i - 1) % n]
            next_v = v[(i + 1) % n]
            d_in = v[i] - prev_v
            d_out = next_v - v[i]
            if np.linalg.norm(d_in) == 0 or np.linalg.norm(d_out) == 0:
                continue
            turn = math.atan2(_orient(prev_v, v[i], next_v), float(np.dot(d_in, d_out)))
            opening = math.pi - turn
            if opening <= ANGLE_TOL or opening >= 2.0 * math.pi - ANGLE_TOL:
                violations.append(f"vertex {i} forms a degenerate spike")

    if p.edge_weights is not None and np.any(p.weights() <= 0):
        bad = int(np.argmin(p.weights()))
        violations.append(f"edge {bad} has non-positive weight")

    return ValidationReport(tuple(violations))


def require_valid(p: Polygon) -> None:
    report = validate(p)
    if not report.ok:
        raise ValidationError("; ".join(report.violations))


def corner_openings(p: Polygon) -> list[Corner]:
    """Interior opening angles at the true corners of a valid polygon.

    Vertices whose opening is within ``ANGLE_TOL`` of pi are regular boundary
    points and are omitted.  Raises :class:`ValidationError` if the polygon
    is invalid, naming the offending vertex where possible.
    """
    require_valid(p)
    v = p.vertices
    n = p.n
    corners: list[Corner] = []
    for i in range(n):
        d_in = v[i] - v[(i - 1) % n]
        d_out = v[(i + 1) % n] - v[i]
        turn = math.atan2(
            _orient(v[(i - 1) % n], v[i], v[(i + 1) % n]), float(np.dot(d_in, d_out))
        )
        opening = math.pi - turn
        if abs(opening - math.pi) <= ANGLE_TOL:
            continue
        if not (ANGLE_TOL < opening < 2.0 * math.pi - ANGLE_TOL):
            raise ValidationError(f"vertex {i} has degenerate opening {opening!r}")
        corners.append(Corner(index=i, position=(float(v[i, 0]), float(v[i, 1])), opening=opening))
    return corners


@dataclass(frozen=True)
class DomainSpec:
    """A planar domain: either a polygon or a round disk.

    Disks carry only a radius; polygon-specific operations reject them.
    """

    kind: str
    polygon: Polygon | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.kind == "polygon":
            if self.polygon is None:
                raise ValidationError("polygon domain needs a Polygon")
        elif self.kind == "disk":
            if self.radius is None or not self.radius > 0:
                raise ValidationError("disk domain needs a positive radius")
        else:
            raise ValidationError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def from_polygon(cls, p: Polygon) -> "DomainSpec":
        return cls(kind="polygon", polygon=p)

    @classmethod
    def disk(cls, radius: float) -> "DomainSpec":
        return cls(kind="disk", radius=radius)

    def diameter(self) -> float:
        if self.kind == "disk":
            return 2.0 * float(self.radius)
        return diameter(self.polygon)


def regular_polygon(radius: float, n: int, equal_area: bool = False) -> Polygon:
    """Regular n-gon around the origin, vertices on the given radius.

    With ``equal_area`` the vertex radius is inflated so the polygon area
    equals the disk area pi*radius^2, cancelling the first-order boundary
    perturbation of inscribed polygons.
    """
    if n < 3:
        raise ValidationError("regular polygon needs n >= 3")
    r = float(radius)
    if equal_area:
        r = r * math.sqrt(2.0 * math.pi / (n * math.sin(2.0 * math.pi / n)))
    phi = 2.0 * math.pi * np.arange(n) / n
    return Polygon(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))


def disk_polygon(radius: float, alpha: float = 1.0, min_sides: int = 96) -> Polygon:
    """Equal-area polygon standing in for a disk at interaction strength alpha.

    The side count grows with alpha so the chord sagitta stays below the
    O(1/alpha) boundary-layer width the eigensolver has to resolve.
    """
    n = max(int(min_sides), int(math.ceil(24.0 * max(alpha, 0.0))))
    return regular_polygon(radius, n, equal_area=True)


def unit_square() -> Polygon:
    return Polygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


def lshape() -> Polygon:
    """L-shaped hexagon with five right corners and one reflex corner."""
    return Polygon(
        np.array(
            [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]
        )
    )


def load_polygon(path) -> Polygon:
    """Read a polygon file.

    Format: a header line ``polygon n`` followed by n lines ``x y`` or
    ``x y weight``; ``#`` starts a comment anywhere.
    """
    rows: list[list[float]] = []
    header_n: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if header_n is None:
                parts = line.split()
                if len(parts) != 2 or parts[0] != "polygon":
                    raise ValidationError(f"expected 'polygon n' header, got {line!r}")
                try:
                    header_n = int(parts[1])
                except ValueError:
                    raise ValidationError(f"bad vertex count in header {line!r}") from None
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValidationError(f"bad vertex line {line!r}")
            try:
                rows.append([float(t) for t in parts])
            except ValueError:
                raise ValidationError(f"non-numeric vertex line {line!r}") from None
    if header_n is None:
        raise ValidationError("empty polygon file")
    if len(rows) != header_n:
        raise ValidationError(f"header announced {header_n} vertices, found {len(rows)}")
    lengths = {len(r) for r in rows}
    if lengths == {2}:
        return Polygon(np.array(rows))
    if lengths == {3}:
        arr = np.array(rows)
        return Polygon(arr[:, :2], edge_weights=arr[:, 2])
    raise ValidationError("mix of weighted and unweighted vertex lines")


def save_polygon(p: Polygon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"polygon {p.n}\n")
        w = p.weights() if p.edge_weights is not None else None
        for i in range(p.n):
            x, y = p.vertices[i]
            if w is None:
                fh.write(f"{x:.17g} {y:.17g}\n")
            else:
                fh.write(f"{x:.17g} {y:.17g} {w[i]:.17g}\n")

"""Conforming triangular meshes of polygonal domains.

Triangulation is ear clipping followed by Delaunay edge flips.  Refinement
comes in two flavours: uniform midpoint subdivision, and graded longest-edge
bisection driven by a boundary-distance size field with extra levels around
selected corners.  Meshes stay conforming at every step, and every boundary
or interface edge carries the tag (and weight) of the originating segment,
so assembly never has to guess where a piece of boundary came from.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import MeshError, ResourceError
from .geometry import Polygon, require_valid

# Refinement stops with ResourceError beyond this many nodes.
DEFAULT_NODE_BUDGET = 2_000_000

_MAX_GRADING_PASSES = 256


@dataclass(eq=False)
class Mesh:
    """Conforming triangle mesh with tagged boundary and interface edges.

    ``triangles`` are positively oriented.  ``boundary_edges[i]`` is oriented
    with the domain on its left and lies on the segment
    ``boundary_segments[boundary_tags[i]]``; interface edges (internal edges
    carrying a measure term) follow the same scheme.  Arrays are frozen;
    refinement returns new meshes.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    boundary_segments: np.ndarray
    boundary_weights: np.ndarray
    interface_edges: np.ndarray
    interface_tags: np.ndarray
    interface_segments: np.ndarray
    interface_weights: np.ndarray

    def __post_init__(self):
        for name in (
            "nodes",
            "triangles",
            "boundary_edges",
            "boundary_tags",
            "boundary_segments",
            "boundary_weights",
            "interface_edges",
            "interface_tags",
            "interface_segments",
            "interface_weights",
        ):
            arr = np.ascontiguousarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]


def _empty_edges():
    return (
        np.zeros((0, 2), dtype=np.int64),
        np.zeros((0,), dtype=np.int64),
        np.zeros((0, 2, 2), dtype=float),
        np.zeros((0,), dtype=float),
    )


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _ear_clip(pts: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW loop by ear clipping; local indices."""
    n = pts.shape[0]
    scale = float(np.ptp(pts, axis=0).max())
    eps = 1e-13 * scale * scale
    active = list(range(n))
    out: list[tuple[int, int, int]] = []
    start = 0
    guard = 0
    while len(active) > 3:
        clipped = False
        m = len(active)
        act = np.array(active)
        P = pts[act]
        for kk in range(m):
            k = (start + kk) % m
            i_prev = active[(k - 1) % m]
            i_cur = active[k]
            i_next = active[(k + 1) % m]
            a, b, c = pts[i_prev], pts[i_cur], pts[i_next]
            if _orient(a, b, c) <= eps:
                continue
            o1 = (b[0] - a[0]) * (P[:, 1] - a[1]) - (b[1] - a[1]) * (P[:, 0] - a[0])
            o2 = (c[0] - b[0]) * (P[:, 1] - b[1]) - (c[1] - b[1]) * (P[:, 0] - b[0])
            o3 = (a[0] - c[0]) * (P[:, 1] - c[1]) - (a[1] - c[1]) * (P[:, 0] - c[0])
            inside = (o1 >= -eps) & (o2 >= -eps) & (o3 >= -eps)
            inside &= (act != i_prev) & (act != i_cur) & (act != i_next)
            if not inside.any():
                out.append((i_prev, i_cur, i_next))
                del active[k]
                start = k % max(1, len(active))
                clipped = True
                break
        if not clipped:
            raise MeshError("ear clipping found no ear; loop may be degenerate")
        guard += 1
        if guard > 4 * n:
            raise MeshError("ear clipping did not terminate")
    a, b, c = (pts[i] for i in active)
    if _orient(a, b, c) <= 0:
        raise MeshError("ear clipping left a degenerate final triangle")
    out.append(tuple(active))
    return out


def _in_circumcircle(a, b, c, d) -> float:
    """Positive when d is strictly inside the circumcircle of CCW (a, b, c)."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    ad2 = adx * adx + ady * ady
    bd2 = bdx * bdx + bdy * bdy
    cd2 = cdx * cdx + cdy * cdy
    return (
        adx * (bdy * cd2 - cdy * bd2)
        - ady * (bdx * cd2 - cdx * bd2)
        + ad2 * (bdx * cdy - cdx * bdy)
    )


def _edge_key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def _delaunay_flips(nodes: np.ndarray, tris: list[list[int]], protected: set) -> None:
    """Legalize internal edges in place by Lawson flips, skipping protected ones."""
    edge_map: dict[tuple[int, int], list[int]] = {}
    for t_idx, t in enumerate(tris):
        for k in range(3):
            edge_map.setdefault(_edge_key(t[k], t[(k + 1) % 3]), []).append(t_idx)

    queue = [e for e, ts in edge_map.items() if len(ts) == 2 and e not in protected]
    max_flips = 40 * len(tris) + 1000
    flips = 0
    while queue and flips < max_flips:
        e = queue.pop()
        ts = edge_map.get(e)
        if ts is None or len(ts) != 2 or e in protected:
            continue
        t1, t2 = ts
        u, v = e
        c = next(x for x in tris[t1] if x not in e)
        d = next(x for x in tris[t2] if x not in e)
        # Normalize so tris[t1] is (u, v, c) CCW with v following u.
        a1 = tris[t1]
        k = a1.index(u)
        if a1[(k + 1) % 3] != v:
            u, v = v, u
        pu, pv, pc, pd = nodes[u], nodes[v], nodes[c], nodes[d]
        if _in_circumcircle(pu, pv, pc, pd) <= 0:
            continue
        # Flip only when both children stay positively oriented.
        if _orient(pu, pd, pc) <= 0 or _orient(pd, pv, pc) <= 0:
            continue
        new1 = [u, d, c]
        new2 = [d, v, c]
        for old_t, old in ((t1, tris[t1]), (t2, tris[t2])):
            for k in range(3):
                edge_map[_edge_key(old[k], old[(k + 1) % 3])].remove(old_t)
        tris[t1] = new1
        tris[t2] = new2
        for t_idx, t in ((t1, new1), (t2, new2)):
            for k in range(3):
                edge_map.setdefault(_edge_key(t[k], t[(k + 1) % 3]), []).append(t_idx)
        flips += 1
        for t in (new1, new2):
            for k in range(3):
                e2 = _edge_key(t[k], t[(k + 1) % 3])
                if e2 not in protected and len(edge_map.get(e2, ())) == 2:
                    queue.append(e2)


def _point_on_segment(p, seg, tol) -> bool:
    a, b = seg[0], seg[1]
    ab = b - a
    L2 = float(ab @ ab)
    if L2 == 0.0:
        return False
    t = float((p - a) @ ab) / L2
    if t < -tol or t > 1.0 + tol:
        return False
    proj = a + t * ab
    return float(np.hypot(*(p - proj))) <= tol * math.sqrt(L2)


def triangulate_regions(
    loops: list[np.ndarray],
    boundary_segments: np.ndarray,
    boundary_weights: np.ndarray,
    interface_segments: np.ndarray | None = None,
    interface_weights: np.ndarray | None = None,
) -> Mesh:
    """Triangulate a union of simple CCW loops sharing segment-aligned edges.

    Nodes with bitwise-equal coordinates are merged, so adjacent loops must
    list shared edges with identical endpoint coordinates.  After merging,
    every single-sided edge must lie on one of ``boundary_segments`` (else
    the mesh is rejected), and every internal edge lying on an interface
    segment is tagged as an interface edge and protected from flips.
    """
    if interface_segments is None:
        interface_segments = np.zeros((0, 2, 2))
        interface_weights = np.zeros((0,))
    node_index: dict[bytes, int] = {}
    nodes: list[np.ndarray] = []
    tris: list[list[int]] = []

    def intern(pt: np.ndarray) -> int:
        key = pt.tobytes()
        idx = node_index.get(key)
        if idx is None:
            idx = len(nodes)
            node_index[key] = idx
            nodes.append(pt)
        return idx

    for loop in loops:
        loop = np.asarray(loop, dtype=float)
        glob = [intern(loop[i]) for i in range(loop.shape[0])]
        for (i, j, k) in _ear_clip(loop):
            tris.append([glob[i], glob[j], glob[k]])

    node_arr = np.array(nodes)
    scale = max(1.0, float(np.ptp(node_arr, axis=0).max()))
    tol = 1e-12 * scale

    # Interface edges are identified before flips so they can be protected.
    edge_count: dict[tuple[int, int], int] = {}
    for t in tris:
        for k in range(3):
            e = _edge_key(t[k], t[(k + 1) % 3])
            edge_count[e] = edge_count.get(e, 0) + 1

    def segment_of(e, segments) -> int | None:
        p, q = node_arr[e[0]], node_arr[e[1]]
        for s_idx in range(segments.shape[0]):
            if _point_on_segment(p, segments[s_idx], tol) and _point_on_segment(
                q, segments[s_idx], tol
            ):
                return s_idx
        return None

    protected: set = set()
    interface_map: dict[tuple[int, int], int] = {}
    for e, cnt in edge_count.items():
        if cnt == 2 and interface_segments.shape[0]:
            s = segment_of(e, interface_segments)
            if s is not None:
                protected.add(e)
                interface_map[e] = s

    _delaunay_flips(node_arr, tris, protected)

    # Classify boundary edges after flips (flips never touch them).
    edge_tris: dict[tuple[int, int], list[int]] = {}
    oriented: dict[tuple[int, int], tuple[int, int]] = {}
    for t_idx, t in enumerate(tris):
        for k in range(3):
            i, j = t[k], t[(k + 1) % 3]
            edge_tris.setdefault(_edge_key(i, j), []).append(t_idx)
            oriented[_edge_key(i, j)] = (i, j)

    b_edges, b_tags = [], []
    i_edges, i_tags = [], []
    for e, ts in sorted(edge_tris.items()):
        if len(ts) == 1:
            s = segment_of(e, boundary_segments)
            if s is None:
                raise MeshError(
                    f"untagged boundary edge between nodes {e[0]} and {e[1]}"
                )
            b_edges.append(oriented[e])
            b_tags.append(s)
        elif len(ts) == 2:
            s = interface_map.get(e)
            if s is None and interface_segments.shape[0]:
                s = segment_of(e, interface_segments)
            if s is not None:
                i_edges.append(oriented[e])
                i_tags.append(s)
        else:
            raise MeshError(f"edge {e} shared by {len(ts)} triangles")

    return Mesh(
        nodes=node_arr,
        triangles=np.array(tris, dtype=np.int64),
        boundary_edges=np.array(b_edges, dtype=np.int64).reshape(-1, 2),
        boundary_tags=np.array(b_tags, dtype=np.int64),
        boundary_segments=np.asarray(boundary_segments, dtype=float),
        boundary_weights=np.asarray(boundary_weights, dtype=float),
        interface_edges=np.array(i_edges, dtype=np.int64).reshape(-1, 2),
        interface_tags=np.array(i_tags, dtype=np.int64),
        interface_segments=np.asarray(interface_segments, dtype=float),
        interface_weights=np.asarray(interface_weights, dtype=float),
    )


def triangulate(p: Polygon) -> Mesh:
    """Triangulate a valid polygon; boundary edge tags are polygon edge ids."""
    require_valid(p)
    segments = p.edges()
    return triangulate_regions([p.vertices], segments, p.weights())


@dataclass(frozen=True)
class GradingPolicy:
    """Size targets for graded refinement toward the boundary.

    ``first_layer`` is the triangle size target at the boundary (defaults to
    ``c_bl / alpha``); the allowed size grows geometrically away from it with
    the given ``ratio``.  Triangles within ``first_layer / ratio`` of a listed
    corner are refined ``layers`` extra levels.
    """

    alpha: float
    layers: int = 3
    ratio: float = 0.5
    first_layer: float | None = None
    c_bl: float = 0.5

    def __post_init__(self):
        if self.alpha < 0:
            raise MeshError("grading alpha must be nonnegative")
        if not (0.0 < self.ratio < 1.0):
            raise MeshError("grading ratio must lie in (0, 1)")
        if self.layers < 0:
            raise MeshError("grading layers must be nonnegative")
        if self.first_layer is None:
            if self.alpha == 0:
                raise MeshError("first_layer is required when alpha is 0")
            object.__setattr__(self, "first_layer", self.c_bl / self.alpha)
        if not self.first_layer > 0:
            raise MeshError("first_layer must be positive")


def _dist_to_segments(points: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Minimum distance from each point to a set of segments (chunked)."""
    if segs.shape[0] == 0:
        return np.full(points.shape[0], np.inf)
    a = segs[:, 0]
    ab = segs[:, 1] - segs[:, 0]
    L2 = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
    out = np.empty(points.shape[0])
    chunk = max(1, 2_000_000 // segs.shape[0])
    for s in range(0, points.shape[0], chunk):
        pts = points[s : s + chunk]
        pa = pts[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("psd,sd->ps", pa, ab) / L2[None, :], 0.0, 1.0)
        diff = pa - t[:, :, None] * ab[None, :, :]
        out[s : s + chunk] = np.sqrt(np.min(np.sum(diff * diff, axis=2), axis=1))
    return out


class _RefineState:
    """Growable mesh arrays plus tagged-edge bookkeeping during refinement."""

    def __init__(self, mesh: Mesh):
        self.nodes: list[np.ndarray] = [mesh.nodes[i] for i in range(mesh.num_nodes)]
        self.tris: list[list[int]] = [list(t) for t in mesh.triangles]
        self.tagged: dict[tuple[int, int], tuple[str, int]] = {}
        for (i, j), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
            self.tagged[_edge_key(int(i), int(j))] = ("b", int(tag))
        for (i, j), tag in zip(mesh.interface_edges, mesh.interface_tags):
            self.tagged[_edge_key(int(i), int(j))] = ("i", int(tag))
        self.oriented: dict[tuple[int, int], tuple[int, int]] = {}
        for (i, j) in mesh.boundary_edges:
            self.oriented[_edge_key(int(i), int(j))] = (int(i), int(j))
        for (i, j) in mesh.interface_edges:
            self.oriented[_edge_key(int(i), int(j))] = (int(i), int(j))
        self.midpoints: dict[tuple[int, int], int] = {}

    def midpoint(self, i: int, j: int) -> int:
        key = _edge_key(i, j)
        m = self.midpoints.get(key)
        if m is not None:
            return m
        pm = 0.5 * (self.nodes[i] + self.nodes[j])
        m = len(self.nodes)
        self.nodes.append(pm)
        self.midpoints[key] = m
        entry = self.tagged.pop(key, None)
        if entry is not None:
            a, b = self.oriented.pop(key)
            self.tagged[_edge_key(a, m)] = entry
            self.tagged[_edge_key(m, b)] = entry
            self.oriented[_edge_key(a, m)] = (a, m)
            self.oriented[_edge_key(m, b)] = (m, b)
        return m

    def finish(self, template: Mesh) -> Mesh:
        nodes = np.array(self.nodes)
        b_edges, b_tags, i_edges, i_tags = [], [], [], []
        for key, (kind, tag) in sorted(self.tagged.items()):
            edge = self.oriented[key]
            if kind == "b":
                b_edges.append(edge)
                b_tags.append(tag)
            else:
                i_edges.append(edge)
                i_tags.append(tag)
        return replace(
            template,
            nodes=nodes,
            triangles=np.array(self.tris, dtype=np.int64),
            boundary_edges=np.array(b_edges, dtype=np.int64).reshape(-1, 2),
            boundary_tags=np.array(b_tags, dtype=np.int64),
            interface_edges=np.array(i_edges, dtype=np.int64).reshape(-1, 2),
            interface_tags=np.array(i_tags, dtype=np.int64),
        )


def refine_uniform(mesh: Mesh, levels: int = 1) -> Mesh:
    """Subdivide every triangle into four, ``levels`` times."""
    if levels < 0:
        raise MeshError("levels must be nonnegative")
    for _ in range(levels):
        st = _RefineState(mesh)
        new_tris: list[list[int]] = []
        for (a, b, c) in st.tris:
            mab = st.midpoint(a, b)
            mbc = st.midpoint(b, c)
            mca = st.midpoint(c, a)
            new_tris.extend(
                [[a, mab, mca], [mab, b, mbc], [mca, mbc, c], [mab, mbc, mca]]
            )
        st.tris = new_tris
        mesh = st.finish(mesh)
    return mesh


def _bisect(tri: list[int], k: int, q: int) -> tuple[list[int], list[int]]:
    """Split a CCW triangle at local edge k (joining vertex k to k+1) by node q."""
    x, y, z = tri
    if k == 0:
        return [x, q, z], [q, y, z]
    if k == 1:
        return [x, y, q], [x, q, z]
    return [x, y, q], [y, z, q]


def _closure(tris: np.ndarray, keys3: np.ndarray, k_long: np.ndarray, seed: np.ndarray):
    """Grow the split set until every touched triangle splits its longest edge."""
    t_range = np.arange(tris.shape[0])
    long_key = keys3[t_range, k_long]
    split = np.unique(seed)
    while True:
        member = np.isin(keys3, split)
        need = member.any(axis=1) & ~member[t_range, k_long]
        if not need.any():
            return split, member.any(axis=1) | need
        split = np.union1d(split, long_key[need])


def _apply_splits(
    state: _RefineState,
    split_set: set,
    affected: np.ndarray,
    k_long: np.ndarray,
    base: int,
) -> None:
    new_tris: list[list[int]] = []

    def key_of(i: int, j: int) -> int:
        return i * base + j if i < j else j * base + i

    def rec(tri: list[int], k: int | None) -> None:
        if k is None:
            marked = [
                kk
                for kk in range(3)
                if key_of(tri[kk], tri[(kk + 1) % 3]) in split_set
            ]
            if not marked:
                new_tris.append(tri)
                return
            if len(marked) == 1:
                k = marked[0]
            else:
                p = [state.nodes[v] for v in tri]
                lens = [
                    float(np.sum((p[(kk + 1) % 3] - p[kk]) ** 2)) for kk in marked
                ]
                k = marked[int(np.argmax(lens))]
        q = state.midpoint(tri[k], tri[(k + 1) % 3])
        c1, c2 = _bisect(tri, k, q)
        rec(c1, None)
        rec(c2, None)

    for t_idx, tri in enumerate(state.tris):
        if affected[t_idx]:
            rec(tri, int(k_long[t_idx]))
        else:
            new_tris.append(tri)
    state.tris = new_tris


def refine_graded(
    mesh: Mesh,
    policy: GradingPolicy,
    corners=(),
    toward: str = "boundary",
    toward_tags=None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Mesh:
    """Refine by longest-edge bisection until the size field is satisfied.

    The allowed triangle size is ``first_layer`` at the target segments and
    grows linearly with distance (slope ``(1 - ratio) / ratio``); within
    ``first_layer / ratio`` of a listed corner it shrinks by ``2**-layers``.
    ``toward`` selects the boundary or interface segment family as the
    target, optionally restricted to ``toward_tags``.
    """
    if toward == "boundary":
        segs = mesh.boundary_segments
    elif toward == "interface":
        segs = mesh.interface_segments
    else:
        raise MeshError(f"unknown refinement target {toward!r}")
    if toward_tags is not None:
        keep = sorted(set(int(t) for t in toward_tags))
        segs = segs[keep]
    if segs.shape[0] == 0:
        raise MeshError("graded refinement needs at least one target segment")

    corner_pts = np.asarray(list(corners), dtype=float).reshape(-1, 2)
    first = float(policy.first_layer)
    slope = (1.0 - policy.ratio) / policy.ratio
    corner_radius = first / policy.ratio
    corner_factor = 0.5 ** policy.layers
    floor = first * corner_factor

    state = _RefineState(mesh)
    for _ in range(_MAX_GRADING_PASSES):
        nodes = np.array(state.nodes)
        tris = np.array(state.tris, dtype=np.int64)
        pts = nodes[tris]
        edge_len = np.stack(
            [
                np.linalg.norm(pts[:, 1] - pts[:, 0], axis=1),
                np.linalg.norm(pts[:, 2] - pts[:, 1], axis=1),
                np.linalg.norm(pts[:, 0] - pts[:, 2], axis=1),
            ],
            axis=1,
        )
        diam = edge_len.max(axis=1)
        cand = np.nonzero(diam > floor * (1.0 + 1e-9))[0]
        if cand.size == 0:
            break
        centroids = pts[cand].mean(axis=1)
        d = _dist_to_segments(centroids, segs)
        allowed = first + slope * d
        if corner_pts.shape[0] and policy.layers > 0:
            dc = np.sqrt(
                np.min(
                    np.sum(
                        (centroids[:, None, :] - corner_pts[None, :, :]) ** 2, axis=2
                    ),
                    axis=1,
                )
            )
            near = dc <= corner_radius
            allowed = np.where(near, allowed * corner_factor, allowed)
        marked = cand[diam[cand] > allowed * (1.0 + 1e-9)]
        if marked.size == 0:
            break

        # One midpoint may appear per split edge; the key base must clear
        # every node index reachable this pass.
        base = len(state.nodes) + 3 * tris.shape[0] + 8
        lo = np.minimum(tris, np.roll(tris, -1, axis=1))
        hi = np.maximum(tris, np.roll(tris, -1, axis=1))
        keys3 = lo * base + hi
        k_long = np.argmax(edge_len, axis=1)
        seed = keys3[marked, k_long[marked]]
        split, affected = _closure(tris, keys3, k_long, seed)
        _apply_splits(state, set(int(k) for k in split), affected, k_long, base)

        if len(state.nodes) > node_budget:
            raise ResourceError(
                f"node budget {node_budget} exhausted during graded refinement",
                achieved_size=float(diam[marked].max()),
            )
    else:
        raise MeshError("graded refinement did not settle")

    return state.finish(mesh)


@dataclass(frozen=True)
class MeshStats:
    num_nodes: int
    num_triangles: int
    num_boundary_edges: int
    num_interface_edges: int
    total_area: float
    min_angle_deg: float
    h_min: float
    h_max: float

    def to_dict(self) -> dict:
        return {
            "nodes": self.num_nodes,
            "triangles": self.num_triangles,
            "boundary_edges": self.num_boundary_edges,
            "interface_edges": self.num_interface_edges,
            "area": self.total_area,
            "min_angle_deg": self.min_angle_deg,
            "h_min": self.h_min,
            "h_max": self.h_max,
        }


def triangle_areas(mesh: Mesh) -> np.ndarray:
    p = mesh.nodes[mesh.triangles]
    return 0.5 * (
        (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
        - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    )


def mesh_stats(mesh: Mesh) -> MeshStats:
    p = mesh.nodes[mesh.triangles]
    sides = np.stack(
        [
            np.linalg.norm(p[:, 1] - p[:, 0], axis=1),
            np.linalg.norm(p[:, 2] - p[:, 1], axis=1),
            np.linalg.norm(p[:, 0] - p[:, 2], axis=1),
        ],
        axis=1,
    )
    areas = triangle_areas(mesh)
    angles = []
    for k in range(3):
        a = sides[:, (k + 1) % 3]
        b = sides[:, (k + 2) % 3]
        c = sides[:, k]
        cosv = np.clip((a * a + b * b - c * c) / (2 * a * b), -1.0, 1.0)
        angles.append(np.degrees(np.arccos(cosv)))
    return MeshStats(
        num_nodes=mesh.num_nodes,
        num_triangles=mesh.num_triangles,
        num_boundary_edges=mesh.boundary_edges.shape[0],
        num_interface_edges=mesh.interface_edges.shape[0],
        total_area=float(areas.sum()),
        min_angle_deg=float(np.min(angles)),
        h_min=float(sides.min()),
        h_max=float(sides.max()),
    )


def audit(mesh: Mesh) -> list[str]:
    """Conformity and consistency violations; empty list means clean."""
    problems: list[str] = []
    if np.any(triangle_areas(mesh) <= 0):
        bad = int(np.argmin(triangle_areas(mesh)))
        problems.append(f"triangle {bad} is not positively oriented")

    edge_count: dict[tuple[int, int], int] = {}
    for t in mesh.triangles:
        for k in range(3):
            e = _edge_key(int(t[k]), int(t[(k + 1) % 3]))
            edge_count[e] = edge_count.get(e, 0) + 1
    single = {e for e, c in edge_count.items() if c == 1}
    for e, c in edge_count.items():
        if c > 2:
            problems.append(f"edge {e} shared by {c} triangles")

    listed = {_edge_key(int(i), int(j)) for i, j in mesh.boundary_edges}
    if listed != single:
        problems.append(
            f"boundary edge list mismatch: {len(listed)} listed, "
            f"{len(single)} single-sided"
        )
    for (i, j), tag in zip(mesh.interface_edges, mesh.interface_tags):
        if edge_count.get(_edge_key(int(i), int(j)), 0) != 2:
            problems.append(f"interface edge ({i}, {j}) is not internal")

    scale = max(1.0, float(np.ptp(mesh.nodes, axis=0).max()))
    tol = 1e-10 * scale
    for edges, tags, segments, label in (
        (mesh.boundary_edges, mesh.boundary_tags, mesh.boundary_segments, "boundary"),
        (
            mesh.interface_edges,
            mesh.interface_tags,
            mesh.interface_segments,
            "interface",
        ),
    ):
        for (i, j), tag in zip(edges, tags):
            seg = segments[int(tag)]
            for node in (int(i), int(j)):
                if not _point_on_segment(mesh.nodes[node], seg, tol):
                    problems.append(
                        f"{label} edge ({i}, {j}) strays from segment {tag}"
                    )
                    break
        # Tagged edges must partition their segments by length.
        if edges.shape[0]:
            lens = np.linalg.norm(
                mesh.nodes[edges[:, 1]] - mesh.nodes[edges[:, 0]], axis=1
            )
            for s_idx in range(segments.shape[0]):
                seg_len = float(np.linalg.norm(segments[s_idx, 1] - segments[s_idx, 0]))
                got = float(lens[np.asarray(tags) == s_idx].sum())
                if abs(got - seg_len) > 1e-10 * max(1.0, seg_len):
                    problems.append(
                        f"{label} segment {s_idx} length {seg_len} covered by {got}"
                    )
    return problems


def scale_mesh(mesh: Mesh, t: float) -> Mesh:
    """Dilate a mesh (and its tagged segment geometry) by a factor t > 0."""
    if not t > 0:
        raise MeshError("scale factor must be positive")
    return replace(
        mesh,
        nodes=mesh.nodes * t,
        boundary_segments=mesh.boundary_segments * t,
        interface_segments=mesh.interface_segments * t,
    )


def mesh_fingerprint(mesh: Mesh) -> str:
    """Short deterministic digest of the mesh contents."""
    h = hashlib.sha256()
    h.update(mesh.nodes.tobytes())
    h.update(mesh.triangles.tobytes())
    h.update(mesh.boundary_edges.tobytes())
    h.update(mesh.interface_edges.tobytes())
    return h.hexdigest()[:12]


def save_mesh(mesh: Mesh, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("mesh\n")
        fh.write(f"nodes {mesh.num_nodes}\n")
        for x, y in mesh.nodes:
            fh.write(f"{x:.17g} {y:.17g}\n")
        fh.write(f"triangles {mesh.num_triangles}\n")
        for a, b, c in mesh.triangles:
            fh.write(f"{a} {b} {c}\n")
        fh.write(f"bedges {mesh.boundary_edges.shape[0]}\n")
        for (i, j), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
            fh.write(f"{i} {j} {tag}\n")
        if mesh.interface_edges.shape[0]:
            fh.write(f"iedges {mesh.interface_edges.shape[0]}\n")
            for (i, j), tag in zip(mesh.interface_edges, mesh.interface_tags):
                fh.write(f"{i} {j} {tag}\n")


def _segments_from_edges(nodes, edges, tags) -> np.ndarray:
    """Recover one straight segment per tag from its collinear edges."""
    if len(tags) == 0:
        return np.zeros((0, 2, 2))
    n_tags = int(max(tags)) + 1
    segs = np.zeros((n_tags, 2, 2))
    for s_idx in range(n_tags):
        pts = []
        for (i, j), tag in zip(edges, tags):
            if tag == s_idx:
                pts.append(nodes[int(i)])
                pts.append(nodes[int(j)])
        if not pts:
            continue
        pts = np.array(pts)
        direction = pts[-1] - pts[0]
        if np.allclose(direction, 0):
            direction = pts[1] - pts[0]
        proj = pts @ direction
        segs[s_idx, 0] = pts[int(np.argmin(proj))]
        segs[s_idx, 1] = pts[int(np.argmax(proj))]
    return segs


def load_mesh(path, polygon: Polygon | None = None) -> Mesh:
    """Read a mesh file; a polygon restores exact segment geometry and weights."""
    with open(path, "r", encoding="utf-8") as fh:
        tokens = [
            line.split("#", 1)[0].split()
            for line in fh
            if line.split("#", 1)[0].strip()
        ]
    it = iter(tokens)
    head = next(it, None)
    if head != ["mesh"]:
        raise MeshError("expected 'mesh' header")

    sections: dict[str, list[list[str]]] = {}
    current = None
    for tok in it:
        if tok[0] in ("nodes", "triangles", "bedges", "iedges") and len(tok) == 2:
            current = tok[0]
            sections[current] = []
            sections[current + "_n"] = [[tok[1]]]
        else:
            if current is None:
                raise MeshError(f"unexpected line {tok!r}")
            sections[current].append(tok)

    def block(name, width, dtype):
        rows = sections.get(name, [])
        count = int(sections.get(name + "_n", [["0"]])[0][0])
        if len(rows) != count:
            raise MeshError(f"section {name} announced {count} rows, found {len(rows)}")
        if not rows:
            return np.zeros((0, width), dtype=dtype)
        return np.array([[dtype(x) for x in r] for r in rows], dtype=dtype)

    nodes = block("nodes", 2, float)
    triangles = block("triangles", 3, int)
    bed = block("bedges", 3, int)
    ied = block("iedges", 3, int)

    if polygon is not None:
        b_segments = polygon.edges()
        b_weights = polygon.weights()
    else:
        b_segments = _segments_from_edges(nodes, bed[:, :2], bed[:, 2])
        b_weights = np.ones(b_segments.shape[0])
    i_segments = _segments_from_edges(nodes, ied[:, :2], ied[:, 2])
    return Mesh(
        nodes=nodes,
        triangles=triangles.astype(np.int64),
        boundary_edges=bed[:, :2].astype(np.int64),
        boundary_tags=bed[:, 2].astype(np.int64),
        boundary_segments=b_segments,
        boundary_weights=b_weights,
        interface_edges=ied[:, :2].astype(np.int64),
        interface_tags=ied[:, 2].astype(np.int64),
        interface_segments=i_segments,
        interface_weights=np.ones(i_segments.shape[0]),
    )

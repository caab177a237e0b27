"""P1 finite elements for quadratic forms with attractive boundary terms.

Assembles the exact element matrices of the form
``Q(u) = ||grad u||^2 - alpha * sum_e w_e ||u||^2_e`` on a triangle mesh and
solves for its smallest eigenvalue with a deterministic shift-invert
iteration.  All quadrature is exact for P1, so discrete eigenvalues are
genuine Rayleigh quotients of the continuous form on the mesh's finite
element space (Galerkin upper bounds).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import AssemblyError, SolverError
from .mesher import Mesh

_DENSE_CUTOFF = 60


def _gradients(mesh: Mesh):
    """Barycentric gradients and areas for every triangle."""
    p = mesh.nodes[mesh.triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    if np.any(det <= 0):
        bad = int(np.argmin(det))
        raise AssemblyError(f"triangle {bad} has nonpositive area")
    area = 0.5 * det
    # grad lambda_i = perp(p_{i+1} - p_{i+2}) / (2 A), perp(v) = (v_y, -v_x)
    g = np.empty((p.shape[0], 3, 2))
    for i in range(3):
        d = p[:, (i + 1) % 3] - p[:, (i + 2) % 3]
        g[:, i, 0] = d[:, 1]
        g[:, i, 1] = -d[:, 0]
    g /= det[:, None, None]
    return g, area


def assemble_stiffness(mesh: Mesh) -> sp.csr_matrix:
    """Exact P1 stiffness matrix; symmetric, constants in its null space."""
    g, area = _gradients(mesh)
    data = np.einsum("tid,tjd->tij", g, g) * area[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.num_nodes
    return sp.coo_matrix((data.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble_mass(mesh: Mesh) -> sp.csr_matrix:
    """Exact consistent P1 mass matrix."""
    _, area = _gradients(mesh)
    local = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
    data = area[:, None, None] * local[None, :, :]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.num_nodes
    return sp.coo_matrix((data.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def _edge_mass(nodes: np.ndarray, edges: np.ndarray, weights: np.ndarray, n: int):
    if edges.shape[0] == 0:
        return sp.csr_matrix((n, n))
    lengths = np.linalg.norm(nodes[edges[:, 1]] - nodes[edges[:, 0]], axis=1)
    if np.any(lengths <= 0):
        raise AssemblyError("zero-length tagged edge")
    local = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    data = (weights * lengths)[:, None, None] * local[None, :, :]
    rows = np.repeat(edges, 2, axis=1).ravel()
    cols = np.tile(edges, (1, 2)).ravel()
    return sp.coo_matrix((data.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def _tag_weights(tags: np.ndarray, table: np.ndarray, label: str) -> np.ndarray:
    if tags.size and (tags.min() < 0 or tags.max() >= table.shape[0]):
        raise AssemblyError(f"untagged or out-of-range {label} edge tag")
    return table[tags] if tags.size else np.zeros(0)


def assemble_boundary_mass(mesh: Mesh, weights=None) -> sp.csr_matrix:
    """Weighted boundary mass matrix; ``weights`` overrides per-tag weights."""
    table = mesh.boundary_weights if weights is None else np.asarray(weights, float)
    w = _tag_weights(mesh.boundary_tags, table, "boundary")
    return _edge_mass(mesh.nodes, mesh.boundary_edges, w, mesh.num_nodes)


def assemble_interface_mass(mesh: Mesh, weights=None) -> sp.csr_matrix:
    """Weighted interface mass matrix, assembled like the boundary mass."""
    table = mesh.interface_weights if weights is None else np.asarray(weights, float)
    w = _tag_weights(mesh.interface_tags, table, "interface")
    return _edge_mass(mesh.nodes, mesh.interface_edges, w, mesh.num_nodes)


@dataclass(eq=False)
class SpectralResult:
    """Smallest eigenpair of ``(K - alpha B) u = lambda M u``."""

    alpha: float
    eigenvalue: float
    eigenvector: np.ndarray
    residual: float
    iterations: int


def _normalize(u: np.ndarray, M) -> np.ndarray:
    nrm = float(np.sqrt(u @ (M @ u)))
    if nrm == 0.0:
        raise SolverError("eigenvector has zero M-norm")
    u = u / nrm
    # Deterministic sign: the largest-magnitude component is positive.
    if u[int(np.argmax(np.abs(u)))] < 0:
        u = -u
    return u


def default_shift(alpha: float, energy_estimate: float | None) -> float:
    """Shift strictly below the expected ground state.

    With an energy estimate the ground state sits near ``alpha^2 * estimate``,
    so 1.5x that (and at most -1) clears it; without one, fall back to the
    half-plane bound -2*alpha^2 - 1.
    """
    if energy_estimate is not None:
        return min(1.5 * alpha * alpha * energy_estimate - 1.0, -1.0)
    return -2.0 * alpha * alpha - 1.0


def smallest_eig(
    K,
    B,
    M,
    alpha: float,
    tol: float = 1e-8,
    energy_estimate: float | None = None,
    maxiter: int = 5000,
) -> SpectralResult:
    """Smallest eigenvalue of ``(K - alpha B) u = lambda M u``.

    Shift-invert with a single factorization of ``A - sigma M``; when the
    factorization fails the shift retreats via ``sigma <- 2 sigma - 1``, at
    most five times.  The start vector is the all-ones vector M-normalized,
    so repeated runs are bitwise reproducible.  The returned residual is
    ``||A u - lambda M u|| / ||u||_M`` and must come out below ``tol``.
    """
    A = (K - alpha * B).tocsr()
    n = A.shape[0]
    M = M.tocsr()

    if n <= _DENSE_CUTOFF:
        vals, vecs = scipy.linalg.eigh(A.toarray(), M.toarray())
        lam = float(vals[0])
        u = _normalize(vecs[:, 0], M)
        res = float(np.linalg.norm(A @ u - lam * (M @ u)))
        return SpectralResult(alpha, lam, u, res, iterations=1)

    sigma = default_shift(alpha, energy_estimate)
    lu = None
    for _ in range(6):
        try:
            lu = spla.splu((A - sigma * M).tocsc())
            break
        except RuntimeError:
            sigma = 2.0 * sigma - 1.0
    if lu is None:
        raise SolverError("factorization failed for every shift in the retry ladder")

    solves = 0

    def op(x):
        nonlocal solves
        solves += 1
        return lu.solve(x)

    opinv = spla.LinearOperator(A.shape, matvec=op, dtype=float)
    ones = np.ones(n)
    v0 = ones / float(np.sqrt(ones @ (M @ ones)))
    try:
        vals, vecs = spla.eigsh(
            A, k=1, M=M, sigma=sigma, which="LM", v0=v0, OPinv=opinv, maxiter=maxiter
        )
    except spla.ArpackNoConvergence as exc:
        best = None
        if exc.eigenvalues is not None and len(exc.eigenvalues):
            lam = float(exc.eigenvalues[0])
            u = _normalize(exc.eigenvectors[:, 0], M)
            best = (lam, u, float(np.linalg.norm(A @ u - lam * (M @ u))))
        raise SolverError("eigenvalue iteration did not converge", best_iterate=best)

    lam = float(vals[0])
    u = _normalize(vecs[:, 0], M)
    res = float(np.linalg.norm(A @ u - lam * (M @ u)))
    if res > tol:
        raise SolverError(
            f"residual {res:.3e} above tolerance {tol:.3e}",
            best_iterate=(lam, u, res),
        )
    u.setflags(write=False)
    return SpectralResult(alpha, lam, u, res, iterations=solves)


def rayleigh_quotient(K, B, M, alpha: float, u: np.ndarray) -> float:
    """Value of the quadratic form ratio at ``u``."""
    den = float(u @ (M @ u))
    if den <= 0.0:
        raise SolverError("Rayleigh quotient of a zero vector")
    return float(u @ (K @ u) - alpha * (u @ (B @ u))) / den


def corner_quasimode(
    mesh: Mesh, corner, opening: float, alpha: float, bisector
) -> np.ndarray:
    """Nodal interpolant of the sector ground-state profile at a corner.

    The profile decays as ``exp(-alpha/sin(opening/2) * s)`` along the unit
    ``bisector`` direction from ``corner``; its Rayleigh quotient is an upper
    bound for the smallest eigenvalue on the same mesh.
    """
    c = np.asarray(corner, dtype=float)
    b = np.asarray(bisector, dtype=float)
    b = b / np.linalg.norm(b)
    s = (mesh.nodes - c) @ b
    rate = alpha / np.sin(0.5 * opening)
    return np.exp(-rate * np.maximum(s, 0.0))

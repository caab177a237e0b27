"""Alpha sweeps, remainder rate fits, and envelope checks.

The principal eigenvalue behaves like alpha^2 * E(Omega) with a remainder
bounded by C * alpha^rho; the sweep machinery solves one graded eigenproblem
per alpha, fits the observed remainder rate in log-log coordinates, and
verifies the two-sided envelope.  Fitting only makes sense above the
numerical noise floor, so rows dominated by solver residual or estimated
discretization error are excluded, and a sweep whose remainder is entirely
below that floor reports resolution success instead of a meaningless slope.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError, RobinCornerError
from .geometry import DomainSpec, Polygon, disk_polygon
from . import cone_energy
from . import mesher
from . import fem

THREAD_ENV_VAR = "ROBIN_CORNER_THREADS"
DEFAULT_ALPHAS = (4.0, 8.0, 16.0, 32.0)
CSV_HEADER = "alpha,lambda,lambda_over_alpha2,remainder,residual,nodes"


@dataclass(frozen=True)
class RateModel:
    """Remainder exponents from the corner-count indices.

    ``nu_bar`` drives the upper remainder exponent 2 - 2/(2 nu + 3) and
    ``nu_bar_plus`` the lower one; for polygons both indices vanish and
    the exponents coincide at 4/3.
    """

    nu_bar: int = 0
    nu_bar_plus: int = 0

    def __post_init__(self):
        if not (0 <= self.nu_bar <= self.nu_bar_plus):
            raise ValidationError("need 0 <= nu_bar <= nu_bar_plus")

    @property
    def upper_exponent(self) -> float:
        return 2.0 - 2.0 / (2.0 * self.nu_bar + 3.0)

    @property
    def lower_exponent(self) -> float:
        return 2.0 - 2.0 / (2.0 * self.nu_bar_plus + 3.0)

    @classmethod
    def polygon(cls) -> "RateModel":
        return cls(0, 0)


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    eigenvalue: float
    residual: float
    mesh_id: str
    nodes: int
    status: str = "ok"
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def lambda_over_alpha2(self) -> float:
        return self.eigenvalue / (self.alpha * self.alpha)


@dataclass(frozen=True)
class SweepTable:
    """Per-alpha eigenvalues with provenance and the predicted energy."""

    rows: tuple
    predicted_energy: float
    disc_estimate: float = 0.0

    def __post_init__(self):
        alphas = [r.alpha for r in self.rows]
        if any(a2 <= a1 for a1, a2 in zip(alphas, alphas[1:])):
            raise ValidationError("sweep alphas must be strictly increasing")

    @property
    def ok_rows(self) -> tuple:
        return tuple(r for r in self.rows if r.ok)

    @property
    def failed_rows(self) -> tuple:
        return tuple(r for r in self.rows if not r.ok)

    def remainder(self, row: SweepRow) -> float:
        return row.eigenvalue - self.predicted_energy * row.alpha**2

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for r in self.ok_rows:
            out.write(
                ",".join(
                    f"{v:.17g}"
                    for v in (
                        r.alpha,
                        r.eigenvalue,
                        r.lambda_over_alpha2,
                        self.remainder(r),
                        r.residual,
                    )
                )
                + f",{r.nodes}\n"
            )
        return out.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv())


def polygon_sweep_mesh(
    polygon: Polygon,
    alpha: float,
    node_budget: int = mesher.DEFAULT_NODE_BUDGET,
) -> mesher.Mesh:
    """Boundary-layer mesh for one sweep row on a polygon.

    Two grading passes: a band of size 0.5/alpha along every edge, then
    steep corner zones whose extra depth grows with log2(alpha) so the
    corner-layer error keeps shrinking along a geometric alpha sweep.
    """
    mesh = mesher.triangulate(polygon)
    band = mesher.GradingPolicy(alpha=alpha, c_bl=0.5, layers=0)
    mesh = mesher.refine_graded(mesh, band, node_budget=node_budget)
    depth = max(1, 3 + int(round(math.log2(alpha / 4.0))))
    zones = mesher.GradingPolicy(
        alpha=alpha, first_layer=0.7 / alpha, ratio=0.1, layers=depth
    )
    return mesher.refine_graded(
        mesh, zones, corners=polygon.vertices, node_budget=node_budget
    )


def disk_sweep_mesh(
    radius: float,
    alpha: float,
    node_budget: int = mesher.DEFAULT_NODE_BUDGET,
) -> mesher.Mesh:
    """Boundary-layer mesh on the equal-area polygon proxy of a disk."""
    poly = disk_polygon(radius, alpha=alpha)
    mesh = mesher.triangulate(poly)
    band = mesher.GradingPolicy(alpha=alpha, c_bl=0.06, ratio=0.85, layers=0)
    return mesher.refine_graded(mesh, band, node_budget=node_budget)


def domain_mesh(d: DomainSpec, alpha: float, node_budget: int = mesher.DEFAULT_NODE_BUDGET):
    if d.kind == "disk":
        return disk_sweep_mesh(d.radius, alpha, node_budget)
    return polygon_sweep_mesh(d.polygon, alpha, node_budget)


def predicted_energy(d: DomainSpec) -> float:
    if d.kind == "disk":
        return cone_energy.HALF_PLANE_ENERGY
    return cone_energy.domain_energy(d).energy


def solve_domain(
    d: DomainSpec,
    alpha: float,
    tol: float = 1e-8,
    mesh: mesher.Mesh | None = None,
    node_budget: int = mesher.DEFAULT_NODE_BUDGET,
) -> tuple[fem.SpectralResult, mesher.Mesh]:
    """One graded eigensolve of the Robin problem at the given alpha."""
    if mesh is None:
        mesh = domain_mesh(d, alpha, node_budget)
    K = fem.assemble_stiffness(mesh)
    M = fem.assemble_mass(mesh)
    B = fem.assemble_boundary_mass(mesh)
    energy = predicted_energy(d) if alpha > 0 else None
    result = fem.smallest_eig(K, B, M, alpha=alpha, tol=tol, energy_estimate=energy)
    return result, mesh


def _worker_count(n_tasks: int) -> int:
    env = os.environ.get(THREAD_ENV_VAR)
    if env:
        cap = int(env)
        if cap < 1:
            raise ValidationError(f"{THREAD_ENV_VAR} must be a positive integer")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def sweep(
    d: DomainSpec,
    alphas=DEFAULT_ALPHAS,
    tol: float = 1e-8,
    estimate_discretization: bool = True,
    node_budget: int = mesher.DEFAULT_NODE_BUDGET,
) -> SweepTable:
    """Solve the Robin problem across an increasing alpha grid.

    Each row gets its own graded mesh; rows run concurrently (capped by
    ROBIN_CORNER_THREADS) and a failed solve becomes a failed row rather
    than aborting the sweep.  The discretization error estimate comes from
    one uniform-refinement Richardson step at the largest successful alpha.
    """
    alphas = [float(a) for a in alphas]
    if any(a <= 0 for a in alphas):
        raise ValidationError("sweep alphas must be positive")
    energy = predicted_energy(d)
    if not alphas:
        return SweepTable(rows=(), predicted_energy=energy)

    meshes: dict[float, mesher.Mesh] = {}

    def run(alpha: float) -> SweepRow:
        try:
            result, mesh = solve_domain(d, alpha, tol=tol, node_budget=node_budget)
        except RobinCornerError as exc:
            return SweepRow(
                alpha=alpha,
                eigenvalue=math.nan,
                residual=math.nan,
                mesh_id="",
                nodes=0,
                status="failed",
                message=str(exc),
            )
        meshes[alpha] = mesh
        return SweepRow(
            alpha=alpha,
            eigenvalue=result.eigenvalue,
            residual=result.residual,
            mesh_id=mesher.mesh_fingerprint(mesh),
            nodes=mesh.num_nodes,
        )

    with ThreadPoolExecutor(max_workers=_worker_count(len(alphas))) as pool:
        rows = tuple(pool.map(run, alphas))

    disc = 0.0
    ok = [r for r in rows if r.ok]
    if estimate_discretization and ok:
        top = ok[-1]
        fine = mesher.refine_uniform(meshes[top.alpha], 1)
        refined, _ = solve_domain(d, top.alpha, tol=tol, mesh=fine)
        # One h -> h/2 step of an O(h^2) method: the error at h is about
        # 4/3 of the observed decrement.
        disc = abs(top.eigenvalue - refined.eigenvalue) * (4.0 / 3.0)
    return SweepTable(rows=rows, predicted_energy=energy, disc_estimate=disc)


@dataclass(frozen=True)
class RateFit:
    """Log-log remainder fit with its exclusion diagnostics."""

    status: str
    prefactor: float
    exponent: float
    r_squared: float
    fitted_alphas: tuple
    excluded_alphas: tuple
    noise_floor: tuple


def rate_fit(table: SweepTable, noise_multiplier: float = 10.0) -> RateFit:
    """Fit |lambda - E alpha^2| ~ C alpha^rho over resolvable rows.

    A row is resolvable when its remainder exceeds ``noise_multiplier``
    times the solver residual plus the same multiple of the sweep's
    discretization estimate.  With fewer than two resolvable rows no slope
    exists and the status is ``remainder-below-resolution``: the remainder
    is smaller than anything the discretization can certify, which is a
    success for the asymptotics, not a fit failure.
    """
    ok = table.ok_rows
    if len(ok) < 3:
        raise ValidationError("rate fit needs at least three successful rows")
    if not math.isfinite(table.predicted_energy):
        raise ValidationError("rate fit needs a finite predicted energy")

    floors = tuple(
        noise_multiplier * (r.residual + table.disc_estimate) for r in ok
    )
    fit_rows = [
        (r, f) for r, f in zip(ok, floors) if abs(table.remainder(r)) > f
    ]
    excluded = tuple(r.alpha for r in ok if all(r is not fr for fr, _ in fit_rows))
    if len(fit_rows) < 2:
        return RateFit(
            status="remainder-below-resolution",
            prefactor=math.nan,
            exponent=math.nan,
            r_squared=math.nan,
            fitted_alphas=(),
            excluded_alphas=tuple(r.alpha for r in ok),
            noise_floor=floors,
        )

    x = np.log([r.alpha for r, _ in fit_rows])
    y = np.log([abs(table.remainder(r)) for r, _ in fit_rows])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(
        status="fitted",
        prefactor=float(np.exp(intercept)),
        exponent=float(slope),
        r_squared=r2,
        fitted_alphas=tuple(r.alpha for r, _ in fit_rows),
        excluded_alphas=excluded,
        noise_floor=floors,
    )


@dataclass(frozen=True)
class EnvelopeRow:
    alpha: float
    remainder: float
    bound: float
    margin: float
    ok: bool


@dataclass(frozen=True)
class EnvelopeReport:
    rows: tuple
    passed: bool
    slack: float


def envelope_check(
    table: SweepTable,
    model: RateModel,
    fit: RateFit,
    slack: float = 2.0,
) -> EnvelopeReport:
    """Check |lambda - E alpha^2| <= slack * C * alpha^rho on every row.

    The exponent is the larger (lower-bound) one of the model.  When the
    fit reported the remainder below resolution the bound falls back to
    ``slack`` times each row's noise floor: rows that small satisfy any
    envelope the data could support.
    """
    exponent = max(model.upper_exponent, model.lower_exponent)
    ok_rows = table.ok_rows
    out = []
    for idx, row in enumerate(ok_rows):
        rem = abs(table.remainder(row))
        if fit.status == "fitted":
            bound = slack * fit.prefactor * row.alpha**exponent
        else:
            bound = slack * fit.noise_floor[idx]
        margin = math.inf if rem == 0.0 else bound / rem
        out.append(
            EnvelopeRow(
                alpha=row.alpha, remainder=rem, bound=bound, margin=margin, ok=rem <= bound
            )
        )
    return EnvelopeReport(rows=tuple(out), passed=all(r.ok for r in out), slack=slack)

"""Command-line surface: eigensolves, sweeps, oracles, and reports.

Every command prints machine-readable output (CSV rows or JSON) on stdout
in full double precision.  Exit status is 0 when all requested
computations converged, 1 on a computation failure (with partial output
where possible), 2 on malformed arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .errors import RobinCornerError
from . import geometry
from . import cone_energy
from . import mesher
from . import cone_oracle
from . import delta
from . import asymptotics
from . import applications


def _load_config(path) -> dict:
    """key = value pairs, one per line, # comments allowed."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise RobinCornerError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _setting(args, key, cast, default):
    """Flag wins over config file wins over the built-in default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    config = getattr(args, "_config", {})
    if key in config:
        return cast(config[key])
    return default


def _parse_domain(text: str) -> geometry.DomainSpec:
    if text.startswith("disk:"):
        return geometry.DomainSpec.disk(float(text.split(":", 1)[1]))
    return geometry.DomainSpec.from_polygon(geometry.load_polygon(text))


def _parse_alphas(text: str) -> tuple:
    vals = tuple(float(v) for v in text.split(",") if v.strip())
    if not vals:
        raise RobinCornerError("empty alpha list")
    return vals


def _fmt(value) -> str:
    return f"{value:.17g}"


def _energy_dict(d: geometry.DomainSpec) -> dict:
    return cone_energy.domain_energy(d).to_dict()


def _domain_dict(d: geometry.DomainSpec) -> dict:
    if d.kind == "disk":
        return {"kind": "disk", "radius": d.radius}
    return {
        "kind": "polygon",
        "vertices": [[float(x), float(y)] for x, y in d.polygon.vertices],
    }


def _cmd_energy(args) -> int:
    d = _parse_domain(args.domain)
    print(json.dumps({"domain": _domain_dict(d), "energy": _energy_dict(d)}, indent=2))
    return 0


def _cmd_mesh(args) -> int:
    d = _parse_domain(args.domain)
    mesh = asymptotics.domain_mesh(d, args.alpha)
    stats = mesher.mesh_stats(mesh)
    print(json.dumps(stats.to_dict(), indent=2))
    if args.output:
        mesher.save_mesh(mesh, args.output)
    return 0


def _cmd_solve(args) -> int:
    d = _parse_domain(args.domain)
    tol = _setting(args, "tol", float, 1e-8)
    result, mesh = asymptotics.solve_domain(d, args.alpha, tol=tol)
    print("alpha,lambda,lambda_over_alpha2,residual,nodes")
    lam = result.eigenvalue
    over = lam / args.alpha**2 if args.alpha else math.nan
    print(
        ",".join(
            [_fmt(args.alpha), _fmt(lam), _fmt(over), _fmt(result.residual)]
        )
        + f",{mesh.num_nodes}"
    )
    return 0


def _sweep_svg(table, report, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = table.ok_rows
    alphas = [r.alpha for r in rows]
    rems = [abs(table.remainder(r)) for r in rows]
    bounds = [er.bound for er in report.rows]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(alphas, rems, "o-", label="|lambda - E alpha^2|")
    ax.loglog(alphas, bounds, "s--", label="envelope bound")
    ax.set_xlabel("alpha")
    ax.set_ylabel("remainder")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _cmd_sweep(args) -> int:
    d = _parse_domain(args.domain)
    alphas = _parse_alphas(args.alphas) if args.alphas else asymptotics.DEFAULT_ALPHAS
    tol = _setting(args, "tol", float, 1e-8)
    table = asymptotics.sweep(d, alphas, tol=tol)
    sys.stdout.write(table.to_csv())
    if args.output:
        table.write_csv(args.output)
    if args.svg:
        fit = asymptotics.rate_fit(table)
        report = asymptotics.envelope_check(table, asymptotics.RateModel.polygon(), fit)
        _sweep_svg(table, report, args.svg)
    return 1 if table.failed_rows else 0


def _cmd_oracle_sector(args) -> int:
    spec = cone_oracle.TruncationSpec(radius=args.R, artificial_bc=args.bc)
    value, cert = cone_oracle.sector_energy_numeric(args.theta, spec)
    print("theta,R,bc,E,residual,status")
    print(
        f"{_fmt(args.theta)},{_fmt(args.R)},{args.bc},{_fmt(value)},"
        f"{_fmt(cert.residual)},{cert.status}"
    )
    return 0


def _cmd_oracle_delta_corner(args) -> int:
    spec = cone_oracle.TruncationSpec(radius=args.R, artificial_bc="neumann")
    run = cone_oracle.delta_corner_run(args.theta, spec)
    print("theta,R,bc,E,residual,status")
    print(
        f"{_fmt(args.theta)},{_fmt(args.R)},{run.bc},{_fmt(run.energy)},"
        f"{_fmt(run.residual)},{run.status}"
    )
    return 0


def _cmd_delta_solve(args) -> int:
    interface = geometry.load_polygon(args.interface)
    margin = _setting(args, "margin", float, None)
    tol = _setting(args, "tol", float, 1e-8)
    problem = delta.DeltaProblem(interface=interface, alpha=args.alpha, margin=margin)
    mesh = delta.build_delta_mesh(problem)
    result = delta.solve_delta(problem, mesh, tol=tol)
    print("alpha,lambda,residual,margin")
    print(
        ",".join(
            _fmt(v)
            for v in (args.alpha, result.eigenvalue, result.residual, problem.margin)
        )
    )
    return 0


def _cmd_ehrling(args) -> int:
    d = _parse_domain(args.domain)
    tol = _setting(args, "tol", float, 1e-8)
    res = applications.ehrling_constant(d, args.epsilon, tol=tol)
    print(
        json.dumps(
            {
                "epsilon": res.epsilon,
                "alpha": res.alpha,
                "eigenvalue": res.eigenvalue,
                "c_eps": res.c_eps,
                "limit_ratio": res.limit_ratio,
            },
            indent=2,
        )
    )
    return 0


def _cmd_tc(args) -> int:
    d = _parse_domain(args.domain)
    tol = _setting(args, "tol", float, 1e-8)
    res = applications.critical_temperature(d, args.tc0, args.xi0, args.b, tol=tol)
    print(
        json.dumps(
            {
                "t_c0": res.t_c0,
                "xi0": res.xi0,
                "b": res.b,
                "alpha": res.alpha,
                "eigenvalue": res.eigenvalue,
                "t_c": res.t_c,
            },
            indent=2,
        )
    )
    return 0


def _cmd_report(args) -> int:
    d = _parse_domain(args.domain)
    alphas = _parse_alphas(args.alphas) if args.alphas else asymptotics.DEFAULT_ALPHAS
    tol = _setting(args, "tol", float, 1e-8)

    table = asymptotics.sweep(d, alphas, tol=tol)
    fit = asymptotics.rate_fit(table)
    model = asymptotics.RateModel.polygon()
    envelope = asymptotics.envelope_check(table, model, fit)

    top_alpha = max(r.alpha for r in table.ok_rows) if table.ok_rows else None
    apps = {}
    if top_alpha:
        top = [r for r in table.ok_rows if r.alpha == top_alpha][0]
        ehr = applications.ehrling_from_eigenvalue(
            1.0 / top_alpha, top.eigenvalue, table.predicted_energy
        )
        tc = applications.tc_from_eigenvalue(1.0, 1.0, -1.0 / top_alpha, top.eigenvalue)
        apps = {
            "ehrling": {
                "epsilon": ehr.epsilon,
                "c_eps": ehr.c_eps,
                "limit_ratio": ehr.limit_ratio,
            },
            "critical_temperature": {
                "t_c0": tc.t_c0,
                "xi0": tc.xi0,
                "b": tc.b,
                "t_c": tc.t_c,
            },
        }

    doc = {
        "domain": _domain_dict(d),
        "energy": _energy_dict(d),
        "sweep": [
            {
                "alpha": r.alpha,
                "lambda": r.eigenvalue,
                "lambda_over_alpha2": r.lambda_over_alpha2,
                "remainder": table.remainder(r),
                "residual": r.residual,
                "nodes": r.nodes,
                "mesh_id": r.mesh_id,
                "status": r.status,
            }
            for r in table.rows
        ],
        "rate_fit": {
            "status": fit.status,
            "prefactor": fit.prefactor,
            "exponent": fit.exponent,
            "r_squared": fit.r_squared,
            "fitted_alphas": list(fit.fitted_alphas),
            "excluded_alphas": list(fit.excluded_alphas),
            "envelope_passed": envelope.passed,
        },
        "applications": apps,
    }
    text = json.dumps(doc, indent=2)
    print(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    if args.csv:
        table.write_csv(args.csv)
    if args.svg:
        _sweep_svg(table, envelope, args.svg)
    return 1 if table.failed_rows else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robincorner",
        description="Corner-dominated Robin and delta-interaction eigenvalue toolkit",
    )
    parser.add_argument("--config", help="key = value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        return p

    p = add("energy", _cmd_energy, help="predicted leading-order energy")
    p.add_argument("--domain", required=True)

    p = add("mesh", _cmd_mesh, help="build and inspect a graded mesh")
    p.add_argument("--domain", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--output")

    p = add("solve", _cmd_solve, help="one Robin eigensolve")
    p.add_argument("--domain", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--tol", type=float)

    p = add("sweep", _cmd_sweep, help="alpha sweep with remainder table")
    p.add_argument("--domain", required=True)
    p.add_argument("--alphas")
    p.add_argument("--tol", type=float)
    p.add_argument("--output")
    p.add_argument("--svg")

    p = add("oracle-sector", _cmd_oracle_sector, help="truncated sector energy")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--R", type=float, default=16.0)
    p.add_argument("--bc", choices=("dirichlet", "neumann"), default="dirichlet")

    p = add(
        "oracle-delta-corner",
        _cmd_oracle_delta_corner,
        help="broken-line delta corner energy",
    )
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--R", type=float, default=16.0)

    p = add("delta-solve", _cmd_delta_solve, help="delta-interface eigensolve")
    p.add_argument("--interface", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--margin", type=float)
    p.add_argument("--tol", type=float)

    p = add("ehrling", _cmd_ehrling, help="best boundary-trace constant")
    p.add_argument("--domain", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--tol", type=float)

    p = add("tc", _cmd_tc, help="critical temperature shift")
    p.add_argument("--domain", required=True)
    p.add_argument("--tc0", type=float, required=True)
    p.add_argument("--xi0", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--tol", type=float)

    p = add("report", _cmd_report, help="full pipeline report bundle")
    p.add_argument("--domain", required=True)
    p.add_argument("--alphas")
    p.add_argument("--tol", type=float)
    p.add_argument("--json")
    p.add_argument("--csv")
    p.add_argument("--svg")

    return parser


def run_cli(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args._config = _load_config(args.config) if args.config else {}
        return args.fn(args)
    except (RobinCornerError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())

"""Spectral toolkit for corner-dominated Robin and delta eigenproblems.

The principal eigenvalue of the attractive Robin Laplacian on a corner
domain behaves like alpha^2 times the worst local cone energy; this
package computes those energies symbolically where closed forms exist,
numerically where they do not, and verifies the asymptotics with a graded
finite element pipeline.
"""

from .errors import (
    RobinCornerError,
    ValidationError,
    MeshError,
    ResourceError,
    AssemblyError,
    SolverError,
)
from .geometry import (
    Polygon,
    Corner,
    DomainSpec,
    ValidationReport,
    validate,
    require_valid,
    corner_openings,
    signed_area,
    area,
    perimeter,
    diameter,
    regular_polygon,
    disk_polygon,
    unit_square,
    lshape,
    load_polygon,
    save_polygon,
)
from .cone_energy import (
    ConeDescriptor2D,
    Cone3DSection,
    DomainEnergyReport,
    HALF_PLANE_ENERGY,
    LINE_DELTA_ENERGY,
    sector_energy,
    local_energy,
    second_energy_level,
    has_discrete_ground_state,
    domain_energy,
    essential_spectrum_bottom_3d,
)
from .mesher import (
    Mesh,
    MeshStats,
    GradingPolicy,
    triangulate,
    triangulate_regions,
    refine_uniform,
    refine_graded,
    mesh_stats,
    triangle_areas,
    audit,
    scale_mesh,
    mesh_fingerprint,
    save_mesh,
    load_mesh,
)
from .fem import (
    SpectralResult,
    assemble_stiffness,
    assemble_mass,
    assemble_boundary_mass,
    assemble_interface_mass,
    smallest_eig,
    rayleigh_quotient,
    corner_quasimode,
    default_shift,
)
from .bessel import (
    disk_robin_ground_energy,
    circle_delta_ground_energy,
    line_delta_energy,
    half_plane_energy,
)
from .cone_oracle import (
    TruncationSpec,
    SectorCertificate,
    DeltaCornerRun,
    sector_energy_numeric,
    delta_corner_energy_numeric,
    delta_corner_run,
    richardson_in_radius,
    sector_energy_ladder,
    build_sector_mesh,
    build_delta_disk_mesh,
    sector_fan_polygon,
    default_delta_spec,
)
from .delta import (
    DeltaProblem,
    DeltaEnergyPrediction,
    build_delta_mesh,
    solve_delta,
    delta_energy_prediction,
    required_margin,
    corner_energy_cached,
    seed_corner_cache,
    clear_corner_cache,
)
from .asymptotics import (
    RateModel,
    SweepRow,
    SweepTable,
    RateFit,
    EnvelopeReport,
    sweep,
    rate_fit,
    envelope_check,
    solve_domain,
    domain_mesh,
    polygon_sweep_mesh,
    disk_sweep_mesh,
    predicted_energy,
)
from .applications import (
    EhrlingResult,
    TcResult,
    ehrling_constant,
    ehrling_from_eigenvalue,
    critical_temperature,
    tc_from_eigenvalue,
)
from .cli import run_cli, main

__version__ = "0.1.0"

"""Delta-interface problems in a box: meshing, solving, and predictions."""

import math

import numpy as np
import pytest

from robincorner import (
    DeltaProblem,
    DomainSpec,
    MeshError,
    Polygon,
    ValidationError,
    assemble_interface_mass,
    assemble_mass,
    assemble_stiffness,
    audit,
    build_delta_mesh,
    circle_delta_ground_energy,
    clear_corner_cache,
    corner_energy_cached,
    corner_openings,
    delta_energy_prediction,
    disk_polygon,
    perimeter,
    required_margin,
    scale_mesh,
    seed_corner_cache,
    smallest_eig,
    solve_delta,
    unit_square,
)


@pytest.fixture(autouse=True)
def _isolated_corner_cache():
    clear_corner_cache()
    yield
    clear_corner_cache()


def test_required_margin_combines_decay_and_diameter():
    sq = unit_square()
    assert required_margin(sq, 8.0) == 0.5
    assert required_margin(sq, 100.0) == math.sqrt(2.0) / 4.0
    assert required_margin(sq, 0.0) == math.sqrt(2.0) / 4.0


def test_problem_derives_box_from_margin():
    sq = unit_square()
    p = DeltaProblem(interface=sq, alpha=8.0)
    assert p.margin == 0.5
    assert p.box == (-0.5, -0.5, 1.5, 1.5)
    p.check_margin()


def test_problem_accepts_explicit_box_and_derives_margin():
    p = DeltaProblem(interface=unit_square(), alpha=8.0, box=(-0.5, -0.75, 2.0, 1.5))
    assert p.margin == 0.5
    p.check_margin()
    tight = DeltaProblem(interface=unit_square(), alpha=8.0, box=(-0.25, -0.5, 1.5, 1.5))
    with pytest.raises(ValidationError):
        tight.check_margin()


def test_problem_rejects_bad_boxes_and_coupling():
    sq = unit_square()
    with pytest.raises(ValidationError):
        DeltaProblem(interface=sq, alpha=-1.0)
    with pytest.raises(ValidationError):
        DeltaProblem(interface=sq, alpha=2.0, box=(0.0, -1.0, 2.0, 2.0))
    with pytest.raises(ValidationError):
        DeltaProblem(interface=sq, alpha=2.0, box=(2.0, 2.0, -1.0, -1.0))
    with pytest.raises(ValidationError):
        DeltaProblem(interface=sq, alpha=2.0, box=((0.0, 0.0), (2.0, 2.0)))
    with pytest.raises(ValidationError):
        DeltaProblem(interface=sq, alpha=2.0, margin=0.0)


def test_non_star_shaped_interface_is_rejected():
    u_shape = Polygon(
        ((0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (3.0, 4.0), (3.0, 1.0), (1.0, 1.0), (1.0, 4.0), (0.0, 4.0))
    )
    p = DeltaProblem(interface=u_shape, alpha=2.0)
    with pytest.raises(MeshError):
        build_delta_mesh(p)


def test_delta_mesh_covers_interface_exactly():
    p = DeltaProblem(interface=unit_square(), alpha=4.0)
    mesh = build_delta_mesh(p)
    assert audit(mesh) == []
    e = mesh.nodes[mesh.interface_edges]
    total = np.linalg.norm(e[:, 1] - e[:, 0], axis=1).sum()
    assert total == pytest.approx(4.0, rel=1e-9)
    assert np.all(mesh.interface_weights == 1.0)
    # outer boundary covers the box
    xmin, ymin, xmax, ymax = p.box
    b = mesh.nodes[mesh.boundary_edges]
    blen = np.linalg.norm(b[:, 1] - b[:, 0], axis=1).sum()
    assert blen == pytest.approx(2.0 * (xmax - xmin) + 2.0 * (ymax - ymin), rel=1e-9)


def test_circle_interface_matches_bessel_reference():
    alpha = 4.0
    circle = disk_polygon(1.0, alpha=alpha)
    p = DeltaProblem(interface=circle, alpha=alpha, margin=1.0)
    mesh = build_delta_mesh(p)
    res = solve_delta(p, mesh)
    exact = circle_delta_ground_energy(alpha)
    assert abs(res.eigenvalue - exact) / abs(exact) <= 2e-2
    assert res.residual <= 1e-8


def test_square_interface_binds_below_line_threshold():
    alpha = 6.0
    p = DeltaProblem(interface=unit_square(), alpha=alpha)
    res = solve_delta(p, build_delta_mesh(p))
    assert res.eigenvalue <= -0.25 * alpha**2
    assert res.eigenvalue >= -0.5 * alpha**2


def test_margin_growth_barely_moves_the_eigenvalue():
    alpha = 6.0
    circle = disk_polygon(1.0, alpha=alpha)
    vals = []
    for margin in (1.0, 1.5):
        p = DeltaProblem(interface=circle, alpha=alpha, margin=margin)
        vals.append(solve_delta(p, build_delta_mesh(p)).eigenvalue)
    assert abs(vals[1] - vals[0]) / abs(vals[0]) <= 5e-3


def test_interface_scaling_law():
    alpha, t = 3.0, 2.0
    p = DeltaProblem(interface=unit_square(), alpha=alpha * t, margin=1.5)
    mesh = build_delta_mesh(p)
    K = assemble_stiffness(mesh)
    M = assemble_mass(mesh)
    Bi = assemble_interface_mass(mesh)
    lam = smallest_eig(K, Bi, M, alpha * t).eigenvalue
    scaled = scale_mesh(mesh, t)
    lam_scaled = smallest_eig(
        assemble_stiffness(scaled),
        assemble_interface_mass(scaled),
        assemble_mass(scaled),
        alpha,
    ).eigenvalue
    assert lam_scaled == pytest.approx(lam / t**2, rel=1e-10)


def test_delta_eigenvalue_nonincreasing_in_alpha():
    p = DeltaProblem(interface=unit_square(), alpha=2.0, margin=2.0)
    mesh = build_delta_mesh(p)
    K = assemble_stiffness(mesh)
    M = assemble_mass(mesh)
    Bi = assemble_interface_mass(mesh)
    vals = [smallest_eig(K, Bi, M, a).eigenvalue for a in (2.0, 4.0, 6.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_alpha_zero_delta_is_neumann_box():
    p = DeltaProblem(interface=unit_square(), alpha=0.0)
    res = solve_delta(p, build_delta_mesh(p))
    assert abs(res.eigenvalue) <= 1e-12
    u = res.eigenvector / np.linalg.norm(res.eigenvector)
    assert np.max(np.abs(u - u.mean())) <= 1e-8


def test_corner_cache_hit_skips_the_oracle():
    seed_corner_cache({math.pi / 2.0: (-0.2653, "below-threshold")})
    assert corner_energy_cached(math.pi / 2.0) == (-0.2653, "below-threshold")
    # the complementary opening is the same broken line
    assert corner_energy_cached(3.0 * math.pi / 2.0) == (-0.2653, "below-threshold")


def test_prediction_for_seeded_square():
    seed_corner_cache({math.pi / 2.0: (-0.2653, "below-threshold")})
    pred = delta_energy_prediction(unit_square())
    assert pred.energy == -0.2653
    assert not pred.flagged
    assert pred.error_bar == 0.0
    assert len(pred.per_corner) == 4
    for index, opening, energy, status in pred.per_corner:
        assert opening == math.pi / 2.0
        assert energy == -0.2653
        assert status == "below-threshold"


def test_prediction_for_round_disk_is_line_value():
    pred = delta_energy_prediction(DomainSpec.disk(2.0))
    assert pred.energy == -0.25
    assert pred.error_bar == 0.0
    assert not pred.flagged
    assert pred.per_corner == ()


def test_prediction_flags_at_threshold_corners():
    tri = Polygon(((0.0, 0.0), (2.0, 0.0), (1.0, 6.0)))
    openings = [c.opening for c in corner_openings(tri)]
    seed_corner_cache(
        {
            openings[0]: (-0.26, "at-threshold"),
            openings[1]: (-0.26, "at-threshold"),
            openings[2]: (-0.40, "below-threshold"),
        }
    )
    pred = delta_energy_prediction(tri)
    assert pred.energy == -0.40
    assert pred.flagged
    assert pred.error_bar > 0.0

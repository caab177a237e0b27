"""Symbolic corner-energy calculus.

The second-level values are checked against a brute-force enumerator of the
finite cone-coarsening graph, written here independently of the library: a
sector flattens to a half-plane (at either arm) or to the full plane (at an
interior boundary point); a half-plane flattens to the full plane; the full
plane has nothing coarser.  The second level is the minimum ground energy
among the strictly coarser cones.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robincorner import (
    Cone3DSection,
    ConeDescriptor2D,
    DomainSpec,
    Polygon,
    ValidationError,
    domain_energy,
    essential_spectrum_bottom_3d,
    has_discrete_ground_state,
    local_energy,
    lshape,
    second_energy_level,
    sector_energy,
    unit_square,
)

# ground energies of the three cone kinds from first principles: the
# half-plane value is the 1-D problem -u'' with u'(0) = -u(0), solved by
# e^{-x} at energy -1; the full plane has no boundary term.
_GROUND = {"full_plane": 0.0, "half_plane": -1.0}


def _coarser(kind):
    if kind == "sector":
        return ("half_plane", "half_plane", "full_plane")
    if kind == "half_plane":
        return ("full_plane",)
    return ()


def _second_level_oracle(kind):
    succ = _coarser(kind)
    if not succ:
        return 0.0
    return min(_GROUND[k] for k in succ)


def test_second_level_matches_chain_enumeration():
    assert second_energy_level(ConeDescriptor2D.half_plane()) == _second_level_oracle("half_plane")
    assert second_energy_level(ConeDescriptor2D.full_plane()) == _second_level_oracle("full_plane")
    for theta in (0.3, math.pi / 2.0, 2.9, 3.5, 3.0 * math.pi / 2.0, 6.0):
        got = second_energy_level(ConeDescriptor2D.sector(theta))
        assert got == _second_level_oracle("sector") == -1.0


def test_sector_energy_closed_form_values_are_exact():
    assert sector_energy(math.pi / 2.0) == -2.0
    assert sector_energy(math.pi / 3.0) == -4.0
    assert sector_energy(2.0 * math.pi / 3.0) == -4.0 / 3.0
    assert sector_energy(3.0 * math.pi / 2.0) == -1.0
    assert sector_energy(5.0) == -1.0


def test_sector_energy_generic_angle_matches_formula():
    for theta in (0.7, 1.3, 2.2, 3.0):
        s = math.sin(0.5 * theta)
        assert sector_energy(theta) == pytest.approx(-1.0 / s**2, rel=1e-14)


def test_sector_energy_domain_errors():
    for theta in (0.0, -1.0, math.pi, 2.0 * math.pi, 7.0):
        with pytest.raises(ValidationError):
            sector_energy(theta)


def test_sector_energy_increasing_on_convex_range():
    grid = np.linspace(0.1, math.pi - 0.01, 200)
    vals = [sector_energy(t) for t in grid]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_sector_energy_continuous_at_straight_limit():
    assert sector_energy(math.pi - 1e-6) == pytest.approx(-1.0, abs=1e-9)
    assert sector_energy(math.pi + 1e-6) == -1.0


def test_local_energy_by_kind():
    assert local_energy(ConeDescriptor2D.full_plane()) == 0.0
    assert local_energy(ConeDescriptor2D.half_plane()) == -1.0
    assert local_energy(ConeDescriptor2D.sector(math.pi / 2.0)) == -2.0


def test_discrete_ground_state_iff_convex_sector_or_half_plane():
    assert has_discrete_ground_state(ConeDescriptor2D.half_plane())
    assert not has_discrete_ground_state(ConeDescriptor2D.full_plane())
    for theta in (0.4, 1.5, 3.0):
        assert has_discrete_ground_state(ConeDescriptor2D.sector(theta))
    for theta in (3.2, 4.5, 6.0):
        assert not has_discrete_ground_state(ConeDescriptor2D.sector(theta))


@given(st.floats(0.01, 2.0 * math.pi - 0.01))
def test_chain_monotonicity(theta):
    if abs(theta - math.pi) < 1e-6:
        return
    c = ConeDescriptor2D.sector(theta)
    assert local_energy(c) <= second_energy_level(c) <= 0.0


def test_domain_energy_square_is_exactly_minus_two():
    report = domain_energy(DomainSpec.from_polygon(unit_square()))
    assert report.energy == -2.0
    assert report.minimizer_kind == "corner"
    assert report.minimizer_index in range(4)
    assert len(report.per_corner) == 4
    assert all(v == -2.0 for _, v in report.per_corner)


def test_domain_energy_lshape_ignores_reflex_corner():
    report = domain_energy(DomainSpec.from_polygon(lshape()))
    assert report.energy == -2.0
    assert report.minimizer_kind == "corner"
    reflex = [v for c, v in report.per_corner if c.opening > math.pi]
    assert reflex == [-1.0]


def test_domain_energy_disk():
    report = domain_energy(DomainSpec.disk(3.0))
    assert report.energy == -1.0
    assert report.minimizer_kind == "regular_boundary"
    assert report.per_corner == ()


def test_domain_energy_weighted_edge_can_beat_corners():
    p = Polygon(
        ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)),
        edge_weights=(2.0, 1.0, 1.0, 1.0),
    )
    report = domain_energy(DomainSpec.from_polygon(p))
    assert report.energy == -4.0
    assert report.minimizer_kind == "regular_boundary"


def test_domain_energy_weighted_corner_uses_min_adjacent_weight():
    # corner k joins edges k-1 and k; its value is min(w, w')^2 * (-2);
    # the deepest corner is the one whose *smaller* adjacent weight is largest
    p = Polygon(
        ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)),
        edge_weights=(1.2, 1.3, 1.4, 1.2),
    )
    report = domain_energy(DomainSpec.from_polygon(p))
    values = [float(v) for _, v in report.per_corner]
    assert values == [
        1.2 * 1.2 * -2.0,
        1.2 * 1.2 * -2.0,
        1.3 * 1.3 * -2.0,
        1.2 * 1.2 * -2.0,
    ]
    assert report.energy == 1.3 * 1.3 * -2.0
    assert report.minimizer_kind == "corner"
    assert report.minimizer_index == 2


def test_domain_energy_agrees_with_feature_scan():
    p = Polygon(
        ((0.0, 0.0), (2.0, 0.0), (2.5, 1.5), (0.5, 2.5)),
        edge_weights=(0.8, 1.1, 0.9, 1.3),
    )
    report = domain_energy(DomainSpec.from_polygon(p))
    w = p.weights()
    n = len(w)
    edge_vals = [-float(wi) ** 2 for wi in w]
    corner_vals = [float(v) for _, v in report.per_corner]
    assert report.energy == min(edge_vals + corner_vals)


@given(st.floats(0.1, 10.0))
def test_domain_energy_is_scaling_neutral(t):
    base = Polygon(((0.0, 0.0), (2.0, 0.0), (1.3, 1.7)))
    scaled = Polygon(base.vertices * t)
    e0 = domain_energy(DomainSpec.from_polygon(base)).energy
    e1 = domain_energy(DomainSpec.from_polygon(scaled)).energy
    assert e1 == pytest.approx(e0, rel=1e-11)


def test_domain_energy_unweighted_never_above_half_plane():
    for p in (unit_square(), lshape(), Polygon(((0.0, 0.0), (3.0, 0.0), (0.5, 0.4)))):
        assert domain_energy(DomainSpec.from_polygon(p)).energy <= -1.0


def test_essential_spectrum_bottom_3d_exact_values():
    assert essential_spectrum_bottom_3d(Cone3DSection.smooth()) == -1.0
    assert essential_spectrum_bottom_3d(Cone3DSection.spherical_polygon((math.pi / 2.0,))) == -2.0
    assert essential_spectrum_bottom_3d(Cone3DSection.spherical_polygon((3.0 * math.pi / 2.0,))) == -1.0


def test_essential_spectrum_bottom_3d_matches_vertex_scan():
    openings = (2.0 * math.pi / 3.0,) * 3
    got = essential_spectrum_bottom_3d(Cone3DSection.spherical_polygon(openings))
    brute = min([-1.0] + [sector_energy(t) for t in openings])
    assert got == brute == -4.0 / 3.0


def test_cone_and_section_validation():
    with pytest.raises(ValidationError):
        ConeDescriptor2D.sector(math.pi)
    with pytest.raises(ValidationError):
        Cone3DSection.spherical_polygon(())
    with pytest.raises(ValidationError):
        Cone3DSection.spherical_polygon((math.pi,))
    with pytest.raises(ValidationError):
        Cone3DSection.spherical_polygon((0.0,))

"""Alpha sweeps, remainder rate fits, and envelope verification."""

import math

import pytest

from robincorner import (
    DomainSpec,
    RateFit,
    RateModel,
    SweepRow,
    SweepTable,
    ValidationError,
    domain_mesh,
    envelope_check,
    predicted_energy,
    rate_fit,
    solve_domain,
    sweep,
    unit_square,
)


def _row(alpha, lam, residual=1e-12):
    return SweepRow(alpha=alpha, eigenvalue=lam, residual=residual, mesh_id="m", nodes=10)


def _table(law, alphas=(4.0, 8.0, 16.0, 32.0), energy=-2.0, residual=1e-12):
    rows = tuple(_row(a, law(a), residual) for a in alphas)
    return SweepTable(rows=rows, predicted_energy=energy)


def test_polygon_rate_model_exponents():
    m = RateModel.polygon()
    assert m.upper_exponent == 2.0 - 2.0 / 3.0
    assert m.lower_exponent == 2.0 - 2.0 / 3.0
    rich = RateModel(nu_bar=1, nu_bar_plus=2)
    assert rich.upper_exponent == pytest.approx(2.0 - 2.0 / 5.0)
    assert rich.lower_exponent == pytest.approx(2.0 - 2.0 / 7.0)


def test_rate_model_rejects_bad_indices():
    with pytest.raises(ValidationError):
        RateModel(nu_bar=2, nu_bar_plus=1)
    with pytest.raises(ValidationError):
        RateModel(nu_bar=-1, nu_bar_plus=0)


def test_sweep_table_requires_increasing_alphas():
    rows = (_row(4.0, -32.0), _row(4.0, -32.0))
    with pytest.raises(ValidationError):
        SweepTable(rows=rows, predicted_energy=-2.0)
    with pytest.raises(ValidationError):
        SweepTable(rows=(_row(8.0, -128.0), _row(4.0, -32.0)), predicted_energy=-2.0)


def test_remainder_is_signed_difference_from_model():
    t = _table(lambda a: -2.0 * a * a + a)
    for r in t.rows:
        assert t.remainder(r) == pytest.approx(r.alpha, rel=1e-12)
    below = _table(lambda a: -2.0 * a * a - a)
    assert below.remainder(below.rows[0]) == pytest.approx(-4.0, rel=1e-12)


def test_rate_fit_recovers_linear_remainder_exactly():
    fit = rate_fit(_table(lambda a: -2.0 * a * a + a))
    assert fit.status == "fitted"
    assert fit.prefactor == pytest.approx(1.0, rel=1e-10)
    assert fit.exponent == pytest.approx(1.0, rel=1e-10)
    assert fit.r_squared >= 1.0 - 1e-12
    assert fit.fitted_alphas == (4.0, 8.0, 16.0, 32.0)
    assert fit.excluded_alphas == ()


def test_rate_fit_recovers_four_thirds_remainder():
    fit = rate_fit(_table(lambda a: -2.0 * a * a + 3.0 * a ** (4.0 / 3.0)))
    assert fit.status == "fitted"
    assert fit.prefactor == pytest.approx(3.0, rel=1e-10)
    assert fit.exponent == pytest.approx(4.0 / 3.0, rel=1e-10)
    assert fit.r_squared >= 1.0 - 1e-12


def test_rate_fit_excludes_rows_under_the_noise_floor():
    rows = [_row(a, -2.0 * a * a + a) for a in (4.0, 8.0, 16.0, 32.0)]
    # remainder 4 sits below the floor 10 * 1.0
    rows[0] = _row(4.0, -2.0 * 16.0 + 4.0, residual=1.0)
    t = SweepTable(rows=tuple(rows), predicted_energy=-2.0)
    fit = rate_fit(t)
    assert fit.status == "fitted"
    assert fit.fitted_alphas == (8.0, 16.0, 32.0)
    assert fit.excluded_alphas == (4.0,)
    assert fit.noise_floor[0] == pytest.approx(10.0)


def test_all_rows_floored_reports_resolution_success():
    t = _table(lambda a: -2.0 * a * a + a, residual=100.0)
    fit = rate_fit(t)
    assert fit.status == "remainder-below-resolution"
    assert math.isnan(fit.prefactor)
    assert math.isnan(fit.exponent)
    assert fit.fitted_alphas == ()
    assert fit.excluded_alphas == (4.0, 8.0, 16.0, 32.0)
    env = envelope_check(t, RateModel.polygon(), fit)
    assert env.passed
    assert env.rows[0].bound == pytest.approx(2.0 * 10.0 * 100.0)


def test_envelope_flags_a_too_small_prefactor():
    t = _table(lambda a: -2.0 * a * a + a)
    fit = rate_fit(t)
    good = envelope_check(t, RateModel.polygon(), fit)
    assert good.passed
    assert all(r.margin > 1.0 for r in good.rows)
    starved = RateFit(
        status="fitted",
        prefactor=1e-3,
        exponent=4.0 / 3.0,
        r_squared=1.0,
        fitted_alphas=(4.0, 8.0, 16.0, 32.0),
        excluded_alphas=(),
        noise_floor=(0.0, 0.0, 0.0, 0.0),
    )
    bad = envelope_check(t, RateModel.polygon(), starved)
    assert not bad.passed
    assert all(not r.ok for r in bad.rows)


def test_rate_fit_needs_three_successful_rows():
    t = SweepTable(
        rows=(_row(4.0, -32.0), _row(8.0, -128.0)), predicted_energy=-2.0
    )
    with pytest.raises(ValidationError):
        rate_fit(t)
    bad_energy = _table(lambda a: -2.0 * a * a + a, energy=math.nan)
    with pytest.raises(ValidationError):
        rate_fit(bad_energy)


def test_sweep_rejects_nonpositive_alphas():
    d = DomainSpec.from_polygon(unit_square())
    with pytest.raises(ValidationError):
        sweep(d, alphas=(0.0, 4.0))
    with pytest.raises(ValidationError):
        sweep(d, alphas=(-2.0,))


def test_empty_sweep_is_an_empty_table():
    d = DomainSpec.from_polygon(unit_square())
    t = sweep(d, alphas=())
    assert t.rows == ()
    assert t.predicted_energy == -2.0


def test_small_square_sweep_rows_and_determinism():
    d = DomainSpec.from_polygon(unit_square())
    t = sweep(d, alphas=(2.0, 4.0), estimate_discretization=False)
    assert len(t.ok_rows) == 2
    assert t.disc_estimate == 0.0
    for r in t.rows:
        assert r.status == "ok"
        assert r.nodes > 0
        assert r.mesh_id
        assert r.residual <= 1e-8
        assert r.eigenvalue < 0.0
    gaps = [abs(r.lambda_over_alpha2 + 2.0) for r in t.rows]
    assert gaps[1] < gaps[0]
    again = sweep(d, alphas=(2.0, 4.0), estimate_discretization=False)
    assert again.to_csv() == t.to_csv()


def test_sweep_is_thread_count_invariant(monkeypatch):
    d = DomainSpec.from_polygon(unit_square())
    monkeypatch.setenv("ROBIN_CORNER_THREADS", "1")
    serial = sweep(d, alphas=(2.0, 4.0), estimate_discretization=False)
    monkeypatch.setenv("ROBIN_CORNER_THREADS", "4")
    parallel = sweep(d, alphas=(2.0, 4.0), estimate_discretization=False)
    assert serial.to_csv() == parallel.to_csv()


def test_sweep_thread_env_must_be_positive(monkeypatch):
    d = DomainSpec.from_polygon(unit_square())
    monkeypatch.setenv("ROBIN_CORNER_THREADS", "0")
    with pytest.raises(ValidationError):
        sweep(d, alphas=(2.0,), estimate_discretization=False)


def test_starved_node_budget_fails_rows_without_aborting(tmp_path):
    d = DomainSpec.from_polygon(unit_square())
    t = sweep(d, alphas=(4.0, 8.0, 16.0), estimate_discretization=False, node_budget=500)
    assert len(t.failed_rows) == 3
    for r in t.failed_rows:
        assert r.status == "failed"
        assert "budget" in r.message
        assert math.isnan(r.eigenvalue)
    with pytest.raises(ValidationError):
        rate_fit(t)
    out = tmp_path / "partial.csv"
    t.write_csv(out)
    assert out.read_text().splitlines() == [
        "alpha,lambda,lambda_over_alpha2,remainder,residual,nodes"
    ]


def test_solve_domain_reuses_a_provided_mesh_bitwise():
    d = DomainSpec.from_polygon(unit_square())
    mesh = domain_mesh(d, 4.0)
    first, m1 = solve_domain(d, 4.0, mesh=mesh)
    second, m2 = solve_domain(d, 4.0, mesh=mesh)
    assert m1 is mesh and m2 is mesh
    assert first.eigenvalue == second.eigenvalue


def test_predicted_energy_matches_corner_rule():
    assert predicted_energy(DomainSpec.from_polygon(unit_square())) == -2.0
    assert predicted_energy(DomainSpec.disk(1.0)) == -1.0


def test_csv_layout_round_trips_through_floats():
    t = _table(lambda a: -2.0 * a * a + a)
    lines = t.to_csv().splitlines()
    assert lines[0] == "alpha,lambda,lambda_over_alpha2,remainder,residual,nodes"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert float(first[0]) == 4.0
    assert float(first[1]) == -28.0
    assert float(first[3]) == 4.0
    assert int(first[5]) == 10

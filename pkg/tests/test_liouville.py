import math

import numpy as np
import pytest

from fraccert.errors import ConfigurationError, DomainError
from fraccert.liouville import (AnnulusSampler, CandidateFamily, MemberVerdict,
                                annulus_inf, default_r_grid, nonexistence_scan,
                                power_symbol, proof_quantity_trace,
                                supersolution_residual, verify_growth_bounds)
from fraccert.params import FracParams
from fraccert.profiles import RadialProfile, SignVariant, make_fundamental

P3 = FracParams(3, 0.5)
P1 = FracParams(1, 0.75)

PHI3 = make_fundamental(P3)                      # decaying power
PHI1_GROWN = make_fundamental(P1, SignVariant.NEGATED)  # growing power


def test_annulus_infimum_on_monotone_profiles():
    # increasing profiles attain the infimum at the inner radius, decreasing at the outer
    assert annulus_inf(PHI1_GROWN, 9.0) == pytest.approx(9.0**0.5, rel=1e-12)
    assert annulus_inf(PHI3, 9.0) == pytest.approx(18.0**-2.0, rel=1e-12)
    assert annulus_inf(lambda rho: 3.0 * np.ones_like(np.asarray(rho)), 5.0) == pytest.approx(3.0)


def test_annulus_ratio_matches_power_scaling():
    m1 = annulus_inf(PHI3, 7.0)
    m2 = annulus_inf(PHI3, 14.0)
    assert m2 / m1 == pytest.approx(2.0**P3.sigma_star, rel=1e-12)


def test_growth_bounds_exact_power():
    grid = list(np.geomspace(2.0, 2000.0, 8))
    rep = verify_growth_bounds(PHI1_GROWN, "SUP_GT_HALF", grid, P1)
    assert rep.passed
    assert rep.slope == pytest.approx(P1.sigma_star, abs=1e-9)
    assert rep.upper_constant == pytest.approx(1.0, rel=1e-9)


def test_growth_bounds_bounded_profile():
    one_plus = lambda rho: 1.0 + np.asarray(rho, dtype=float) ** -2.0
    rep = verify_growth_bounds(one_plus, "SUB", list(np.geomspace(2.0, 2000.0, 8)), P3)
    assert rep.passed


def test_growth_bounds_log_envelope():
    grown_log = lambda rho: 1.0 + np.log(np.asarray(rho, dtype=float))
    rep = verify_growth_bounds(grown_log, "SUP_HALF", list(np.geomspace(3.0, 3000.0, 8)),
                               FracParams(1, 0.5))
    assert rep.passed


def test_growth_bounds_on_radially_extended_discrete_solution():
    # a solver-produced positive profile, read radially, passes its envelope
    from fraccert.dirichlet import GridProblem, solve_dirichlet
    params = FracParams(1, 0.75)
    sol = solve_dirichlet(GridProblem(((-1.0, 1.0),), 1 / 128, params, 1.0))
    right = sol.nodes > 0
    nodes, values = sol.nodes[right], sol.values[right]
    radial = lambda rho: np.interp(np.asarray(rho, dtype=float), nodes, values)
    grid = list(np.geomspace(0.0025, 0.25, 8))
    rep = verify_growth_bounds(radial, "SUP_GT_HALF", grid, params,
                               AnnulusSampler(points=100))
    assert rep.passed, rep.notes


def test_growth_bounds_input_validation():
    with pytest.raises(ConfigurationError):
        verify_growth_bounds(PHI3, "SUB", [10.0, 20.0, 40.0], P3)  # too narrow
    with pytest.raises(DomainError):
        verify_growth_bounds(lambda rho: -np.ones_like(np.asarray(rho)), "SUB",
                             list(np.geomspace(2.0, 2000.0, 8)), P3)


def test_power_symbol_matches_gamma_closed_form():
    # lambda(1/2) for n=3, s=1/2 equals 1/2 exactly by the Gamma functional equation
    lam = power_symbol(0.5, P3)
    g = math.gamma
    exact = 2.0 * g(0.75) * g(1.25) / (g(0.25) * g(0.75))
    assert lam == pytest.approx(exact, abs=1e-8)
    assert lam == pytest.approx(0.5, abs=1e-8)
    # the fundamental exponent is annihilated
    assert power_symbol(P3.n - 2 * P3.s, P3) == pytest.approx(0.0, abs=1e-8)


def test_residual_of_fundamental_with_zero_forcing():
    rep = supersolution_residual(PHI3, lambda t, x: 0.0, (10.0, 1e4), P3)
    assert abs(rep.min_residual) <= 1e-8
    assert not rep.failed  # never provably negative


def test_residual_with_subcritical_forcing_fails_everywhere():
    rep = supersolution_residual(PHI3, lambda t, x: t**1.4, (10.0, 1e4), P3)
    assert rep.failed and not rep.certified
    # the operator term vanishes, so the residual is minus the forcing
    r, res, _ = min(rep.samples, key=lambda row: row[0])
    u_val = float(PHI3(r))
    assert res == pytest.approx(-(u_val**1.4), rel=1e-4)


def test_supercritical_control_member_certifies():
    p = 3.0
    tau = 2 * P3.s / (p - 1.0)
    lam = power_symbol(tau, P3)
    eps = (0.5 * lam) ** (1.0 / (p - 1.0))
    control = RadialProfile((), (((eps, -tau, False),),))
    rep = supersolution_residual(control, lambda t, x: t**p, (10.0, 1e4), P3)
    assert rep.certified, rep


def test_scan_subcritical_certifies_nothing():
    fam = CandidateFamily(c_values=tuple(np.geomspace(0.1, 10, 4)),
                          beta_values=tuple(np.linspace(0.1, 6, 4)))
    scan = nonexistence_scan(fam, lambda t, x: t**1.4, P3, (10.0, 1e4), points=15)
    assert scan.certified == 0
    assert scan.failed == fam.size()


def test_scan_supercritical_control_is_found():
    fam = CandidateFamily(c_values=(1.0,), beta_values=(2.0,),
                          include_control=True, control_power=3.0)
    scan = nonexistence_scan(fam, lambda t, x: t**3.0, P3, (10.0, 1e4), points=15)
    assert scan.certified >= 1
    labels = {label: verdict for label, verdict, *_ in scan.members}
    control_label = next(l for l in labels if l.startswith("control"))
    assert labels[control_label] == MemberVerdict.SUPERSOLUTION


def test_scan_never_certifies_a_growth_bound_failure():
    # cross-report consistency: a certified member in the n > 2s regime with a
    # forcing passing the small-argument mass check must also sit inside the
    # growth envelope; scan members that fail growth may never be certified
    fam = CandidateFamily(c_values=(0.5, 2.0), beta_values=(0.5, 2.0, 5.0))
    scan = nonexistence_scan(fam, lambda t, x: t**1.4, P3, (10.0, 1e4), points=12)
    certified = {label for label, verdict, *_ in scan.members
                 if verdict == MemberVerdict.SUPERSOLUTION}
    assert not certified


def test_scan_bounded_family_decreasing_forcing_line_case():
    # n = 1, s = 3/4 with the inverse-square forcing: every bounded candidate
    # hits a huge forcing where it decays, so nothing certifies
    params = FracParams(1, 0.75)
    fam = CandidateFamily(c_values=(0.5, 1.0, 2.0), beta_values=(0.5, 1.5, 3.0))
    scan = nonexistence_scan(fam, lambda t, x: t**-2.0, params, (10.0, 1e4), points=12)
    assert scan.certified == 0


def test_empty_family_rejected():
    fam = CandidateFamily(c_values=(), beta_values=())
    with pytest.raises(ConfigurationError):
        nonexistence_scan(fam, lambda t, x: t**1.4, P3, (10.0, 1e4))


def test_trace_flags_contradiction_for_subcritical_forcing():
    grid = default_r_grid(1.0, per_decade=4, decades=2.5)
    rep = proof_quantity_trace(PHI3, lambda t, x: t**1.4, P3, grid)
    assert rep.contradiction_radius is not None
    assert math.isfinite(rep.contradiction_radius)


def test_trace_never_flags_without_forcing():
    grid = default_r_grid(1.0, per_decade=4, decades=2.5)
    rep = proof_quantity_trace(PHI3, None, P3, grid)
    assert rep.contradiction_radius is None
    assert all(row.forcing_lower == 0.0 for row in rep.rows)


def test_trace_reports_barrier_and_exterior_ratios():
    grid = default_r_grid(1.0, per_decade=3, decades=1.5)
    rep3 = proof_quantity_trace(PHI3, None, P3, grid)
    assert all(row.rho_ratio is not None and row.rho_ratio > 0.0 for row in rep3.rows)
    rep1 = proof_quantity_trace(PHI1_GROWN, None, P1, grid)
    etas = [row.eta_ratio for row in rep1.rows]
    assert all(e is not None and e > 0.0 for e in etas)
    # the exterior ratio stays of one scale; constancy itself is not assumed
    assert max(etas) <= 4.0 * min(etas)


def test_trace_rejects_nonpositive_profiles():
    grid = default_r_grid(1.0, per_decade=3, decades=1.0)
    with pytest.raises(DomainError):
        proof_quantity_trace(lambda rho: np.cos(np.asarray(rho)), None, P3, grid)


def test_sampler_covers_the_annulus():
    radii = AnnulusSampler(points=100).radii(5.0)
    assert radii.min() >= 5.0 and radii.max() <= 10.0 + 1e-12

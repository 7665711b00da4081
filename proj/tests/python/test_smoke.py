import math

import pytest

import stirlab


def third_profile():
    return stirlab.ProfileGrid.constant(2, [1.0 / 3.0, 1.0 / 3.0], 8)


def test_simulation_conserves_counts():
    gamma = third_profile()
    initial = stirlab.sample_product_multinomial(gamma, 32, 7)
    params = stirlab.SimParams()
    params.n_sites = 32
    params.t_end = 0.1
    params.seed = 7
    log = stirlab.simulate(initial, stirlab.PotentialSet.zero(2, 0.1), params)
    final = stirlab.config_at(initial, log, 0.1)
    assert final.counts == initial.counts
    times = [e.t for e in log.events]
    assert times == sorted(times)


def test_simulation_is_reproducible():
    gamma = third_profile()
    initial = stirlab.sample_product_multinomial(gamma, 16, 3)
    params = stirlab.SimParams()
    params.n_sites = 16
    params.t_end = 0.05
    params.seed = 3
    pot = stirlab.PotentialSet.sample(
        2, 16, 1, 0.05, lambda a, u, t: 0.3 * math.sin(2.0 * math.pi * u)
    )
    a = stirlab.simulate(initial, pot, params)
    b = stirlab.simulate(initial, pot, params)
    assert [(e.t, e.bond) for e in a.events] == [(e.t, e.bond) for e in b.events]


def test_einstein_relation():
    assert stirlab.einstein_residual([1.0 / 3.0, 1.0 / 3.0]) < 1e-12
    assert stirlab.einstein_residual([0.7, 0.1]) < 1e-12
    chi = stirlab.mobility([1.0 / 3.0, 1.0 / 3.0])
    assert chi[0] == pytest.approx(2.0 / 9.0)
    assert chi[1] == pytest.approx(-1.0 / 9.0)


def test_hydro_solver_mass_conservation():
    gamma = third_profile()
    scheme = stirlab.SchemeParams()
    scheme.space_cells = 32
    scheme.time_slices = 9
    scheme.t_end = 0.01
    rho = stirlab.solve_hydro(gamma, stirlab.PotentialSet.zero(2, 0.01), scheme)
    m0 = rho.spatial_mean(0, 1)
    for k in range(rho.k_slices):
        assert abs(rho.spatial_mean(k, 1) - m0) < 1e-12
    assert rho.simplex_violation() <= 1e-8


def test_girsanov_forms_agree():
    gamma = third_profile()
    pot = stirlab.PotentialSet.sample(
        2, 16, 5, 0.05,
        lambda a, u, t: (0.4 if a == 1 else -0.3) * math.sin(2.0 * math.pi * u)
        * math.cos(t),
    )
    initial = stirlab.sample_product_multinomial(gamma, 16, 11)
    params = stirlab.SimParams()
    params.n_sites = 16
    params.t_end = 0.05
    params.seed = 11
    params.thinning_margin = 1.1
    log = stirlab.simulate(initial, pot, params)
    w = stirlab.girsanov_weight(initial, log, pot)
    assert w.log_rn_event == pytest.approx(w.log_rn_martingale, abs=1e-9)


def test_rate_functional_on_heat_flow():
    gamma = third_profile()
    scheme = stirlab.SchemeParams()
    scheme.space_cells = 32
    scheme.time_slices = 65
    scheme.t_end = 0.02
    rho = stirlab.solve_hydro(gamma, stirlab.PotentialSet.zero(2, 0.02), scheme)
    result = stirlab.riesz_solve(rho)
    assert stirlab.dynamic_cost(rho, result.h) < 1e-6
    ev = stirlab.evaluate_rate(rho, gamma)
    assert ev.h < 1e-12
    assert ev.variational_lb <= ev.i0 + 1e-6


def test_ensemble_oracles():
    phi = stirlab.LocalObservable.indicator(2, [1, 1])
    gap10 = stirlab.equivalence_gap(phi, 10)
    assert gap10 == pytest.approx(abs(5 * 4 / 90.0 - 0.25), abs=1e-12)
    assert stirlab.equivalence_gap(phi, 50) < gap10
    spec = stirlab.CanonicalSpec(3, [1, 1])
    cfg = stirlab.Configuration(2, [1, 2, 0])
    assert stirlab.canonical_probability(spec, cfg) == pytest.approx(1.0 / 6.0)
    assert stirlab.tilde_phi(phi, [1.0 / 3.0, 1.0 / 3.0]) == pytest.approx(1.0 / 9.0)

import math

import numpy as np
import pytest

from phasespeed import (Bound, DominanceViolation, MoyalOrder, OverlapSeries, PhaseGrid,
                        PurityError, UnitsSpec, classical_gaussian, csl_generator_norms,
                        gaussian_wigner, ho_wigner, quadratic_hamiltonian, tau_bound, v_csl,
                        v_csl_timeavg, v_qsl, v_ssl, verify_rate_dominance)
from phasespeed.bounds import purity, running_average
from phasespeed.dynamics import state_grid
from phasespeed.oracles import gaussian_vcsl_free


def matched_setup(units, n=256):
    spec = units.matched_gaussian()
    g = state_grid(units, spec.sigma_q, spec.sigma_p, n=n)
    return spec, g, quadratic_hamiltonian(units, 0.0, g)


def test_three_velocities_coincide_for_ground_state(units):
    spec, g, h = matched_setup(units)
    w = ho_wigner(0, units, g)
    vq = v_qsl(h, w, MoyalOrder.HBAR_SQUARED, units)
    assert vq == pytest.approx(0.5, rel=1e-4)
    assert v_ssl(h, w, units) == pytest.approx(vq, rel=1e-12)
    assert v_csl(h, classical_gaussian(spec, g)) == pytest.approx(0.5, rel=1e-4)


def test_classical_velocity_for_unmatched_widths(units):
    spec = units.matched_gaussian()
    spec = type(spec)(0.0, 0.0, 0.5, 1.3)
    g = state_grid(units, 0.5, 1.3, n=256)
    h = quadratic_hamiltonian(units, 0.0, g)
    oracle = gaussian_vcsl_free(units, spec).value
    assert v_csl(h, classical_gaussian(spec, g)) == pytest.approx(oracle, rel=1e-4)


def test_excited_state_velocity(units):
    # |{p^2/2, W_1}| norm: sqrt(2) dE / hbar with dE of the n=1 state under p^2/2
    g = PhaseGrid.centered(9.0, 9.0, 256)
    h = quadratic_hamiltonian(units, 0.0, g)
    v = v_qsl(h, ho_wigner(1, units, g), units=units)
    # Var(p^2/2) on |1> = (<p^4> - <p^2>^2)/4 = (15/4 - 9/4)/4 = 3/8
    assert v == pytest.approx(math.sqrt(2 * 3 / 8), rel=1e-4)


def test_stationary_state_has_zero_velocity(units):
    g = PhaseGrid.centered(8.0, 8.0, 512)
    h = quadratic_hamiltonian(units, units.omega0, g)
    assert v_qsl(h, ho_wigner(2, units, g), units=units) < 2e-5


def test_purity_guard(units):
    g = PhaseGrid.centered(14.0, 14.0, 256)
    h = quadratic_hamiltonian(units, 0.0, g)
    mixed = gaussian_wigner(type(units.matched_gaussian())(0.0, 0.0, 1.5, 1.5), g)
    assert purity(mixed) < 0.5
    with pytest.raises(PurityError):
        v_qsl(h, mixed)
    with pytest.raises(PurityError):
        v_ssl(h, mixed)


def test_generator_norms_conserved_under_free_flow(units):
    from phasespeed import evolve_series, quench_grid, solve_ermakov
    traj = solve_ermakov(lambda t: 0.0, 1.0, 2.0, 100)
    spec = units.matched_gaussian()
    g = quench_grid(units, traj, spec.sigma_q, spec.sigma_p, n=256)
    h = quadratic_hamiltonian(units, 0.0, g)
    rhos = list(evolve_series(classical_gaussian(spec, g), traj, indices=range(0, 101, 25)))
    norms = csl_generator_norms(h, rhos)
    np.testing.assert_allclose(norms, 0.5, rtol=1e-3)
    avg = v_csl_timeavg([h] * len(rhos), rhos, np.linspace(0, 2, len(rhos)))
    assert avg == pytest.approx(norms.mean(), rel=1e-3)


def test_running_average():
    t = np.linspace(0.0, 2.0, 201)
    avg = running_average(t, t)
    np.testing.assert_allclose(avg[1:], t[1:] / 2, rtol=1e-12)
    assert avg[0] == 0.0


def test_tau_bound():
    assert tau_bound(0.75, 0.5) == pytest.approx(0.5)
    assert tau_bound(1.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        tau_bound(0.5, 0.0)
    with pytest.raises(ValueError):
        tau_bound(1.2, 1.0)


def make_series(f, n=101, t_max=2.0):
    t = np.linspace(0.0, t_max, n)
    return OverlapSeries.from_values(t, f(t))


def test_dominance_pass_and_report_fields():
    s = make_series(lambda t: 2 / np.sqrt(4 + t**2))
    rep = verify_rate_dominance(s, 0.5, Bound.CSL, scenario="demo")
    assert rep.passed and rep.tau_ok and not rep.stationary
    assert rep.max_margin == pytest.approx(2 / (3 * math.sqrt(3)), rel=1e-3)
    assert rep.times[rep.argmax] == pytest.approx(math.sqrt(2), abs=0.02)
    assert rep.v == 0.5 and rep.scenario == "demo"


def test_dominance_violation_names_the_worst_index():
    s = make_series(lambda t: np.exp(-t))
    with pytest.raises(DominanceViolation) as err:
        verify_rate_dominance(s, 0.5, "qsl")
    assert err.value.index == 1 and err.value.margin > 1.9
    rep = verify_rate_dominance(s, 0.5, "qsl", raise_on_violation=False)
    assert not rep.passed and not rep.tau_ok


def test_stationary_series():
    s = make_series(lambda t: np.ones_like(t))
    rep = verify_rate_dominance(s, 0.0, Bound.QSL)
    assert rep.passed and rep.stationary and rep.max_margin == 0.0
    np.testing.assert_array_equal(rep.tau_bound, 0.0)


def test_timeavg_uses_running_average_for_time_bound():
    s = make_series(lambda t: 1 - 0.1 * t**2, t_max=1.0)
    vel = np.linspace(0.0, 0.4, 101)
    rep = verify_rate_dominance(s, vel, Bound.CSL_TIMEAVG, raise_on_violation=False)
    assert rep.v == pytest.approx(0.2, rel=1e-12)
    assert rep.tau_ok


def test_bound_enum():
    assert Bound("csl-timeavg").classical and not Bound.QSL.classical
    with pytest.raises(ValueError):
        Bound("bogus")


def test_units_scale_velocity():
    u = UnitsSpec(hbar=2.0, mass=3.0, omega0=0.5)
    spec, g, h = matched_setup(u)
    # velocity has units of omega0
    assert v_qsl(h, ho_wigner(0, u, g), units=u) == pytest.approx(0.5 * u.omega0, rel=1e-4)
    assert v_csl(h, classical_gaussian(spec, g)) == pytest.approx(0.5 * u.omega0, rel=1e-4)

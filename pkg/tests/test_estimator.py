import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from phasespeed import (DominanceViolation, GridMismatchError, SpeedLimitEstimator, classical_gaussian,
                        evolve_series, ho_wigner, quadratic_hamiltonian, quench_grid,
                        solve_ermakov)


@pytest.fixture(scope="module")
def trajectory():
    from phasespeed import UnitsSpec
    units = UnitsSpec()
    traj = solve_ermakov(lambda t: 0.0, 1.0, 5.0, 200)
    spec = units.matched_gaussian()
    g = quench_grid(units, traj, spec.sigma_q, spec.sigma_p, n=256)
    h = quadratic_hamiltonian(units, 0.0, g)
    rhos = list(evolve_series(classical_gaussian(spec, g), traj))
    ws = list(evolve_series(ho_wigner(0, units, g), traj))
    return traj, h, rhos, ws


def test_params_roundtrip():
    est = SpeedLimitEstimator(bound="qsl", tol=1e-2)
    assert est.get_params()["bound"] == "qsl"
    est.set_params(bound="ssl")
    assert clone(est).get_params() == est.get_params()


@pytest.mark.parametrize("bound, key", [("csl", "rho"), ("csl-timeavg", "rho"),
                                        ("qsl", "w"), ("ssl", "w")])
def test_fit_on_quench(trajectory, bound, key):
    traj, h, rhos, ws = trajectory
    states = rhos if key == "rho" else ws
    est = SpeedLimitEstimator(bound=bound).fit(states, times=traj.times, hamiltonian=h)
    assert est.velocity_ == pytest.approx(0.5, rel=5e-3)
    assert est.report_.passed
    assert est.score() == pytest.approx(0.3849, abs=2e-3)
    assert est.overlap_.shape == traj.times.shape == est.margin_.shape == est.rate_.shape


def test_transform_and_predict(trajectory):
    traj, h, rhos, _ = trajectory
    est = SpeedLimitEstimator().fit(rhos, times=traj.times, hamiltonian=h)
    ov = est.transform(rhos[::40])
    np.testing.assert_allclose(ov, est.overlap_[::40], atol=1e-14)
    tau = est.predict(rhos[::40])
    assert tau[0] == pytest.approx(0.0, abs=1e-12)
    # the time bound never exceeds the actual elapsed time
    assert np.all(tau <= traj.times[::40] * (1 + 1e-3) + 1e-9)


def test_not_fitted(trajectory):
    _, _, rhos, _ = trajectory
    with pytest.raises(NotFittedError):
        SpeedLimitEstimator().transform(rhos[:2])


def test_input_validation(trajectory):
    traj, h, rhos, _ = trajectory
    est = SpeedLimitEstimator()
    with pytest.raises(ValueError):
        est.fit(rhos, times=traj.times[:-1], hamiltonian=h)
    with pytest.raises(TypeError):
        est.fit([r.values for r in rhos], times=traj.times, hamiltonian=h)
    with pytest.raises(ValueError):
        est.fit(rhos, times=traj.times[::-1], hamiltonian=h)
    with pytest.raises(ValueError):
        SpeedLimitEstimator(bound="nope").fit(rhos, times=traj.times, hamiltonian=h)
    est.fit(rhos, times=traj.times, hamiltonian=h)
    from phasespeed import PhaseGrid
    with pytest.raises(GridMismatchError):
        est.transform([PhaseGrid.centered(3.0, 3.0, 32).zeros()])


def test_violation_can_raise(trajectory):
    traj, h, rhos, _ = trajectory
    # a too-slow Hamiltonian (a quarter of the true one) makes the bound fail
    with pytest.raises(DominanceViolation):
        SpeedLimitEstimator(raise_on_violation=True).fit(rhos, times=traj.times,
                                                         hamiltonian=h * 0.25)

"""Estimator-style front end to the speed-limit machinery.

``SpeedLimitEstimator`` is fitted on a trajectory of phase-space states and
a Hamiltonian.  It learns the bound velocity of the initial state and checks
rate dominance along the trajectory; ``transform`` maps further states to
their overlap with the initial state, and ``predict`` maps them to the lower
bound on the time needed to reach them.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_same_grid, check_times
from .bounds import (MARGIN_TOL, Bound, csl_generator_norms, tau_bound, v_csl, v_qsl,
                     v_ssl, verify_rate_dominance)
from .brackets import MoyalOrder
from .grid import PhaseField
from .metrics import Measure, OverlapSeries, overlap


def _check_states(X, ref=None):
    """List of PhaseFields sharing one grid (that of `ref` when given)."""
    states = list(X)
    if not states:
        raise ValueError("expected at least one state")
    for s in states:
        if not isinstance(s, PhaseField):
            raise TypeError(f"states must be PhaseField instances, got {type(s).__name__}")
    check_same_grid(*(states if ref is None else (ref, *states)))
    return states


class SpeedLimitEstimator(BaseEstimator):
    """Speed-limit velocity and rate-dominance check for one bound.

    Parameters
    ----------
    bound : {"qsl", "ssl", "csl", "csl-timeavg"}
        Which bound to evaluate.  Quantum bounds expect Wigner functions,
        classical ones expect densities.
    moyal_order : {"hbar2", "poisson"}
        Truncation of the Moyal bracket for ``bound="qsl"``.
    tol : float
        Allowed relative excess of ``|rate|`` over the velocity.
    raise_on_violation : bool
        Raise :class:`DominanceViolation` from ``fit`` instead of recording
        a failing report.

    Attributes
    ----------
    initial_state_ : PhaseField
    velocity_ : float
        Bound velocity (time-averaged for ``csl-timeavg``).
    overlap_, rate_, margin_ : ndarray
        Overlap with the initial state, its time derivative, and ``|rate| / v``.
    report_ : BoundReport
    """

    def __init__(self, bound="csl", moyal_order="hbar2", tol=MARGIN_TOL,
                 raise_on_violation=False):
        self.bound = bound
        self.moyal_order = moyal_order
        self.tol = tol
        self.raise_on_violation = raise_on_violation

    @property
    def _measure(self):
        return Measure.BHATTACHARYYA if Bound(self.bound).classical else Measure.FIDELITY

    def fit(self, X, y=None, *, times, hamiltonian):
        """Fit on a trajectory.

        Parameters
        ----------
        X : iterable of PhaseField
            States at `times`; the first is the initial state.
        y : ignored
        times : array-like of shape (n_times,)
            Uniformly spaced sample times.
        hamiltonian : PhaseField
            Hamiltonian generating the evolution, on the states' grid.
        """
        bound = Bound(self.bound)
        order = MoyalOrder(self.moyal_order)
        states = _check_states(X, hamiltonian)
        times = check_times(times)
        if len(times) != len(states):
            raise ValueError(f"got {len(states)} states for {len(times)} times")

        x0 = states[0]
        if bound is Bound.QSL:
            velocity = v_qsl(hamiltonian, x0, order)
        elif bound is Bound.SSL:
            velocity = v_ssl(hamiltonian, x0)
        elif bound is Bound.CSL:
            velocity = v_csl(hamiltonian, x0)
        else:
            velocity = csl_generator_norms(hamiltonian, states)

        values = [overlap(x0, s, self._measure) for s in states]
        series = OverlapSeries.from_values(times, values)
        self.report_ = verify_rate_dominance(series, velocity, bound, tol=self.tol,
                                             raise_on_violation=self.raise_on_violation)
        self.initial_state_ = x0
        self.velocity_ = self.report_.v
        self.overlap_ = series.value
        self.rate_ = series.rate
        self.margin_ = self.report_.margin
        return self

    def transform(self, X):
        """Overlap of each state with the fitted initial state."""
        check_is_fitted(self, "initial_state_")
        states = _check_states(X, self.initial_state_)
        return np.array([overlap(self.initial_state_, s, self._measure) for s in states])

    def predict(self, X):
        """Lower bound ``(1 - overlap) / v`` on the time needed to reach each state."""
        overlaps = np.minimum(self.transform(X), 1.0)
        return np.array([tau_bound(o, self.velocity_) if self.velocity_ > 0.0 or o == 1.0
                         else np.inf for o in overlaps])

    def score(self, X=None, y=None):
        """Largest interior margin of the fitted trajectory (at most 1 when the bound holds)."""
        check_is_fitted(self, "report_")
        return self.report_.max_margin

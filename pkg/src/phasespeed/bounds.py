"""Speed-limit velocities and the checks that overlap rates respect them.

Quantum and semiclassical velocities are L2 norms of the bracket of H with the
initial Wigner function under the ``2 pi hbar dq dp`` measure; the classical
velocity is the L2 norm of ``{H, sqrt(rho0)}`` under plain ``dq dp``.
"""

from dataclasses import dataclass
import enum
import math

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ._validation import check_same_grid
from .brackets import Liouvillian, MoyalOrder, moyal, poisson
from .exceptions import DominanceViolation, PurityError
from .grid import PhaseField, integrate
from .metrics import clip_density

MARGIN_TOL = 1e-3
PURITY_TOL = 1e-4
OVERLAP_SLACK = 1e-9


class Bound(enum.Enum):
    QSL = "qsl"
    SSL = "ssl"
    CSL = "csl"
    CSL_TIMEAVG = "csl-timeavg"

    @property
    def classical(self):
        return self in (Bound.CSL, Bound.CSL_TIMEAVG)


def purity(w, units=None):
    hbar = w.grid.hbar if units is None else units.hbar
    return 2.0 * math.pi * hbar * integrate(PhaseField(w.grid, w.values**2))


def _require_pure(w, units):
    pur = purity(w, units)
    if pur < 1.0 - PURITY_TOL:
        raise PurityError(
            f"state purity {pur:.6f} < 1 - {PURITY_TOL}; bounds are stated for pure states"
        )


def _phase_space_norm(f, hbar):
    return math.sqrt(2.0 * math.pi * hbar * integrate(PhaseField(f.grid, f.values**2)))


def v_qsl(h, w0, order=MoyalOrder.HBAR_SQUARED, units=None):
    """Quantum phase-space velocity ``||{{H, W0}}||`` with the d^2 Gamma measure."""
    grid = check_same_grid(h, w0)
    _require_pure(w0, units)
    hbar = grid.hbar if units is None else units.hbar
    return _phase_space_norm(moyal(h, w0, order, units), hbar)


def v_ssl(h, w0, units=None):
    """Semiclassical velocity: as :func:`v_qsl` with the Poisson bracket."""
    grid = check_same_grid(h, w0)
    _require_pure(w0, units)
    hbar = grid.hbar if units is None else units.hbar
    return _phase_space_norm(poisson(h, w0), hbar)


def v_csl(h, rho0):
    """Classical velocity ``||{H, sqrt(rho0)}||_2`` over dq dp."""
    liouvillian = h if isinstance(h, Liouvillian) else Liouvillian(h)
    root = clip_density(rho0).apply(np.sqrt)
    bracket = liouvillian(root)
    return math.sqrt(integrate(PhaseField(bracket.grid, bracket.values**2)))


def csl_generator_norms(hamiltonian, densities):
    """``||{H(t), sqrt(rho_t)}||_2`` for each density in an iterable.

    `hamiltonian` is either one field or a sequence aligned with `densities`.
    """
    if isinstance(hamiltonian, PhaseField):
        liouvillian = Liouvillian(hamiltonian)
        return np.array([v_csl(liouvillian, rho) for rho in densities])
    return np.array([v_csl(h, rho) for h, rho in zip(hamiltonian, densities, strict=True)])


def running_average(values, times):
    """Trapezoidal mean of `values` over [t0, t] for every sample time t."""
    values = np.asarray(values, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    acc = cumulative_trapezoid(values, times, initial=0.0)
    span = times - times[0]
    out = np.empty_like(values)
    out[0] = values[0]
    out[1:] = acc[1:] / span[1:]
    return out


def v_csl_timeavg(hamiltonian, densities, times):
    """Time average over the trajectory of the instantaneous classical velocity."""
    times = np.asarray(times, dtype=np.float64)
    if len(times) < 2:
        raise ValueError("time average needs at least 2 time points")
    norms = csl_generator_norms(hamiltonian, densities)
    if len(norms) != len(times):
        raise ValueError(f"got {len(norms)} densities for {len(times)} times")
    return float(running_average(norms, times)[-1])


def tau_bound(overlap_at_tau, v):
    """Lower bound ``(1 - overlap) / v`` on the time needed to reach `overlap`.

    A state with overlap exactly 1 needs no time, so ``v == 0`` is accepted
    in that case and the bound is 0.
    """
    if not 0.0 <= overlap_at_tau <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {overlap_at_tau!r}")
    if v <= 0.0:
        if overlap_at_tau == 1.0:
            return 0.0
        raise ValueError("speed-limit velocity must be positive for an evolving state")
    return (1.0 - overlap_at_tau) / v


@dataclass(frozen=True)
class BoundReport:
    """Time series of one overlap against one speed-limit velocity.

    ``velocity`` holds the bound velocity per time (constant for the
    initial-state bounds, the instantaneous generator norm for the
    time-averaged classical bound).  ``margin`` is ``|rate| / velocity``.
    ``tau_bound`` is ``(1 - overlap) / v`` with ``v`` the bound velocity, or its
    running time average for the time-averaged bound.
    """

    scenario: str
    bound: Bound
    series: object
    velocity: np.ndarray
    margin: np.ndarray
    tau_bound: np.ndarray
    max_margin: float
    argmax: int
    passed: bool
    tau_ok: bool
    stationary: bool

    @property
    def times(self):
        return self.series.times

    @property
    def v(self):
        """Headline velocity: the constant bound, or the time average."""
        if self.bound is Bound.CSL_TIMEAVG:
            return float(running_average(self.velocity, self.times)[-1])
        return float(self.velocity[0])


def _margins(rate, velocity):
    rate = np.abs(rate)
    out = np.zeros_like(rate)
    nz = velocity > 0.0
    out[nz] = rate[nz] / velocity[nz]
    out[~nz & (rate > 0.0)] = np.inf
    return out


def verify_rate_dominance(series, velocity, bound, scenario="", tol=MARGIN_TOL,
                          raise_on_violation=True):
    """Compare ``|d overlap / dt|`` with the bound velocity at interior times.

    Parameters
    ----------
    series : OverlapSeries
    velocity : float or array
        Constant velocity, or one value per time.
    bound : Bound or str
    scenario : str
        Label stored in the report.
    tol : float
        Allowed relative excess over the bound.
    raise_on_violation : bool
        Raise :class:`DominanceViolation` naming the worst time index instead
        of returning a failing report.
    """
    bound = Bound(bound)
    times = series.times
    vel = np.broadcast_to(np.asarray(velocity, dtype=np.float64), times.shape).copy()
    margin = _margins(series.rate, vel)
    interior = margin[1:-1]
    k = int(np.argmax(interior)) + 1
    max_margin = float(margin[k])
    passed = max_margin <= 1.0 + tol

    v_eff = running_average(vel, times) if bound is Bound.CSL_TIMEAVG else vel
    stationary = bool(np.all(vel == 0.0)) or bool(np.all(series.value == 1.0))
    tau = np.array([tau_bound(min(o, 1.0), v) if (v > 0.0 or o == 1.0) else np.inf
                    for o, v in zip(series.value, v_eff)])
    span = times - times[0]
    # quadrature leaves self-overlaps ~1e-13 below 1, hence the absolute slack
    sweep = 1.0 - np.minimum(series.value, 1.0)
    tau_ok = bool(np.all(sweep <= v_eff * span * (1.0 + tol) + OVERLAP_SLACK))

    report = BoundReport(scenario, bound, series, vel, margin, tau, max_margin, k,
                         passed, tau_ok, stationary)
    if raise_on_violation and not passed:
        raise DominanceViolation(
            f"{bound.value}: |rate| / v = {max_margin:.6g} exceeds 1 + {tol} "
            f"at index {k} (t = {times[k]:.6g})",
            index=k, time=float(times[k]), margin=max_margin,
        )
    return report

"""Exact evolution under quadratic Hamiltonians by symplectic pullback.

A state evolving under ``H = p^2/2m + m omega(t)^2 q^2 / 2`` is carried along
characteristics: ``f_t(q, p) = f_0(M_t(q, p))`` where ``M_t`` is a linear map
with unit determinant.  The map is built from the Ermakov scaling factor
``b(t)`` and, for states that are not invariant under the reference
oscillator's rotation, the accumulated phase ``theta(t) = int omega0 / b^2``.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.ndimage import map_coordinates, spline_filter

from . import _spline
from ._validation import check_positive
from .exceptions import FocusingSingularity, MassLossWarning
from .grid import PhaseField, PhaseGrid

DET_TOL = 1e-10
MASS_LOSS_TOL = 1e-8
MIN_STEPS = 100
SPLINE_ORDER = 5


@dataclass(frozen=True)
class SymplecticMap:
    """Linear map (q, p) -> (alpha q + beta p, gamma q + delta p) in Sp(2, R)."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        # roundoff in alpha delta - beta gamma grows with the size of the products
        scale = max(1.0, abs(self.alpha * self.delta), abs(self.beta * self.gamma))
        if abs(self.determinant - 1.0) > DET_TOL * scale:
            raise ValueError(f"map is not symplectic: det = {self.determinant!r}")

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def determinant(self):
        return self.alpha * self.delta - self.beta * self.gamma

    @property
    def matrix(self):
        return np.array([[self.alpha, self.beta], [self.gamma, self.delta]])

    def is_identity(self):
        return (self.alpha, self.beta, self.gamma, self.delta) == (1.0, 0.0, 0.0, 1.0)

    def __call__(self, q, p):
        return self.alpha * q + self.beta * p, self.gamma * q + self.delta * p

    def then(self, other):
        """The map applying `self` first and `other` second."""
        m = other.matrix @ self.matrix
        return SymplecticMap(*map(float, m.ravel()))

    def inverse(self):
        return SymplecticMap(self.delta, -self.beta, -self.gamma, self.alpha)


@dataclass(frozen=True)
class QuenchTrajectory:
    """Solution of the Ermakov equation sampled on a uniform time grid.

    Attributes
    ----------
    times, b, bdot : ndarray
        Sample times and the scaling factor with its derivative.
    bddot0 : float
        Second derivative of ``b`` at ``t = 0``.
    phase : ndarray
        Accumulated angle ``int_0^t omega0 / b(s)^2 ds``.
    omega0 : float
        Reference frequency of the initial trap.
    """

    times: np.ndarray
    b: np.ndarray
    bdot: np.ndarray
    bddot0: float
    phase: np.ndarray
    omega0: float

    def __post_init__(self):
        if self.b[0] != 1.0 or self.bdot[0] != 0.0:
            raise ValueError("trajectory must start at b = 1, bdot = 0")
        if np.any(self.b <= 0.0):
            raise ValueError("scaling factor must stay positive")
        for name in ("times", "b", "bdot", "phase"):
            getattr(self, name).setflags(write=False)

    def __len__(self):
        return len(self.times)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])


def solve_ermakov(omega_of_t, omega0, t_max, steps):
    """Integrate ``b'' + omega(t)^2 b = omega0^2 / b^3`` with b(0) = 1, b'(0) = 0.

    Classical fixed-step RK4 on the state ``(b, b', theta)`` with
    ``theta' = omega0 / b^2``.

    Parameters
    ----------
    omega_of_t : callable
        Trap frequency as a function of time.
    omega0 : float
        Initial trap frequency.
    t_max : float
        Final time.
    steps : int
        Number of RK4 steps, at least 100.

    Returns
    -------
    QuenchTrajectory

    Raises
    ------
    ValueError
        If ``omega_of_t`` returns a non-finite value.
    FocusingSingularity
        If ``b`` drops below 1e-12.
    """
    check_positive(omega0, "omega0")
    check_positive(t_max, "t_max")
    if int(steps) != steps or steps < MIN_STEPS:
        raise ValueError(f"steps must be an integer >= {MIN_STEPS}, got {steps!r}")
    steps = int(steps)
    dt = t_max / steps
    w0sq = omega0 * omega0

    def omega(t):
        w = float(omega_of_t(t))
        if not math.isfinite(w):
            raise ValueError(f"omega(t) is not finite at t = {t!r}")
        return w

    def rhs(t, b, v):
        w = omega(t)
        return v, -w * w * b + w0sq / b**3, omega0 / (b * b)

    times = np.arange(steps + 1) * dt
    b = np.empty(steps + 1)
    v = np.empty(steps + 1)
    theta = np.empty(steps + 1)
    b[0], v[0], theta[0] = 1.0, 0.0, 0.0
    for i in range(steps):
        t, y0, y1, y2 = times[i], b[i], v[i], theta[i]
        k1 = rhs(t, y0, y1)
        k2 = rhs(t + dt / 2, y0 + dt / 2 * k1[0], y1 + dt / 2 * k1[1])
        k3 = rhs(t + dt / 2, y0 + dt / 2 * k2[0], y1 + dt / 2 * k2[1])
        k4 = rhs(t + dt, y0 + dt * k3[0], y1 + dt * k3[1])
        b[i + 1] = y0 + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        v[i + 1] = y1 + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        theta[i + 1] = y2 + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        if not b[i + 1] >= 1e-12:
            raise FocusingSingularity(
                f"scaling factor collapsed to {b[i + 1]:.3e} at t = {times[i + 1]:.6g}"
            )
    bddot0 = rhs(0.0, 1.0, 0.0)[1]
    return QuenchTrajectory(times, b, v, float(bddot0), theta, float(omega0))


def scaling_map(b, bdot, mass):
    """Map (q, p) -> (q/b, b p - m q bdot)."""
    check_positive(b, "b")
    return SymplecticMap(1.0 / b, 0.0, -mass * bdot, float(b))


def rotation_map(theta, mass, omega0):
    """Rotate back by `theta` in the oscillator's (q, p / m omega0) plane."""
    c, s = math.cos(theta), math.sin(theta)
    mw = mass * omega0
    return SymplecticMap(c, -s / mw, mw * s, c)


def pullback_map(traj, index, mass, rotate=False):
    """Map from phase-space points at ``traj.times[index]`` to their t = 0 origin.

    Without `rotate` this is the bare scaling map, exact for states that are
    invariant under the reference oscillator's flow (eigenstates, matched
    Gaussians centred at the origin).
    """
    m = scaling_map(traj.b[index], traj.bdot[index], mass)
    if rotate and traj.phase[index] != 0.0:
        m = m.then(rotation_map(traj.phase[index], mass, traj.omega0))
    return m


class Transporter:
    """Spline representation of a field, evaluated at pulled-back points.

    The quintic spline coefficients are computed once, so evaluating many maps
    of the same initial field is cheap.  Quintic splines are evaluated by
    compiled kernels (a separable one when ``beta == 0``, as for the bare
    scaling map); other orders go through :func:`scipy.ndimage.map_coordinates`.
    """

    def __init__(self, f0, order=SPLINE_ORDER):
        self.f0 = f0
        self.order = order
        self._coeffs = spline_filter(f0.values, order=order, mode="constant")
        self._abs = np.abs(f0.values)
        self._total = float(self._abs.sum())

    def lost_fraction(self, pullback):
        """Fraction of |f0| mass pushed outside the grid by the forward flow."""
        if self._total == 0.0:
            return 0.0
        g = self.f0.grid
        fwd = pullback.inverse()
        lost = _spline.outside_mass(self._abs, g.q, g.p, fwd.alpha, fwd.beta,
                                    fwd.gamma, fwd.delta)
        return lost / self._total

    def _evaluate(self, m):
        g = self.f0.grid
        if m.beta == 0.0 and self.order == 5:
            # row i pulls from q = alpha q_i; column j from p = gamma q_i + delta p_j
            x0 = (m.alpha * g.q_min - g.q_min) / g.dq
            y0 = (m.gamma * g.q_min + m.delta * g.p_min - g.p_min) / g.dp
            return _spline.pullback_separable(self._coeffs, x0, m.alpha,
                                              y0, m.delta, m.gamma * g.dq / g.dp)
        if self.order == 5:
            # node (i, j) pulls from alpha q_i + beta p_j, gamma q_i + delta p_j
            x0 = (m.alpha * g.q_min + m.beta * g.p_min - g.q_min) / g.dq
            y0 = (m.gamma * g.q_min + m.delta * g.p_min - g.p_min) / g.dp
            return _spline.pullback_general(self._coeffs, x0, m.alpha, m.beta * g.dp / g.dq,
                                            y0, m.gamma * g.dq / g.dp, m.delta)
        Q, P = g.mesh
        qs, ps = m(Q, P)
        coords = np.array([(qs - g.q_min) / g.dq, (ps - g.p_min) / g.dp])
        return map_coordinates(self._coeffs, coords, order=self.order,
                               mode="constant", cval=0.0, prefilter=False)

    def __call__(self, pullback, check_mass=True):
        if pullback.is_identity():
            return self.f0
        values = self._evaluate(pullback)
        if check_mass:
            lost = self.lost_fraction(pullback)
            if lost > MASS_LOSS_TOL:
                warnings.warn(
                    f"transport moves {lost:.2e} of the mass off the grid",
                    MassLossWarning,
                    stacklevel=2,
                )
        return PhaseField(self.f0.grid, values)


def transport(f0, pullback, order=SPLINE_ORDER):
    """Pull `f0` back along a symplectic map: ``f_t(q, p) = f0(pullback(q, p))``.

    Points landing outside the grid evaluate to zero.
    """
    return Transporter(f0, order=order)(pullback)


def evolve_quench(state0, traj, index, rotate=False, order=SPLINE_ORDER):
    if not 0 <= index < len(traj):
        raise IndexError(f"time index {index} outside trajectory of length {len(traj)}")
    return transport(state0, pullback_map(traj, index, state0.grid.mass, rotate), order)


def evolve_series(state0, traj, rotate=False, indices=None, order=SPLINE_ORDER):
    """Yield the evolved state at each trajectory index (all by default)."""
    t = Transporter(state0, order=order)
    mass = state0.grid.mass
    for i in range(len(traj)) if indices is None else indices:
        yield t(pullback_map(traj, i, mass, rotate))


def quench_grid(units, traj, sigma_q, sigma_p, n=512, halfwidth_sigmas=8.0,
                extent=1.0, center=(0.0, 0.0), rotate=False):
    """Grid wide enough to hold a Gaussian-like state over the whole trajectory.

    The half-widths are `halfwidth_sigmas` times the largest position and
    momentum spread the scaling dynamics produces, times `extent` (> 1 for
    excited states), plus the largest excursion of the state's centre.
    """
    mass, mw = units.mass, units.mass * units.omega0
    if rotate:
        sigma_q, sigma_p = max(sigma_q, sigma_p / mw), max(sigma_p, mw * sigma_q)
    b, bdot = traj.b, traj.bdot
    spread_q = sigma_q * float(b.max())
    spread_p = float(np.max(np.sqrt((sigma_p / b) ** 2 + (mass * sigma_q * bdot) ** 2)))
    cq = cp = 0.0
    if center != (0.0, 0.0):
        for i in range(len(traj)):
            fwd = pullback_map(traj, i, mass, rotate).inverse()
            qc, pc = fwd(*center)
            cq, cp = max(cq, abs(qc)), max(cp, abs(pc))
    return PhaseGrid.centered(halfwidth_sigmas * extent * spread_q + cq,
                              halfwidth_sigmas * extent * spread_p + cp,
                              n, hbar=units.hbar, mass=mass)


def state_grid(units, sigma_q, sigma_p, n=512, halfwidth_sigmas=8.0, extent=1.0,
               center=(0.0, 0.0)):
    """Grid resolving the initial state only, used for initial-state velocities."""
    return PhaseGrid.centered(halfwidth_sigmas * extent * sigma_q + abs(center[0]),
                              halfwidth_sigmas * extent * sigma_p + abs(center[1]),
                              n, hbar=units.hbar, mass=units.mass)

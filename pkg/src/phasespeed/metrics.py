"""Overlaps between phase-space states and their rates of change."""

from dataclasses import dataclass
import enum
import math

import numpy as np

from ._validation import check_same_grid
from .exceptions import NegativeDensityError, OverlapResidualError
from .grid import PhaseField, integrate

CLIP_TOL = 1e-12
RESIDUAL_TOL = 1e-5


class Measure(enum.Enum):
    FIDELITY = "fidelity"
    BHATTACHARYYA = "bhattacharyya"


def _clamp(raw):
    value = min(max(raw, 0.0), 1.0)
    residual = raw - value
    if abs(residual) > RESIDUAL_TOL:
        raise OverlapResidualError(
            f"overlap {raw!r} lies outside [0, 1] by more than {RESIDUAL_TOL}"
        )
    return value, residual


def fidelity(w0, wt, units=None, return_residual=False):
    """Phase-space fidelity ``2 pi hbar * int W0 Wt dq dp`` of two pure states.

    The result is clamped to [0, 1].  With ``return_residual=True`` the
    difference between the raw quadrature value and the clamped one is
    returned as well.
    """
    grid = check_same_grid(w0, wt)
    hbar = grid.hbar if units is None else units.hbar
    raw = 2.0 * math.pi * hbar * integrate(PhaseField(grid, w0.values * wt.values))
    value, residual = _clamp(raw)
    return (value, residual) if return_residual else value


def bures_angle(overlap):
    """arccos(sqrt(overlap)) for an overlap in [0, 1]."""
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {overlap!r}")
    return math.acos(math.sqrt(overlap))


def clip_density(rho):
    """Zero out quadrature-noise negatives; reject genuinely negative densities."""
    low = rho.values.min()
    if low < -CLIP_TOL:
        raise NegativeDensityError(f"density has negative values (min {low:.3e})")
    if low >= 0.0:
        return rho
    return PhaseField(rho.grid, np.maximum(rho.values, 0.0))


def bhattacharyya(rho0, rhot, return_residual=False):
    """Bhattacharyya coefficient ``int sqrt(rho0 rhot) dq dp``, clamped to [0, 1]."""
    grid = check_same_grid(rho0, rhot)
    a, b = clip_density(rho0).values, clip_density(rhot).values
    raw = integrate(PhaseField(grid, np.sqrt(a * b)))
    value, residual = _clamp(raw)
    return (value, residual) if return_residual else value


def hellinger(rho0, rhot):
    return math.sqrt(1.0 - min(bhattacharyya(rho0, rhot), 1.0))


def overlap(a, b, measure, units=None):
    measure = Measure(measure)
    if measure is Measure.FIDELITY:
        return fidelity(a, b, units)
    return bhattacharyya(a, b)


@dataclass(frozen=True)
class OverlapSeries:
    """Overlap with the initial state along a trajectory, and its time derivative.

    ``rate`` uses centred differences inside and second-order one-sided
    differences at both ends.
    """

    times: np.ndarray
    value: np.ndarray
    rate: np.ndarray

    def __post_init__(self):
        if len(self.times) < 5:
            raise ValueError("an overlap series needs at least 5 time points")
        if abs(self.value[0] - 1.0) > 1e-6:
            raise ValueError(f"overlap at t = 0 is {float(self.value[0])!r}, expected 1")
        if np.any(self.value > 1.0 + 1e-6):
            raise ValueError("overlap exceeds 1")

    @classmethod
    def from_values(cls, times, values):
        times = np.asarray(times, dtype=np.float64)
        values = np.asarray(values, dtype=np.float64)
        steps = np.diff(times)
        if len(times) < 5:
            raise ValueError("an overlap series needs at least 5 time points")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("times must be uniformly spaced")
        rate = np.gradient(values, steps[0], edge_order=2)
        return cls(times, values, rate)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])


def overlap_series(states, times, measure, units=None):
    """Overlap of each state in `states` with the first one.

    `states` may be any iterable (e.g. a generator from
    :func:`phasespeed.dynamics.evolve_series`); it is consumed once.
    """
    measure = Measure(measure)
    it = iter(states)
    ref = next(it)
    if measure is Measure.BHATTACHARYYA:
        ref = clip_density(ref)
    values = [overlap(ref, ref, measure, units)]
    values.extend(overlap(ref, s, measure, units) for s in it)
    if len(values) != len(times):
        raise ValueError(f"got {len(values)} states for {len(times)} times")
    return OverlapSeries.from_values(times, values)


def closed_form_fidelity(n, b, bdot, omega0):
    """Fidelity of the n-th oscillator eigenstate (n <= 3) with its evolved self.

    Closed forms in terms of the Ermakov scaling factor ``b`` and its
    derivative; ``n = 0`` gives ``2 b w0 / sqrt((b^2+1)^2 w0^2 + b^2 bdot^2)``.
    """
    if n not in (0, 1, 2, 3):
        raise ValueError(f"closed forms are available for n = 0..3, got {n!r}")
    b = np.asarray(b, dtype=np.float64)
    if np.any(b <= 0.0):
        raise ValueError("b must be positive")
    bd = np.asarray(bdot, dtype=np.float64)
    w = omega0
    denom = (b**2 + 1) ** 2 * w**2 + b**2 * bd**2
    if n == 0:
        out = 2 * b * w / denom**0.5
    elif n == 1:
        out = 8 * b**3 * w**3 / denom**1.5
    elif n == 2:
        out = b * w * (b**2 * ((b**2 - 10) * w**2 + bd**2) + w**2) ** 2 / (2 * denom**2.5)
    else:
        out = 2 * b**3 * w**3 * (3 * b**2 * bd**2 + (3 * b**4 - 14 * b**2 + 3) * w**2) ** 2 \
            / denom**3.5
    return out if out.ndim else float(out)

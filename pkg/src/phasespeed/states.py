"""Grid-sampled states (Wigner functions or classical densities) and quadratic Hamiltonians."""

from dataclasses import dataclass
import math
import numbers

import numpy as np
from sklearn.utils import check_scalar

from ._validation import check_nonnegative, check_positive, check_units_match
from .grid import PhaseField

MAX_LEVEL = 12
_BOUNDARY_TOL = 1e-10


@dataclass(frozen=True)
class UnitsSpec:
    """Physical constants: ``hbar``, ``mass`` and the reference trap frequency ``omega0``."""

    hbar: float = 1.0
    mass: float = 1.0
    omega0: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "omega0"):
            check_positive(getattr(self, name), name)
        if not math.isfinite(self.x0):
            raise ValueError("oscillator length is not finite")

    @property
    def x0(self):
        """Oscillator length sqrt(hbar / (mass * omega0))."""
        return math.sqrt(self.hbar / (self.mass * self.omega0))

    def matched_gaussian(self, center_q=0.0, center_p=0.0):
        """Gaussian widths reproducing the oscillator ground state."""
        return GaussianSpec(center_q, center_p,
                            self.x0 / math.sqrt(2.0),
                            self.hbar / (self.x0 * math.sqrt(2.0)))


@dataclass(frozen=True)
class GaussianSpec:
    """Phase-space Gaussian; widths are 1/e half-widths of the classical density.

    A classical density built from this spec is
    ``exp(-(q-q0)**2/sigma_q**2 - (p-p0)**2/sigma_p**2) / (pi sigma_q sigma_p)``.
    """

    center_q: float
    center_p: float
    sigma_q: float
    sigma_p: float

    def __post_init__(self):
        check_scalar(self.center_q, "center_q", numbers.Real)
        check_scalar(self.center_p, "center_p", numbers.Real)
        check_positive(self.sigma_q, "sigma_q")
        check_positive(self.sigma_p, "sigma_p")

    def is_minimal(self, hbar, rtol=1e-12):
        """True when these widths describe a pure (minimum-uncertainty) state."""
        return math.isclose(2.0 * self.sigma_q * self.sigma_p, hbar, rel_tol=rtol)


def laguerre(n, x):
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=np.float64)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def _check_level(n):
    check_scalar(n, "n", numbers.Integral, min_val=0, max_val=MAX_LEVEL)


def oscillator_energy(units, grid, omega=None):
    """h(q, p) = p^2/2m + m omega^2 q^2 / 2 as a raw array on the grid mesh."""
    omega = units.omega0 if omega is None else omega
    Q, P = grid.mesh
    return P**2 / (2.0 * units.mass) + 0.5 * units.mass * omega**2 * Q**2


def eigenstate_extent(n, tol=1e-13):
    """Radius of the level-`n` Wigner function relative to the ground state.

    Found by scanning ``exp(-x/2) |L_n(x)|`` for the last point above `tol`.
    """
    _check_level(n)
    x = np.linspace(0.0, 400.0, 400_001)
    env0 = np.exp(-x / 2.0)
    x0 = x[np.nonzero(env0 > tol)[0][-1]]
    xn = x[np.nonzero(env0 * np.abs(laguerre(n, x)) > tol)[0][-1]]
    return math.sqrt(max(xn, x0) / x0)


def ho_wigner(n, units, grid):
    """Wigner function of the n-th harmonic-oscillator eigenstate at frequency omega0.

    Parameters
    ----------
    n : int
        Level, ``0 <= n <= 12``.
    units : UnitsSpec
    grid : PhaseGrid

    Returns
    -------
    PhaseField
        ``(-1)^n / (pi hbar) exp(-2h/(hbar w0)) L_n(4h/(hbar w0))``.
    """
    _check_level(n)
    check_units_match(grid, units)
    x = 4.0 * oscillator_energy(units, grid) / (units.hbar * units.omega0)
    values = (-1) ** n / (math.pi * units.hbar) * np.exp(-0.5 * x) * laguerre(n, x)
    w = PhaseField(grid, values)
    w.check_boundary(_BOUNDARY_TOL, what=f"level-{n} Wigner function")
    return w


def gaussian_wigner(spec, grid):
    """Gaussian Wigner function whose square (times 2 pi hbar) is the matching classical density."""
    Q, P = grid.mesh
    sq, sp = spec.sigma_q, spec.sigma_p
    values = np.exp(-((Q - spec.center_q) ** 2) / (2 * sq**2)
                    - (P - spec.center_p) ** 2 / (2 * sp**2)) / (2 * math.pi * sq * sp)
    w = PhaseField(grid, values)
    w.check_boundary(_BOUNDARY_TOL, what="Gaussian Wigner function")
    return w


def classical_gaussian(spec, grid):
    Q, P = grid.mesh
    sq, sp = spec.sigma_q, spec.sigma_p
    values = np.exp(-((Q - spec.center_q) ** 2) / sq**2
                    - (P - spec.center_p) ** 2 / sp**2) / (math.pi * sq * sp)
    rho = PhaseField(grid, values)
    rho.check_boundary(_BOUNDARY_TOL, what="classical Gaussian density")
    return rho


def classical_from_wigner(w, units, require_nonnegative=False):
    """Classical density 2 pi hbar W^2 associated with a pure-state Wigner function.

    With ``require_nonnegative`` set, a Wigner function dipping below
    ``-1e-10 * max(W)`` is rejected: its square is a density, but not the one
    that classical dynamics would carry.
    """
    if require_nonnegative:
        floor = w.values.min()
        if floor < -1e-10 * w.values.max():
            raise ValueError(
                f"Wigner function has negative values (min {floor:.3e}); "
                "no classical counterpart"
            )
    return PhaseField(w.grid, 2.0 * math.pi * units.hbar * w.values**2)


def quadratic_hamiltonian(units, omega, grid):
    """H(q, p) = p^2/2m + m omega^2 q^2 / 2 sampled on the grid."""
    check_nonnegative(omega, "omega")
    check_units_match(grid, units)
    return PhaseField(grid, oscillator_energy(units, grid, omega))

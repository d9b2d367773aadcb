"""Poisson bracket and hbar-truncated Moyal bracket of a Hamiltonian with a state."""

import enum

from ._validation import check_same_grid
from .grid import PhaseField, d3, d_dp, d_dq


# Hamiltonians do not decay at the grid edge, so they are extrapolated there
_H_EDGE = "extrapolate"


class MoyalOrder(enum.Enum):
    """Truncation level of the Moyal bracket's hbar expansion."""

    POISSON = "poisson"
    HBAR_SQUARED = "hbar2"


def poisson(h, f):
    """Generator {H, f} = dH/dq df/dp - dH/dp df/dq of Liouville evolution."""
    return Liouvillian(h)(f)


class Liouvillian:
    """``f -> {H, f}`` for a fixed Hamiltonian, with its derivatives cached."""

    def __init__(self, h):
        self.h = h
        self._hq = d_dq(h, _H_EDGE).values
        self._hp = d_dp(h, _H_EDGE).values

    def __call__(self, f):
        check_same_grid(self.h, f)
        return PhaseField(f.grid, self._hq * d_dp(f).values - self._hp * d_dq(f).values)


def _cubic_term(h, f):
    # bidirectional derivative cubed: (dq<- dp-> - dp<- dq->)^3
    e = _H_EDGE
    return (d3(h, 3, 0, e).values * d3(f, 0, 3).values
            - 3.0 * d3(h, 2, 1, e).values * d3(f, 1, 2).values
            + 3.0 * d3(h, 1, 2, e).values * d3(f, 2, 1).values
            - d3(h, 0, 3, e).values * d3(f, 3, 0).values)


def moyal(h, f, order=MoyalOrder.HBAR_SQUARED, units=None):
    """Moyal bracket {{H, f}} truncated at `order`.

    The hbar^2 term is the cubic order of the sine expansion of the Moyal
    product: ``-(hbar^2/24) (h_qqq f_ppp - 3 h_qqp f_qpp + 3 h_qpp f_qqp - h_ppp f_qqq)``.
    It vanishes identically for quadratic `h`.
    """
    order = MoyalOrder(order)
    grid = check_same_grid(h, f)
    bracket = poisson(h, f)
    if order is MoyalOrder.POISSON:
        return bracket
    hbar = grid.hbar if units is None else units.hbar
    return PhaseField(grid, bracket.values - hbar**2 / 24.0 * _cubic_term(h, f))

"""Uniform phase-space grid with sampled fields and the calculus on them.

Fields are stored row-major with q on the outer axis (rows) and p on the
inner axis (columns).  Derivatives use 4th-order central stencils; beyond the
grid edge a field is either zero (states) or extrapolated (Hamiltonians).
"""

from dataclasses import dataclass, field
from functools import cached_property
import numbers
import warnings

import numpy as np
from sklearn.utils import check_scalar

from ._validation import check_positive, check_values
from .exceptions import BoundaryWarning, GridMismatchError

MIN_NODES = 16

# f'(x) ~ (f[-2] - 8 f[-1] + 8 f[+1] - f[+2]) / (12 h)
_STENCIL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform rectangular (q, p) grid carrying the physical constants.

    Parameters
    ----------
    q_min, q_max : float
        Position range, endpoints included.
    p_min, p_max : float
        Momentum range, endpoints included.
    n_q, n_p : int
        Number of nodes along each axis, at least 16.
    hbar, mass : float
        Reduced Planck constant and particle mass.
    """

    q_min: float
    q_max: float
    p_min: float
    p_max: float
    n_q: int
    n_p: int
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("n_q", "n_p"):
            check_scalar(getattr(self, name), name, numbers.Integral, min_val=MIN_NODES)
        for name in ("q_min", "q_max", "p_min", "p_max"):
            check_scalar(getattr(self, name), name, numbers.Real)
        if not (self.q_max > self.q_min and self.p_max > self.p_min):
            raise ValueError("grid ranges must satisfy q_max > q_min and p_max > p_min")
        check_positive(self.hbar, "hbar")
        check_positive(self.mass, "mass")

    @classmethod
    def centered(cls, half_q, half_p, n, hbar=1.0, mass=1.0, n_p=None):
        """Grid on [-half_q, half_q] x [-half_p, half_p] with `n` nodes per axis."""
        return cls(-half_q, half_q, -half_p, half_p, n, n if n_p is None else n_p,
                   hbar=hbar, mass=mass)

    @property
    def shape(self):
        return (self.n_q, self.n_p)

    @property
    def dq(self):
        return (self.q_max - self.q_min) / (self.n_q - 1)

    @property
    def dp(self):
        return (self.p_max - self.p_min) / (self.n_p - 1)

    @cached_property
    def q(self):
        return np.linspace(self.q_min, self.q_max, self.n_q)

    @cached_property
    def p(self):
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @cached_property
    def mesh(self):
        """(Q, P) coordinate arrays of shape ``(n_q, n_p)``."""
        Q, P = np.meshgrid(self.q, self.p, indexing="ij")
        Q.setflags(write=False)
        P.setflags(write=False)
        return Q, P

    def field(self, values):
        return PhaseField(self, values)

    def sample(self, func):
        """Evaluate ``func(Q, P)`` on the mesh and wrap the result."""
        Q, P = self.mesh
        return PhaseField(self, np.broadcast_to(func(Q, P), self.shape))

    def zeros(self):
        return PhaseField(self, np.zeros(self.shape))


@dataclass(frozen=True, eq=False)
class PhaseField:
    """Real scalar field sampled on a :class:`PhaseGrid`.

    The values array is copied on construction and made read-only.
    """

    grid: PhaseGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(check_values(self.values, self.grid.shape), dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def _coerce(self, other):
        if isinstance(other, PhaseField):
            if other.grid != self.grid:
                raise GridMismatchError("fields are sampled on different grids")
            return other.values
        return other

    def __add__(self, other):
        return PhaseField(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return PhaseField(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return PhaseField(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return PhaseField(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return PhaseField(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return PhaseField(self.grid, -self.values)

    def __pow__(self, exponent):
        return PhaseField(self.grid, self.values ** exponent)

    def apply(self, func):
        """Return a new field with ``func`` applied elementwise."""
        return PhaseField(self.grid, func(self.values))

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def boundary_ratio(self, width=2):
        """Max |value| on the outermost `width` rows/columns over the global max."""
        a = np.abs(self.values)
        peak = a.max()
        if peak == 0.0:
            return 0.0
        edge = max(a[:width].max(), a[-width:].max(), a[:, :width].max(), a[:, -width:].max())
        return float(edge / peak)

    def check_boundary(self, tol=1e-10, what="field"):
        """Warn with :class:`BoundaryWarning` if the field is truncated by the grid."""
        ratio = self.boundary_ratio()
        if ratio > tol:
            warnings.warn(
                f"{what} reaches {ratio:.2e} of its peak at the grid boundary; "
                "widen the grid",
                BoundaryWarning,
                stacklevel=2,
            )
        return ratio


def integrate(f):
    """Trapezoidal double integral of `f` over the grid rectangle (dq dp measure)."""
    g = f.grid
    inner = np.trapezoid(f.values, dx=g.dp, axis=1)
    return float(np.trapezoid(inner, dx=g.dq))


EDGES = ("zero", "extrapolate")


def _extend(a, axis, edge):
    """Pad two nodes on each side along `axis`.

    ``"zero"`` suits fields that decay inside the grid (states).
    ``"extrapolate"`` continues the field as the quartic through the five
    outermost nodes, so polynomial Hamiltonians up to degree 4 keep exact
    derivatives right up to the edge.
    """
    if edge not in EDGES:
        raise ValueError(f"edge must be one of {EDGES}, got {edge!r}")
    pad = [(0, 0), (0, 0)]
    pad[axis] = (2, 2)
    z = np.pad(a, pad)
    if edge == "extrapolate":
        zt = np.moveaxis(z, axis, 0)
        n = zt.shape[0]
        # vanishing 5th difference: f[k] = 5f[k-1] - 10f[k-2] + 10f[k-3] - 5f[k-4] + f[k-5]
        for k in (n - 2, n - 1):
            zt[k] = (5 * zt[k - 1] - 10 * zt[k - 2] + 10 * zt[k - 3]
                     - 5 * zt[k - 4] + zt[k - 5])
        for k in (1, 0):
            zt[k] = (5 * zt[k + 1] - 10 * zt[k + 2] + 10 * zt[k + 3]
                     - 5 * zt[k + 4] + zt[k + 5])
    return z


def _central_diff(a, h, axis, edge="zero"):
    z = _extend(a, axis, edge)
    n = a.shape[axis]

    def s(k):
        idx = [slice(None), slice(None)]
        idx[axis] = slice(k, k + n)
        return z[tuple(idx)]

    c = _STENCIL
    return (c[0] * s(0) + c[1] * s(1) + c[3] * s(3) + c[4] * s(4)) / h


def d_dq(f, edge="zero"):
    """Partial derivative along q; `edge` selects how the field continues past the grid."""
    return PhaseField(f.grid, _central_diff(f.values, f.grid.dq, 0, edge))


def d_dp(f, edge="zero"):
    """Partial derivative along p."""
    return PhaseField(f.grid, _central_diff(f.values, f.grid.dp, 1, edge))


def d3(f, iq, ip, edge="zero"):
    """Mixed third derivative d^3 f / dq^iq dp^ip with ``iq + ip == 3``."""
    if not (isinstance(iq, numbers.Integral) and isinstance(ip, numbers.Integral)):
        raise TypeError("derivative orders must be integers")
    if iq < 0 or ip < 0 or iq + ip != 3:
        raise ValueError(f"third derivative requires iq + ip == 3, got ({iq}, {ip})")
    a = f.values
    g = f.grid
    for _ in range(ip):
        a = _central_diff(a, g.dp, 1, edge)
    for _ in range(iq):
        a = _central_diff(a, g.dq, 0, edge)
    return PhaseField(g, a)

"""Input validation helpers shared across modules."""

import numbers

import numpy as np
from sklearn.utils import check_array, check_scalar

from .exceptions import GridMismatchError


def check_values(values, shape=None, name="values"):
    """Return `values` as a finite 2-D float array, optionally of a given shape."""
    arr = check_array(
        values,
        dtype=np.float64,
        ensure_2d=True,
        ensure_all_finite=True,
        ensure_min_samples=1,
        input_name=name,
        copy=False,
    )
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    return arr


def check_times(times, name="times"):
    """Finite, strictly increasing 1-D float array."""
    arr = check_array(times, dtype=np.float64, ensure_2d=False, ensure_all_finite=True,
                      input_name=name)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if np.any(np.diff(arr) <= 0.0):
        raise ValueError(f"{name} must be strictly increasing")
    return arr


def check_positive(value, name):
    return check_scalar(
        value, name, numbers.Real, min_val=0.0, include_boundaries="neither"
    )


def check_nonnegative(value, name):
    return check_scalar(value, name, numbers.Real, min_val=0.0, include_boundaries="left")


def check_same_grid(*fields):
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError("fields are sampled on different grids")
    return grid


def check_units_match(grid, units):
    if not (np.isclose(grid.hbar, units.hbar, rtol=1e-12, atol=0.0)
            and np.isclose(grid.mass, units.mass, rtol=1e-12, atol=0.0)):
        raise ValueError(
            f"grid constants (hbar={grid.hbar}, mass={grid.mass}) disagree with "
            f"units (hbar={units.hbar}, mass={units.mass})"
        )

"""Compiled kernels for evaluating quintic B-spline fields at pulled-back points.

Only maps whose new q depends on q alone (``beta == 0``) are handled here:
the tensor-product spline then factorises into one 6-tap pass over rows and
one 6-tap pass along each row.  Coefficients come from
``scipy.ndimage.spline_filter``; coefficients beyond the grid are taken as 0.
"""

import numba
import numpy as np


@numba.njit(cache=True, inline="always")
def _weights(u, w):
    # quintic B-spline weights for taps k-2 .. k+3 at fractional offset u
    v = 1.0 - u
    w[0] = v**5 / 120.0
    x = u + 1.0
    w[1] = (51.0 + x * (75.0 + x * (-210.0 + x * (150.0 + x * (-45.0 + x * 5.0))))) / 120.0
    x2 = u * u
    w[2] = (66.0 + x2 * (-60.0 + x2 * 30.0) - 10.0 * x2 * x2 * u) / 120.0
    x2 = v * v
    w[3] = (66.0 + x2 * (-60.0 + x2 * 30.0) - 10.0 * x2 * x2 * v) / 120.0
    x = v + 1.0
    w[4] = (51.0 + x * (75.0 + x * (-210.0 + x * (150.0 + x * (-45.0 + x * 5.0))))) / 120.0
    w[5] = u**5 / 120.0


@numba.njit(cache=True)
def quintic_weights(u):
    w = np.empty(6)
    _weights(u, w)
    return w


@numba.njit(cache=True)
def pullback_separable(coeffs, x0, xs, y0, ys, yx):
    """Evaluate the spline at row coordinate ``x0 + xs*i`` and column
    coordinate ``y0 + yx*i + ys*j`` for every target node (i, j).

    Coordinates are in fractional index units; points outside the grid give 0.
    """
    nq, npp = coeffs.shape
    out = np.zeros((nq, npp))
    row = np.empty(npp)
    w = np.empty(6)
    for i in range(nq):
        x = x0 + xs * i
        if x < 0.0 or x > nq - 1:
            continue
        k = int(np.floor(x))
        _weights(x - k, w)
        row[:] = 0.0
        for m in range(6):
            kk = k - 2 + m
            if 0 <= kk < nq:
                wm = w[m]
                for j in range(npp):
                    row[j] += wm * coeffs[kk, j]
        base = y0 + yx * i
        for j in range(npp):
            y = base + ys * j
            if y < 0.0 or y > npp - 1:
                continue
            k2 = int(np.floor(y))
            _weights(y - k2, w)
            s = 0.0
            for m in range(6):
                kk = k2 - 2 + m
                if 0 <= kk < npp:
                    s += w[m] * row[kk]
            out[i, j] = s
    return out


@numba.njit(cache=True)
def outside_mass(abs_values, q, p, a, b, c, d):
    """Sum of ``abs_values`` at nodes whose image under (a b; c d) leaves the grid."""
    nq, npp = abs_values.shape
    qlo, qhi, plo, phi = q[0], q[nq - 1], p[0], p[npp - 1]
    total = 0.0
    for i in range(nq):
        for j in range(npp):
            qi = a * q[i] + b * p[j]
            pj = c * q[i] + d * p[j]
            if qi < qlo or qi > qhi or pj < plo or pj > phi:
                total += abs_values[i, j]
    return total


@numba.njit(cache=True)
def pullback_general(coeffs, x0, xq, xp, y0, yq, yp):
    """Evaluate the spline at ``(x0 + xq*i + xp*j, y0 + yq*i + yp*j)`` for every node."""
    nq, npp = coeffs.shape
    out = np.zeros((nq, npp))
    wx = np.empty(6)
    wy = np.empty(6)
    for i in range(nq):
        for j in range(npp):
            x = x0 + xq * i + xp * j
            y = y0 + yq * i + yp * j
            if x < 0.0 or x > nq - 1 or y < 0.0 or y > npp - 1:
                continue
            kx = int(np.floor(x))
            ky = int(np.floor(y))
            _weights(x - kx, wx)
            _weights(y - ky, wy)
            s = 0.0
            for a in range(6):
                ka = kx - 2 + a
                if ka < 0 or ka >= nq:
                    continue
                r = 0.0
                for c in range(6):
                    kc = ky - 2 + c
                    if 0 <= kc < npp:
                        r += wy[c] * coeffs[ka, kc]
                s += wx[a] * r
            out[i, j] = s
    return out

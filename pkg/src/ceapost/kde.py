"""Gaussian kernel density estimation and contour extraction.

Bandwidths follow Scott's rule (n^(-1/5) for one dimension, n^(-1/6) per
axis in two). Contours come from a plain marching-squares pass over the
density grid; highest-density-region thresholds are found by accumulating
sorted cell masses.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


def scott_bandwidth_1d(x: np.ndarray) -> float:
    n = x.size
    return float(x.std(ddof=1)) * n ** (-1 / 5)


def kde_1d(x, points: int = 256, pad: float = 4.0) -> tuple[np.ndarray, np.ndarray]:
    """Density curve of a sample on an evenly spaced evaluation grid.

    The grid spans the sample range padded by `pad` bandwidths so nearly
    all mass is covered (trapezoid integral within a couple of percent of
    one).
    """
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise ValidationError("need at least 2 samples for a density")
    h = scott_bandwidth_1d(x)
    if h <= 0:
        raise ValidationError("sample has zero variance; density unavailable")
    grid = np.linspace(x.min() - pad * h, x.max() + pad * h, points)
    z = (grid[:, None] - x[None, :]) / h
    density = np.exp(-0.5 * z * z).sum(axis=1) / (x.size * h * _SQRT_2PI)
    return grid, density


def kde_2d(
    x, y, gridsize: int = 100, pad: float = 3.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Two-dimensional product-kernel density on a gridsize x gridsize mesh.

    Returns (gx, gy, Z) with Z[iy, ix] the density at (gx[ix], gy[iy]).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 2 or y.size != n:
        raise ValidationError("need two equal-length samples with at least 2 points")
    hx = float(x.std(ddof=1)) * n ** (-1 / 6)
    hy = float(y.std(ddof=1)) * n ** (-1 / 6)
    if hx <= 0 or hy <= 0:
        raise ValidationError("sample has zero variance; density unavailable")
    gx = np.linspace(x.min() - pad * hx, x.max() + pad * hx, gridsize)
    gy = np.linspace(y.min() - pad * hy, y.max() + pad * hy, gridsize)
    ex = np.exp(-0.5 * ((gx[:, None] - x[None, :]) / hx) ** 2)
    ey = np.exp(-0.5 * ((gy[:, None] - y[None, :]) / hy) ** 2)
    Z = (ey @ ex.T) / (n * hx * hy * 2.0 * np.pi)
    return gx, gy, Z


def hdr_thresholds(Z: np.ndarray, cell_area: float, probs) -> list[float]:
    """Density thresholds whose superlevel sets hold the given mass shares."""
    flat = np.sort(Z.ravel())[::-1]
    mass = np.cumsum(flat) * cell_area
    out = []
    for p in probs:
        idx = int(np.searchsorted(mass, p * min(1.0, float(mass[-1]))))
        idx = min(idx, flat.size - 1)
        out.append(float(flat[idx]))
    return out


def _interp(c: float, a: float, b: float) -> float:
    return 0.5 if b == a else (c - a) / (b - a)


def marching_squares(
    gx: np.ndarray, gy: np.ndarray, Z: np.ndarray, level: float
) -> list[tuple[float, float, float, float]]:
    """Iso-contour of Z at one level, as a list of (x1, y1, x2, y2) segments.

    Saddle cells are disambiguated by the cell-centre value, so output is
    deterministic for a given grid.
    """
    segments: list[tuple[float, float, float, float]] = []
    ny, nx = Z.shape
    for i in range(ny - 1):
        y0, y1 = gy[i], gy[i + 1]
        for j in range(nx - 1):
            z00, z10 = Z[i, j], Z[i, j + 1]
            z01, z11 = Z[i + 1, j], Z[i + 1, j + 1]
            case = ((z00 > level) | ((z10 > level) << 1)
                    | ((z11 > level) << 2) | ((z01 > level) << 3))
            if case in (0, 15):
                continue
            x0, x1 = gx[j], gx[j + 1]
            # edge crossing points (bottom, right, top, left)
            bottom = (x0 + _interp(level, z00, z10) * (x1 - x0), y0)
            right = (x1, y0 + _interp(level, z10, z11) * (y1 - y0))
            top = (x0 + _interp(level, z01, z11) * (x1 - x0), y1)
            left = (x0, y0 + _interp(level, z00, z01) * (y1 - y0))
            pairs = {
                1: [(left, bottom)], 2: [(bottom, right)], 3: [(left, right)],
                4: [(right, top)], 6: [(bottom, top)], 7: [(left, top)],
                8: [(top, left)], 9: [(bottom, top)], 11: [(right, top)],
                12: [(left, right)], 13: [(bottom, right)], 14: [(left, bottom)],
            }
            if case in (5, 10):
                centre = 0.25 * (z00 + z10 + z01 + z11)
                if case == 5:
                    chosen = ([(left, top), (bottom, right)] if centre > level
                              else [(left, bottom), (right, top)])
                else:
                    chosen = ([(bottom, left), (top, right)] if centre > level
                              else [(left, top), (bottom, right)])
            else:
                chosen = pairs[case]
            for (ax, ay), (bx, by) in chosen:
                segments.append((float(ax), float(ay), float(bx), float(by)))
    return segments

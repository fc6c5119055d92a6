"""Projection geometry for spherical video metrics.

Covers the equirectangular (ERP) pixel <-> sphere mapping, the Craster
parabolic projection (CPP) forward/inverse pair, a deterministic Fibonacci
lattice point set, and nearest/bicubic plane sampling with longitude wrap.

Conventions: longitude in [-pi, pi), latitude in [-pi/2, pi/2], pixel
centers at (i + 0.5, j + 0.5). The CPP plane reuses the ERP scaling
(x in [-pi, pi], y in [-pi/2, pi/2], 2:1 aspect).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels

TWO_PI = 2.0 * math.pi
GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


def normalize_lon(lon):
    """Wrap longitude(s) into [-pi, pi)."""
    return (lon + math.pi) % TWO_PI - math.pi


# --- ERP mapping -------------------------------------------------------------

def erp_pixel_to_sph(i, j, w, h):
    """Sphere direction of pixel center (i, j) in a w x h ERP plane."""
    lon = (i + 0.5) / w * TWO_PI - math.pi
    lat = math.pi / 2.0 - (j + 0.5) / h * math.pi
    return lon, lat


def sph_to_erp_coords(lon, lat, w, h):
    """Fractional ERP pixel coordinates of a sphere direction.

    Exact inverse of erp_pixel_to_sph at pixel centers; callers wrap or
    clamp the fractional result.
    """
    x = (lon + np.pi) / TWO_PI * w - 0.5
    y = (np.pi / 2.0 - lat) / np.pi * h - 0.5
    return x, y


# --- uniform sphere point set ------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpherePointSet:
    """Deterministic near-uniform unit-sphere sample points."""

    lon: np.ndarray
    lat: np.ndarray
    unit_vectors: np.ndarray  # (n, 3)

    @property
    def n(self):
        return self.lon.shape[0]


@lru_cache(maxsize=8)
def fibonacci_point_set(n):
    """Fibonacci lattice of n points: z_k = 1 - (2k+1)/n, golden-angle lon."""
    if n < 1:
        raise ValueError("point count must be at least 1")
    k = np.arange(n, dtype=np.float64)
    z = 1.0 - (2.0 * k + 1.0) / n
    lat = np.arcsin(z)
    lon = normalize_lon(TWO_PI * k * (1.0 - 1.0 / GOLDEN_RATIO))
    r = np.sqrt(1.0 - z * z)
    vec = np.stack([r * np.cos(lon), r * np.sin(lon), z], axis=1)
    for arr in (lat, lon, vec):
        arr.setflags(write=False)
    return SpherePointSet(lon=lon, lat=lat, unit_vectors=vec)


# --- Craster parabolic projection ---------------------------------------------

def cpp_forward(lon, lat):
    """Sphere -> CPP plane: x = lon*(2*cos(2*lat/3) - 1), y = pi*sin(lat/3)."""
    x = lon * (2.0 * np.cos(2.0 * lat / 3.0) - 1.0)
    y = np.pi * np.sin(lat / 3.0)
    return x, y


def cpp_inverse(x, y):
    """CPP plane -> sphere; returns (lon, lat, valid).

    Points outside the parabolic footprint (|lon| > pi) are invalid. At the
    poles (|y| = pi/2, zero denominator) longitude is fixed to 0.
    """
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if np.any(np.abs(xa) > np.pi) or np.any(np.abs(ya) > np.pi / 2.0):
        raise ValueError("CPP coordinates outside plane bounds")
    lat = 3.0 * np.arcsin(ya / np.pi)
    denom = 2.0 * np.cos(2.0 * lat / 3.0) - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        lon = np.where(denom != 0.0, xa / np.where(denom != 0.0, denom, 1.0), 0.0)
    valid = np.abs(lon) <= np.pi
    lon = np.where(valid, lon, 0.0)
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(lon), float(lat), bool(valid)
    return lon, lat, valid


# --- plane sampling -----------------------------------------------------------

def _catmull_rom_weights(t):
    """4-tap interpolating cubic (a = -0.5) weights for fractions t in [0, 1)."""
    w0 = ((-0.5 * t + 1.0) * t - 0.5) * t
    w1 = (1.5 * t - 2.5) * t * t + 1.0
    w2 = ((-1.5 * t + 2.0) * t + 0.5) * t
    w3 = (0.5 * t - 0.5) * t * t
    return np.stack([w0, w1, w2, w3], axis=1)


def nearest_flat_indices(xs, ys, w, h):
    """Flat plane indices for nearest sampling: columns wrap, rows clamp."""
    cols = np.floor(xs + 0.5).astype(np.int64) % w
    rows = np.clip(np.floor(ys + 0.5).astype(np.int64), 0, h - 1)
    return (rows * w + cols).astype(np.int32)


def bicubic_tables(xs, ys, w, h):
    """Precomputed 4x4 tap indices and weights for batched bicubic sampling."""
    bx = np.floor(xs)
    by = np.floor(ys)
    wx = _catmull_rom_weights(xs - bx)
    wy = _catmull_rom_weights(ys - by)
    offs = np.arange(-1, 3, dtype=np.int64)
    cols = (bx.astype(np.int64)[:, None] + offs) % w
    rows = np.clip(by.astype(np.int64)[:, None] + offs, 0, h - 1)
    idx = (rows[:, :, None] * w + cols[:, None, :]).astype(np.int32)
    return idx, np.ascontiguousarray(wy), np.ascontiguousarray(wx)


def sample_nearest(plane, x, y):
    """Value at the nearest sample; column floor(x+0.5) wraps, row clamps."""
    data = getattr(plane, "data", plane)
    h, w = data.shape
    col = int(math.floor(x + 0.5)) % w
    row = min(max(int(math.floor(y + 0.5)), 0), h - 1)
    return int(data[row, col])


def sample_bicubic(plane, x, y):
    """Separable Catmull-Rom sample, clamped to [0, 255]; columns wrap."""
    data = getattr(plane, "data", plane)
    h, w = data.shape
    idx, wy, wx = bicubic_tables(np.array([x], dtype=np.float64),
                                 np.array([y], dtype=np.float64), w, h)
    flat = np.ascontiguousarray(data).reshape(-1)
    return float(_kernels.bicubic_points(flat, idx, wy, wx)[0])

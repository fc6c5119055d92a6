"""Raw planar YUV 4:2:0 8-bit I/O and plane resampling.

Files are headerless I420: for each frame the full-size Y plane is followed
by the quarter-size U and V planes. Dimensions are always supplied by the
caller; nothing is parsed from the file.
"""

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import FormatError

RESAMPLE_FILTERS = ("nearest", "bilinear", "lanczos3")


@dataclass(frozen=True)
class VideoSpec:
    """Geometry of a raw 4:2:0 file: even dimensions, 8-bit, frame count."""

    width: int
    height: int
    frame_count: int
    bit_depth: int = 8
    chroma: str = "4:2:0"

    @property
    def frame_bytes(self):
        return self.width * self.height * 3 // 2


@dataclass(frozen=True)
class Plane:
    """One 8-bit sample plane, row-major."""

    data: np.ndarray  # (height, width) uint8, C-contiguous

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]


@dataclass(frozen=True)
class Frame:
    y: Plane
    u: Plane
    v: Plane


def _check_dims(width, height):
    if width < 2 or height < 2:
        raise ValueError(f"dimensions must be at least 2x2, got {width}x{height}")
    if width % 2 or height % 2:
        raise ValueError(
            f"4:2:0 requires even dimensions, got {width}x{height}"
        )


def probe_yuv(path, width, height):
    """Validate a raw file against declared dimensions and count its frames."""
    _check_dims(width, height)
    size = os.path.getsize(path)
    if size == 0:
        raise FormatError(f"{path}: empty file")
    frame_bytes = width * height * 3 // 2
    if size % frame_bytes:
        raise FormatError(
            f"{path}: {size} bytes is not a multiple of the {width}x{height} "
            f"frame size ({frame_bytes}); truncated or misdeclared dimensions"
        )
    return VideoSpec(width=width, height=height, frame_count=size // frame_bytes)


def read_frame(spec, path, index):
    """Read one frame; planes are stored Y,U,V in row-major order."""
    if not 0 <= index < spec.frame_count:
        raise IndexError(
            f"frame {index} out of range [0, {spec.frame_count})"
        )
    w, h = spec.width, spec.height
    cw, ch = w // 2, h // 2
    raw = np.fromfile(path, dtype=np.uint8, count=spec.frame_bytes,
                      offset=index * spec.frame_bytes)
    if raw.size != spec.frame_bytes:
        raise FormatError(f"{path}: short read at frame {index}")
    y = raw[: w * h].reshape(h, w)
    u = raw[w * h: w * h + cw * ch].reshape(ch, cw)
    v = raw[w * h + cw * ch:].reshape(ch, cw)
    return Frame(y=Plane(y), u=Plane(u), v=Plane(v))


class VideoReader:
    """Frame access for one raw file; safe for concurrent reads."""

    def __init__(self, path, width, height):
        self.path = path
        self.spec = probe_yuv(path, width, height)

    @property
    def frame_count(self):
        return self.spec.frame_count

    def read_frame(self, index):
        return read_frame(self.spec, self.path, index)


def write_yuv(path, frames):
    """Write frames back out as raw I420 (test fixtures, round trips)."""
    with open(path, "wb") as fh:
        for f in frames:
            fh.write(f.y.data.tobytes())
            fh.write(f.u.data.tobytes())
            fh.write(f.v.data.tobytes())


# --- resampling -------------------------------------------------------------

def _lanczos3(x):
    ax = np.abs(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.sinc(x) * np.sinc(x / 3.0)
    out[ax >= 3.0] = 0.0
    return out


def _triangle(x):
    return np.maximum(0.0, 1.0 - np.abs(x))


_KERNELS = {"bilinear": (_triangle, 1.0), "lanczos3": (_lanczos3, 3.0)}


@lru_cache(maxsize=128)
def _tap_table(n_in, n_out, filter_name):
    """Per-output-pixel tap indices and normalized weights (pixel-center map).

    Downsampling widens the kernel by the scale factor; weights are
    normalized to unit DC gain before edge indices are clamped (edge
    replication keeps the full kernel mass).
    """
    kernel, radius = _KERNELS[filter_name]
    scale = n_in / n_out
    fscale = max(scale, 1.0)
    support = radius * fscale
    k = int(math.ceil(support)) * 2 + 1
    centers = (np.arange(n_out) + 0.5) * scale - 0.5
    start = np.floor(centers - support + 0.5).astype(np.int64)
    taps = start[:, None] + np.arange(k)
    w = kernel((taps - centers[:, None]) / fscale)
    w /= w.sum(axis=1, keepdims=True)
    idx = np.clip(taps, 0, n_in - 1).astype(np.int32)
    return idx, w


def _nearest_map(n_in, n_out):
    centers = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    return np.clip(np.floor(centers + 0.5).astype(np.int64), 0, n_in - 1)


def resample_plane(plane, out_w, out_h, filter="lanczos3"):
    """Resample to out_w x out_h; samples clamped to [0, 255].

    Identity geometry returns the input samples exactly for every filter.
    No horizontal wrap: plane-domain comparisons treat edges as edges.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError("output dimensions must be positive")
    if filter not in RESAMPLE_FILTERS:
        raise ValueError(f"unknown filter {filter!r}")
    data = plane.data if isinstance(plane, Plane) else plane
    h, w = data.shape
    if (out_w, out_h) == (w, h):
        out = data.copy()
    elif filter == "nearest":
        out = data[np.ix_(_nearest_map(h, out_h), _nearest_map(w, out_w))].copy()
    else:
        fimg = data.astype(np.float64)
        if out_w != w:
            idx, wts = _tap_table(w, out_w, filter)
            fimg = _kernels.resample_h(fimg, idx, wts)
        if out_h != h:
            idx, wts = _tap_table(h, out_h, filter)
            fimg = _kernels.resample_v(fimg, idx, wts)
        out = np.clip(np.rint(fimg), 0.0, 255.0).astype(np.uint8)
    return Plane(out) if isinstance(plane, Plane) else out

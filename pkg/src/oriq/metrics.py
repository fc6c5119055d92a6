"""PSNR-family metrics for 360 video and the three-phase sequence pipeline.

Five base metrics (PSNR, WS-PSNR, S-PSNR-NN, S-PSNR-I, CPP-PSNR) are
combined with three processing phases into the nine standard metric/phase
pairs:

    codec        -> PSNR, WS-PSNR           (plane domain, coded resolution)
    cross_format -> S-PSNR-NN/I, CPP-PSNR   (sphere domain, across resolutions)
    end_to_end   -> S-PSNR-NN/I, CPP-PSNR, WS-PSNR (after reconstruction)

A sequence score is the arithmetic mean of per-frame dB values; infinite
frames enter the mean at the configured cap (default 100 dB) while the raw
per-frame values are kept in the report.
"""

import math
import os
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import _kernels, sphere_geom
from .yuv_io import resample_plane

PEAK_SQ = 255.0 * 255.0


class MetricKind(str, Enum):
    PSNR = "psnr"
    WS_PSNR = "ws_psnr"
    SPSNR_NN = "spsnr_nn"
    SPSNR_I = "spsnr_i"
    CPP_PSNR = "cpp_psnr"


class Phase(str, Enum):
    CODEC = "codec"
    CROSS_FORMAT = "cross_format"
    END_TO_END = "end_to_end"


# The nine valid metric/phase pairs.
PHASE_METRICS = {
    Phase.CODEC: (MetricKind.PSNR, MetricKind.WS_PSNR),
    Phase.CROSS_FORMAT: (MetricKind.SPSNR_NN, MetricKind.SPSNR_I,
                         MetricKind.CPP_PSNR),
    Phase.END_TO_END: (MetricKind.SPSNR_NN, MetricKind.SPSNR_I,
                       MetricKind.CPP_PSNR, MetricKind.WS_PSNR),
}

PLANE_ORDER = ("y", "u", "v")


@dataclass(frozen=True)
class MetricConfig:
    sphere_points: int = 655362
    cpp_width: int = None  # None: reference luma dimensions
    cpp_height: int = None
    reconstruction_filter: str = "lanczos3"
    psnr_cap_db: float = 100.0
    planes: tuple = ("y",)
    cpp_sampler: str = "nearest"

    def __post_init__(self):
        if self.sphere_points < 1:
            raise ValueError("sphere_points must be at least 1")
        if self.psnr_cap_db <= 0:
            raise ValueError("psnr_cap_db must be positive")
        bad = [p for p in self.planes if p not in PLANE_ORDER]
        if bad:
            raise ValueError(f"unknown planes {bad}; expected subset of y,u,v")
        if self.cpp_sampler not in ("nearest", "bicubic"):
            raise ValueError(f"unknown cpp sampler {self.cpp_sampler!r}")


# --- per-frame metrics --------------------------------------------------------

def _as_array(plane):
    return np.ascontiguousarray(getattr(plane, "data", plane))


def sse_plane(ref, test):
    """Exact integer (sum of squared error, sample count) of equal planes."""
    r, t = _as_array(ref), _as_array(test)
    if r.shape != t.shape:
        raise ValueError(f"plane dimensions differ: {r.shape} vs {t.shape}")
    return _kernels.sse_u8(r, t), r.size


def psnr_from_mse(mse):
    """10*log10(255^2 / MSE); zero MSE returns the +inf sentinel."""
    if mse < 0:
        raise ValueError("MSE cannot be negative")
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(PEAK_SQ / mse)


@lru_cache(maxsize=64)
def ws_weights(height):
    """Per-row spherical-area weights for an ERP plane: cos of row latitude."""
    w = np.empty(height, dtype=np.float64)
    for j in range(height):
        w[j] = math.cos((j + 0.5 - height / 2.0) * math.pi / height)
    w.setflags(write=False)
    return w


def ws_psnr_frame(ref, test):
    """Latitude-weighted PSNR of two equal-size ERP planes."""
    r, t = _as_array(ref), _as_array(test)
    if r.shape != t.shape:
        raise ValueError(f"plane dimensions differ: {r.shape} vs {t.shape}")
    h, w = r.shape
    wts = ws_weights(h)
    rows = _kernels.row_sse_u8(r, t)
    num = math.fsum(float(wts[j]) * float(rows[j]) for j in range(h))
    den = w * math.fsum(float(x) for x in wts)
    return psnr_from_mse(num / den)


def _det_sumsq(d):
    """Deterministic sum of squares: fixed 4096-chunk partial sums combined
    with exact (compensated) summation."""
    sq = d * d
    parts = [float(np.sum(sq[i:i + 4096])) for i in range(0, sq.size, 4096)]
    return math.fsum(parts)


def spsnr_nn_frame(ref, test, pts):
    """Spherical PSNR with nearest-neighbor fetch; resolutions may differ."""
    r, t = _as_array(ref), _as_array(test)
    if pts.n < 1:
        raise ValueError("empty sphere point set")
    rv = r.reshape(-1)[_point_nearest_table(pts, r.shape[1], r.shape[0])]
    tv = t.reshape(-1)[_point_nearest_table(pts, t.shape[1], t.shape[0])]
    sse = _kernels.sqdiff_sum_u8(rv, tv)
    return psnr_from_mse(sse / pts.n)


def spsnr_i_frame(ref, test, pts):
    """Spherical PSNR with bicubic fetch; interpolated values stay real."""
    r, t = _as_array(ref), _as_array(test)
    if pts.n < 1:
        raise ValueError("empty sphere point set")
    rv = _point_bicubic_values(pts, r)
    tv = _point_bicubic_values(pts, t)
    return psnr_from_mse(_det_sumsq(rv - tv) / pts.n)


def cpp_psnr_frame(ref, test, cfg=None):
    """PSNR over a common Craster parabolic raster (valid footprint only)."""
    cfg = cfg or MetricConfig()
    r, t = _as_array(ref), _as_array(test)
    wc = cfg.cpp_width or r.shape[1]
    hc = cfg.cpp_height or r.shape[0]
    return _cpp_psnr(r, t, wc, hc, cfg.cpp_sampler)


def _cpp_psnr(r, t, wc, hc, sampler):
    count, rtab = _cpp_source_table(wc, hc, t_shape=r.shape, sampler=sampler)
    _, ttab = _cpp_source_table(wc, hc, t_shape=t.shape, sampler=sampler)
    if count == 0:
        raise ValueError(f"no valid CPP pixels in a {wc}x{hc} raster")
    if sampler == "nearest":
        rv = r.reshape(-1)[rtab]
        tv = t.reshape(-1)[ttab]
        sse = _kernels.sqdiff_sum_u8(rv, tv)
        return psnr_from_mse(sse / count)
    rv = _kernels.bicubic_points(r.reshape(-1), *rtab)
    tv = _kernels.bicubic_points(t.reshape(-1), *ttab)
    return psnr_from_mse(_det_sumsq(rv - tv) / count)


# --- cached geometry ----------------------------------------------------------

_PTS_TABLES = weakref.WeakKeyDictionary()


def _pts_tables(pts):
    """Sampling-table cache tied to a point set's lifetime."""
    return _PTS_TABLES.setdefault(pts, {})


def _point_nearest_table(pts, w, h):
    cache = _pts_tables(pts)
    key = ("nn", w, h)
    if key not in cache:
        x, y = sphere_geom.sph_to_erp_coords(pts.lon, pts.lat, w, h)
        cache[key] = sphere_geom.nearest_flat_indices(x, y, w, h)
    return cache[key]


def _point_bicubic_table(pts, w, h):
    cache = _pts_tables(pts)
    key = ("bicubic", w, h)
    if key not in cache:
        x, y = sphere_geom.sph_to_erp_coords(pts.lon, pts.lat, w, h)
        cache[key] = sphere_geom.bicubic_tables(x, y, w, h)
    return cache[key]


def _point_bicubic_values(pts, plane):
    idx, wy, wx = _point_bicubic_table(pts, plane.shape[1], plane.shape[0])
    return _kernels.bicubic_points(plane.reshape(-1), idx, wy, wx)


@lru_cache(maxsize=32)
def _cpp_source_table(wc, hc, t_shape, sampler):
    """(valid count, sampling table) mapping each valid CPP raster pixel to
    the source ERP plane of shape t_shape."""
    src_h, src_w = t_shape
    u = (np.arange(wc) + 0.5) / wc * 2.0 * np.pi - np.pi
    v = np.pi / 2.0 - (np.arange(hc) + 0.5) / hc * np.pi
    px = np.broadcast_to(u, (hc, wc)).reshape(-1)
    py = np.broadcast_to(v[:, None], (hc, wc)).reshape(-1)
    lon, lat, valid = sphere_geom.cpp_inverse(px, py)
    lon, lat = lon[valid], lat[valid]
    count = int(np.count_nonzero(valid))
    if count == 0:
        return 0, None
    x, y = sphere_geom.sph_to_erp_coords(lon, lat, src_w, src_h)
    if sampler == "nearest":
        return count, sphere_geom.nearest_flat_indices(x, y, src_w, src_h)
    return count, sphere_geom.bicubic_tables(x, y, src_w, src_h)


def cpp_valid_mask(wc, hc):
    """Boolean footprint mask of a wc x hc CPP raster."""
    u = (np.arange(wc) + 0.5) / wc * 2.0 * np.pi - np.pi
    v = np.pi / 2.0 - (np.arange(hc) + 0.5) / hc * np.pi
    px = np.broadcast_to(u, (hc, wc)).reshape(-1)
    py = np.broadcast_to(v[:, None], (hc, wc)).reshape(-1)
    _, _, valid = sphere_geom.cpp_inverse(px, py)
    return valid.reshape(hc, wc)


# --- sequence evaluation --------------------------------------------------------

@dataclass
class ScoreEntry:
    metric: str
    phase: str
    plane: str
    frames: list
    average: float


@dataclass
class SequenceReport:
    meta: dict
    scores: list

    def to_json_dict(self):
        def enc(v):
            return "inf" if math.isinf(v) else v

        return {
            "meta": self.meta,
            "scores": [
                {"metric": s.metric, "phase": s.phase, "plane": s.plane,
                 "frames": [enc(v) for v in s.frames], "average": s.average}
                for s in self.scores
            ],
        }

    def csv_rows(self):
        """Rows of (metric, phase, plane, frame, value); frame 'avg' last."""
        for s in self.scores:
            for i, v in enumerate(s.frames):
                yield s.metric, s.phase, s.plane, str(i), v
            yield s.metric, s.phase, s.plane, "avg", s.average


def resolve_pairs(phases=None, metrics=None):
    """Ordered valid (phase, metric) pairs for a request.

    Raises if a requested metric fits none of the requested phases (e.g.
    plain PSNR in the cross-format phase).
    """
    phases = list(PHASE_METRICS) if phases is None else [Phase(p) for p in phases]
    metrics = (list(MetricKind) if metrics is None
               else [MetricKind(m) for m in metrics])
    allowed = {m for ph in phases for m in PHASE_METRICS[ph]}
    for m in metrics:
        if m not in allowed:
            raise ValueError(
                f"metric {m.value} is not defined for phase(s) "
                f"{', '.join(p.value for p in phases)}"
            )
    return [(ph, m) for ph in PHASE_METRICS if ph in phases
            for m in PHASE_METRICS[ph] if m in metrics]


def _plane_dims(w, h, plane):
    return (w, h) if plane == "y" else (w // 2, h // 2)


def _frame_planes(frame, wanted):
    return {p: _as_array(getattr(frame, p)) for p in wanted}


def _eval_frame(ref_frame, test_frame, pairs, planes, cfg, pts):
    out = {}
    phases = {ph for ph, _ in pairs}
    ref = _frame_planes(ref_frame, planes)
    test = _frame_planes(test_frame, planes)
    for plane in planes:
        r, t = ref[plane], test[plane]
        rh, rw = r.shape
        th, tw = t.shape
        if Phase.CODEC in phases:
            rc = resample_plane(r, tw, th, "lanczos3")
            for ph, m in pairs:
                if ph is not Phase.CODEC:
                    continue
                if m is MetricKind.PSNR:
                    sse, n = sse_plane(rc, t)
                    out[(ph, m, plane)] = psnr_from_mse(sse / n)
                elif m is MetricKind.WS_PSNR:
                    out[(ph, m, plane)] = ws_psnr_frame(rc, t)
        if Phase.CROSS_FORMAT in phases:
            wc, hc = _cpp_dims(cfg, rw, rh, plane)
            for ph, m in pairs:
                if ph is not Phase.CROSS_FORMAT:
                    continue
                if m is MetricKind.SPSNR_NN:
                    out[(ph, m, plane)] = spsnr_nn_frame(r, t, pts)
                elif m is MetricKind.SPSNR_I:
                    out[(ph, m, plane)] = spsnr_i_frame(r, t, pts)
                elif m is MetricKind.CPP_PSNR:
                    out[(ph, m, plane)] = _cpp_psnr(r, t, wc, hc,
                                                    cfg.cpp_sampler)
        if Phase.END_TO_END in phases:
            tr = resample_plane(t, rw, rh, cfg.reconstruction_filter)
            wc, hc = _cpp_dims(cfg, rw, rh, plane)
            for ph, m in pairs:
                if ph is not Phase.END_TO_END:
                    continue
                if m is MetricKind.SPSNR_NN:
                    out[(ph, m, plane)] = spsnr_nn_frame(r, tr, pts)
                elif m is MetricKind.SPSNR_I:
                    out[(ph, m, plane)] = spsnr_i_frame(r, tr, pts)
                elif m is MetricKind.CPP_PSNR:
                    out[(ph, m, plane)] = _cpp_psnr(r, tr, wc, hc,
                                                    cfg.cpp_sampler)
                elif m is MetricKind.WS_PSNR:
                    out[(ph, m, plane)] = ws_psnr_frame(r, tr)
    return out


def _cpp_dims(cfg, ref_w, ref_h, plane):
    # Explicit raster dims apply to luma; chroma rasters use half of either.
    if cfg.cpp_width is None or cfg.cpp_height is None:
        return ref_w, ref_h
    if plane == "y":
        return cfg.cpp_width, cfg.cpp_height
    return max(2, cfg.cpp_width // 2), max(2, cfg.cpp_height // 2)


def evaluate_sequence(ref, test, phases=None, metrics=None, cfg=None,
                      threads=1, max_frames=None):
    """Evaluate all requested metric/phase pairs over two sequences.

    ref and test are VideoReader-like objects (frame_count, read_frame).
    Frame-count mismatches compare the common prefix and record a warning.
    Results are assembled in frame order regardless of thread count.
    """
    cfg = cfg or MetricConfig()
    pairs = resolve_pairs(phases, metrics)
    planes = [p for p in PLANE_ORDER if p in cfg.planes]
    warnings = []

    n = min(ref.frame_count, test.frame_count)
    if ref.frame_count != test.frame_count:
        warnings.append(
            f"frame count mismatch: ref {ref.frame_count}, "
            f"test {test.frame_count}; comparing first {n}"
        )
    if max_frames is not None:
        n = min(n, max_frames)
    if n < 1:
        raise ValueError("no frames to compare")

    needs_sphere = any(m in (MetricKind.SPSNR_NN, MetricKind.SPSNR_I)
                       for _, m in pairs)
    pts = (sphere_geom.fibonacci_point_set(cfg.sphere_points)
           if needs_sphere else None)

    rw, rh = ref.spec.width, ref.spec.height
    tw, th = test.spec.width, test.spec.height
    if any(ph is Phase.CODEC for ph, _ in pairs) and (rw, rh) != (tw, th):
        warnings.append(
            f"codec phase: reference resampled from {rw}x{rh} to "
            f"{tw}x{th} (lanczos3)"
        )

    def work(i):
        return _eval_frame(ref.read_frame(i), test.read_frame(i),
                           pairs, planes, cfg, pts)

    # Frame 0 runs serially, warming every geometry cache before the pool
    # starts; worker threads then only read shared tables.
    first = work(0)
    workers = threads if threads and threads > 0 else (os.cpu_count() or 1)
    if workers == 1 or n <= 1:
        per_frame = [first] + [work(i) for i in range(1, n)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_frame = [first] + list(pool.map(work, range(1, n)))

    cap = cfg.psnr_cap_db
    scores = []
    capped = 0
    for ph, m in pairs:
        for plane in planes:
            vals = [per_frame[i][(ph, m, plane)] for i in range(n)]
            capped += sum(1 for v in vals if v > cap)
            avg = math.fsum(min(v, cap) for v in vals) / n
            scores.append(ScoreEntry(metric=m.value, phase=ph.value,
                                     plane=plane, frames=vals, average=avg))
    if capped:
        warnings.append(f"{capped} frame score(s) exceeded the "
                        f"{cap:g} dB cap and were capped in averages")

    meta = {
        "ref": str(getattr(ref, "path", "")),
        "test": str(getattr(test, "path", "")),
        "ref_size": f"{rw}x{rh}",
        "test_size": f"{tw}x{th}",
        "frames": n,
        "planes": planes,
        "phases": sorted({ph.value for ph, _ in pairs},
                         key=[p.value for p in PHASE_METRICS].index),
        "metrics": sorted({m.value for _, m in pairs},
                          key=[m.value for m in MetricKind].index),
        "sphere_points": cfg.sphere_points if needs_sphere else None,
        "cpp_size": (f"{cfg.cpp_width}x{cfg.cpp_height}"
                     if cfg.cpp_width else f"{rw}x{rh}"),
        "cpp_sampler": cfg.cpp_sampler,
        "reconstruction_filter": cfg.reconstruction_filter,
        "psnr_cap_db": cap,
        "warnings": warnings,
    }
    return SequenceReport(meta=meta, scores=scores)

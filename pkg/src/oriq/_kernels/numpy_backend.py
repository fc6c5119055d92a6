"""Pure-numpy fallback for the compiled kernels.

Each function mirrors the accumulation order of its compiled counterpart
element by element, so the two backends produce bit-identical arrays (the
extension is built with FMA contraction disabled).
"""

import numpy as np

NAME = "numpy"


def sse_u8(a, b):
    if a.shape != b.shape:
        raise ValueError("plane dimensions differ")
    d = a.astype(np.int32) - b.astype(np.int32)
    return int(np.sum(d * d, dtype=np.int64))


def row_sse_u8(a, b):
    if a.shape != b.shape:
        raise ValueError("plane dimensions differ")
    d = a.astype(np.int32) - b.astype(np.int32)
    return np.sum(d * d, axis=1, dtype=np.int64)


def sqdiff_sum_u8(a, b):
    if a.shape != b.shape:
        raise ValueError("vector lengths differ")
    d = a.astype(np.int32) - b.astype(np.int32)
    return int(np.sum(d * d, dtype=np.int64))


def bicubic_points(flat, idx, wy, wx):
    src = flat.astype(np.float64)
    out = None
    for m in range(4):
        rowacc = src[idx[:, m, 0]] * wx[:, 0]
        for t in range(1, 4):
            rowacc += src[idx[:, m, t]] * wx[:, t]
        if out is None:
            out = rowacc * wy[:, 0]
        else:
            out += rowacc * wy[:, m]
    np.clip(out, 0.0, 255.0, out=out)
    return out


def resample_h(src, idx, w):
    out = src[:, idx[:, 0]] * w[:, 0]
    for t in range(1, idx.shape[1]):
        out += src[:, idx[:, t]] * w[:, t]
    return out


def resample_v(src, idx, w):
    out = src[idx[:, 0], :] * w[:, 0][:, None]
    for t in range(1, idx.shape[1]):
        out += src[idx[:, t], :] * w[:, t][:, None]
    return out

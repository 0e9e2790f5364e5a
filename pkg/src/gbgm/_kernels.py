"""Compiled stage-1/2 kernels for the two-stage generator.

The numpy composition in :mod:`gbgm.pipeline` issues a few dozen small array
calls per image, which dominates the run time of small images.  These numba
versions fuse purity, top-k selection and refinement into single calls.  If
numba is unavailable ``AVAILABLE`` is False and the pipeline falls back to
numpy; both paths produce identical masks.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    if os.environ.get("GBGM_DISABLE_NUMBA"):
        raise ImportError("disabled by GBGM_DISABLE_NUMBA")
    from numba import njit
except ImportError:
    AVAILABLE = False
else:
    AVAILABLE = True


def _budget(ratio, n):
    if n <= 0:
        return 0
    k = int(math.floor(ratio * n + 0.5))
    return min(n, max(1, k))


def _purity(x, s, c):
    # same arithmetic, in the same order, as the numpy version
    rows = x.shape[0] // s
    cols = x.shape[1] // s
    o = (s - c) // 2
    sums = np.zeros((rows, cols))
    for i in range(rows * s):
        bi = i // s
        for j in range(cols * s):
            bj = j // s
            sums[bi, bj] += x[i, j] - x[bi * s, bj * s]
    out = np.zeros((rows, cols))
    for bi in range(rows):
        for bj in range(cols):
            mu = sums[bi, bj] / (s * s)
            x0 = x[bi * s, bj * s]
            acc = 0.0
            for u in range(bi * s + o, bi * s + o + c):
                for v in range(bj * s + o, bj * s + o + c):
                    acc += abs((x[u, v] - x0) - mu)
            out[bi, bj] = acc / (c * c)
    return out


def _select(flat, idx, k, lowest):
    key = flat[idx] if lowest else -flat[idx]
    order = np.argsort(key, kind="mergesort")
    bits = np.zeros(flat.size, dtype=np.uint8)
    for t in range(k):
        bits[idx[order[t]]] = 1
    return bits


def _stage_masks(x, s1, c1, s2, c2, ratio1, ratio2, lowest):
    p1 = _purity(x, s1, c1).ravel()
    m1 = _select(p1, np.arange(p1.size), _budget(ratio1, p1.size), lowest)
    rows1 = x.shape[0] // s1
    cols1 = x.shape[1] // s1
    m1 = m1.reshape(rows1, cols1)
    cols2 = 2 * cols1
    n_cand = 0
    for i in range(rows1):
        for j in range(cols1):
            if m1[i, j] == 0:
                n_cand += 4
    m2 = np.zeros((2 * rows1, cols2), dtype=np.uint8)
    if n_cand == 0:
        return m1, m2
    idx = np.empty(n_cand, dtype=np.int64)
    t = 0
    for i in range(2 * rows1):
        for j in range(cols2):
            if m1[i // 2, j // 2] == 0:
                idx[t] = i * cols2 + j
                t += 1
    p2 = _purity(x, s2, c2).ravel()
    m2 = _select(p2, idx, _budget(ratio2, n_cand), lowest).reshape(2 * rows1, cols2)
    return m1, m2


def _normalized_importance(m2, eps):
    rows, cols = m2.shape
    imp = np.zeros((rows, cols))
    for i in range(rows):
        for j in range(cols):
            acc = 0
            for u in range(max(0, i - 1), min(rows, i + 2)):
                for v in range(max(0, j - 1), min(cols, j + 2)):
                    acc += m2[u, v]
            imp[i, j] = acc
    lo = imp.min()
    return (imp - lo) / (imp.max() - lo + eps)


if AVAILABLE:
    _budget = njit(cache=True)(_budget)
    _purity = njit(cache=True)(_purity)
    _select = njit(cache=True)(_select)
    stage_masks = njit(cache=True)(_stage_masks)
    normalized_importance = njit(cache=True)(_normalized_importance)
else:
    stage_masks = None
    normalized_importance = None

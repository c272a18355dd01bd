"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

The package runs entirely on numpy; the inner loops that dominate runtime
(Shapley subset accumulation, composite-row assembly for the value function,
and brute-force squared-distance scans) additionally have ``@njit`` versions.

Set ``PEERCF_NO_NUMBA=1`` before import to force the numpy fallbacks (or when
numba is not installed, the fallbacks are selected automatically). Both paths
compute the same quantities; ``benchmarks/bench_kernels.py`` compares them.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("PEERCF_NO_NUMBA", "").strip() in {"1", "true", "yes"}

if not _DISABLED:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAS_NUMBA = False
else:
    HAS_NUMBA = False


def backend() -> str:
    """Name of the active kernel backend: "numba" or "numpy"."""
    return "numba" if HAS_NUMBA else "numpy"


# --- pure-numpy implementations ----------------------------------------------

def _shapley_accumulate_np(v: np.ndarray, weights: np.ndarray, popcount: np.ndarray,
                           d: int) -> np.ndarray:
    """phi[i] = sum over subsets S without i of w(|S|) * (v[S+i] - v[S]).

    ``v`` holds the value function indexed by subset bitmask (length 2**d),
    ``weights[s]`` the Shapley weight s!(d-s-1)!/d!, ``popcount[m]`` the number
    of set bits in mask m.
    """
    masks = np.arange(v.shape[0], dtype=np.int64)
    phi = np.empty(d, dtype=np.float64)
    for i in range(d):
        bit = np.int64(1) << i
        without = masks[(masks & bit) == 0]
        phi[i] = np.sum(weights[popcount[without]] * (v[without | bit] - v[without]))
    return phi


def _fill_composites_np(masks: np.ndarray, x: np.ndarray, bg: np.ndarray) -> np.ndarray:
    """Rows x_S + bg_rest for every (mask, background row) pair.

    Returns an array of shape (n_masks * n_bg, d): feature i comes from ``x``
    when bit i of the mask is set, else from the background row.
    """
    take_x = masks[:, None, :]  # (n_masks, 1, d) bool
    out = np.where(take_x, x[None, None, :], bg[None, :, :])
    return out.reshape(-1, x.shape[0])


def _sq_distances_np(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    diff = points - q
    return np.einsum("ij,ij->i", diff, diff)


# --- numba implementations -----------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def _shapley_accumulate_nb(v, weights, popcount, d):
        n = v.shape[0]
        phi = np.zeros(d, dtype=np.float64)
        for m in range(n):
            w = weights[popcount[m]]
            vm = v[m]
            for i in range(d):
                if m & (1 << i) == 0:
                    phi[i] += w * (v[m | (1 << i)] - vm)
        return phi

    @njit(cache=True)
    def _fill_composites_nb(masks, x, bg):
        n_masks = masks.shape[0]
        n_bg = bg.shape[0]
        d = x.shape[0]
        out = np.empty((n_masks * n_bg, d), dtype=np.float64)
        for m in range(n_masks):
            base = m * n_bg
            for j in range(n_bg):
                row = base + j
                for i in range(d):
                    if masks[m, i]:
                        out[row, i] = x[i]
                    else:
                        out[row, i] = bg[j, i]
        return out

    @njit(cache=True)
    def _sq_distances_nb(points, q):
        n, d = points.shape
        out = np.empty(n, dtype=np.float64)
        for r in range(n):
            acc = 0.0
            for i in range(d):
                diff = points[r, i] - q[i]
                acc += diff * diff
            out[r] = acc
        return out

    shapley_accumulate = _shapley_accumulate_nb
    fill_composites = _fill_composites_nb
    sq_distances = _sq_distances_nb
else:
    shapley_accumulate = _shapley_accumulate_np
    fill_composites = _fill_composites_np
    sq_distances = _sq_distances_np


def warm_up() -> None:
    """Trigger JIT compilation on tiny inputs so request latency stays flat."""
    d = 2
    v = np.zeros(1 << d)
    weights = np.ones(d)
    popcount = np.zeros(1 << d, dtype=np.int64)
    shapley_accumulate(v, weights, popcount, d)
    masks = np.array([[True, False], [False, True]])
    fill_composites(masks, np.zeros(d), np.zeros((1, d)))
    sq_distances(np.zeros((2, d)), np.zeros(d))

import os
import subprocess
import sys

import numpy as np

from peercf import kernels
from peercf.kernels import (
    _fill_composites_np,
    _shapley_accumulate_np,
    _sq_distances_np,
    backend,
)


def test_backend_reports_numba_by_default():
    assert backend() in ("numba", "numpy")
    if not os.environ.get("PEERCF_NO_NUMBA"):
        assert backend() == "numba"


def test_env_flag_selects_numpy_fallback():
    code = "from peercf import kernels; print(kernels.backend())"
    env = dict(os.environ, PEERCF_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "numpy"


def test_shapley_accumulate_backends_agree():
    rng = np.random.default_rng(0)
    for d in (1, 3, 6, 10):
        v = rng.normal(size=1 << d)
        popcount = np.array([bin(m).count("1") for m in range(1 << d)], dtype=np.int64)
        weights = rng.uniform(0.1, 1.0, size=d)
        fast = kernels.shapley_accumulate(v, weights, popcount, d)
        slow = _shapley_accumulate_np(v, weights, popcount, d)
        np.testing.assert_allclose(fast, slow, atol=1e-12)


def test_fill_composites_backends_agree():
    rng = np.random.default_rng(1)
    for d, n_bg in ((2, 1), (4, 5), (7, 3)):
        masks = rng.random(size=(1 << d, d)) < 0.5
        x = rng.normal(size=d)
        bg = rng.normal(size=(n_bg, d))
        np.testing.assert_array_equal(
            kernels.fill_composites(masks, x, bg), _fill_composites_np(masks, x, bg)
        )


def test_sq_distances_backends_agree():
    rng = np.random.default_rng(2)
    points = rng.normal(size=(200, 8))
    q = rng.normal(size=8)
    np.testing.assert_allclose(
        kernels.sq_distances(points, q), _sq_distances_np(points, q), atol=1e-12
    )


def test_warm_up_runs():
    kernels.warm_up()

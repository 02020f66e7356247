import json
import os
import subprocess
import sys

import numpy as np
import pytest

from gmic import _kernels as K
from gmic._backend import NUMBA_AVAILABLE
from gmic.grid import Sample, equipartition_labels, rank_transform

pytestmark = pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not installed")


def _inputs(rng, n, j, ties):
    xs = rng.integers(0, ties, size=n).astype(float) if ties else rng.random(n)
    r = rank_transform(Sample(xs, rng.random(n) + xs))
    rows = equipartition_labels(r.y, j)[r.y.ranks][r.x.order]
    groups = r.x.group_of_rank
    return np.ascontiguousarray(groups, dtype=np.int64), np.ascontiguousarray(rows, dtype=np.int64)


@pytest.mark.parametrize("n, j, max_cols, c, ties", [(50, 2, 10, 15, 0), (200, 5, 8, 15, 0),
                                                     (120, 3, 12, 2, 0), (80, 4, 6, 15, 12),
                                                     (300, 2, 40, 1, 0)])
def test_optimize_axis_backends_agree(rng, n, j, max_cols, c, ties):
    for _ in range(5):
        groups, rows = _inputs(rng, n, j, ties)
        a = K._optimize_axis_nb(groups, rows, j, max_cols, c)
        b = K._optimize_axis_np(groups, rows, j, max_cols, c)
        assert np.allclose(a, b, atol=1e-12, rtol=0)


def test_equipartition_backends_agree(rng):
    for _ in range(50):
        sizes = rng.integers(1, 5, size=int(rng.integers(2, 30))).astype(np.int64)
        k = int(rng.integers(2, sizes.size + 1))
        assert np.array_equal(K._equipartition_groups_nb(sizes, k),
                              K._equipartition_groups_py(sizes, k))


def test_dcov_backends_agree(rng):
    for n in (2, 3, 17, 250):
        x, y = rng.normal(size=n), rng.normal(size=n) ** 2
        assert np.allclose(K._dcov_sums_nb(x, y), K._dcov_sums_np(x, y), atol=1e-9, rtol=1e-12)


def test_env_flag_selects_numpy_backend():
    code = ("import json, numpy as np, gmic; from gmic._backend import backend_name;"
            "rng = np.random.default_rng(3); x = rng.random(150); y = x**2 + rng.random(150)/4;"
            "C = gmic.char_matrix(x, y); print(json.dumps([backend_name(), C.entries().tolist()]))")
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, GMIC_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True)
        out[flag] = json.loads(res.stdout)
    assert out["0"][0] == "numba" and out["1"][0] == "numpy"
    assert np.allclose(out["0"][1], out["1"][1], atol=1e-12, rtol=0)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmic.baselines import distance_correlation, pearson_r2

# dcor of xs=[0,1,2], ys=[0,1,0] from literal 3x3 double-centred matrices,
# evaluated in exact rationals: dcov^2 = 8/81, dvar_x^2 = 40/81, dvar_y^2 = 16/81
DCOR_3PT = 0.56234132519034908


def test_pearson_examples():
    x = np.array([0.1, 0.3, 0.7, 0.9, 0.2])
    assert pearson_r2(x, x) == pytest.approx(1.0, abs=1e-15)
    assert pearson_r2(x, -2 * x + 7) == pytest.approx(1.0, abs=1e-12)
    xs = np.array([0.1, 0.3, 0.7, 0.9])
    assert pearson_r2(xs, 4 * (xs - 0.5) ** 2) == pytest.approx(0.0, abs=1e-15)


def test_pearson_constant_axis_is_zero(caplog):
    with caplog.at_level("INFO"):
        assert pearson_r2([1, 2, 3], [4, 4, 4]) == 0.0
    assert "zero variance" in caplog.text


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.floats(-5, 5), st.floats(-10, -0.1))
def test_pearson_affine_invariance(seed, a, b, c):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=30), rng.normal(size=30)
    base = pearson_r2(x, y)
    assert pearson_r2(a * x + b, c * y - b) == pytest.approx(base, abs=1e-12)


def test_dcor_linear_and_constant(rng):
    x = rng.random(200)
    assert distance_correlation(x, 2 * x + 1).dcor == pytest.approx(1.0, abs=1e-12)
    assert distance_correlation(x, np.full(200, 3.0)).dcor == 0.0


def test_dcor_three_points():
    res = distance_correlation([0, 1, 2], [0, 1, 0])
    assert res.dcor == pytest.approx(DCOR_3PT, abs=1e-12)
    assert res.dcov == pytest.approx(np.sqrt(8 / 81), abs=1e-14)
    assert res.dvar_x == pytest.approx(np.sqrt(40 / 81), abs=1e-14)
    assert res.dvar_y == pytest.approx(np.sqrt(16 / 81), abs=1e-14)


def _dcor_matrix_oracle(x, y):
    a = np.abs(x[:, None] - x[None, :])
    b = np.abs(y[:, None] - y[None, :])
    A = a - a.mean(0) - a.mean(1)[:, None] + a.mean()
    B = b - b.mean(0) - b.mean(1)[:, None] + b.mean()
    return np.sqrt((A * B).mean() / np.sqrt((A * A).mean() * (B * B).mean()))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 80))
def test_dcor_matches_matrix_formula(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    y = x ** 2 + rng.normal(size=n)
    got = distance_correlation(x, y).dcor
    assert 0.0 <= got <= 1.0
    assert got == pytest.approx(_dcor_matrix_oracle(x, y), abs=1e-10)

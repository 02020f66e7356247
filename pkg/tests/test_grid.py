import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gmic.grid import (ContingencyTable, DegenerateAxisError, GridPartition, InvalidInputError,
                       Sample, contingency, equipartition_axis, mutual_information,
                       rank_transform)


def test_rank_transform_sort_order():
    r = rank_transform(Sample([0.3, 0.1, 0.2], [1, 2, 3]))
    assert r.x_ranks.tolist() == [2, 0, 1]


def test_rank_transform_stable_ties():
    r = rank_transform(Sample([5, 5, 1], [0, 1, 2]))
    assert r.x_ranks.tolist() == [1, 2, 0]
    assert [1 for g in r.tie_groups_x if sorted(g) == [0, 1]] == [1]
    assert r.tie_groups_x == [[2], [0, 1]]


def test_rank_transform_identity():
    xs = np.linspace(-3, 7, 100)
    r = rank_transform(Sample(xs, xs[::-1]))
    assert r.x_ranks.tolist() == list(range(100))
    assert r.y_ranks.tolist() == list(range(99, -1, -1))


def test_rank_transform_rejects_tiny_or_bad_input():
    with pytest.raises(InvalidInputError):
        rank_transform(Sample([1.0], [2.0]))
    with pytest.raises(InvalidInputError):
        Sample([1.0, np.nan], [2.0, 3.0])
    with pytest.raises(InvalidInputError):
        Sample([1.0, 2.0], [2.0, 3.0, 4.0])


@pytest.mark.parametrize("sizes, k, expected", [
    ([1] * 6, 2, (3, 3)),
    ([1] * 7, 3, (3, 2, 2)),
    ([4, 1, 1], 2, (4, 2)),      # values [1,1,1,1,2,3]
    ([5, 1], 2, (5, 1)),
    ([5, 1, 1], 3, (5, 1, 1)),   # forced close keeps k bins non-empty
])
def test_equipartition_axis(sizes, k, expected):
    cuts = equipartition_axis(sizes, k)
    bins = np.diff(np.concatenate(([0], cuts, [sum(sizes)])))
    assert tuple(bins.tolist()) == expected


def test_equipartition_axis_degenerate():
    with pytest.raises(DegenerateAxisError):
        equipartition_axis([3, 3], 3)


@given(st.lists(st.integers(1, 5), min_size=2, max_size=40), st.integers(2, 12))
def test_equipartition_never_splits_and_fills_every_bin(sizes, k):
    if len(sizes) < k:
        return
    cuts = equipartition_axis(sizes, k)
    assert len(cuts) == k - 1
    boundaries = set(np.cumsum(sizes).tolist())
    assert set(cuts.tolist()) <= boundaries
    assert np.all(np.diff(np.concatenate(([0], cuts, [sum(sizes)]))) > 0)


def test_contingency_diagonal():
    r = rank_transform(Sample([0, 1, 2, 3], [0, 1, 2, 3]))
    t = contingency(r, GridPartition([2], [2]))
    assert t.counts.tolist() == [[2, 0], [0, 2]]
    assert t.total == 4


def test_contingency_rejects_cut_at_zero():
    with pytest.raises(InvalidInputError):
        GridPartition([0], [2])
    with pytest.raises(InvalidInputError):
        GridPartition([2, 2], [1])


def test_contingency_column_sums_at_median(rng):
    r = rank_transform(Sample(rng.random(6), rng.random(6)))
    t = contingency(r, GridPartition([3], [2, 4]))
    assert t.counts.shape == (2, 3)
    assert t.counts.sum(axis=1).tolist() == [3, 3]
    assert t.counts.sum(axis=0).tolist() == [2, 2, 2]


@pytest.mark.parametrize("counts, expected", [
    ([[1, 1], [1, 1]], 0.0),
    ([[5, 0], [0, 5]], 1.0),
    ([[2, 1], [1, 2]], 0.081704165945510485),   # mpmath evaluation of the entropy formula
])
def test_mutual_information_values(counts, expected):
    assert mutual_information(ContingencyTable(counts)) == pytest.approx(expected, abs=1e-14)


tables = arrays(np.int64, st.tuples(st.integers(2, 5), st.integers(2, 5)),
                elements=st.integers(0, 20)).filter(lambda a: a.sum() > 0)


def _h(c):
    p = c[c > 0] / c.sum()
    return float(-(p * np.log2(p)).sum())


@given(tables)
def test_mutual_information_symmetries_and_bounds(counts):
    mi = mutual_information(counts)
    assert mutual_information(counts.T) == pytest.approx(mi, abs=1e-12)
    assert mutual_information(counts[::-1]) == pytest.approx(mi, abs=1e-12)
    assert mutual_information(counts[:, ::-1]) == pytest.approx(mi, abs=1e-12)
    assert mi <= min(_h(counts.sum(0)), _h(counts.sum(1))) + 1e-12
    assert 0.0 <= mi <= np.log2(min(counts.shape)) + 1e-12


@settings(max_examples=50)
@given(arrays(np.float64, st.integers(4, 40),
              elements=st.integers(-400, 400).map(lambda v: v / 100)),
       st.randoms())
def test_ranks_and_counts_invariant_under_monotone_maps(xs, rnd):
    ys = np.array([rnd.uniform(-1, 1) for _ in xs])
    a = rank_transform(Sample(xs, ys))
    b = rank_transform(Sample(np.exp(xs), ys ** 3 + ys))
    assert a == b
    n = xs.size
    grid = GridPartition([n // 2], [max(1, n // 3)], n)
    assert np.array_equal(contingency(a, grid).counts, contingency(b, grid).counts)

"""Ranks, grid partitions, cell counts and plug-in mutual information."""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import equipartition_groups


class InvalidInputError(ValueError):
    pass


class DegenerateAxisError(ValueError):
    """An axis has too few distinct values for the requested number of bins."""


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Sample:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64).ravel()
        ys = np.asarray(self.ys, dtype=np.float64).ravel()
        if xs.shape != ys.shape:
            raise InvalidInputError(f"xs and ys differ in length ({xs.size} vs {ys.size})")
        if xs.size < 2:
            raise InvalidInputError(f"need at least 2 observations, got {xs.size}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidInputError("sample contains non-finite values")
        object.__setattr__(self, "xs", _readonly(xs))
        object.__setattr__(self, "ys", _readonly(ys))

    @property
    def n(self):
        return self.xs.size

    def swapped(self):
        return Sample(self.ys, self.xs)


@dataclass(frozen=True, eq=False)
class AxisRanks:
    """Stable ordinal ranks of one axis plus its tie structure.

    ``order[r]`` is the index of the point holding rank ``r`` and
    ``group_of_rank[r]`` the dense id of its tie group.
    """

    ranks: np.ndarray
    order: np.ndarray
    group_of_rank: np.ndarray
    group_sizes: np.ndarray

    @property
    def n_groups(self):
        return self.group_sizes.size

    @property
    def tie_groups(self):
        """Tie groups as lists of original indices, in ascending value order."""
        bounds = np.cumsum(self.group_sizes)[:-1]
        return [g.tolist() for g in np.split(self.order, bounds)]

    def __eq__(self, other):
        if not isinstance(other, AxisRanks):
            return NotImplemented
        return (np.array_equal(self.ranks, other.ranks)
                and np.array_equal(self.group_of_rank, other.group_of_rank))


def _rank_axis(values):
    order = np.argsort(values, kind="stable")
    ranks = np.empty_like(order)
    ranks[order] = np.arange(order.size)
    sorted_vals = values[order]
    new_group = np.empty(order.size, dtype=bool)
    new_group[0] = True
    new_group[1:] = sorted_vals[1:] != sorted_vals[:-1]
    group_of_rank = np.cumsum(new_group) - 1
    group_sizes = np.bincount(group_of_rank)
    return AxisRanks(*(_readonly(a) for a in (ranks, order, group_of_rank, group_sizes)))


@dataclass(frozen=True, eq=False)
class RankedSample:
    x: AxisRanks
    y: AxisRanks

    @property
    def n(self):
        return self.x.ranks.size

    @property
    def x_ranks(self):
        return self.x.ranks

    @property
    def y_ranks(self):
        return self.y.ranks

    @property
    def tie_groups_x(self):
        return self.x.tie_groups

    @property
    def tie_groups_y(self):
        return self.y.tie_groups

    def swapped(self):
        return RankedSample(self.y, self.x)

    def __eq__(self, other):
        if not isinstance(other, RankedSample):
            return NotImplemented
        return self.x == other.x and self.y == other.y


def rank_transform(sample):
    """Stable ordinal ranks of both axes; ties keep original index order."""
    if not isinstance(sample, Sample):
        sample = Sample(*sample)
    return RankedSample(_rank_axis(sample.xs), _rank_axis(sample.ys))


def equipartition_axis(group_sizes, k):
    """Split rank-ordered tie groups into ``k`` near-equal bins.

    Returns the cut positions: the rank at which each of bins 1..k-1 starts.
    Tie groups are never split.
    """
    sizes = np.asarray(group_sizes, dtype=np.int64)
    if k < 2:
        raise InvalidInputError(f"k must be >= 2, got {k}")
    if sizes.size < k:
        raise DegenerateAxisError(f"{sizes.size} distinct values cannot fill {k} bins")
    bins = equipartition_groups(sizes, k)
    bin_sizes = np.bincount(bins, weights=sizes, minlength=k).astype(np.int64)
    return np.cumsum(bin_sizes)[:-1]


def equipartition_labels(axis, k):
    """Bin label of every rank position when ``axis`` is equipartitioned into ``k`` bins."""
    if axis.n_groups < k:
        raise DegenerateAxisError(f"{axis.n_groups} distinct values cannot fill {k} bins")
    return equipartition_groups(axis.group_sizes, k)[axis.group_of_rank]


@dataclass(frozen=True, eq=False)
class GridPartition:
    """Grid given by rank thresholds; a cut ``t`` starts a new bin at rank ``t``."""

    col_cuts: tuple
    row_cuts: tuple
    n: int = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "col_cuts", tuple(int(c) for c in self.col_cuts))
        object.__setattr__(self, "row_cuts", tuple(int(c) for c in self.row_cuts))
        for name, cuts in (("col_cuts", self.col_cuts), ("row_cuts", self.row_cuts)):
            if len(cuts) < 1:
                raise InvalidInputError(f"{name} must hold at least one cut")
            if any(b <= a for a, b in zip(cuts, cuts[1:])):
                raise InvalidInputError(f"{name} must be strictly increasing: {cuts}")
            if cuts[0] <= 0 or (self.n is not None and cuts[-1] >= self.n):
                raise InvalidInputError(f"{name} must lie strictly inside (0, n): {cuts}")

    @property
    def shape(self):
        return len(self.col_cuts) + 1, len(self.row_cuts) + 1


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or np.any(counts < 0):
            raise InvalidInputError("counts must be a 2-d array of non-negative integers")
        object.__setattr__(self, "counts", _readonly(counts))

    @property
    def total(self):
        return int(self.counts.sum())


def contingency(ranked, grid):
    n = ranked.n
    for cuts in (grid.col_cuts, grid.row_cuts):
        if cuts[-1] >= n:
            raise InvalidInputError(f"cut {cuts[-1]} outside (0, {n})")
    cols = np.searchsorted(grid.col_cuts, ranked.x_ranks, side="right")
    rows = np.searchsorted(grid.row_cuts, ranked.y_ranks, side="right")
    i, j = grid.shape
    counts = np.bincount(cols * j + rows, minlength=i * j).reshape(i, j)
    return ContingencyTable(counts)


def _entropy_bits(counts):
    counts = np.asarray(counts, dtype=np.float64).ravel()
    total = counts.sum()
    nz = counts[counts > 0]
    return float(np.log2(total) - np.dot(nz, np.log2(nz)) / total)


def mutual_information(table):
    """Plug-in mutual information of a contingency table, in bits."""
    counts = table.counts if isinstance(table, ContingencyTable) else np.asarray(table)
    if counts.sum() <= 0:
        raise InvalidInputError("table is empty")
    mi = (_entropy_bits(counts.sum(axis=1)) + _entropy_bits(counts.sum(axis=0))
          - _entropy_bits(counts))
    return max(mi, 0.0)

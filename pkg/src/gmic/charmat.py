"""Characteristic matrix: approximate (dynamic programming) and exhaustive."""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import DegenerateAxisError, InvalidInputError, RankedSample, equipartition_labels

EXACT_MAX_N = 12
EXACT_MAX_B = 16


@dataclass(frozen=True)
class MineParams:
    """Grid budget exponent and clump factor.

    ``bound`` overrides ``max_grid_bound(n, alpha)`` when set; it exists so
    small samples can be checked against the exhaustive search on larger grids.
    """

    alpha: float = 0.6
    clump_factor: int = 15
    bound: int = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.clump_factor) != self.clump_factor or self.clump_factor < 1:
            raise InvalidInputError(f"clump_factor must be a positive integer, got {self.clump_factor}")
        if self.bound is not None and self.bound < 4:
            raise InvalidInputError(f"bound must be >= 4, got {self.bound}")

    def grid_bound(self, n):
        return self.bound if self.bound is not None else max_grid_bound(n, self.alpha)


def max_grid_bound(n, alpha=0.6):
    if n < 2:
        raise InvalidInputError(f"n must be >= 2, got {n}")
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    # the epsilon keeps exact powers such as 32**0.6 == 8 from rounding down
    return max(4, int(math.floor(n ** alpha + 1e-9)))


def grid_domain(bound):
    """All shapes (i, j) with i, j >= 2 and i * j <= bound, row-major."""
    return [(i, j) for i in range(2, bound // 2 + 1) for j in range(2, bound // i + 1)]


class CharacteristicMatrix:
    """Normalised scores indexed by grid shape ``(i, j)``.

    ``values[i, j]`` holds the score for shapes in the domain and NaN elsewhere.
    """

    def __init__(self, n, bound, values):
        side = bound // 2 + 1
        values = np.array(values, dtype=np.float64)
        if values.shape != (side, side):
            raise InvalidInputError(f"values must have shape {(side, side)}, got {values.shape}")
        mask = np.zeros((side, side), dtype=bool)
        for i, j in grid_domain(bound):
            mask[i, j] = True
        values[~mask] = np.nan
        values.setflags(write=False)
        mask.setflags(write=False)
        self.n = n
        self.bound = bound
        self.values = values
        self.mask = mask

    @classmethod
    def from_entries(cls, entries, bound, n=None):
        """Build from a mapping ``{(i, j): score}`` that covers the whole domain."""
        side = bound // 2 + 1
        values = np.full((side, side), np.nan)
        for (i, j), v in entries.items():
            values[i, j] = v
        out = cls(n, bound, values)
        missing = [ij for ij in out.domain if np.isnan(out.values[ij])]
        if missing:
            raise InvalidInputError(f"entries missing for shapes {missing}")
        return out

    @property
    def domain(self):
        return grid_domain(self.bound)

    def entries(self):
        """Domain scores as a flat array, row-major over ``domain``."""
        return self.values[self.mask]

    def as_dict(self):
        return {ij: float(self.values[ij]) for ij in self.domain}

    def __getitem__(self, ij):
        i, j = ij
        if not (i >= 2 and j >= 2 and i * j <= self.bound):
            raise KeyError(ij)
        return float(self.values[i, j])

    def transpose(self):
        return type(self)(self.n, self.bound, self.values.T)

    def __eq__(self, other):
        if not isinstance(other, CharacteristicMatrix):
            return NotImplemented
        return (self.bound == other.bound
                and np.array_equal(self.entries(), other.entries()))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, bound={self.bound}, shapes={int(self.mask.sum())})"


def _normalise(n, bound, mi):
    values = np.full(mi.shape, np.nan)
    for i, j in grid_domain(bound):
        values[i, j] = min(max(mi[i, j] / math.log2(min(i, j)), 0.0), 1.0)
    return CharacteristicMatrix(n, bound, values)


def optimize_x_axis(ranked, row_labels, n_rows, max_cols, clump_factor=15):
    """Best mutual information (bits) for each column count 2..max_cols.

    ``row_labels[p]`` is the fixed row bin of point ``p`` (original index).
    Returns an array ``out`` with ``out[l]`` for ``l`` in ``2..max_cols``;
    entries 0 and 1 are unused. Every value is a lower bound on the exact
    maximum over column placements.
    """
    if max_cols < 2 or n_rows < 1:
        raise InvalidInputError("need max_cols >= 2 and at least one row")
    rows = np.asarray(row_labels, dtype=np.int64)[ranked.x.order]
    return _kernels.optimize_axis(np.ascontiguousarray(ranked.x.group_of_rank), rows,
                                  n_rows, max_cols, clump_factor)


def _oriented_mi(ranked, bound, clump_factor, out, transpose):
    # cut ranked.x freely, hold ranked.y equipartitioned into j rows
    groups = np.ascontiguousarray(ranked.x.group_of_rank)
    for j in range(2, bound // 2 + 1):
        max_cols = bound // j
        try:
            labels = equipartition_labels(ranked.y, j)
        except DegenerateAxisError:
            continue
        rows = labels[ranked.y.ranks][ranked.x.order]
        mi = _kernels.optimize_axis(groups, rows, j, max_cols, clump_factor)
        for i in range(2, max_cols + 1):
            key = (j, i) if transpose else (i, j)
            if mi[i] > out[key]:
                out[key] = mi[i]


def approx_char_matrix(ranked, params=MineParams()):
    """Approximate characteristic matrix over every shape with i*j <= B(n).

    Each entry is the larger of the two orientations: columns optimised against
    equipartitioned rows, and rows optimised against equipartitioned columns.
    """
    if not isinstance(ranked, RankedSample):
        raise InvalidInputError("approx_char_matrix expects a RankedSample")
    n = ranked.n
    if n < 4:
        raise InvalidInputError(f"MINE statistics need n >= 4, got {n}")
    bound = params.grid_bound(n)
    side = bound // 2 + 1
    mi = np.zeros((side, side))
    if ranked.x.n_groups >= 2 and ranked.y.n_groups >= 2:
        _oriented_mi(ranked, bound, params.clump_factor, mi, transpose=False)
        _oriented_mi(ranked.swapped(), bound, params.clump_factor, mi, transpose=True)
    return _normalise(n, bound, mi)


def _cut_candidates(axis):
    return (np.cumsum(axis.group_sizes)[:-1]).tolist()


def _labelings(ranks, candidates, k):
    # every way to place k-1 cuts among candidate positions -> (combos, n) labels
    combos = list(itertools.combinations(candidates, k - 1))
    if not combos:
        return np.zeros((0, ranks.size), dtype=np.int64)
    cuts = np.array(combos)
    return (ranks[None, :, None] >= cuts[:, None, :]).sum(axis=2)


def _max_mi_exhaustive(col_labels, row_labels, i, j):
    n = col_labels.shape[1]
    best = 0.0
    eye = np.eye(i * j, dtype=np.int64)
    for cl in col_labels:
        cells = cl[None, :] * j + row_labels
        counts = eye[cells].sum(axis=1).astype(np.float64)
        p = counts / n
        pc = p.reshape(-1, i, j).sum(axis=2)
        pr = p.reshape(-1, i, j).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            h = lambda q: -np.where(q > 0, q * np.log2(q), 0.0).sum(axis=1)
            mi = h(pc) + h(pr) - h(p)
        best = max(best, float(mi.max()))
    return best


def exact_char_matrix(ranked, bound):
    """Characteristic matrix by exhaustive search over all cut placements.

    Intended as a test oracle; refuses n > 12 or bound > 16. When an axis has
    fewer distinct values than requested bins, every distinct value gets its
    own bin.
    """
    n = ranked.n
    if n > EXACT_MAX_N or bound > EXACT_MAX_B:
        raise InvalidInputError(
            f"exact search limited to n <= {EXACT_MAX_N} and bound <= {EXACT_MAX_B}"
            f" (got n={n}, bound={bound})")
    if n < 4 or bound < 4:
        raise InvalidInputError("exact search needs n >= 4 and bound >= 4")
    side = bound // 2 + 1
    mi = np.zeros((side, side))
    xc, yc = _cut_candidates(ranked.x), _cut_candidates(ranked.y)
    if xc and yc:
        cols = {k: _labelings(ranked.x_ranks, xc, min(k, len(xc) + 1))
                for k in range(2, bound // 2 + 1)}
        rows = {k: _labelings(ranked.y_ranks, yc, min(k, len(yc) + 1))
                for k in range(2, bound // 2 + 1)}
        for i, j in grid_domain(bound):
            ii, jj = min(i, len(xc) + 1), min(j, len(yc) + 1)
            mi[i, j] = _max_mi_exhaustive(cols[i], rows[j], ii, jj)
    return _normalise(n, bound, mi)

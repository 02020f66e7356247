"""MIC, the generalized-mean family GMIC_p, MinIC and MCN."""

import math

import numpy as np
from scipy.special import logsumexp

from .charmat import CharacteristicMatrix
from .grid import InvalidInputError


class MaximalCharacteristicMatrix(CharacteristicMatrix):
    """Running maximum of a characteristic matrix over grid size ``i * j``."""


def maximal_char_matrix(C):
    """C*[i, j] = max of C[k, l] over all shapes with k * l <= i * j."""
    if isinstance(C, MaximalCharacteristicMatrix):
        return C
    domain = C.domain
    sizes = np.array([i * j for i, j in domain])
    vals = np.array([C.values[ij] for ij in domain])
    order = np.argsort(sizes, kind="stable")
    running = np.maximum.accumulate(vals[order])
    # shapes sharing a grid size all see the max over that size
    sorted_sizes = sizes[order]
    last_of_size = np.searchsorted(sorted_sizes, sorted_sizes, side="right") - 1
    star = np.empty_like(vals)
    star[order] = running[last_of_size]
    out = np.full(C.values.shape, np.nan)
    for (i, j), v in zip(domain, star):
        out[i, j] = v
    return MaximalCharacteristicMatrix(C.n, C.bound, out)


def _as_p(p):
    p = float(p)
    if math.isnan(p):
        raise InvalidInputError("p must not be NaN")
    return p


def generalized_mean(values, p):
    """Power mean of non-negative values; p = 0 is the geometric mean.

    Any zero entry makes the result 0 for p <= 0.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise InvalidInputError("empty set of values")
    p = _as_p(p)
    if p == math.inf:
        return float(v.max())
    if p == -math.inf:
        return float(v.min())
    if p <= 0 and np.any(v <= 0.0):
        return 0.0
    with np.errstate(divide="ignore"):
        logs = np.log(v)
    spread = float(np.ptp(logs)) if np.all(np.isfinite(logs)) else math.inf
    if p == 0.0 or abs(p) * spread < 1e-6:
        # near p = 0 the log of the power mean is mean + p/2 * var of the logs;
        # the direct formula would divide round-off by a tiny p
        out = float(np.exp(logs.mean() + 0.5 * p * logs.var()))
    else:
        # log of the mean of v**p, evaluated without overflow for large |p|
        log_mean = logsumexp(p * logs) - math.log(v.size)
        out = float(np.exp(log_mean / p))
    # keep inside [min, max] despite round-off
    return min(max(out, float(v.min())), float(v.max()))


def gmic(C, p):
    """Generalized mean of the maximal characteristic matrix with exponent ``p``.

    ``C`` may be a plain characteristic matrix; it is transformed first.
    """
    return generalized_mean(maximal_char_matrix(C).entries(), p)


def mic(C):
    return float(np.max(C.entries()))


def minic(C):
    return float(maximal_char_matrix(C).values[2, 2])


def mcn(C, delta=0.05):
    """Smallest log2(i*j) over shapes scoring within a (1 - delta) factor of MIC."""
    if not 0.0 < delta <= 1.0:
        raise InvalidInputError(f"delta must lie in (0, 1], got {delta}")
    if isinstance(C, MaximalCharacteristicMatrix):
        raise InvalidInputError("mcn is defined on the characteristic matrix, not C*")
    threshold = (1.0 - delta) * mic(C)
    return min(math.log2(i * j) for (i, j) in C.domain if C.values[i, j] >= threshold)

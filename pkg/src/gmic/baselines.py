"""Squared Pearson correlation and empirical distance correlation."""

import collections
import logging

import numpy as np

from ._kernels import dcov_sums
from .grid import Sample

log = logging.getLogger(__name__)

DcorComponents = collections.namedtuple("DcorComponents", ["dcov", "dvar_x", "dvar_y", "dcor"])


def _arrays(sample, ys=None):
    if ys is not None:
        sample = Sample(sample, ys)
    elif not isinstance(sample, Sample):
        sample = Sample(*sample)
    return sample.xs, sample.ys


def pearson_r2(sample, ys=None):
    """Square of the sample Pearson correlation; 0 when either axis is constant."""
    x, y = _arrays(sample, ys)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = np.dot(xc, xc)
    syy = np.dot(yc, yc)
    if sxx == 0.0 or syy == 0.0:
        log.info("pearson_r2: zero variance on one axis, returning 0")
        return 0.0
    r2 = np.dot(xc, yc) ** 2 / (sxx * syy)
    return float(min(r2, 1.0))


def distance_correlation(sample, ys=None):
    """Empirical distance covariance, variances and correlation (univariate).

    Uses the V-statistic with 1/n^2 normalisation. The numba kernel streams
    over pairs in O(1) extra memory; the numpy fallback materialises the n x n
    distance matrices.
    """
    x, y = _arrays(sample, ys)
    sab, saa, sbb = dcov_sums(x, y)
    # a constant axis has zero distance variance; drop kernel round-off
    if np.ptp(x) == 0.0:
        sab = saa = 0.0
    if np.ptp(y) == 0.0:
        sab = sbb = 0.0
    n2 = float(x.size) ** 2
    # the V-statistics are non-negative; anything below zero is round-off
    dcov = float(np.sqrt(max(sab / n2, 0.0)))
    dvar_x = float(np.sqrt(max(saa / n2, 0.0)))
    dvar_y = float(np.sqrt(max(sbb / n2, 0.0)))
    denom = np.sqrt(dvar_x * dvar_y)
    if denom <= 0.0:
        return DcorComponents(dcov, dvar_x, dvar_y, 0.0)
    dcor = min(max(dcov / denom, 0.0), 1.0)
    return DcorComponents(dcov, dvar_x, dvar_y, float(dcor))

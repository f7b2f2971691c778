"""Deterministic transforms applied to series before estimation.

Each function accepts either a :class:`~causalweb.core.ProcessSeries` or a
plain 1-D array and returns the same kind of object.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import ndtri

from .core import ProcessSeries, ValidationError

__all__ = ["gauss_rank_transform", "moving_average", "add_noise"]

DEFAULT_TAIL_CUT = 0.0425


def _unwrap(series):
    if isinstance(series, ProcessSeries):
        return series.name, series.values
    values = np.asarray(series, dtype=float)
    if values.ndim != 1:
        raise ValidationError("expected a one-dimensional series")
    return None, values


def _wrap(name, values):
    return values if name is None else ProcessSeries(name, values)


def gauss_rank_transform(series, tail_cut: float = DEFAULT_TAIL_CUT):
    """Map a series onto a truncated standard normal through its ranks.

    The empirical CDF is compressed into ``[tail_cut, 1 - tail_cut]`` and
    pushed through the standard-normal quantile function,

        u_i = tail_cut + (r_i - 1/2) / T * (1 - 2 tail_cut),   out_i = Phi^-1(u_i)

    with ``r_i`` the 1-based rank.  Ties are broken by sample index, so
    the output values are always distinct.

    Parameters
    ----------
    series : ProcessSeries or array_like
        Input samples, length T >= 2.
    tail_cut : float
        Probability mass removed from each tail, in ``[0, 0.5)``.
    """
    name, values = _unwrap(series)
    if not 0.0 <= tail_cut < 0.5:
        raise ValidationError("tail_cut must lie in [0, 0.5)")
    n = values.size
    if n < 2:
        raise ValidationError("rank transform needs at least two samples")
    if np.all(values == values[0]):
        raise ValidationError(f"series {name or '<array>'} is constant; cannot rank-transform")
    order = np.argsort(values, kind="stable")
    ranks = np.empty(n)
    ranks[order] = np.arange(1, n + 1)
    u = tail_cut + (ranks - 0.5) / n * (1.0 - 2.0 * tail_cut)
    return _wrap(name, ndtri(u))


def moving_average(series, window: int = 5):
    """Centered running mean; the ``window - 1`` edge samples are dropped."""
    name, values = _unwrap(series)
    window = int(window)
    if window < 1 or window % 2 == 0:
        raise ValidationError(f"window must be a positive odd integer, got {window}")
    if window > values.size:
        raise ValidationError(f"window {window} exceeds series length {values.size}")
    if window == 1:
        return _wrap(name, values.copy())
    out = sliding_window_view(values, window).sum(axis=1) / window
    return _wrap(name, out)


def add_noise(series, sigma: float, seed=None):
    """Add i.i.d. N(0, sigma^2) noise; reproducible for a given seed."""
    name, values = _unwrap(series)
    if sigma < 0:
        raise ValidationError("sigma must be non-negative")
    if sigma == 0:
        return _wrap(name, values.copy())
    rng = np.random.default_rng(seed)
    return _wrap(name, values + sigma * rng.standard_normal(values.size))

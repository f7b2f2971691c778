"""k-nearest-neighbour estimators of entropy, MI and conditional MI.

All estimators use the maximum norm on the joint space and natural logs,
so every value is in nats.

* :func:`entropy_kl` -- Kozachenko-Leonenko differential entropy.
* :func:`mi_ksg` -- Kraskov-Stoegbauer-Grassberger estimator, algorithm 1.
* :func:`cmi_ksg` -- conditional MI, either the direct Frenzel-Pompe
  estimator (k-th neighbour radius in the joint space, strict counts in the
  ``(x, z)``, ``(y, z)`` and ``z`` subspaces) or the chain rule
  ``I(x; y, z) - I(x; z)``.

Neighbour counts include only points strictly closer than the radius.
Searching is done with a k-d tree; an exact brute-force search is used
below :data:`BRUTE_FORCE_LIMIT` points and serves as the reference in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .core import NumericalError, ValidationError

__all__ = [
    "EstimatorParams",
    "BRUTE_FORCE_LIMIT",
    "kth_neighbor_distances",
    "count_within",
    "entropy_kl",
    "mi_ksg",
    "cmi_ksg",
]

BRUTE_FORCE_LIMIT = 512


@dataclass(frozen=True)
class EstimatorParams:
    """Settings shared by the k-NN estimators.

    Parameters
    ----------
    k : int
        Number of nearest neighbours (default 4).
    cmi_mode : {"direct", "chain"}
        Conditional MI estimator.
    neighbor_search : {"auto", "kdtree", "brute"}
        ``"auto"`` uses brute force below ``BRUTE_FORCE_LIMIT`` points.
    """

    k: int = 4
    cmi_mode: str = "direct"
    neighbor_search: str = "auto"

    def __post_init__(self):
        if int(self.k) < 1:
            raise ValidationError("k must be >= 1")
        if self.cmi_mode not in ("direct", "chain"):
            raise ValidationError(f"unknown cmi mode {self.cmi_mode!r}")
        if self.neighbor_search not in ("auto", "kdtree", "brute"):
            raise ValidationError(f"unknown neighbor search {self.neighbor_search!r}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def units(self) -> str:
        return "nats"


DEFAULT_PARAMS = EstimatorParams()


def _as_points(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValidationError(f"expected a (M, d) sample matrix, got shape {arr.shape}")
    return np.ascontiguousarray(arr)


def _use_brute(n_points, method):
    if method == "brute":
        return True
    if method == "kdtree":
        return False
    return n_points < BRUTE_FORCE_LIMIT


def _chebyshev_matrix(points):
    dist = np.zeros((points.shape[0], points.shape[0]))
    for j in range(points.shape[1]):
        col = points[:, j]
        np.maximum(dist, np.abs(col[:, None] - col[None, :]), out=dist)
    np.fill_diagonal(dist, np.inf)
    return dist


def kth_neighbor_distances(points, k, method="auto") -> np.ndarray:
    """Max-norm distance from every point to its k-th nearest other point."""
    points = _as_points(points)
    n = points.shape[0]
    if n <= k:
        raise ValidationError(f"need more than k={k} samples, got {n}")
    if _use_brute(n, method):
        dist = _chebyshev_matrix(points)
        return np.partition(dist, k - 1, axis=1)[:, k - 1]
    # the query point itself comes back at distance 0
    dist, _ = cKDTree(points).query(points, k=k + 1, p=np.inf)
    return dist[:, k]


def count_within(points, radii, method="auto") -> np.ndarray:
    """Number of other points strictly closer than ``radii[i]`` to point i."""
    points = _as_points(points)
    radii = np.asarray(radii, dtype=float)
    if _use_brute(points.shape[0], method):
        return (_chebyshev_matrix(points) < radii[:, None]).sum(axis=1)
    # largest float below the radius turns "<=" into "<"
    inner = np.nextafter(radii, -np.inf)
    counts = cKDTree(points).query_ball_point(points, inner, p=np.inf, return_length=True)
    return np.asarray(counts) - 1


def _check_radii(eps):
    if np.any(eps <= 0):
        raise ValidationError(
            "duplicate sample points (zero neighbour distance); "
            "rank-transform the data or remove ties"
        )


def _finite(value, what):
    value = float(value)
    if not np.isfinite(value):
        raise NumericalError(f"{what} estimate is not finite")
    return value


def entropy_kl(points, params: EstimatorParams = DEFAULT_PARAMS) -> float:
    """Kozachenko-Leonenko entropy estimate in nats.

    ``H = psi(M) - psi(k) + d * mean(log(2 eps_i))`` where ``eps_i`` is the
    max-norm distance to the k-th neighbour.
    """
    points = _as_points(points)
    n, d = points.shape
    eps = kth_neighbor_distances(points, params.k, params.neighbor_search)
    _check_radii(eps)
    h = digamma(n) - digamma(params.k) + d * np.mean(np.log(2.0 * eps))
    return _finite(h, "entropy")


def _check_blocks(*blocks):
    rows = {b.shape[0] for b in blocks}
    if len(rows) != 1:
        raise ValidationError(f"sample blocks have different lengths: {sorted(rows)}")


def mi_ksg(x, y, params: EstimatorParams = DEFAULT_PARAMS) -> float:
    """KSG (algorithm 1) estimate of I(x; y) in nats."""
    x, y = _as_points(x), _as_points(y)
    _check_blocks(x, y)
    n, k = x.shape[0], params.k
    if n <= k:
        raise ValidationError(f"need more than k={k} samples, got {n}")
    method = params.neighbor_search
    eps = kth_neighbor_distances(np.hstack([x, y]), k, method)
    _check_radii(eps)
    nx = count_within(x, eps, method)
    ny = count_within(y, eps, method)
    mi = digamma(k) + digamma(n) - np.mean(digamma(nx + 1) + digamma(ny + 1))
    return _finite(mi, "mutual information")


def cmi_ksg(x, y, z=None, params: EstimatorParams = DEFAULT_PARAMS) -> float:
    """Estimate I(x; y | z) in nats; an empty or missing ``z`` gives :func:`mi_ksg`."""
    x, y = _as_points(x), _as_points(y)
    if z is None:
        return mi_ksg(x, y, params)
    z = _as_points(z)
    if z.shape[1] == 0:
        _check_blocks(x, y, z)
        return mi_ksg(x, y, params)
    _check_blocks(x, y, z)
    if params.cmi_mode == "chain":
        return mi_ksg(x, np.hstack([y, z]), params) - mi_ksg(x, z, params)

    n, k = x.shape[0], params.k
    if n <= k:
        raise ValidationError(f"need more than k={k} samples, got {n}")
    method = params.neighbor_search
    eps = kth_neighbor_distances(np.hstack([x, y, z]), k, method)
    _check_radii(eps)
    nxz = count_within(np.hstack([x, z]), eps, method)
    nyz = count_within(np.hstack([y, z]), eps, method)
    nz = count_within(z, eps, method)
    cmi = digamma(k) - np.mean(digamma(nxz + 1) + digamma(nyz + 1) - digamma(nz + 1))
    return _finite(cmi, "conditional mutual information")

"""Mixed-type distances, clusters, radius search and adaptive-k rules.

Two composite max-norm distances are supported. ``"ms"`` puts the discrete
metric on categorical components (equivalent to one-hot encoding under the
max-norm), ``"zero_inf"`` measures numeric components by L-infinity inside a
cluster and returns +inf across clusters.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .data import Dataset, VariablePartition
from .errors import ConfigurationError

__all__ = [
    "PointView",
    "points_from",
    "ms_distance",
    "zero_inf_distance",
    "kth_radius",
    "count_within",
    "ClusterIndex",
    "HeuristicKind",
    "KHeuristic",
    "effective_k",
    "floor_frac",
    "SubspaceCounts",
    "subspace_counts",
]

METRICS = ("ms", "zero_inf")


@dataclass(frozen=True)
class PointView:
    numeric: np.ndarray
    categorical: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "numeric", np.asarray(self.numeric, dtype=np.float64).reshape(-1))
        object.__setattr__(self, "categorical", np.asarray(self.categorical, dtype=np.int64).reshape(-1))


def points_from(ds: Dataset, cols: Sequence[int]) -> list[PointView]:
    """Project every row of ``ds`` onto ``cols``."""
    num = ds.numeric(cols)
    cat = ds.categorical(cols)
    return [PointView(num[i], cat[i]) for i in range(ds.n_rows)]


def _check_shapes(a: PointView, b: PointView):
    if a.numeric.shape != b.numeric.shape or a.categorical.shape != b.categorical.shape:
        raise ValueError("points have different shapes")


def _linf(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def ms_distance(a: PointView, b: PointView) -> float:
    _check_shapes(a, b)
    disc = 1.0 if np.any(a.categorical != b.categorical) else 0.0
    return max(_linf(a.numeric, b.numeric), disc)


def zero_inf_distance(a: PointView, b: PointView) -> float:
    _check_shapes(a, b)
    if np.any(a.categorical != b.categorical):
        return math.inf
    return _linf(a.numeric, b.numeric)


def _distance_fn(metric):
    if metric == "ms":
        return ms_distance
    if metric == "zero_inf":
        return zero_inf_distance
    raise ConfigurationError(f"unknown metric {metric!r}, expected one of {METRICS}")


def _distances_from(points, i, metric):
    dist = _distance_fn(metric)
    return np.array([dist(points[i], p) for j, p in enumerate(points) if j != i])


def kth_radius(points: Sequence[PointView], i: int, k: int, metric: str = "ms") -> float:
    """k-th smallest distance from ``points[i]`` to the other points (ties kept)."""
    n = len(points)
    if not 1 <= k <= n - 1:
        raise ConfigurationError(f"k must lie in [1, {n - 1}], got {k}")
    d = _distances_from(points, i, metric)
    return float(np.partition(d, k - 1)[k - 1])


def count_within(points: Sequence[PointView], i: int, rho: float, metric: str = "ms",
                 boundary: str = "inclusive") -> int:
    """Number of other points at distance ``< rho`` (strict) or ``<= rho`` (inclusive)."""
    if not 0 <= i < len(points):
        raise IndexError(i)
    if rho == math.inf:
        return len(points) - 1
    d = _distances_from(points, i, metric)
    if boundary == "strict":
        return int(np.count_nonzero(d < rho))
    if boundary == "inclusive":
        return int(np.count_nonzero(d <= rho))
    raise ConfigurationError(f"unknown boundary {boundary!r}")


class ClusterIndex:
    """Rows grouped by identical categorical codes.

    Attributes
    ----------
    cluster_of : (n,) int array of cluster ids
    members : list of row-index arrays, one per cluster
    sizes : (n_clusters,) member counts
    """

    def __init__(self, codes: np.ndarray):
        codes = np.asarray(codes, dtype=np.int64)
        if codes.ndim == 1:
            codes = codes[:, None]
        n = codes.shape[0]
        if codes.shape[1] == 0:
            self.cluster_of = np.zeros(n, dtype=np.int64)
        else:
            _, inv = np.unique(codes, axis=0, return_inverse=True)
            self.cluster_of = inv.reshape(-1).astype(np.int64)
        self.sizes = np.bincount(self.cluster_of)
        order = np.argsort(self.cluster_of, kind="stable")
        self.ptr = np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)
        self.order = order.astype(np.int64)
        self.members = [order[self.ptr[g]:self.ptr[g + 1]] for g in range(len(self.sizes))]

    @classmethod
    def from_dataset(cls, ds: Dataset, cols: Sequence[int]) -> "ClusterIndex":
        return cls(ds.categorical(cols))

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)

    @property
    def n_cl_min(self) -> int:
        return int(self.sizes.min())

    @property
    def size_of_row(self) -> np.ndarray:
        return self.sizes[self.cluster_of]


class HeuristicKind(enum.Enum):
    LOCAL = "local"
    GLOBAL = "global"
    CLUSTER_SIZE = "cluster"

    @classmethod
    def parse(cls, value):
        if isinstance(value, HeuristicKind):
            return value
        v = str(value).strip().lower().replace("-", "_")
        v = {"cluster_size": "cluster"}.get(v, v)
        try:
            return cls(v)
        except ValueError:
            raise ConfigurationError(f"unknown k heuristic {value!r}") from None


@dataclass(frozen=True)
class KHeuristic:
    kind: HeuristicKind = HeuristicKind.LOCAL
    k_c: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "kind", HeuristicKind.parse(self.kind))
        if not 0.0 < self.k_c < 1.0:
            raise ConfigurationError(f"k_c must lie in (0, 1), got {self.k_c}")


def floor_frac(k_c: float, m: int | np.ndarray):
    """floor(k_c * m), robust to products like 0.29 * 100 = 28.999999999999996."""
    return np.floor(np.asarray(k_c * np.asarray(m), dtype=np.float64) + 1e-9).astype(np.int64)


def effective_k(ci: ClusterIndex, h: KHeuristic, n: int) -> np.ndarray:
    """Per-row neighbour count under the local, global or cluster-size rule.

    Rows of singleton clusters get k = 1 and end up with an infinite 0-inf
    radius; estimators treat them as zero-contribution rows.
    """
    size = ci.size_of_row
    if h.kind is HeuristicKind.LOCAL:
        n_min = ci.n_cl_min
        if n_min <= 1:
            warnings.warn("smallest cluster is a singleton; clamping k to 1", RuntimeWarning, stacklevel=2)
        k = max(int(floor_frac(h.k_c, n_min - 1)), 1)
        return np.full(len(size), k, dtype=np.int64)
    k = max(int(floor_frac(h.k_c, n)), 1)
    out = np.full(len(size), k, dtype=np.int64)
    small = size <= k
    if h.kind is HeuristicKind.GLOBAL:
        out[small] = np.maximum(floor_frac(h.k_c, size[small]), 1)
    else:
        out[small] = np.maximum(size[small] - 1, 1)
    return out


class SubspaceCounts(NamedTuple):
    rho: np.ndarray
    xyz: np.ndarray
    xz: np.ndarray
    yz: np.ndarray
    z: np.ndarray


def subspace_counts(ds: Dataset, part: VariablePartition, k, metric: str = "ms",
                    boundary: str = "inclusive") -> SubspaceCounts:
    """Joint-space k-th neighbour radii and neighbour counts in XYZ, XZ, YZ, Z.

    ``k`` is an int or a per-row int array. Counts exclude the row itself.
    Under ``zero_inf`` a radius is +inf when the row's XYZ cluster has fewer
    than k other members.
    """
    if metric not in METRICS:
        raise ConfigurationError(f"unknown metric {metric!r}, expected one of {METRICS}")
    if boundary not in ("strict", "inclusive"):
        raise ConfigurationError(f"unknown boundary {boundary!r}")
    n = ds.n_rows
    kk = np.broadcast_to(np.asarray(k, dtype=np.int64), (n,)).copy()
    if np.any(kk < 1):
        raise ConfigurationError("k must be positive")
    if metric == "ms":
        if np.any(kk > n - 1):
            raise ConfigurationError(f"k must not exceed n - 1 = {n - 1}")
        order = np.arange(n, dtype=np.int64)
        ptr = np.array([0, n], dtype=np.int64)
        group_of = np.zeros(n, dtype=np.int64)
        penalty = 1.0
    else:
        zc = ClusterIndex.from_dataset(ds, part.z)
        order, ptr = zc.order, zc.ptr
        group_of = zc.cluster_of[order]
        penalty = math.inf
    blocks = []
    for cols in (part.x, part.y, part.z):
        blocks.append(np.ascontiguousarray(ds.numeric(cols)[order].T))
        blocks.append(np.ascontiguousarray(ds.categorical(cols)[order].T))
    out = _kernels.radius_and_counts(*blocks, ptr, group_of, kk[order], penalty,
                                     boundary == "strict")
    res = []
    for a in out:
        back = np.empty_like(a)
        back[order] = a
        res.append(back)
    return SubspaceCounts(*res)

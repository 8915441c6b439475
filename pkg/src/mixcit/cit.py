"""Local permutation scheme and permutation-test p-values for conditional independence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .data import Dataset, VariablePartition
from .errors import CitEstimatorError, ConfigurationError, MixcitError
from .estimators import EstimatorConfig, estimate
from .neighbors import ClusterIndex

__all__ = [
    "CitConfig",
    "CitResult",
    "PermutationPools",
    "permutation_pools",
    "local_permutation",
    "permutation_pvalue",
    "surrogate_rng",
    "run_cit",
]


@dataclass(frozen=True)
class CitConfig:
    B: int = 100
    k_perm: int = 5
    alpha: float = 0.05
    seed: int = 0
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)

    def __post_init__(self):
        if int(self.B) != self.B or self.B < 1:
            raise ConfigurationError(f"B must be a positive integer, got {self.B!r}")
        if int(self.k_perm) != self.k_perm or self.k_perm < 1:
            raise ConfigurationError(f"k_perm must be a positive integer, got {self.k_perm!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if isinstance(self.estimator, dict):
            object.__setattr__(self, "estimator", EstimatorConfig.from_dict(self.estimator))

    def to_dict(self) -> dict:
        return {"B": self.B, "k_perm": self.k_perm, "alpha": self.alpha, "seed": self.seed,
                "estimator": self.estimator.to_dict()}


@dataclass(frozen=True)
class CitResult:
    t_obs: float
    t_perm: np.ndarray
    p_value: float
    reject: bool

    def to_dict(self) -> dict:
        return {"t_obs": self.t_obs, "t_perm": [float(t) for t in self.t_perm],
                "p_value": self.p_value, "reject": self.reject}


@dataclass(frozen=True)
class PermutationPools:
    """Candidate rows per row in CSR layout: pool of row i is ``members[ptr[i]:ptr[i+1]]``.

    ``classes`` is set instead when Z has no numeric part; then the pool of a
    row is its whole Z class and permutations are drawn class by class.
    """

    ptr: np.ndarray | None
    members: np.ndarray | None
    classes: ClusterIndex | None

    def pool(self, i: int) -> np.ndarray:
        if self.classes is not None:
            return self.classes.members[self.classes.cluster_of[i]]
        return self.members[self.ptr[i]:self.ptr[i + 1]]


def permutation_pools(ds: Dataset, part: VariablePartition, k_perm: int) -> PermutationPools:
    """Rows sharing the categorical Z-part and, if Z has numeric parts, lying
    within the k_perm-th smallest max-norm distance (self counted, ties kept).

    An empty Z yields a single class holding every row.
    """
    if k_perm < 1:
        raise ConfigurationError(f"k_perm must be positive, got {k_perm}")
    classes = ClusterIndex.from_dataset(ds, part.z)
    num = ds.numeric(part.z)
    if num.shape[1] == 0:
        return PermutationPools(None, None, classes)
    ptr, members = _kernels.knn_pools(np.ascontiguousarray(num), classes.ptr, classes.order,
                                      classes.cluster_of, int(k_perm))
    return PermutationPools(ptr, members, None)


def local_permutation(ds: Dataset, part: VariablePartition, k_perm: int, rng: np.random.Generator,
                      pools: PermutationPools | None = None) -> np.ndarray:
    """Draw a row permutation sigma that only moves rows within their Z neighbourhood.

    Returns sigma with ``sigma[i]`` in the pool of row i; the surrogate
    dataset takes X from row ``sigma[i]`` at row i. Pass precomputed
    ``pools`` to avoid recomputing them for every surrogate.
    """
    if pools is None:
        pools = permutation_pools(ds, part, k_perm)
    n = ds.n_rows
    if pools.classes is not None:
        sigma = np.empty(n, dtype=np.int64)
        for rows in pools.classes.members:
            sigma[rows] = rows[rng.permutation(len(rows))]
        return sigma
    visit = rng.permutation(n)
    u = rng.random(n)
    return _kernels.pool_matching(pools.ptr, pools.members, visit, u)


def permutation_pvalue(t_obs: float, t_perm) -> float:
    """Fraction of permuted statistics at least as large as the observed one."""
    t_perm = np.asarray(t_perm, dtype=np.float64)
    if t_perm.size == 0:
        raise ConfigurationError("at least one permuted statistic is required")
    return float(np.count_nonzero(t_perm >= t_obs)) / t_perm.size


def surrogate_rng(seed: int, j: int) -> np.random.Generator:
    """Independent stream for surrogate j, fixed by (seed, j) alone."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(j)]))


def run_cit(ds: Dataset, part: VariablePartition, cfg: CitConfig) -> CitResult:
    """Permutation test of X independent of Y given Z.

    Each surrogate permutes the X columns with :func:`local_permutation`
    and is scored with the same estimator configuration as the observed
    data.

    Raises
    ------
    CitEstimatorError
        When the estimator fails; ``stage`` says whether on observed or
        permuted data.
    """
    part.validate(ds)
    try:
        t_obs = estimate(ds, part, cfg.estimator).value
    except MixcitError as exc:
        raise CitEstimatorError("observed", exc) from exc
    pools = permutation_pools(ds, part, cfg.k_perm)
    t_perm = np.empty(cfg.B)
    for j in range(cfg.B):
        sigma = local_permutation(ds, part, cfg.k_perm, surrogate_rng(cfg.seed, j), pools)
        surrogate = ds.permute_rows_of(part.x, sigma)
        try:
            t_perm[j] = estimate(surrogate, part, cfg.estimator).value
        except MixcitError as exc:
            raise CitEstimatorError("permuted", exc, surrogate=j) from exc
    p = permutation_pvalue(t_obs, t_perm)
    return CitResult(t_obs=t_obs, t_perm=t_perm, p_value=p, reject=p < cfg.alpha)

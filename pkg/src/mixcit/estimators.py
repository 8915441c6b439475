"""k-NN entropy, mutual information and conditional mutual information estimators.

All values are in nats. The mixed-data CMI estimators (``ms_cmi``,
``zmadg_cmi``, ``msinf_cmi``) return a :class:`CmiEstimate` carrying the
per-row contributions; ``estimate`` dispatches on an :class:`EstimatorConfig`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _kernels
from .data import Dataset, VariablePartition
from .errors import ConfigurationError, DegenerateGeometryError, EstimatorUndefinedError
from .neighbors import ClusterIndex, HeuristicKind, KHeuristic, effective_k, floor_frac, subspace_counts
from .special import digamma, log_unit_ball_volume

__all__ = [
    "EstimatorKind",
    "EstimatorConfig",
    "CmiEstimate",
    "kl_entropy",
    "ksg_mi",
    "fp_cmi",
    "gkov_mi",
    "ms_cmi",
    "zmadg_cmi",
    "msinf_cmi",
    "plugin_entropy",
    "plugin_cmi",
    "estimate",
]


class EstimatorKind(enum.Enum):
    KL = "kl"
    KSG = "ksg"
    FP = "fp"
    GKOV = "gkov"
    MS = "ms"
    ZMADG = "zmadg"
    MSINF = "msinf"

    @classmethod
    def parse(cls, value):
        if isinstance(value, EstimatorKind):
            return value
        v = str(value).strip().lower().replace("_", "").replace("-", "")
        v = {"ms0inf": "msinf", "mszeroinf": "msinf"}.get(v, v)
        try:
            return cls(v)
        except ValueError:
            raise ConfigurationError(f"unknown estimator {value!r}") from None


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimator kind and every knob that fixes its neighbour count.

    ``explicit_k`` overrides ``k_c`` when given. ``heuristic`` only affects
    MSInf. ``clamp_nonnegative`` applies max(estimate, 0).
    """

    kind: EstimatorKind = EstimatorKind.MSINF
    k_c: float = 0.2
    heuristic: HeuristicKind = HeuristicKind.LOCAL
    explicit_k: Optional[int] = None
    clamp_nonnegative: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", EstimatorKind.parse(self.kind))
        object.__setattr__(self, "heuristic", HeuristicKind.parse(self.heuristic))
        if self.explicit_k is not None:
            if int(self.explicit_k) != self.explicit_k or self.explicit_k < 1:
                raise ConfigurationError(f"explicit_k must be a positive integer, got {self.explicit_k!r}")
            object.__setattr__(self, "explicit_k", int(self.explicit_k))
        elif not 0.0 < self.k_c < 1.0:
            raise ConfigurationError(f"k_c must lie in (0, 1), got {self.k_c}")

    def with_k_c(self, k_c: float) -> "EstimatorConfig":
        return replace(self, k_c=k_c, explicit_k=None)

    def global_k(self, n: int) -> int:
        """k for estimators that take k as a fraction of the sample size."""
        if self.explicit_k is not None:
            k = self.explicit_k
        else:
            k = max(int(floor_frac(self.k_c, n)), 1)
        if n < 2:
            raise EstimatorUndefinedError("at least two samples are required")
        return min(k, n - 1)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "k_c": self.k_c,
            "heuristic": self.heuristic.value,
            "explicit_k": self.explicit_k,
            "clamp_nonnegative": self.clamp_nonnegative,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EstimatorConfig":
        known = {"kind", "k_c", "heuristic", "explicit_k", "clamp_nonnegative"}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown estimator fields {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class CmiEstimate:
    value: float
    xi: np.ndarray
    k_used: np.ndarray
    zero_rows: int
    diagnostics: dict = field(default_factory=dict)

    def __float__(self):
        return self.value


def _g(counts: np.ndarray, tied: np.ndarray) -> np.ndarray:
    out = np.empty(len(counts))
    if (~tied).any():
        out[~tied] = digamma(counts[~tied])
    if tied.any():
        out[tied] = np.log(counts[tied])
    return out


def _xi_from_counts(c, k, active):
    """Per-row g(k_xyz) + g(k_z) - g(k_xz) - g(k_yz); zero for inactive rows."""
    xi = np.zeros(len(k))
    if not active.any():
        return xi
    kxyz = c.xyz[active].astype(np.float64)
    tied = c.xyz[active] > k[active]
    xi[active] = (
        _g(kxyz, tied) + _g(c.z[active].astype(np.float64), tied)
        - _g(c.xz[active].astype(np.float64), tied) - _g(c.yz[active].astype(np.float64), tied)
    )
    return xi


def _forced_zero(c):
    return ((c.xyz == c.xz) & (c.yz == c.z)) | ((c.xyz == c.yz) & (c.xz == c.z))


def _finish(xi, k, zero_rows, cfg, **diag):
    value = float(np.mean(xi))
    if cfg.clamp_nonnegative:
        value = max(value, 0.0)
    return CmiEstimate(value=value, xi=xi, k_used=k, zero_rows=int(zero_rows), diagnostics=diag)


def _prepare(ds, part):
    part.validate(ds)
    if ds.n_rows < 2:
        raise EstimatorUndefinedError("at least two samples are required")


def _require_numeric(ds, cols, what):
    bad = [ds.names[c] for c in cols if not ds.kinds[c].is_numeric]
    if bad:
        raise ConfigurationError(f"{what} requires numeric columns, got categorical {bad}")


def _raise_on_zero_radius(rho):
    zero = np.flatnonzero(rho == 0.0)
    if zero.size:
        raise DegenerateGeometryError(int(zero[0]))


def _kl_from_array(data: np.ndarray, k: int) -> tuple[float, np.ndarray]:
    n, m = data.shape
    rho = _kernels.knn_radius(np.ascontiguousarray(data, dtype=np.float64), k)
    _raise_on_zero_radius(rho)
    log_rho = np.log(rho)
    h = float(digamma(n) - digamma(k) + log_unit_ball_volume(m) + m * np.mean(log_rho))
    return h, log_rho


def kl_entropy(ds: Dataset | np.ndarray, k: int) -> float:
    """Kozachenko-Leonenko differential entropy under the max-norm.

    ``ds`` is a numeric-only Dataset or an (n, m) array.

    Raises
    ------
    DegenerateGeometryError
        When a point's k-th neighbour is at distance 0 (duplicate rows).
    """
    if isinstance(ds, Dataset):
        _require_numeric(ds, range(ds.n_cols), "kl_entropy")
        data = ds.numeric(range(ds.n_cols))
    else:
        data = np.asarray(ds, dtype=np.float64)
        if data.ndim == 1:
            data = data[:, None]
    n = data.shape[0]
    if not 1 <= k <= n - 1:
        raise ConfigurationError(f"k must lie in [1, {n - 1}], got {k}")
    return _kl_from_array(data, int(k))[0]


def _strict_counts(ds, part, k, what):
    _prepare(ds, part)
    _require_numeric(ds, part.xyz, what)
    n = ds.n_rows
    if not 1 <= k <= n - 1:
        raise ConfigurationError(f"k must lie in [1, {n - 1}], got {k}")
    c = subspace_counts(ds, part, k, metric="ms", boundary="strict")
    _raise_on_zero_radius(c.rho)
    return c


def ksg_mi(ds: Dataset, part: VariablePartition, k: int) -> float:
    """Kraskov-Stoegbauer-Grassberger mutual information (first variant)."""
    if part.z:
        raise ConfigurationError("ksg_mi takes an empty conditioning set; use fp_cmi")
    c = _strict_counts(ds, part, k, "ksg_mi")
    n = ds.n_rows
    xi = digamma(k) + digamma(n) - digamma(c.xz + 1.0) - digamma(c.yz + 1.0)
    return float(np.mean(xi))


def fp_cmi(ds: Dataset, part: VariablePartition, k: int) -> float:
    """Frenzel-Pompe conditional mutual information for continuous data."""
    c = _strict_counts(ds, part, k, "fp_cmi")
    xi = digamma(k) + digamma(c.z + 1.0) - digamma(c.xz + 1.0) - digamma(c.yz + 1.0)
    return float(np.mean(xi))


def gkov_mi(ds: Dataset, part: VariablePartition, k: int) -> float:
    """Gao-Kannan-Oh-Viswanath mutual information for mixed data.

    Categorical columns use the discrete metric (their one-hot encoding).
    """
    if part.z:
        raise ConfigurationError("gkov_mi takes an empty conditioning set")
    _prepare(ds, part)
    n = ds.n_rows
    if not 1 <= k <= n - 1:
        raise ConfigurationError(f"k must lie in [1, {n - 1}], got {k}")
    c = subspace_counts(ds, part, k, metric="ms", boundary="inclusive")
    k_prime = np.where(c.rho > 0.0, float(k), c.xyz.astype(np.float64))
    xi = digamma(k_prime) + math.log(n) - np.log(c.xz + 1.0) - np.log(c.yz + 1.0)
    return float(np.mean(xi))


def _check_kind(cfg, kind):
    if cfg.kind is not kind:
        raise ConfigurationError(f"expected an estimator config of kind {kind.value}, got {cfg.kind.value}")


def ms_cmi(ds: Dataset, part: VariablePartition, cfg: EstimatorConfig | None = None) -> CmiEstimate:
    """Mesner-Shalizi CMI: discrete metric on categorical components, ties via g."""
    cfg = cfg or EstimatorConfig(EstimatorKind.MS)
    _check_kind(cfg, EstimatorKind.MS)
    _prepare(ds, part)
    n = ds.n_rows
    k = np.full(n, cfg.global_k(n), dtype=np.int64)
    c = subspace_counts(ds, part, k, metric="ms", boundary="inclusive")
    active = np.ones(n, dtype=bool)
    xi = _xi_from_counts(c, k, active)
    return _finish(xi, k, np.count_nonzero(_forced_zero(c)), cfg)


def msinf_cmi(ds: Dataset, part: VariablePartition, cfg: EstimatorConfig | None = None) -> CmiEstimate:
    """CMI with the 0-inf distance: neighbours never leave a row's cluster.

    Clusters are the groups of rows sharing every categorical code of X, Y
    and Z. Rows whose cluster is too small for their k contribute 0 and are
    counted in ``zero_rows``.

    Raises
    ------
    EstimatorUndefinedError
        If every cluster is a singleton.
    """
    cfg = cfg or EstimatorConfig(EstimatorKind.MSINF)
    _check_kind(cfg, EstimatorKind.MSINF)
    _prepare(ds, part)
    n = ds.n_rows
    ci = ClusterIndex.from_dataset(ds, part.xyz)
    if ci.sizes.max() < 2:
        raise EstimatorUndefinedError("every cluster is a singleton; no within-cluster neighbours exist")
    if cfg.explicit_k is not None:
        k = np.full(n, min(cfg.explicit_k, n - 1), dtype=np.int64)
    else:
        k = effective_k(ci, KHeuristic(cfg.heuristic, cfg.k_c), n)
    c = subspace_counts(ds, part, k, metric="zero_inf", boundary="inclusive")
    active = np.isfinite(c.rho)
    xi = _xi_from_counts(c, k, active)
    zero = (~active) | (active & _forced_zero(c))
    return _finish(xi, k, np.count_nonzero(zero), cfg,
                   n_clusters=ci.n_clusters, n_cl_min=ci.n_cl_min,
                   undefined_rows=int(np.count_nonzero(~active)))


def plugin_entropy(codes: np.ndarray) -> float:
    """Plug-in Shannon entropy of the rows of an (n, q) code array."""
    codes = np.asarray(codes)
    if codes.ndim == 1:
        codes = codes[:, None]
    if codes.shape[1] == 0:
        return 0.0
    _, counts = np.unique(codes, axis=0, return_counts=True)
    p = counts / codes.shape[0]
    return float(-np.sum(p * np.log(p)))


def plugin_cmi(ds: Dataset, part: VariablePartition) -> float:
    """Plug-in CMI of categorical data, H(XZ) + H(YZ) - H(XYZ) - H(Z)."""
    cat = lambda cols: ds.categorical(cols)  # noqa: E731
    return (plugin_entropy(cat(part.xz)) + plugin_entropy(cat(part.yz))
            - plugin_entropy(cat(part.xyz)) - plugin_entropy(cat(part.z)))


def _row_plugin_terms(codes):
    """Per-row -log p(code) so that the mean is the plug-in entropy."""
    n = codes.shape[0]
    if codes.shape[1] == 0:
        return np.zeros(n)
    _, inv, counts = np.unique(codes, axis=0, return_inverse=True, return_counts=True)
    return -np.log(counts[inv.reshape(-1)] / n)


def _row_conditional_kl(num, codes, k_c, explicit_k):
    """Per-row contributions to sum_c p(c) H_KL(num | c) and the dropped-cluster count.

    Rows of clusters with fewer than two members contribute 0; the weights
    of the remaining clusters are renormalized.
    """
    n, m = num.shape
    out = np.zeros(n)
    if m == 0:
        return out, 0
    ci = ClusterIndex(codes)
    kept = ci.sizes >= 2
    n_kept = int(ci.sizes[kept].sum())
    if n_kept == 0:
        raise EstimatorUndefinedError("no qualitative cluster has two or more samples")
    log_vol = log_unit_ball_volume(m)
    for g in np.flatnonzero(kept):
        rows = ci.members[g]
        size = len(rows)
        if explicit_k is not None:
            k = min(explicit_k, size - 1)
        else:
            k = max(int(floor_frac(k_c, size)), 1)
        rho = _kernels.knn_radius(np.ascontiguousarray(num[rows]), k)
        zero = np.flatnonzero(rho == 0.0)
        if zero.size:
            raise DegenerateGeometryError(int(rows[zero[0]]))
        out[rows] = float(digamma(size) - digamma(k)) + log_vol + m * np.log(rho)
    out *= n / n_kept
    return out, int(np.count_nonzero(~kept))


def zmadg_cmi(ds: Dataset, part: VariablePartition, cfg: EstimatorConfig | None = None) -> CmiEstimate:
    """Zan-Meynaoui-Assaad-Devijver-Gaussier CMI.

    Sum of four conditional differential entropies (KL estimates per
    categorical cluster, k = max(floor(k_c * n_cluster), 1)) and four
    plug-in entropies of the categorical parts.
    """
    cfg = cfg or EstimatorConfig(EstimatorKind.ZMADG, k_c=0.1)
    _check_kind(cfg, EstimatorKind.ZMADG)
    _prepare(ds, part)
    n = ds.n_rows
    xi = np.zeros(n)
    dropped = {}
    for name, cols, sign in (("xz", part.xz, 1.0), ("yz", part.yz, 1.0),
                             ("xyz", part.xyz, -1.0), ("z", part.z, -1.0)):
        codes = ds.categorical(cols)
        diff, n_drop = _row_conditional_kl(ds.numeric(cols), codes, cfg.k_c, cfg.explicit_k)
        dropped[name] = n_drop
        xi += sign * (diff + _row_plugin_terms(codes))
    zero_rows = 0
    return _finish(xi, np.full(n, -1, dtype=np.int64), zero_rows, cfg, dropped_clusters=dropped)


def estimate(ds: Dataset, part: VariablePartition, cfg: EstimatorConfig) -> CmiEstimate:
    """Run the CMI (or MI) estimator selected by ``cfg``.

    KSG and GKOV require an empty Z. KL is not a CMI estimator and is
    rejected here; call :func:`kl_entropy` directly.
    """
    kind = cfg.kind
    if kind is EstimatorKind.MS:
        return ms_cmi(ds, part, cfg)
    if kind is EstimatorKind.MSINF:
        return msinf_cmi(ds, part, cfg)
    if kind is EstimatorKind.ZMADG:
        return zmadg_cmi(ds, part, cfg)
    if kind is EstimatorKind.KL:
        raise ConfigurationError("kl estimates an entropy, not a CMI; use kl_entropy")
    k = cfg.global_k(ds.n_rows)
    fn = {EstimatorKind.KSG: ksg_mi, EstimatorKind.FP: fp_cmi, EstimatorKind.GKOV: gkov_mi}[kind]
    value = fn(ds, part, k)
    if cfg.clamp_nonnegative:
        value = max(value, 0.0)
    return CmiEstimate(value=value, xi=np.empty(0), k_used=np.full(ds.n_rows, k, dtype=np.int64),
                       zero_rows=0)

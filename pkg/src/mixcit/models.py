"""Seeded synthetic data generators with known CMI or known independence structure.

Estimation families carry an analytic ground-truth CMI; testing families
carry ``h0_holds``, whether X and Y are conditionally independent given Z
by construction.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import expit

from .data import ColumnKind, Dataset, VariablePartition, save_dataset
from .errors import ConfigurationError

__all__ = ["Family", "ModelSpec", "GeneratedSample", "generate", "ground_truth", "write_sample"]

C, DN, CAT = ColumnKind.CONTINUOUS, ColumnKind.DISCRETE_NUMERIC, ColumnKind.CATEGORICAL


class Family(enum.Enum):
    INDEPZ_EST = "indepz-est"
    CHAINSTRUCT_EST = "chainstruct-est"
    CONFGAUSS_EST = "confgauss-est"
    CONFUNIF_EST = "confunif-est"
    MIXTURE_EST = "mixture-est"
    CONFOUNDER_CIT = "confounder-cit"
    INDEPZ_CIT = "indepz-cit"
    CLUSTERCONF_CIT = "clusterconf-cit"
    CHAIN_CIT = "chain-cit"

    @classmethod
    def parse(cls, value):
        if isinstance(value, Family):
            return value
        v = str(value).strip().lower().replace("_", "-")
        try:
            return cls(v)
        except ValueError:
            names = ", ".join(f.value for f in cls)
            raise ConfigurationError(f"unknown model family {value!r} (expected one of {names})") from None

    @property
    def is_cit(self) -> bool:
        return self.value.endswith("-cit")


# Accepted parameters and their defaults per family.
DEFAULTS = {
    Family.INDEPZ_EST: {"c": 5, "d": 1},
    Family.CHAINSTRUCT_EST: {"d": 1},
    Family.CONFGAUSS_EST: {"m": 9},
    Family.CONFUNIF_EST: {},
    Family.MIXTURE_EST: {"p": 0.3},
    Family.CONFOUNDER_CIT: {"dim_c": 1, "dim_d": 1, "n_c": 3, "w": 0.0, "z_discrete_numeric": False},
    # independent-Z binomial components are discrete numeric unless asked otherwise
    Family.INDEPZ_CIT: {"dim_d": 1, "n_c": 3, "w": 0.0, "z_discrete_numeric": True},
    Family.CLUSTERCONF_CIT: {"n_c": 3, "w": 0.0, "z_discrete_numeric": False},
    Family.CHAIN_CIT: {"n_c": 3, "w": 0.0},
}


@dataclass(frozen=True)
class ModelSpec:
    family: Family
    n: int
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        fam = Family.parse(self.family)
        object.__setattr__(self, "family", fam)
        if int(self.n) != self.n or self.n < 1:
            raise ConfigurationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        unknown = set(self.params) - set(DEFAULTS[fam])
        if unknown:
            raise ConfigurationError(f"{fam.value} does not take parameters {sorted(unknown)}")
        merged = {**DEFAULTS[fam], **self.params}
        for key in ("c", "d", "m", "dim_c", "dim_d", "n_c"):
            if key in merged and (int(merged[key]) != merged[key] or merged[key] < 0):
                raise ConfigurationError(f"{key} must be a non-negative integer, got {merged[key]!r}")
        for key in ("c", "d", "m", "n_c"):
            if key in merged and merged[key] < 1:
                raise ConfigurationError(f"{key} must be at least 1, got {merged[key]}")
        if "n_c" in merged and merged["n_c"] < 2:
            raise ConfigurationError("n_c must be at least 2")
        if fam is Family.CONFOUNDER_CIT and merged["dim_c"] + merged["dim_d"] < 1:
            raise ConfigurationError("Z needs at least one component")
        if fam is Family.INDEPZ_CIT and merged["dim_d"] < 1:
            raise ConfigurationError("dim_d must be at least 1")
        if "w" in merged and not merged["w"] >= 0:
            raise ConfigurationError(f"w must be non-negative, got {merged['w']!r}")
        if "p" in merged and not 0.0 < merged["p"] < 1.0:
            raise ConfigurationError(f"p must lie in (0, 1), got {merged['p']!r}")
        object.__setattr__(self, "params", merged)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "n": self.n, "params": dict(self.params), "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(d["family"], d["n"], d.get("params", {}), d.get("seed", 0))


@dataclass(frozen=True)
class GeneratedSample:
    dataset: Dataset
    partition: VariablePartition
    truth: Optional[float]
    h0_holds: Optional[bool]
    spec: ModelSpec


def ground_truth(spec: ModelSpec) -> Optional[float]:
    """Analytic I(X;Y|Z) in nats for estimation families, None for testing families."""
    fam, p = spec.family, spec.params
    if fam is Family.INDEPZ_EST:
        c = p["c"]
        return math.log(c) - (c - 1) / c * math.log(2)
    if fam is Family.MIXTURE_EST:
        q = p["p"]
        return -(1 - q) * math.log(1 - 0.36) * 0.5 + q * (math.log(5) - 0.8 * math.log(2))
    if fam in (Family.CHAINSTRUCT_EST, Family.CONFGAUSS_EST, Family.CONFUNIF_EST):
        return 0.0
    return None


def _streams(seed):
    """Coefficient and noise generators; coefficients never depend on w."""
    return (np.random.default_rng(np.random.SeedSequence([int(seed), 0])),
            np.random.default_rng(np.random.SeedSequence([int(seed), 1])))


def _binomial_z(rng, n, count, n_c, as_numeric):
    z = [rng.binomial(n_c - 1, 0.5, size=n) for _ in range(count)]
    kind = DN if as_numeric else CAT
    return [v.astype(np.float64) if as_numeric else v for v in z], [kind] * count


def _confounder_terms(beta_rng, zd, zc):
    """Sum of beta * inverse-logit(discrete) plus beta * continuous components."""
    n = len(zd[0]) if zd else len(zc[0])
    out = np.zeros(n)
    for z in zd:
        out += beta_rng.uniform(-1, 1) * expit(np.asarray(z, dtype=np.float64))
    for z in zc:
        out += beta_rng.uniform(-1, 1) * z
    return out


def generate(spec: ModelSpec) -> GeneratedSample:
    """Draw ``spec.n`` iid rows of the model; identical specs give identical data."""
    fam, p, n = spec.family, spec.params, spec.n
    beta_rng, rng = _streams(spec.seed)
    cols, kinds, names = [], [], []

    def add(values, kind, name):
        cols.append(values)
        kinds.append(kind)
        names.append(name)

    if fam is Family.INDEPZ_EST:
        x = rng.integers(0, p["c"], size=n)
        add(x, CAT, "x")
        add(rng.uniform(x, x + 2.0), C, "y")
        for j in range(p["d"]):
            add(rng.integers(0, 2, size=n), CAT, f"z{j + 1}")
    elif fam is Family.CHAINSTRUCT_EST:
        x = rng.exponential(1 / 10, size=n)
        z1 = rng.poisson(x)
        add(x, C, "x")
        add(rng.binomial(z1, 0.5), CAT, "y")
        add(z1, CAT, "z1")
        for j in range(1, p["d"]):
            add(rng.standard_normal(n), C, f"z{j + 1}")
    elif fam is Family.CONFGAUSS_EST:
        z = rng.integers(0, p["m"] + 1, size=n)
        add(rng.normal(z, 1.0), C, "x")
        add(rng.normal(z, 1.0), C, "y")
        add(z, CAT, "z")
    elif fam is Family.CONFUNIF_EST:
        z = rng.integers(0, 2, size=n)
        add(rng.uniform(0.0, 1.0, size=n) * z, C, "x")
        add(rng.uniform(z, z + 1.0), C, "y")
        add(z, CAT, "z")
    elif fam is Family.MIXTURE_EST:
        z = rng.binomial(1, p["p"], size=n)
        g = rng.standard_normal((n, 2))
        gx, gy = g[:, 0], 0.6 * g[:, 0] + 0.8 * g[:, 1]
        dx = rng.integers(0, 5, size=n).astype(np.float64)
        dy = rng.uniform(dx, dx + 2.0)
        add(np.where(z == 1, dx, gx), C, "x")
        add(np.where(z == 1, dy, gy), C, "y")
        add(z, CAT, "z")
    else:
        n_c, w = p["n_c"], float(p["w"])
        eta_x, eta_y, eta_w = rng.standard_normal(n), rng.standard_normal(n), rng.standard_normal(n)
        if fam is Family.CONFOUNDER_CIT:
            zd, zkinds = _binomial_z(rng, n, p["dim_d"], n_c, p["z_discrete_numeric"])
            zc = [rng.standard_normal(n) for _ in range(p["dim_c"])]
            x = _confounder_terms(beta_rng, zd, zc) + eta_x + w * eta_w
            y = _confounder_terms(beta_rng, zd, zc) + eta_y + w * eta_w
            zcols = zd + zc
            zkinds = zkinds + [C] * len(zc)
        elif fam is Family.INDEPZ_CIT:
            zcols, zkinds = _binomial_z(rng, n, p["dim_d"], n_c, p["z_discrete_numeric"])
            x = eta_x + w * eta_w
            y = eta_y + w * eta_w
        elif fam is Family.CLUSTERCONF_CIT:
            zcols, zkinds = _binomial_z(rng, n, 1, n_c, p["z_discrete_numeric"])
            coupling = np.where(np.asarray(zcols[0]) == 0, w, 0.0)
            x = _confounder_terms(beta_rng, zcols, []) + eta_x + coupling * eta_w
            y = _confounder_terms(beta_rng, zcols, []) + eta_y + coupling * eta_w
        else:
            beta_x, beta_y = beta_rng.uniform(-1, 1), beta_rng.uniform(-1, 1)
            x = eta_x + w * eta_w
            a = np.arange(n_c - 1)
            logits = beta_x * x[:, None] * a[None, :]
            prob = np.exp(logits - logits.max(axis=1, keepdims=True))
            prob /= prob.sum(axis=1, keepdims=True)
            u = rng.random(n)
            draw = np.minimum((u[:, None] > np.cumsum(prob, axis=1)).sum(axis=1), n_c - 2)
            z = (draw + rng.binomial(2, 0.7, size=n)) % (n_c - 1)
            y = beta_y * expit(z.astype(np.float64)) + eta_y + w * eta_w
            zcols, zkinds = [z], [CAT]
        add(x, C, "x")
        add(y, C, "y")
        for j, (v, k) in enumerate(zip(zcols, zkinds)):
            add(v, k, f"z{j + 1}")

    ds = Dataset.from_arrays(cols, kinds, names)
    part = VariablePartition((0,), (1,), tuple(range(2, len(cols))))
    h0 = (float(p["w"]) == 0.0) if fam.is_cit else None
    return GeneratedSample(ds, part, ground_truth(spec), h0, spec)


def write_sample(sample: GeneratedSample, path) -> Path:
    """Write the dataset as CSV and a JSON sidecar (same stem, ``.json``). Returns the sidecar path."""
    path = Path(path)
    save_dataset(sample.dataset, path)
    sidecar = path.with_suffix(".json")
    meta = {
        "spec": sample.spec.to_dict(),
        "truth": sample.truth,
        "h0_holds": sample.h0_holds,
        "schema": [k.value for k in sample.dataset.kinds],
        "names": sample.dataset.names,
        "partition": sample.partition.to_dict(),
    }
    sidecar.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return sidecar

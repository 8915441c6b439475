"""Fast built-in checks run by ``mixcit selftest``."""

from __future__ import annotations

import math

import numpy as np

from .bench import binomial_ci
from .cit import local_permutation, permutation_pools, permutation_pvalue
from .data import ColumnKind, Dataset, VariablePartition
from .errors import DegenerateGeometryError
from .estimators import EstimatorConfig, fp_cmi, gkov_mi, kl_entropy, ksg_mi, ms_cmi, msinf_cmi, plugin_cmi, zmadg_cmi
from .models import ModelSpec, ground_truth
from .special import digamma

C, CAT = ColumnKind.CONTINUOUS, ColumnKind.CATEGORICAL


def _digamma_recurrence():
    x = np.linspace(0.01, 50, 500)
    return bool(np.all(np.abs(digamma(x + 1) - digamma(x) - 1 / x) < 1e-10))


def _digamma_value():
    return abs(digamma(1.0) + 0.5772156649015329) < 1e-12


def _kl_uniform():
    rng = np.random.default_rng(11)
    return abs(kl_entropy(rng.random((4000, 1)), 40)) < 0.05


def _kl_duplicates():
    try:
        kl_entropy(np.array([[0.0], [0.0], [1.0], [2.0]]), 1)
    except DegenerateGeometryError:
        return True
    return False


def _ksg_gaussian():
    rng = np.random.default_rng(12)
    x = rng.standard_normal(4000)
    y = 0.6 * x + 0.8 * rng.standard_normal(4000)
    ds = Dataset.from_arrays([x, y], [C, C])
    part = VariablePartition((0,), (1,))
    v = ksg_mi(ds, part, 10)
    return abs(v - 0.5 * math.log(1 / 0.64)) < 0.04 and v == fp_cmi(ds, part, 10)


def _gkov_copy():
    x = np.random.default_rng(13).integers(0, 3, 3000)
    ds = Dataset.from_arrays([x, x.copy()], [CAT, CAT])
    return abs(gkov_mi(ds, VariablePartition((0,), (1,)), 300) - math.log(3)) < 0.05


def _discrete_oracle():
    rng = np.random.default_rng(14)
    n = 5000
    z = rng.integers(0, 2, n)
    x = (z + rng.integers(0, 2, n)) % 3
    y = np.where(rng.random(n) < 0.6, x, rng.integers(0, 3, n))
    ds = Dataset.from_arrays([x, y, z], [CAT, CAT, CAT])
    part = VariablePartition((0,), (1,), (2,))
    ref = plugin_cmi(ds, part)
    vals = [ms_cmi(ds, part, EstimatorConfig("ms", k_c=0.01)).value,
            msinf_cmi(ds, part, EstimatorConfig("msinf", k_c=0.1)).value,
            zmadg_cmi(ds, part, EstimatorConfig("zmadg", k_c=0.1)).value]
    return all(abs(v - ref) < 0.05 for v in vals)


def _single_cluster():
    rng = np.random.default_rng(15)
    u = rng.random((300, 3))
    ds = Dataset.from_arrays(list(u.T), [C, C, C])
    part = VariablePartition((0,), (1,), (2,))
    return (ms_cmi(ds, part, EstimatorConfig("ms", explicit_k=10)).value
            == msinf_cmi(ds, part, EstimatorConfig("msinf", explicit_k=10)).value)


def _permutation():
    rng = np.random.default_rng(16)
    n = 300
    ds = Dataset.from_arrays([rng.standard_normal(n), rng.standard_normal(n), rng.standard_normal(n),
                              rng.integers(0, 3, n)], [C, C, C, CAT])
    part = VariablePartition((0,), (1,), (2, 3))
    pools = permutation_pools(ds, part, 5)
    for s in range(20):
        sigma = local_permutation(ds, part, 5, np.random.default_rng(s), pools)
        if not np.array_equal(np.sort(sigma), np.arange(n)):
            return False
        if any(sigma[i] not in pools.pool(i) for i in range(n)):
            return False
    return True


def _pvalue():
    return (permutation_pvalue(2.0, [0.1, 0.2, 0.3, 2.5]) == 0.25
            and permutation_pvalue(1.0, [1.0, 1.0]) == 1.0
            and permutation_pvalue(1.0, [0.0]) == 0.0)


def _binomial():
    lo, hi = binomial_ci(5, 100, 0.05)
    return (binomial_ci(0, 100)[0] == 0.0 and binomial_ci(100, 100)[1] == 1.0
            and abs(lo - 0.016431879) < 1e-6 and abs(hi - 0.112834911) < 1e-6)


def _truths():
    return (abs(ground_truth(ModelSpec("indepz-est", 10, {"c": 5})) - 1.0549201679861442) < 1e-12
            and ground_truth(ModelSpec("indepz-est", 10, {"c": 1})) == 0.0
            and abs(ground_truth(ModelSpec("mixture-est", 10)) - 0.472) < 1e-3)


CHECKS = [
    ("digamma recurrence", _digamma_recurrence),
    ("digamma(1) = -euler gamma", _digamma_value),
    ("KL entropy of U(0,1) near 0", _kl_uniform),
    ("KL rejects duplicate rows", _kl_duplicates),
    ("KSG on correlated Gaussians, FP with empty Z equal", _ksg_gaussian),
    ("GKOV I(X;X) = ln 3", _gkov_copy),
    ("discrete plug-in agreement", _discrete_oracle),
    ("single-cluster MS = MSInf", _single_cluster),
    ("local permutation bijective and in-pool", _permutation),
    ("p-value tie convention", _pvalue),
    ("exact binomial interval", _binomial),
    ("model ground truths", _truths),
]


def run_selftest(out=print) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            passed = bool(fn())
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok

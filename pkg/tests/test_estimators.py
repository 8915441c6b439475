import math

import numpy as np
import pytest

from conftest import mixed_dataset
from mixcit.data import ColumnKind, Dataset, VariablePartition
from mixcit.errors import ConfigurationError, DegenerateGeometryError, EstimatorUndefinedError
from mixcit.estimators import (
    EstimatorConfig,
    EstimatorKind,
    estimate,
    fp_cmi,
    gkov_mi,
    kl_entropy,
    ksg_mi,
    ms_cmi,
    msinf_cmi,
    plugin_cmi,
    zmadg_cmi,
)
from mixcit.models import ModelSpec, generate, ground_truth

C, DN, CAT = ColumnKind.CONTINUOUS, ColumnKind.DISCRETE_NUMERIC, ColumnKind.CATEGORICAL
XY = VariablePartition((0,), (1,))
XYZ = VariablePartition((0,), (1,), (2,))


def _mean_over_reps(family, est, reps, n, params=None, **cfg):
    vals = []
    for r in range(reps):
        s = generate(ModelSpec(family, n, params or {}, seed=r))
        vals.append(estimate(s.dataset, s.partition, EstimatorConfig(est, **cfg)).value)
    return float(np.mean(vals))


# --- KL entropy -----------------------------------------------------------

def test_kl_uniform(rng):
    assert abs(kl_entropy(rng.random((10000, 1)), 100)) < 0.05


def test_kl_gaussian(rng):
    truth = 0.5 * math.log(2 * math.pi * math.e)
    assert kl_entropy(rng.standard_normal((10000, 1)), 100) == pytest.approx(truth, abs=0.05)


def test_kl_accepts_dataset(rng):
    a = rng.random((300, 2))
    ds = Dataset.from_arrays(list(a.T), [C, C])
    assert kl_entropy(ds, 5) == kl_entropy(a, 5)


def test_kl_duplicate_rows():
    with pytest.raises(DegenerateGeometryError) as exc:
        kl_entropy(np.array([[0.0], [1.0], [0.0], [3.0]]), 1)
    assert exc.value.row in (0, 2)


def test_kl_rejects_bad_k(rng):
    with pytest.raises(ConfigurationError):
        kl_entropy(rng.random((5, 1)), 5)


def test_kl_rejects_categorical():
    ds = Dataset.from_arrays([[0, 1, 2]], [CAT])
    with pytest.raises(ConfigurationError):
        kl_entropy(ds, 1)


# --- KSG / FP -------------------------------------------------------------

def _gaussian_pair(rng, n, rho):
    x = rng.standard_normal(n)
    y = rho * x + math.sqrt(1 - rho**2) * rng.standard_normal(n)
    return Dataset.from_arrays([x, y], [C, C])


def test_ksg_correlated_gaussian(rng):
    assert ksg_mi(_gaussian_pair(rng, 10000, 0.6), XY, 10) == pytest.approx(-0.5 * math.log(1 - 0.36), abs=0.03)


def test_ksg_independent(rng):
    assert abs(ksg_mi(_gaussian_pair(rng, 10000, 0.0), XY, 10)) < 0.02


def test_ksg_shuffled_copy(rng):
    x = rng.standard_normal(5000)
    ds = Dataset.from_arrays([x, rng.permutation(x)], [C, C])
    assert abs(ksg_mi(ds, XY, 10)) < 0.02


def test_ksg_rejects_z(rng):
    ds = mixed_dataset(rng, 50)
    with pytest.raises(ConfigurationError):
        ksg_mi(ds, VariablePartition((0,), (1,), (2,)), 3)


def test_ksg_rejects_duplicates():
    ds = Dataset.from_arrays([[0.0, 0.0, 1.0, 2.0], [1.0, 1.0, 3.0, 0.0]], [C, C])
    with pytest.raises(DegenerateGeometryError):
        ksg_mi(ds, XY, 1)


def test_fp_empty_z_equals_ksg(rng):
    ds = _gaussian_pair(rng, 2000, 0.4)
    assert fp_cmi(ds, XY, 7) == ksg_mi(ds, XY, 7)


def test_fp_gaussian_chain(rng):
    n = 5000
    x = rng.standard_normal(n)
    z = x + rng.standard_normal(n)
    y = z + rng.standard_normal(n)
    ds = Dataset.from_arrays([x, y, z], [C, C, C])
    assert abs(fp_cmi(ds, XYZ, 10)) < 0.03


def test_fp_confounder_with_common_noise(rng):
    n = 5000
    z = rng.standard_normal(n)
    eta_w = rng.standard_normal(n)
    x = z + 0.5 * rng.standard_normal(n) + 0.5 * eta_w
    y = z + 0.5 * rng.standard_normal(n) + 0.5 * eta_w
    ds = Dataset.from_arrays([x, y, z], [C, C, C])
    assert fp_cmi(ds, XYZ, 10) > 0.05


def test_fp_rejects_categorical(rng):
    with pytest.raises(ConfigurationError):
        fp_cmi(mixed_dataset(rng, 50), VariablePartition((0,), (1,), (2, 3)), 3)


# --- GKOV -----------------------------------------------------------------

def test_gkov_copy_of_discrete(rng):
    x = rng.integers(0, 3, 5000)
    ds = Dataset.from_arrays([x, x.copy()], [CAT, CAT])
    assert gkov_mi(ds, XY, 500) == pytest.approx(math.log(3), abs=0.05)


def test_gkov_independent_discrete(rng):
    ds = Dataset.from_arrays([rng.integers(0, 3, 5000), rng.integers(0, 4, 5000)], [CAT, CAT])
    # k below the cell sizes: every radius is 0 and the tie count takes over
    assert abs(gkov_mi(ds, XY, 10)) < 0.03


def _mixed_mi_by_quadrature(c, width):
    """I(X;Y) for X ~ U{0..c-1}, Y | X ~ U[X, X + width] by a fine grid over y."""
    y = np.linspace(0, c - 1 + width, 2_000_001)
    dens = np.zeros_like(y)
    for x in range(c):
        dens += ((y >= x) & (y <= x + width)) / (c * width)
    h_y = -np.trapezoid(np.where(dens > 0, dens * np.log(np.where(dens > 0, dens, 1)), 0.0), y)
    return h_y - math.log(width)


def test_gkov_discrete_continuous(rng):
    n = 5000
    x = rng.integers(0, 3, n)
    y = x + rng.uniform(0, 2, n)
    ds = Dataset.from_arrays([x, y], [CAT, C])
    assert gkov_mi(ds, XY, 50) == pytest.approx(_mixed_mi_by_quadrature(3, 2.0), abs=0.05)


def test_gkov_rejects_z(rng):
    with pytest.raises(ConfigurationError):
        gkov_mi(mixed_dataset(rng, 30), VariablePartition((0,), (1,), (2,)), 2)


# --- MS -------------------------------------------------------------------

def test_ms_independent_z_recovery():
    truth = math.log(5) - 0.8 * math.log(2)
    assert _mean_over_reps("indepz-est", "ms", 50, 2000, {"c": 5, "d": 1}, k_c=0.01) == pytest.approx(truth, abs=0.10)


def test_ms_small_cluster_rows_vanish(rng):
    n_big, n_small = 100, 3
    x = rng.random(n_big + n_small)
    y = rng.random(n_big + n_small)
    z = np.r_[np.zeros(n_big, int), np.ones(n_small, int)]
    ds = Dataset.from_arrays([x, y, z], [C, C, CAT])
    res = ms_cmi(ds, XYZ, EstimatorConfig("ms", explicit_k=5))
    np.testing.assert_array_equal(res.xi[n_big:], 0.0)
    assert res.zero_rows >= n_small


def _three_by_three_by_two(rng, n=5000):
    z = rng.integers(0, 2, n)
    x = (rng.integers(0, 3, n) + z) % 3
    y = np.where(rng.random(n) < 0.5 + 0.2 * z, x, rng.integers(0, 3, n))
    return Dataset.from_arrays([x, y, z], [CAT, CAT, CAT])


def test_ms_discrete_table_kc_01(rng):
    ds = _three_by_three_by_two(rng)
    assert ms_cmi(ds, XYZ, EstimatorConfig("ms", k_c=0.01)).value == pytest.approx(plugin_cmi(ds, XYZ), abs=0.05)


def test_ms_discrete_table_kc_10_collapses(rng):
    # a uniform table puts about 278 rows in each XYZ cell, fewer than
    # k + 1 = 501, so every ball reaches distance 1 and the estimate is 0
    n = 5000
    ds = Dataset.from_arrays([rng.integers(0, 3, n), rng.integers(0, 3, n), rng.integers(0, 2, n)],
                             [CAT, CAT, CAT])
    res = ms_cmi(ds, XYZ, EstimatorConfig("ms", k_c=0.1))
    assert res.value == 0.0 and res.zero_rows == ds.n_rows


def test_ms_value_is_mean_of_xi(rng):
    res = ms_cmi(mixed_dataset(rng, 300), VariablePartition((0,), (1,), (2, 3)), EstimatorConfig("ms", k_c=0.05))
    assert res.value == float(np.mean(res.xi))
    assert len(res.k_used) == 300 and set(res.k_used) == {15}


def test_ms_clamp(rng):
    n = 400
    ds = Dataset.from_arrays([rng.random(n), rng.random(n), rng.integers(0, 2, n)], [C, C, CAT])
    raw = ms_cmi(ds, XYZ, EstimatorConfig("ms", k_c=0.05))
    clamped = ms_cmi(ds, XYZ, EstimatorConfig("ms", k_c=0.05, clamp_nonnegative=True))
    assert clamped.value == max(raw.value, 0.0)


def test_ms_not_scale_invariant():
    rng = np.random.default_rng(5)
    n = 1000
    z = rng.integers(0, 2, n)
    x = rng.random(n) + 0.1 * z
    y = x + 0.1 * rng.random(n)
    ds = Dataset.from_arrays([x, y, z], [C, C, CAT])
    cfg = EstimatorConfig("ms", k_c=0.1)
    scaled = ds.replace_columns({0: 10 * x, 1: 10 * y})
    assert abs(ms_cmi(ds, XYZ, cfg).value - ms_cmi(scaled, XYZ, cfg).value) > 0.1


def test_wrong_kind_rejected(rng):
    with pytest.raises(ConfigurationError):
        ms_cmi(mixed_dataset(rng, 50), XYZ, EstimatorConfig("msinf"))


# --- ZMADG ----------------------------------------------------------------

def test_zmadg_confounder_gaussian():
    assert abs(_mean_over_reps("confgauss-est", "zmadg", 50, 2000, {"m": 9}, k_c=0.1)) < 0.08


def test_zmadg_fully_discrete_is_plugin(rng):
    ds = _three_by_three_by_two(rng, 2000)
    res = zmadg_cmi(ds, XYZ, EstimatorConfig("zmadg", k_c=0.1))
    assert res.value == pytest.approx(plugin_cmi(ds, XYZ), abs=1e-12)


def test_zmadg_fully_continuous_is_kl_sum(rng):
    n = 500
    a = rng.standard_normal((n, 3))
    ds = Dataset.from_arrays(list(a.T), [C, C, C])
    k = 50
    expected = (kl_entropy(a[:, [0, 2]], k) + kl_entropy(a[:, [1, 2]], k)
                - kl_entropy(a, k) - kl_entropy(a[:, [2]], k))
    res = zmadg_cmi(ds, XYZ, EstimatorConfig("zmadg", k_c=0.1))
    assert res.value == pytest.approx(expected, abs=1e-10)


def test_zmadg_drops_singleton_clusters(rng):
    n = 300
    z = np.r_[rng.integers(0, 2, n - 1), 7]
    ds = Dataset.from_arrays([rng.standard_normal(n), rng.standard_normal(n), z], [C, C, CAT])
    res = zmadg_cmi(ds, XYZ, EstimatorConfig("zmadg", k_c=0.1))
    assert res.diagnostics["dropped_clusters"]["xz"] == 1
    assert res.diagnostics["dropped_clusters"]["z"] == 0
    assert np.isfinite(res.value)
    assert res.value == pytest.approx(float(np.mean(res.xi)), abs=1e-12)


def test_zmadg_treats_discrete_numeric_as_quantitative(rng):
    n = 400
    x = rng.integers(0, 50, n).astype(float) + rng.random(n)
    ds_dn = Dataset.from_arrays([x, rng.standard_normal(n), rng.integers(0, 3, n)], [DN, C, CAT])
    ds_c = Dataset.from_arrays([x, ds_dn.columns[1].values, ds_dn.columns[2].values], [C, C, CAT])
    cfg = EstimatorConfig("zmadg", k_c=0.1)
    assert zmadg_cmi(ds_dn, XYZ, cfg).value == zmadg_cmi(ds_c, XYZ, cfg).value


# --- MSInf ----------------------------------------------------------------

def test_msinf_mixture_recovery():
    assert _mean_over_reps("mixture-est", "msinf", 50, 2000, k_c=0.1) == pytest.approx(0.472, abs=0.08)


def test_msinf_single_cluster_equals_ms(rng):
    for _ in range(5):
        u = rng.random((400, 3))
        ds = Dataset.from_arrays(list(u.T), [C, C, C])
        a = ms_cmi(ds, XYZ, EstimatorConfig("ms", explicit_k=12))
        b = msinf_cmi(ds, XYZ, EstimatorConfig("msinf", explicit_k=12))
        assert a.value == b.value
        np.testing.assert_array_equal(a.xi, b.xi)


def test_msinf_less_biased_than_ms_with_three_z():
    truth = ground_truth(ModelSpec("indepz-est", 10, {"c": 5, "d": 3}))
    ms = _mean_over_reps("indepz-est", "ms", 20, 1000, {"c": 5, "d": 3}, k_c=0.2)
    msinf = _mean_over_reps("indepz-est", "msinf", 20, 1000, {"c": 5, "d": 3}, k_c=0.2)
    assert abs(msinf - truth) < abs(ms - truth)


def test_msinf_affine_invariance(rng):
    ds = mixed_dataset(rng, 300)
    part = VariablePartition((0,), (1,), (2, 3))
    cfg = EstimatorConfig("msinf", k_c=0.2)
    base = msinf_cmi(ds, part, cfg).value
    for lam, shift in ((0.5, 0.0), (3.0, -2.0), (-10.0, 1.0)):
        moved = ds.replace_columns({i: lam * ds.columns[i].values + shift for i in (0, 1, 2)})
        assert abs(msinf_cmi(moved, part, cfg).value - base) <= 1e-9


def test_msinf_all_singletons():
    ds = Dataset.from_arrays([[0.1, 0.2, 0.3], [1.0, 2.0, 3.0], [0, 1, 2]], [C, C, CAT])
    with pytest.raises(EstimatorUndefinedError):
        msinf_cmi(ds, XYZ, EstimatorConfig("msinf"))


@pytest.mark.parametrize("heuristic", ["local", "global", "cluster"])
def test_msinf_heuristics(rng, heuristic):
    n = 300
    z = np.r_[rng.integers(0, 2, n - 4), [2, 2, 2, 2]]
    ds = Dataset.from_arrays([rng.standard_normal(n), rng.standard_normal(n), z], [C, C, CAT])
    res = msinf_cmi(ds, XYZ, EstimatorConfig("msinf", k_c=0.2, heuristic=heuristic))
    assert res.value == float(np.mean(res.xi))
    assert res.zero_rows <= n
    if heuristic == "global":
        # the 4-row cluster cannot host k = 60 neighbours, so its rows use k = floor(0.2 * 4) = 1
        assert set(res.k_used[-4:]) == {1} and res.k_used[0] == 60


def test_msinf_duplicate_rows_allowed():
    x = np.array([0.1, 0.1, 0.1, 0.5, 0.7, 0.2, 0.2, 0.9])
    ds = Dataset.from_arrays([x, x[::-1].copy(), np.zeros(8, int)], [C, C, CAT])
    res = msinf_cmi(ds, XYZ, EstimatorConfig("msinf", explicit_k=2))
    assert np.isfinite(res.value)


# --- dispatch and config --------------------------------------------------

def test_estimate_dispatch(rng):
    ds = _gaussian_pair(rng, 500, 0.5)
    for kind, fn in (("ksg", ksg_mi), ("fp", fp_cmi), ("gkov", gkov_mi)):
        res = estimate(ds, XY, EstimatorConfig(kind, k_c=0.02))
        assert res.value == fn(ds, XY, 10)
    with pytest.raises(ConfigurationError):
        estimate(ds, XY, EstimatorConfig("kl"))


def test_config_validation():
    with pytest.raises(ConfigurationError):
        EstimatorConfig("ms", k_c=0.0)
    with pytest.raises(ConfigurationError):
        EstimatorConfig("ms", explicit_k=0)
    with pytest.raises(ConfigurationError):
        EstimatorConfig("nope")
    assert EstimatorConfig("ms", k_c=5.0, explicit_k=3).explicit_k == 3
    assert EstimatorConfig("MS0inf").kind is EstimatorKind.MSINF
    cfg = EstimatorConfig("zmadg", k_c=0.3, heuristic="global")
    assert EstimatorConfig.from_dict(cfg.to_dict()) == cfg
    assert EstimatorConfig("ms", k_c=0.29).global_k(100) == 29


def test_estimators_are_deterministic(rng):
    ds = mixed_dataset(rng, 200)
    part = VariablePartition((0,), (1,), (2, 3))
    for kind in ("ms", "msinf", "zmadg"):
        cfg = EstimatorConfig(kind, k_c=0.1)
        assert estimate(ds, part, cfg).value == estimate(ds, part, cfg).value

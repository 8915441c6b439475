"""Experiment harness: estimator bias/variance sweeps and CIT error-rate sweeps.

Every repetition draws its data from a seed derived from
(master_seed, n index, repetition), so all estimators, k_c values and
preprocessing variants in a sweep see the same samples, and null and
alternative repetitions of a CIT sweep differ only in the coupling w.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.stats import binom

from .cit import CitConfig, run_cit
from .data import Preprocessing, apply_preprocessing
from .errors import ConfigurationError, MixcitError
from .estimators import EstimatorConfig, estimate
from .models import ModelSpec, generate

__all__ = [
    "SweepSpec",
    "RateReport",
    "binomial_ci",
    "data_seed",
    "run_cmi_sweep",
    "run_cit_sweep",
    "report_bytes",
    "write_report",
    "worker_count",
]


def binomial_ci(successes: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval for a success rate.

    ``low`` solves P(X >= successes; p) = alpha/2 and ``high`` solves
    P(X <= successes; p) = alpha/2, with low = 0 when successes = 0 and
    high = 1 when successes = trials.
    """
    if int(trials) != trials or trials < 1:
        raise ConfigurationError(f"trials must be a positive integer, got {trials!r}")
    if int(successes) != successes or not 0 <= successes <= trials:
        raise ConfigurationError(f"successes must be an integer in [0, {trials}], got {successes!r}")
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    s, n, tail = int(successes), int(trials), alpha / 2
    low = 0.0
    if s > 0:
        low = brentq(lambda p: binom.sf(s - 1, n, p) - tail, 0.0, 1.0, xtol=1e-12)
    high = 1.0
    if s < n:
        high = brentq(lambda p: binom.cdf(s, n, p) - tail, 0.0, 1.0, xtol=1e-12)
    return float(low), float(high)


def worker_count() -> int:
    """Process count for sweeps: MIXCIT_THREADS if set, else all cores."""
    raw = os.environ.get("MIXCIT_THREADS")
    if raw is None or not raw.strip():
        return os.cpu_count() or 1
    try:
        v = int(raw)
    except ValueError:
        raise ConfigurationError(f"MIXCIT_THREADS must be a positive integer, got {raw!r}") from None
    if v < 1:
        raise ConfigurationError(f"MIXCIT_THREADS must be a positive integer, got {raw!r}")
    return v


def data_seed(master_seed: int, n_index: int, rep: int) -> int:
    return int(np.random.SeedSequence([int(master_seed), int(n_index), int(rep)]).generate_state(1)[0])


@dataclass(frozen=True)
class SweepSpec:
    """Grid of experiments over sample sizes, estimators, k_c and preprocessing.

    Estimators with ``explicit_k`` ignore ``k_c_grid`` and run once per cell.
    """

    name: str
    model: ModelSpec
    estimators: tuple[EstimatorConfig, ...]
    k_c_grid: tuple[float, ...]
    n_grid: tuple[int, ...]
    preprocessing: tuple[Preprocessing, ...] = (Preprocessing.NONE,)
    repetitions: int = 10
    B: int = 100
    k_perm: int = 5
    alpha: float = 0.05
    master_seed: int = 0
    record_runtime: bool = True

    def __post_init__(self):
        if not self.name or any(c in self.name for c in "/\\"):
            raise ConfigurationError(f"invalid sweep name {self.name!r}")
        object.__setattr__(self, "estimators", tuple(
            e if isinstance(e, EstimatorConfig) else EstimatorConfig.from_dict(e) for e in self.estimators))
        object.__setattr__(self, "preprocessing", tuple(Preprocessing.parse(p) for p in self.preprocessing))
        object.__setattr__(self, "k_c_grid", tuple(float(k) for k in self.k_c_grid))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if not (self.estimators and self.k_c_grid and self.n_grid and self.preprocessing):
            raise ConfigurationError("estimators, k_c_grid, n_grid and preprocessing must be non-empty")
        if int(self.repetitions) != self.repetitions or self.repetitions < 1:
            raise ConfigurationError(f"repetitions must be a positive integer, got {self.repetitions!r}")
        if any(not 0.0 < k < 1.0 for k in self.k_c_grid):
            raise ConfigurationError("every k_c must lie in (0, 1)")
        if any(n < 2 for n in self.n_grid):
            raise ConfigurationError("every n must be at least 2")
        CitConfig(B=self.B, k_perm=self.k_perm, alpha=self.alpha)

    def configs(self) -> list[EstimatorConfig]:
        out = []
        for e in self.estimators:
            if e.explicit_k is not None:
                out.append(e)
            else:
                out.extend(e.with_k_c(k) for k in self.k_c_grid)
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "model": {"family": self.model.family.value, "params": dict(self.model.params)},
            "estimators": [e.to_dict() for e in self.estimators],
            "k_c_grid": list(self.k_c_grid),
            "n_grid": list(self.n_grid),
            "preprocessing": [p.value for p in self.preprocessing],
            "repetitions": self.repetitions,
            "B": self.B,
            "k_perm": self.k_perm,
            "alpha": self.alpha,
            "master_seed": self.master_seed,
            "record_runtime": self.record_runtime,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        d = dict(d)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown sweep fields {sorted(unknown)}")
        for key in ("name", "model", "estimators", "k_c_grid", "n_grid"):
            if key not in d:
                raise ConfigurationError(f"sweep spec is missing {key!r}")
        m = d["model"]
        if not isinstance(m, dict) or "family" not in m:
            raise ConfigurationError("sweep model needs a 'family'")
        d["model"] = ModelSpec(m["family"], int(m.get("n", 2)), m.get("params", {}), 0)
        return cls(**d)

    @classmethod
    def load(cls, path) -> "SweepSpec":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"sweep spec {path} is not valid JSON: {exc}") from None


@dataclass(frozen=True)
class RateReport:
    n: int
    preprocessing: str
    estimator: dict
    fpr: float
    fp_count: int
    n_null: int
    fpr_ci: tuple[float, float]
    tpr: Optional[float] = None
    tp_count: Optional[int] = None
    n_alt: Optional[int] = None
    tpr_ci: Optional[tuple[float, float]] = None
    mean_runtime_s: Optional[float] = None
    n_failed: int = 0
    errors: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["fpr_ci"] = list(self.fpr_ci)
        d["tpr_ci"] = None if self.tpr_ci is None else list(self.tpr_ci)
        d["errors"] = list(self.errors)
        return d


def _model_at(spec: SweepSpec, n: int, seed: int, **params) -> ModelSpec:
    return ModelSpec(spec.model.family, n, {**spec.model.params, **params}, seed)


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def _cmi_task(args):
    spec, n_index, rep = args
    n = spec.n_grid[n_index]
    seed = data_seed(spec.master_seed, n_index, rep)
    sample = generate(_model_at(spec, n, seed))
    rows = []
    for prep in spec.preprocessing:
        err_prep = None
        try:
            ds = apply_preprocessing(sample.dataset, prep)
        except MixcitError as exc:
            err_prep = f"{type(exc).__name__}: {exc}"
        for cfg in spec.configs():
            row = {"n": n, "preprocessing": prep.value, "estimator": cfg.kind.value, "k_c": cfg.k_c,
                   "heuristic": cfg.heuristic.value, "explicit_k": cfg.explicit_k, "rep": rep,
                   "seed": seed, "truth": sample.truth, "estimate": None, "runtime_s": None,
                   "error": err_prep}
            if err_prep is None:
                try:
                    res, dt = _timed(estimate, ds, sample.partition, cfg)
                    row["estimate"] = res.value
                    row["runtime_s"] = dt if spec.record_runtime else None
                except MixcitError as exc:
                    row["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    return rows


def _cit_task(args):
    spec, n_index, rep = args
    n = spec.n_grid[n_index]
    seed = data_seed(spec.master_seed, n_index, rep)
    w_alt = float(spec.model.params.get("w", 0.0))
    variants = [("null", 0.0)] + ([("alt", w_alt)] if w_alt > 0 else [])
    rows = []
    for hyp, w in variants:
        sample = generate(_model_at(spec, n, seed, w=w))
        for prep in spec.preprocessing:
            err_prep = None
            try:
                ds = apply_preprocessing(sample.dataset, prep)
            except MixcitError as exc:
                err_prep = f"{type(exc).__name__}: {exc}"
            for cfg in spec.configs():
                row = {"n": n, "preprocessing": prep.value, "estimator": cfg.kind.value, "k_c": cfg.k_c,
                       "heuristic": cfg.heuristic.value, "explicit_k": cfg.explicit_k, "rep": rep,
                       "seed": seed, "hypothesis": hyp, "w": w, "t_obs": None, "p_value": None,
                       "reject": None, "runtime_s": None, "error": err_prep}
                if err_prep is None:
                    cit_cfg = CitConfig(B=spec.B, k_perm=spec.k_perm, alpha=spec.alpha, seed=seed,
                                        estimator=cfg)
                    try:
                        res, dt = _timed(run_cit, ds, sample.partition, cit_cfg)
                        row.update(t_obs=res.t_obs, p_value=res.p_value, reject=res.reject)
                        row["runtime_s"] = dt / (spec.B + 1) if spec.record_runtime else None
                    except MixcitError as exc:
                        row["error"] = f"{type(exc).__name__}: {exc}"
                rows.append(row)
    return rows


def _run_tasks(fn, spec: SweepSpec, workers: Optional[int]):
    tasks = [(spec, i, r) for i in range(len(spec.n_grid)) for r in range(spec.repetitions)]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        chunks = [fn(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            chunks = list(pool.map(fn, tasks))
    rows = [r for chunk in chunks for r in chunk]
    key = lambda r: (r["n"], r["preprocessing"], r["estimator"], r["k_c"], r["heuristic"],  # noqa: E731
                     r["explicit_k"] or 0, r.get("hypothesis", ""), r["rep"])
    rows.sort(key=key)
    return rows


def _cells(rows):
    cells = {}
    for r in rows:
        k = (r["n"], r["preprocessing"], r["estimator"], r["k_c"], r["heuristic"], r["explicit_k"])
        cells.setdefault(k, []).append(r)
    return cells


def _mean_runtime(rows):
    rt = [r["runtime_s"] for r in rows if r["runtime_s"] is not None]
    return float(np.mean(rt)) if rt else None


def run_cmi_sweep(spec: SweepSpec, workers: Optional[int] = None) -> dict:
    """Raw estimates plus per-cell mean, variance and mean absolute error vs the truth.

    Returns ``{"spec", "rows", "cells"}``. Variance is None with fewer than
    two successful repetitions; MAE is None when the model has no truth.
    """
    if spec.model.family.is_cit:
        raise ConfigurationError("run_cmi_sweep needs an estimation model family")
    rows = _run_tasks(_cmi_task, spec, workers)
    cells = []
    for (n, prep, kind, k_c, heur, ek), rs in _cells(rows).items():
        vals = np.array([r["estimate"] for r in rs if r["estimate"] is not None])
        truth = rs[0]["truth"]
        cells.append({
            "n": n, "preprocessing": prep, "estimator": kind, "k_c": k_c, "heuristic": heur,
            "explicit_k": ek, "truth": truth, "n_ok": int(vals.size), "n_failed": len(rs) - int(vals.size),
            "mean": float(vals.mean()) if vals.size else None,
            "variance": float(vals.var(ddof=1)) if vals.size >= 2 else None,
            "mae": float(np.mean(np.abs(vals - truth))) if vals.size and truth is not None else None,
            "mean_runtime_s": _mean_runtime(rs),
        })
    return {"spec": spec.to_dict(), "rows": rows, "cells": cells}


def run_cit_sweep(spec: SweepSpec, workers: Optional[int] = None) -> dict:
    """FPR over w = 0 repetitions and TPR over w > 0 repetitions, with exact 95% CIs.

    ``spec.model.params["w"]`` is the alternative coupling; with w = 0
    only null repetitions run and the TPR fields are None. Returns
    ``{"spec", "rows", "reports"}`` with :class:`RateReport` objects.
    """
    if not spec.model.family.is_cit:
        raise ConfigurationError("run_cit_sweep needs a conditional-independence model family")
    rows = _run_tasks(_cit_task, spec, workers)
    reports = []
    for (n, prep, kind, k_c, heur, ek), rs in _cells(rows).items():
        null = [r for r in rs if r["hypothesis"] == "null" and r["error"] is None]
        alt = [r for r in rs if r["hypothesis"] == "alt" and r["error"] is None]
        failed = [r for r in rs if r["error"] is not None]
        fp = sum(bool(r["reject"]) for r in null)
        tp = sum(bool(r["reject"]) for r in alt)
        has_alt = any(r["hypothesis"] == "alt" for r in rs)
        est = {"kind": kind, "k_c": k_c, "heuristic": heur, "explicit_k": ek}
        reports.append(RateReport(
            n=n, preprocessing=prep, estimator=est,
            fpr=fp / len(null) if null else math.nan, fp_count=fp, n_null=len(null),
            fpr_ci=binomial_ci(fp, len(null), 0.05) if null else (math.nan, math.nan),
            tpr=(tp / len(alt) if alt else math.nan) if has_alt else None,
            tp_count=tp if has_alt else None, n_alt=len(alt) if has_alt else None,
            tpr_ci=(binomial_ci(tp, len(alt), 0.05) if alt else (math.nan, math.nan)) if has_alt else None,
            mean_runtime_s=_mean_runtime(rs), n_failed=len(failed),
            errors=tuple(sorted({r["error"] for r in failed})),
        ))
    return {"spec": spec.to_dict(), "rows": rows, "reports": reports}


def _jsonable(obj):
    if isinstance(obj, RateReport):
        return _jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def report_bytes(result: dict) -> tuple[bytes, bytes]:
    """CSV (one row per repetition and cell) and JSON summary as bytes."""
    rows = result["rows"]
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                        for k, v in _jsonable(r).items()})
    summary = {k: v for k, v in result.items() if k != "rows"}
    js = json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n"
    return buf.getvalue().encode("utf-8"), js.encode("utf-8")


def write_report(result: dict, out_dir, timestamp: Optional[str] = None) -> tuple[Path, Path]:
    """Write ``<name>_<timestamp>.csv`` and ``.json`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = timestamp or datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    stem = f"{result['spec']['name']}_{stamp}"
    csv_bytes, json_bytes = report_bytes(result)
    csv_path, json_path = out_dir / f"{stem}.csv", out_dir / f"{stem}.json"
    csv_path.write_bytes(csv_bytes)
    json_path.write_bytes(json_bytes)
    return csv_path, json_path

"""End-to-end run: split, scale, train, allocate, granulate, match channels.

Every random choice is derived from ``PipelineConfig.seed`` so that two runs
with the same configuration produce byte-identical reports.
"""

from __future__ import annotations

import dataclasses
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from . import cf
from .allocator import AllocationResult, PsoConfig, optimize
from .channels import ChannelCatalog, default_catalog, load_catalog, recommend
from .data import Dataset, load_bundled_dataset, load_dataset, normalize, split
from .errors import ConfigurationError, GrannetError
from .granulation import GranularityAllocation, ObjectiveConfig, evaluate, output_intervals
from .interval import Interval
from .mlp import NetworkModel, TrainingConfig, predict, train


class PipelineError(GrannetError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    dataset: Optional[str] = None          # None -> bundled synthetic dataset
    catalog: Optional[str] = None          # None -> bundled channel catalog
    ratings: Optional[str] = None          # optional, enables the CF baseline
    hidden: tuple[int, ...] = (8,)
    training: TrainingConfig = TrainingConfig(epochs=10000)
    base_alpha: float = 0.5
    objective: ObjectiveConfig = ObjectiveConfig()
    pso: PsoConfig = PsoConfig()
    train_fraction: float = 0.7
    seed: int = 0
    top_k: int = 3
    alpha_sweep: tuple[float, ...] = (0.05, 0.1, 0.25, 0.5, 1.0)
    cf_k: tuple[int, ...] = (1, 2, 5, 10, 20, 34)

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigurationError("train_fraction must lie in (0, 1)")
        if not self.base_alpha > 0:
            raise ConfigurationError("base_alpha must be positive")
        if any(not a > 0 for a in self.alpha_sweep):
            raise ConfigurationError("alpha sweep values must be positive")
        if self.top_k < 1 or any(k < 1 for k in self.cf_k):
            raise ConfigurationError("top_k and cf_k values must be positive")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        object.__setattr__(self, "alpha_sweep", tuple(float(a) for a in self.alpha_sweep))
        object.__setattr__(self, "cf_k", tuple(int(k) for k in self.cf_k))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        doc = dict(doc)
        nested = {"training": TrainingConfig, "objective": ObjectiveConfig, "pso": PsoConfig}
        for key, typ in nested.items():
            if key in doc and isinstance(doc[key], dict):
                doc[key] = typ(**doc[key])
        unknown = set(doc) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)


def derive_seeds(seed: int) -> dict[str, int]:
    """Independent child seeds for the split, weight init, PSO and rating split."""
    children = np.random.SeedSequence(seed).spawn(4)
    names = ("split", "init", "pso", "ratings")
    return {n: int(c.generate_state(1)[0]) for n, c in zip(names, children)}


def outward_rounded(iv: Interval) -> list[int]:
    return [math.floor(iv.lo), math.ceil(iv.hi)]


@dataclass
class Report:
    config: dict
    seeds: dict
    model: dict
    allocation: dict
    granularity_table: list[dict]
    train_scores: dict
    test_scores: dict
    records: list[dict]
    mae: dict
    alpha_sweep: list[dict] = field(default_factory=list)
    cf_baseline: Optional[dict] = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def to_table(self) -> str:
        return render_table(self)


def _stage(name):
    def wrap(fn):
        def inner(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except PipelineError:
                raise
            except (GrannetError, OSError, ValueError) as exc:
                raise PipelineError(name, exc) from exc
        return inner
    return wrap


@_stage("load")
def _load_inputs(cfg: PipelineConfig) -> tuple[Dataset, ChannelCatalog]:
    ds = load_dataset(cfg.dataset) if cfg.dataset else load_bundled_dataset()
    catalog = load_catalog(cfg.catalog) if cfg.catalog else default_catalog()
    return ds, catalog


@_stage("split")
def _split(ds: Dataset, cfg: PipelineConfig, seed: int):
    train_raw, test_raw = split(ds, cfg.train_fraction, seed)
    train_ds = normalize(train_raw)
    return train_raw, test_raw, train_ds, normalize(test_raw, train_ds.scaler)


@_stage("train")
def _train(train_ds: Dataset, cfg: PipelineConfig, seed: int) -> NetworkModel:
    sizes = (train_ds.m, *cfg.hidden, 1)
    tcfg = dataclasses.replace(cfg.training, seed=seed)
    return train(train_ds.features, train_ds.targets, sizes, tcfg)


@_stage("optimize")
def _optimize(model, train_ds, base_alpha, cfg: PipelineConfig, seed: int) -> AllocationResult:
    pso = dataclasses.replace(cfg.pso, seed=seed)
    return optimize(model, train_ds.features, train_ds.targets, base_alpha, cfg.objective, pso)


def granular_mae(model: NetworkModel, ds: Dataset, alloc: GranularityAllocation,
                 raw_targets) -> tuple[float, np.ndarray, np.ndarray]:
    """MAE of interval midpoints on the raw target scale, plus raw bounds."""
    lo, hi = output_intervals(model, ds.features, alloc)
    raw_lo, raw_hi = ds.scaler.inverse_target(lo), ds.scaler.inverse_target(hi)
    return cf.mae((raw_lo + raw_hi) / 2.0, raw_targets), raw_lo, raw_hi


@_stage("evaluate")
def _evaluate(model, train_ds, test_ds, test_raw, result, catalog, cfg):
    alloc = result.best_allocation
    test_scores = evaluate(model, test_ds.features, test_ds.targets, alloc, cfg.objective)
    mid_mae, raw_lo, raw_hi = granular_mae(model, test_ds, alloc, test_raw.targets)
    point = test_ds.scaler.inverse_target(predict(model, test_ds.features))
    records = []
    for i in range(test_ds.n):
        iv = Interval(raw_lo[i], raw_hi[i])
        ranked = recommend(iv, catalog, cfg.top_k)
        records.append({
            "target": float(test_raw.targets[i]),
            "interval": [iv.lo, iv.hi],
            "rounded_interval": outward_rounded(iv),
            "covered": bool(iv.lo <= test_raw.targets[i] <= iv.hi),
            "channels": [{"name": c.name, "degree": d} for c, d in ranked],
        })
    mae = {"granular_midpoint": mid_mae, "point": cf.mae(point, test_raw.targets)}
    return test_scores, records, mae


@_stage("alpha-sweep")
def _alpha_sweep(model, train_ds, test_ds, test_raw, cfg, seed):
    rows = []
    for a in cfg.alpha_sweep:
        res = _optimize(model, train_ds, a, cfg, seed)
        test_scores = evaluate(model, test_ds.features, test_ds.targets,
                               res.best_allocation, cfg.objective)
        rows.append({
            "alpha": a,
            "train_q1": res.best_q1,
            "test": test_scores._asdict(),
            "granular_mae": granular_mae(model, test_ds, res.best_allocation, test_raw.targets)[0],
            "alphas": res.best_allocation.alphas.tolist(),
        })
    return rows


@_stage("cf-baseline")
def _cf_baseline(cfg: PipelineConfig, seed: int) -> dict:
    triples = cf.load_ratings(cfg.ratings)
    train_t, test_t = cf.split_ratings(triples, cfg.train_fraction, seed)
    by_k = {str(k): cf.evaluate_knn(train_t, test_t, k) for k in cfg.cf_k}
    best = min(cfg.cf_k, key=lambda k: (by_k[str(k)], k))
    return {"n_ratings": len(triples), "n_test": len(test_t), "mae_by_k": by_k,
            "best_k": best, "best_mae": by_k[str(best)]}


def run_pipeline(cfg: PipelineConfig) -> Report:
    seeds = derive_seeds(cfg.seed)
    ds, catalog = _load_inputs(cfg)
    train_raw, test_raw, train_ds, test_ds = _split(ds, cfg, seeds["split"])
    model = _train(train_ds, cfg, seeds["init"])
    result = _optimize(model, train_ds, cfg.base_alpha, cfg, seeds["pso"])
    test_scores, records, mae = _evaluate(model, train_ds, test_ds, test_raw, result, catalog, cfg)

    alloc = result.best_allocation
    ranking = alloc.importance_ranking()
    table = [
        {"attribute": ds.feature_names[i], "alpha": float(alloc.alphas[i]),
         "importance_rank": ranking.index(i) + 1}
        for i in range(ds.m)
    ]
    return Report(
        config=cfg.to_dict(),
        seeds=seeds,
        model={"layer_sizes": list(model.layer_sizes), "final_mse": model.final_mse,
               "n_train": train_ds.n, "n_test": test_ds.n},
        allocation=result.to_dict(),
        granularity_table=table,
        train_scores=result.component_scores._asdict(),
        test_scores=test_scores._asdict(),
        records=records,
        mae=mae,
        alpha_sweep=_alpha_sweep(model, train_ds, test_ds, test_raw, cfg, seeds["pso"]),
        cf_baseline=_cf_baseline(cfg, seeds["ratings"]) if cfg.ratings else None,
    )


def render_table(report: Report) -> str:
    out = io.StringIO()
    m = report.model
    out.write(f"network {m['layer_sizes']}  train MSE {m['final_mse']:.6f}  "
              f"n_train={m['n_train']} n_test={m['n_test']}\n\n")
    out.write("attribute          alpha     rank\n")
    for row in report.granularity_table:
        out.write(f"{row['attribute']:<16} {row['alpha']:8.4f} {row['importance_rank']:6d}\n")
    for label, s in (("train", report.train_scores), ("test", report.test_scores)):
        out.write(f"\n{label:<5} C={s['coverage']:.4f} S={s['specificity']:.4f} "
                  f"B={s['balance']:.4f} Q1={s['q1']:.4f}")
    out.write(f"\n\nMAE (interval midpoint) {report.mae['granular_midpoint']:.4f}"
              f"   MAE (point) {report.mae['point']:.4f}\n")
    if report.cf_baseline:
        cb = report.cf_baseline
        out.write(f"CF baseline best k={cb['best_k']} MAE {cb['best_mae']:.4f}\n")
    if report.alpha_sweep:
        out.write("\nalpha    train_Q1  test_Q1   test_C   test_S   MAE\n")
        for row in report.alpha_sweep:
            t = row["test"]
            out.write(f"{row['alpha']:<8.4g} {row['train_q1']:.4f}    {t['q1']:.4f}    "
                      f"{t['coverage']:.4f}   {t['specificity']:.4f}   {row['granular_mae']:.4f}\n")
    out.write("\n  #  target   interval           top channel (degree)\n")
    for i, r in enumerate(report.records):
        lo, hi = r["rounded_interval"]
        top = r["channels"][0]
        out.write(f"{i:3d} {r['target']:7.3f}   [{lo},{hi}]".ljust(36)
                  + f"{top['name']} ({top['degree']:.3f})\n")
    return out.getvalue()


def write_report(report: Report, path: str | os.PathLike, table_path: str | os.PathLike | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    if table_path is not None:
        with open(table_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_table())

"""Command-line entry point: ``grannet {train,optimize,recommend,evaluate,pipeline}``.

``--config FILE`` reads a JSON object whose keys are flag names (dashes or
underscores); flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import cf
from .allocator import optimize
from .channels import default_catalog, load_catalog, recommend
from .data import Scaler, load_dataset, normalize
from .errors import GrannetError
from .granulation import GranularityAllocation, ObjectiveConfig, evaluate, output_intervals
from .interval import Interval
from .mlp import NetworkModel, predict, save_model, train
from .pipeline import (
    PipelineConfig,
    PipelineError,
    derive_seeds,
    granular_mae,
    outward_rounded,
    run_pipeline,
    write_report,
)


def _add_training(p):
    p.add_argument("--hidden", type=int, nargs="+", help="hidden layer sizes (default 8)")
    p.add_argument("--lr", type=float, help="learning rate")
    p.add_argument("--epochs", type=int)
    p.add_argument("--regularizer", choices=["none", "l1", "l1/2"])
    p.add_argument("--reg-strength", type=float)
    p.add_argument("--init-scale", type=float)


def _add_objective(p):
    p.add_argument("--alpha", type=float, help="system granularity (default 0.5)")
    p.add_argument("--b0", type=float, help="target balance (default 1.0)")
    p.add_argument("--swarm", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--inertia", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--patience", type=int, help="stop after this many stale iterations; 0 disables")


def _add_catalog(p):
    p.add_argument("--catalog", help="channel catalog CSV (default: bundled)")
    p.add_argument("--top-k", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grannet", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file supplying default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="train the regressor on a dataset")
    p.add_argument("--dataset", required=False)
    p.add_argument("--out", help="model JSON path")
    p.add_argument("--seed", type=int)
    _add_training(p)

    p = sub.add_parser("optimize", parents=[common], help="allocate granularity for a trained model")
    p.add_argument("--dataset")
    p.add_argument("--model")
    p.add_argument("--out", help="allocation JSON path")
    p.add_argument("--seed", type=int)
    _add_objective(p)

    p = sub.add_parser("recommend", parents=[common], help="rank channels for an interval or for dataset records")
    p.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--dataset")
    p.add_argument("--model")
    p.add_argument("--allocation")
    _add_catalog(p)

    p = sub.add_parser("evaluate", parents=[common], help="coverage/specificity/balance/Q1 and MAE")
    p.add_argument("--dataset")
    p.add_argument("--model")
    p.add_argument("--allocation")
    p.add_argument("--b0", type=float)
    p.add_argument("--ratings", help="user,item,rating CSV for the CF baseline")
    p.add_argument("--cf-k", type=int, nargs="+")
    p.add_argument("--split", type=float)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("pipeline", parents=[common], help="split, train, optimize, match channels, report")
    p.add_argument("--dataset", help="dataset CSV (default: bundled synthetic data)")
    p.add_argument("--ratings")
    p.add_argument("--split", type=float, help="training fraction (default 0.7)")
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha-sweep", type=float, nargs="*")
    p.add_argument("--cf-k", type=int, nargs="+")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--table", help="write the human-readable table here")
    _add_training(p)
    _add_objective(p)
    _add_catalog(p)
    return parser


def _defaults_from_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise GrannetError(f"{path}: config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in doc.items()}


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        defaults = _defaults_from_config(args.config)
        merged = vars(args)
        for key, value in defaults.items():
            if merged.get(key) is None:
                merged[key] = value
        args = argparse.Namespace(**merged)
    return args


def pipeline_config(args) -> PipelineConfig:
    """Overlay the flags present on ``args`` onto the default configuration."""
    def g(name):
        return getattr(args, name, None)

    base = PipelineConfig()
    training = {"learning_rate": g("lr"), "epochs": g("epochs"), "regularizer": g("regularizer"),
                "reg_strength": g("reg_strength"), "init_scale": g("init_scale")}
    pso = {"swarm_size": g("swarm"), "iterations": g("iterations"), "inertia": g("inertia"),
           "cognitive": g("c1"), "social": g("c2")}
    pso = {k: v for k, v in pso.items() if v is not None}
    if g("patience") is not None:
        pso["patience"] = g("patience") or None
    kw = {
        "training": dataclasses.replace(
            base.training, **{k: v for k, v in training.items() if v is not None}),
        "pso": dataclasses.replace(base.pso, **pso),
    }
    if g("b0") is not None:
        kw["objective"] = ObjectiveConfig(g("b0"))
    mapping = {"dataset": "dataset", "catalog": "catalog", "ratings": "ratings",
               "hidden": "hidden", "alpha": "base_alpha", "split": "train_fraction",
               "seed": "seed", "top_k": "top_k", "alpha_sweep": "alpha_sweep", "cf_k": "cf_k"}
    for flag, field_name in mapping.items():
        if g(flag) is not None:
            kw[field_name] = g(flag)
    return dataclasses.replace(base, **kw)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise GrannetError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _load_model_doc(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    model = NetworkModel.from_dict(doc)
    if "scaler" not in doc:
        raise GrannetError(f"{path}: model file carries no scaler; retrain with `grannet train`")
    return model, Scaler.from_dict(doc["scaler"]), doc


def _load_allocation(path) -> GranularityAllocation:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return GranularityAllocation(doc["alphas"], doc["base_alpha"])


def _dump(doc, path=None):
    text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_train(args):
    _require(args, "dataset", "out")
    cfg = pipeline_config(args)
    ds = normalize(load_dataset(args.dataset))
    tcfg = dataclasses.replace(cfg.training, seed=derive_seeds(cfg.seed)["init"])
    model = train(ds.features, ds.targets, (ds.m, *cfg.hidden, 1), tcfg)
    save_model(model, args.out, extra={
        "scaler": ds.scaler.to_dict(),
        "feature_names": list(ds.feature_names),
        "training": dataclasses.asdict(tcfg),
    })
    print(f"trained {list(model.layer_sizes)} on {ds.n} records, MSE {model.final_mse:.6g} -> {args.out}")


def cmd_optimize(args):
    _require(args, "dataset", "model", "out")
    cfg = pipeline_config(args)
    model, scaler, doc = _load_model_doc(args.model)
    ds = normalize(load_dataset(args.dataset), scaler)
    pso = dataclasses.replace(cfg.pso, seed=derive_seeds(cfg.seed)["pso"])
    result = optimize(model, ds.features, ds.targets, cfg.base_alpha, cfg.objective, pso)
    out = result.to_dict()
    out["feature_names"] = list(ds.feature_names)
    _dump(out, args.out)
    print(f"best Q1 {result.best_q1:.6g}; alphas {np.round(result.best_allocation.alphas, 4).tolist()}")


def cmd_recommend(args):
    catalog = load_catalog(args.catalog) if args.catalog else default_catalog()
    top_k = args.top_k or 3
    if args.interval is not None:
        ranked = recommend(Interval(*args.interval), catalog, top_k)
        _dump([{"name": c.name, "degree": d} for c, d in ranked])
        return
    _require(args, "dataset", "model", "allocation")
    model, scaler, _ = _load_model_doc(args.model)
    ds = normalize(load_dataset(args.dataset), scaler)
    lo, hi = output_intervals(model, ds.features, _load_allocation(args.allocation))
    rows = []
    for a, b in zip(scaler.inverse_target(lo), scaler.inverse_target(hi)):
        iv = Interval(a, b)
        rows.append({
            "interval": [iv.lo, iv.hi],
            "rounded_interval": outward_rounded(iv),
            "channels": [{"name": c.name, "degree": d} for c, d in recommend(iv, catalog, top_k)],
        })
    _dump(rows)


def cmd_evaluate(args):
    out = {}
    if args.dataset or args.model or args.allocation:
        _require(args, "dataset", "model", "allocation")
        model, scaler, _ = _load_model_doc(args.model)
        raw = load_dataset(args.dataset)
        ds = normalize(raw, scaler)
        alloc = _load_allocation(args.allocation)
        obj = ObjectiveConfig(args.b0) if args.b0 is not None else ObjectiveConfig()
        out["scores"] = evaluate(model, ds.features, ds.targets, alloc, obj)._asdict()
        out["mae"] = {
            "granular_midpoint": granular_mae(model, ds, alloc, raw.targets)[0],
            "point": cf.mae(scaler.inverse_target(predict(model, ds.features)), raw.targets),
        }
    if args.ratings:
        seed = derive_seeds(args.seed or 0)["ratings"]
        triples = cf.load_ratings(args.ratings)
        tr, te = cf.split_ratings(triples, args.split or 0.7, seed)
        out["cf_baseline"] = {str(k): cf.evaluate_knn(tr, te, k) for k in (args.cf_k or [34])}
    if not out:
        raise GrannetError("nothing to evaluate: give --dataset/--model/--allocation and/or --ratings")
    _dump(out)


def cmd_pipeline(args):
    report = run_pipeline(pipeline_config(args))
    if args.out:
        write_report(report, args.out, args.table)
    else:
        sys.stdout.write(report.to_json())
        if args.table:
            with open(args.table, "w", encoding="utf-8") as fh:
                fh.write(report.to_table())


COMMANDS = {
    "train": cmd_train,
    "optimize": cmd_optimize,
    "recommend": cmd_recommend,
    "evaluate": cmd_evaluate,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    args = None
    try:
        args = parse_args(argv)
        COMMANDS[args.command](args)
    except PipelineError as exc:
        print(f"grannet: error in stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return 1
    except (GrannetError, OSError, ValueError, KeyError) as exc:
        print(f"grannet {getattr(args, 'command', '')}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands cover the whole workflow: simulate a trajectory, extract a
dataset, inspect the clustering, train the cooperative model, predict,
estimate the rate of spread, and compare methods.  All file outputs are
plain CSV at full double precision, so identical seeds give byte-identical
files.
"""

import argparse
import sys

from . import pipeline
from ._backend import BACKEND
from .clustering import kmeans, select_k, silhouette, write_cluster_report, write_selection_report
from .config import load_config
from .integrate import Trajectory, integrate
from .neuralnet import TrainConfig
from .pipeline import CooperativeModel, estimate_rate_series, fit_poly_baseline

import numpy as np


def _add_simulate(sub):
    p = sub.add_parser("simulate", help="integrate a model config to a trajectory CSV")
    p.add_argument("--config", required=True, help="config file or built-in name")
    p.add_argument("--out", required=True, help="output CSV (t,x1,x2)")


def _add_dataset(sub):
    p = sub.add_parser("dataset", help="generate the (infective, susceptible) dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output CSV (x2_raw,x1_raw,x2_std,x1_std)")


def _add_cluster(sub):
    p = sub.add_parser("cluster", help="silhouette-guided k-means on a dataset")
    p.add_argument("--data", required=True, help="dataset CSV from `dataset`")
    p.add_argument("--k-candidates", default="3,4,5",
                   help="comma-separated cluster counts to score")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True,
                   help="cluster report CSV (point_index,cluster,silhouette)")
    p.add_argument("--selection-out", default=None,
                   help="optional CSV (k,mean_silhouette,V); defaults to stdout")


def _add_train(sub):
    p = sub.add_parser("train", help="train the cooperative per-cluster networks")
    p.add_argument("--data", required=True)
    p.add_argument("--k", default="3", help="cluster count, or `auto`")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta", type=float, default=0.05, help="learning rate")
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--target-mse", type=float, default=1e-3)
    p.add_argument("--max-epochs", type=int, default=5000)
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--out", required=True, help="model directory")


def _add_predict(sub):
    p = sub.add_parser("predict", help="susceptible estimate for one infective value")
    p.add_argument("--model", required=True, help="model directory from `train`")
    p.add_argument("--input", required=True, type=float, help="raw infective value")


def _add_rate(sub):
    p = sub.add_parser("rate", help="actual vs estimated rate of spread")
    p.add_argument("--model", required=True)
    p.add_argument("--traj", required=True, help="trajectory CSV from `simulate`")
    p.add_argument("--config", required=True,
                   help="config supplying beta, m1, m2 for the rate product")
    p.add_argument("--out", required=True, help="output CSV (t,actual,estimated)")


def _add_compare(sub):
    p = sub.add_parser("compare", help="cooperative networks vs polynomial baselines")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--degrees", default="1,2", help="polynomial degrees to fit")
    p.add_argument("--out", required=True, help="report CSV (method,train_mse,test_mse)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="epispread",
        description="Epidemic simulation and neural rate-of-spread estimation "
                    f"(kernel backend: {BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_dataset(sub)
    _add_cluster(sub)
    _add_train(sub)
    _add_predict(sub)
    _add_rate(sub)
    _add_compare(sub)
    return parser


def cmd_simulate(args):
    cfg = load_config(args.config)
    traj = integrate(cfg.params, cfg.init, cfg.integration)
    traj.to_csv(args.out)
    note = "" if traj.truncated_at is None else f" (truncated at t={traj.truncated_at:g})"
    print(f"wrote {len(traj)} samples to {args.out}{note}")


def cmd_dataset(args):
    cfg = load_config(args.config)
    ds = pipeline.generate_dataset(cfg.params, cfg.init, cfg.integration)
    pipeline.write_dataset_csv(ds, args.out)
    print(f"wrote {len(ds)} pairs to {args.out}")


def cmd_cluster(args):
    ds = pipeline.read_dataset_csv(args.data)
    data = np.column_stack([ds.x2_std, ds.x1_std])
    candidates = [int(v) for v in args.k_candidates.split(",") if v.strip()]
    best_k, table = select_k(data, candidates, args.seed)
    cm = kmeans(data, best_k, seed=[args.seed, best_k])
    scores, mean_score = silhouette(data, cm.assignments)
    write_cluster_report(args.out, cm.assignments, scores)
    if args.selection_out:
        write_selection_report(args.selection_out, table)
    else:
        print("k,mean_silhouette,V")
        for row in table:
            print(f"{row.k},{row.mean_silhouette:.17g},{row.objective:.17g}")
    print(f"selected k={best_k} (mean silhouette {mean_score:.4f}); "
          f"wrote {args.out}")


def cmd_train(args):
    ds = pipeline.read_dataset_csv(args.data)
    train_set, _ = pipeline.split(ds, args.train_fraction, args.seed)
    k = args.k if args.k == "auto" else int(args.k)
    tconfig = TrainConfig(
        learning_rate=args.eta,
        momentum=args.momentum,
        max_epochs=args.max_epochs,
        target_mse=args.target_mse,
    )
    model = pipeline.train_cooperative(train_set, k, args.seed, tconfig)
    model.save(args.out, meta={
        "seed": args.seed,
        "train_fraction": f"{args.train_fraction:.17g}",
        "eta": f"{args.eta:.17g}",
        "momentum": f"{args.momentum:.17g}",
        "target_mse": f"{args.target_mse:.17g}",
        "max_epochs": args.max_epochs,
    })
    for j, net in enumerate(model.networks):
        print(f"cluster {j}: {net.epochs_trained} epochs, "
              f"final mse {net.final_mse:.6g}")
    print(f"saved {model.k} networks to {args.out}")


def cmd_predict(args):
    model, _ = CooperativeModel.load(args.model)
    value = model.predict_susceptible(args.input)
    print(f"{value:.17g}")


def cmd_rate(args):
    cfg = load_config(args.config)
    model, _ = CooperativeModel.load(args.model)
    traj = Trajectory.from_csv(args.traj)
    report = estimate_rate_series(cfg.params, traj, model)
    pipeline.write_rate_csv(report, args.out)
    (label, rmse), = report.rmse.items()
    print(f"{label} rate RMSE: {rmse:.17g}; wrote {args.out}")


def cmd_compare(args):
    ds = pipeline.read_dataset_csv(args.data)
    model, meta = CooperativeModel.load(args.model)
    seed = int(meta.get("seed", 0))
    train_fraction = float(meta.get("train_fraction", 0.7))
    train_set, test_set = pipeline.split(ds, train_fraction, seed)
    predictors = {model.method_label: model}
    for d in (int(v) for v in args.degrees.split(",") if v.strip()):
        baseline = fit_poly_baseline(train_set, d)
        predictors[baseline.method_label] = baseline
    report = pipeline.build_eval_report(predictors, train_set, test_set)
    pipeline.write_eval_csv(report, args.out)
    for name in report.test:
        print(f"{name}: train mse {report.train[name].mse_raw:.6g}, "
              f"test mse {report.test[name].mse_raw:.6g}")
    print(f"wrote {args.out}")


_COMMANDS = {
    "simulate": cmd_simulate,
    "dataset": cmd_dataset,
    "cluster": cmd_cluster,
    "train": cmd_train,
    "predict": cmd_predict,
    "rate": cmd_rate,
    "compare": cmd_compare,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""``orientbot`` command line: gen-data, train, eval, plan, simulate."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np


def _xy(text: str) -> tuple[float, float]:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}")
    return parts[0], parts[1]


def _pose(text: str) -> tuple[float, float, float]:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,heading but got {text!r}")
    return parts[0], parts[1], parts[2]


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_gen_data(args) -> int:
    from .data import StyleParams, generate_synthetic, save_dataset

    style = StyleParams(illumination=(args.illum_min, args.illum_max),
                        palette_shift=args.palette_shift)
    ds = generate_synthetic(args.n, seed=args.seed, style=style, workers=args.workers)
    save_dataset(ds, args.out)
    print(json.dumps(dict(samples=len(ds), histogram=ds.class_histogram().tolist(), out=str(args.out))))
    return 0


def cmd_train(args) -> int:
    from .data import load_dataset, split
    from .nnet import TrainConfig, build_paper_model, fine_tune, load_model, save_model, train

    ds = load_dataset(args.data)
    tr, va = split(ds, args.val_frac, seed=args.seed)
    cfg = TrainConfig(learning_rate=args.lr, minibatch_size=args.batch_size,
                      minibatches_per_step=args.minibatches_per_step, steps=args.steps,
                      seed=args.seed, target_accuracy=args.target_accuracy)

    def progress(step, rep):
        print(f"step {step}: loss {rep.step_loss[-1]:.4f} val_acc {rep.val_accuracy[-1]:.4f}",
              file=sys.stderr)

    if args.init_model:
        model = load_model(args.init_model)
        report = fine_tune(model, tr, cfg, va, progress)
    else:
        model = build_paper_model(args.seed)
        report = train(model, tr, cfg, va, progress)
    save_model(model, args.out_model)
    if args.report:
        _write_json(args.report, report.to_dict())
    print(json.dumps(dict(steps=report.steps_run,
                          final_val_accuracy=report.val_accuracy[-1] if report.val_accuracy else None)))
    return 0


def cmd_eval(args) -> int:
    from . import evaluate

    if args.pred_csv:
        preds, labels = evaluate.read_pred_csv(args.pred_csv)
    else:
        if not (args.model and args.data):
            raise SystemExit("eval: give --pred-csv, or both --model and --data")
        from .data import load_dataset
        from .nnet import load_model, predict_batch

        ds = load_dataset(args.data)
        preds = predict_batch(load_model(args.model), ds.images)
        labels = ds.labels
    cm = evaluate.confusion(preds, labels)
    m = evaluate.metrics(cm)
    out = Path(args.out)
    _write_json(out, m)
    csv_path = Path(args.confusion_csv) if args.confusion_csv else out.with_suffix(".confusion.csv")
    csv_path.write_text(cm.to_csv())
    print(f"accuracy {m['accuracy']:.4f}")
    print(f"mean_orientation_error {m['mean_orientation_error_deg']:.3f}")
    return 0


def cmd_plan(args) -> int:
    from .grid import OccupancyGrid, Pose2D
    from .planner import plan

    grid = OccupancyGrid.load(args.grid)
    target = Pose2D(*args.target)
    result = plan(args.robot, target, grid, args.bearings, args.literal_obstacle)
    trace = dict(robot=list(args.robot), target=list(args.target), **result.to_dict())
    _write_json(args.out, trace)
    if result.viable:
        b = result.best
        print(f"selected ({b.x:.3f}, {b.y:.3f}) radius {b.radius} bearing {b.bearing} "
              f"utility {result.breakdown.total:.6g}")
    else:
        print("no viable candidate")
    return 0


def cmd_simulate(args) -> int:
    from .sim import Scenario, run_scenario, trace_json

    sc = Scenario.load(args.scenario)
    trace = run_scenario(sc)
    Path(args.out).write_text(trace_json(trace) + "\n")
    for p in trace["plans"]:
        print(f"t={p['t']:.1f}s face {p['face_before']} -> {p['face_after']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orientbot", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="render a synthetic dataset file")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--illum-min", type=float, default=0.5)
    g.add_argument("--illum-max", type=float, default=1.5)
    g.add_argument("--palette-shift", type=float, default=0.0)
    g.add_argument("--workers", type=_positive_int, default=1)
    g.set_defaults(func=cmd_gen_data)

    t = sub.add_parser("train", help="train (or fine-tune) the orientation CNN")
    t.add_argument("--data", required=True)
    t.add_argument("--val-frac", type=float, default=0.2)
    t.add_argument("--lr", type=float, default=0.01)
    t.add_argument("--steps", type=int, default=30)
    t.add_argument("--batch-size", type=_positive_int, default=100)
    t.add_argument("--minibatches-per-step", type=_positive_int, default=100)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--target-accuracy", type=float, default=None)
    t.add_argument("--init-model", help="fine-tune starting from this model file")
    t.add_argument("--out-model", required=True)
    t.add_argument("--report")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="accuracy, confusion matrix and mean orientation error")
    e.add_argument("--model")
    e.add_argument("--data")
    e.add_argument("--pred-csv", help="CSV with label,prediction columns")
    e.add_argument("--out", required=True, help="metrics JSON path")
    e.add_argument("--confusion-csv")
    e.set_defaults(func=cmd_eval)

    p = sub.add_parser("plan", help="score candidate positions and pick the best")
    p.add_argument("--grid", required=True, help="PGM file (with .yaml sidecar) or the sidecar")
    p.add_argument("--robot", type=_xy, required=True)
    p.add_argument("--target", type=_pose, required=True)
    p.add_argument("--bearings", type=int, default=16)
    p.add_argument("--literal-obstacle", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plan)

    s = sub.add_parser("simulate", help="run a scenario file and write its trace")
    s.add_argument("--scenario", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"orientbot {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

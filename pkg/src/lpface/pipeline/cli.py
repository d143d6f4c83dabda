"""Command-line harness.

Exit codes: 0 success, 1 usage error, 2 data error, 3 training diverged.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

from ..errors import LpFaceError, TrainingDivergedError
from ..image import read_pgm, write_pgm
from ..logpolar import log_polar_transform
from .bundle import load_bundle, save_bundle
from .config import ExperimentConfig, dump_config, load_config
from .core import (
    REFERENCE_ORL_ERROR,
    REFERENCE_ORL_RECOGNITION,
    evaluate,
    sweep_hidden1,
    train_pipeline,
)
from .dataset import SplitSpec, load_dataset, split

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DIVERGED = 0, 1, 2, 3

log = logging.getLogger("lpface")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list is empty")
    return values


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}") from None
    return w, h


def _mode(text: str) -> str:
    mode = text.replace("-", "").lower()
    if mode not in ("visual", "logpolar"):
        raise argparse.ArgumentTypeError("mode must be visual or logpolar")
    return mode


def _add_config_args(p: argparse.ArgumentParser, training: bool = True) -> None:
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--layout", choices=("auto", "orl", "generic"), default="auto")
    p.add_argument("--image-size", type=_size, help="common WIDTHxHEIGHT for generic datasets")
    p.add_argument("--per-class-train", type=int)
    p.add_argument("--split-mode", choices=("first-k", "seeded-random"))
    p.add_argument("--split-seed", type=int)
    p.add_argument("--base", type=int, help="log-polar sizing base")
    p.add_argument("--r-min", type=float, help="log-polar inner radius in pixels")
    p.add_argument("--lp-size", type=int, help="fixed log-polar output side")
    if training:
        p.add_argument("--seed", type=int)
        p.add_argument("--epochs", type=int, help="maximum training epochs")
        p.add_argument("--eta0", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--goal", type=float)
        p.add_argument("--e-max", type=float)
        p.add_argument("--error-norm", choices=("sum", "mean", "mse"))
        p.add_argument("--max-u", type=int)
        p.add_argument("--hidden", type=_int_list, help="two hidden widths, e.g. 40,25")


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    hidden = getattr(args, "hidden", None)
    if hidden is not None and len(hidden) != 2:
        raise UsageError("--hidden takes exactly two widths")
    return cfg.replace(**{
        "split.per_class_train": getattr(args, "per_class_train", None),
        "split.mode": getattr(args, "split_mode", None),
        "split.seed": getattr(args, "split_seed", None),
        "logpolar.base": getattr(args, "base", None),
        "logpolar.r_min": getattr(args, "r_min", None),
        "logpolar.size": getattr(args, "lp_size", None),
        "mlp.seed": getattr(args, "seed", None),
        "mlp.max_epochs": getattr(args, "epochs", None),
        "mlp.eta0": getattr(args, "eta0", None),
        "mlp.alpha": getattr(args, "alpha", None),
        "mlp.goal": getattr(args, "goal", None),
        "mlp.e_max": getattr(args, "e_max", None),
        "mlp.error_norm": getattr(args, "error_norm", None),
        "max_u": getattr(args, "max_u", None),
        "hidden": tuple(hidden) if hidden else None,
        "threshold": getattr(args, "threshold", None),
        "curve_step": getattr(args, "curve_step", None),
    })


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# -- subcommands -------------------------------------------------------------

def cmd_transform(args) -> int:
    cfg = _config(args).logpolar
    out = log_polar_transform(read_pgm(args.input), cfg)
    write_pgm(out, args.output)
    print(f"wrote {out.width}x{out.height} log-polar image to {args.output}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _config(args)
    ds = load_dataset(args.data, args.layout, args.image_size)
    train_ds = ds if args.all else split(ds, cfg.split)[0]
    bundle = train_pipeline(train_ds, args.mode, cfg.logpolar, cfg.mlp, cfg.max_u, cfg.hidden,
                            progress_every=args.progress)
    bundle.metadata["split"] = None if args.all else dataclasses.asdict(cfg.split)
    bundle.metadata["layout"] = args.layout
    save_bundle(bundle, args.out)
    meta = bundle.metadata
    print(f"trained {args.mode} model on {len(train_ds)} images: {meta['epochs_run']} epochs, "
          f"final E={meta['final_error']:.6g} ({meta['stop_reason']}); saved {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    bundle = load_bundle(args.bundle)
    cfg = _config(args)
    size = args.image_size or tuple(bundle.image_size)
    ds = load_dataset(args.data, args.layout, size)
    stored = bundle.metadata.get("split")
    if args.all or stored is None:
        test_ds = ds
    else:
        test_ds = split(ds, SplitSpec(**stored))[1]
    metrics = evaluate(bundle, test_ds, cfg.threshold, cfg.curve_step)
    if args.csv:
        _write_csv(args.csv, ["n_test", "recognition_rate", "false_rejection_rate"],
                   [(n, f"{rr:.4f}", f"{fr:.4f}") for n, rr, fr in metrics.curve])
    if args.confusion:
        _write_csv(args.confusion, ["true\\predicted"] + bundle.class_names,
                   [[name] + list(row) for name, row in zip(bundle.class_names, metrics.confusion)])
    print(f"{bundle.mode}: {metrics.total} test images, recognition {metrics.recognition_rate:.2f}%, "
          f"false rejection {metrics.false_rejection_rate:.2f}% (threshold {metrics.threshold:g})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    ds = load_dataset(args.data, args.layout, args.image_size)
    train_ds = split(ds, cfg.split)[0]
    results = sweep_hidden1(train_ds, args.mode, cfg.logpolar, cfg.mlp, args.sizes, args.epochs_budget,
                            cfg.max_u, cfg.hidden[1])
    if args.csv:
        rows = []
        for res in results:
            rows += [(res.size, epoch, f"{err:.8g}") for epoch, err in enumerate(res.errors)]
        _write_csv(args.csv, ["hidden1", "epoch", "total_error"], rows)
    failed = False
    for res in results:
        if res.error:
            failed = True
            print(f"hidden1={res.size}: failed ({res.error})")
        else:
            print(f"hidden1={res.size}: final E={res.final_error:.6g}")
    return EXIT_DIVERGED if failed else EXIT_OK


def cmd_reproduce(args) -> int:
    """Visual vs log-polar recognition over several seeds, with reference values."""
    cfg = _config(args)
    ds = load_dataset(args.data, args.layout, args.image_size)
    train_ds, test_ds = split(ds, cfg.split)
    rows, curves = [], []
    for mode in ("visual", "logpolar"):
        for seed in args.seeds:
            hp = dataclasses.replace(cfg.mlp, seed=seed)
            bundle = train_pipeline(train_ds, mode, cfg.logpolar, hp, cfg.max_u, cfg.hidden)
            m = evaluate(bundle, test_ds, cfg.threshold, cfg.curve_step)
            rows.append((mode, seed, len(test_ds), f"{m.recognition_rate:.2f}", f"{m.error_rate:.2f}",
                         f"{m.false_rejection_rate:.2f}", REFERENCE_ORL_RECOGNITION[mode], REFERENCE_ORL_ERROR[mode],
                         bundle.metadata["epochs_run"], f"{bundle.metadata['final_error']:.6g}"))
            curves += [(mode, seed, n, f"{rr:.4f}", f"{fr:.4f}") for n, rr, fr in m.curve]
            print(f"{mode} seed {seed}: recognition {m.recognition_rate:.2f}% "
                  f"(reference {REFERENCE_ORL_RECOGNITION[mode]}%)", flush=True)
    _write_csv(args.csv, ["mode", "seed", "n_test", "recognition_rate", "error_rate", "false_rejection_rate",
                          "reference_recognition_rate", "reference_error_rate", "epochs_run", "final_error"], rows)
    if args.curves:
        _write_csv(args.curves, ["mode", "seed", "n_test", "recognition_rate", "false_rejection_rate"], curves)
    return EXIT_OK


def cmd_synth(args) -> int:
    from .. import synthetic

    if args.layout == "orl":
        synthetic.write_orl_tree(args.out, args.subjects or 40, args.images or 10, seed=args.seed)
    else:
        synthetic.write_generic_tree(args.out, args.subjects or 16, args.images or 125, seed=args.seed)
    print(f"wrote synthetic {args.layout} dataset to {args.out}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from ..selftest import run_all

    ok = True
    for name, passed, detail in run_all():
        ok &= bool(passed)
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if ok else 1


def cmd_config(args) -> int:
    sys.stdout.write(dump_config(_config(args)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lpface", description="Log-polar eigenface recognition with an MLP classifier.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", help="log-polar transform of one PGM image")
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--config", type=Path)
    p.add_argument("--base", type=int)
    p.add_argument("--r-min", type=float)
    p.add_argument("--lp-size", type=int)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("train", help="train a model bundle")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--mode", type=_mode, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--all", action="store_true", help="train on every image instead of the split")
    p.add_argument("--progress", type=int, default=0, metavar="N", help="log every N epochs")
    _add_config_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a bundle on a dataset")
    p.add_argument("--bundle", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--csv", type=Path, help="curve CSV: n_test,recognition_rate,false_rejection_rate")
    p.add_argument("--confusion", type=Path, help="confusion matrix CSV")
    p.add_argument("--threshold", type=float)
    p.add_argument("--curve-step", type=int)
    p.add_argument("--all", action="store_true", help="evaluate every image instead of the held-out split")
    p.add_argument("--config", type=Path)
    p.add_argument("--layout", choices=("auto", "orl", "generic"), default="auto")
    p.add_argument("--image-size", type=_size)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="total error traces for several hidden-layer-1 widths")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--mode", type=_mode, default="logpolar")
    p.add_argument("--sizes", type=_int_list, default=[5, 10, 20, 40])
    p.add_argument("--epochs-budget", type=int, default=2000)
    p.add_argument("--csv", type=Path)
    _add_config_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="visual vs log-polar comparison over seeds")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--seeds", type=_int_list, default=[0, 1, 2])
    p.add_argument("--csv", type=Path, required=True)
    p.add_argument("--curves", type=Path, help="per-prefix curve CSV")
    p.add_argument("--threshold", type=float)
    p.add_argument("--curve-step", type=int)
    _add_config_args(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("synth", help="write a synthetic face dataset")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--layout", choices=("orl", "generic"), default="orl")
    p.add_argument("--subjects", type=int)
    p.add_argument("--images", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("selftest", help="run the built-in property checks")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("config", help="print the effective configuration")
    _add_config_args(p)
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lpface: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrainingDivergedError as exc:
        print(f"lpface: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (LpFaceError, OSError) as exc:
        print(f"lpface: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands: synth, normalize, mask, run-semi, run-continual, snapshot,
predict. Exit codes: 0 success, 2 configuration error, 3 data format error.
"""

from __future__ import annotations

import argparse
import csv as _csv
import io
import json
import sys

from .errors import ConfigError, FormatError
from .fam import FamModel
from .harness import ExperimentConfig, report_emit, run_continual, run_semi_supervised
from .model import LpartModel
from .streams import (
    MaskSchedule,
    UNLABELED,
    load_any,
    mask_labels,
    normalize,
    save_any,
    synth_split,
)


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--model", choices=("lpart", "fam"), default="lpart")
    p.add_argument("--rho", type=float, default=0.9, help="vigilance threshold")
    p.add_argument("--alpha", type=float, default=0.001, help="choice parameter")
    p.add_argument("--beta", type=float, default=1.0, help="learning rate")
    p.add_argument("--delta", type=float, default=0.5, help="label propagation rate")
    p.add_argument("--c-uncert", type=float, default=2.0, help="propagated-mass divisor (> 1)")
    p.add_argument("--k-sens", type=float, default=1.0, help="count-uncertainty sensitivity")


def _add_run_flags(p: argparse.ArgumentParser):
    _add_model_flags(p)
    p.add_argument("--train", required=True, help="training stream file")
    p.add_argument("--test", required=True, help="test stream file")
    p.add_argument("--label-rate", type=float, default=1.0)
    p.add_argument(
        "--use-unlabeled",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="keep unlabeled samples in the training stream",
    )
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta1", type=float, default=0.5, help="entropy-uncertainty threshold")
    p.add_argument("--theta2", type=float, default=0.5, help="count-uncertainty threshold")
    p.add_argument("--out", help="report path (stdout when omitted)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpart",
        description="Streaming semi-supervised continual learning experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate Gaussian-blob feature files")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True, help="training samples per class")
    p.add_argument("--spread", type=float, required=True, help="per-dimension Gaussian sigma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--test-per-class", type=int, default=0)
    p.add_argument("--out-test", help="held-out file (requires --test-per-class)")

    p = sub.add_parser("normalize", help="min-max rescale a stream into [0, 1]")
    p.add_argument("--in", dest="path_in", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("mask", help="apply a seeded Bernoulli label mask")
    p.add_argument("--in", dest="path_in", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--label-rate", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("run-semi", help="single-epoch semi-supervised protocol")
    _add_run_flags(p)

    p = sub.add_parser("run-continual", help="multi-epoch continual protocol")
    _add_run_flags(p)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument(
        "--reshuffle-epochs",
        action="store_true",
        help="reshuffle the stream each epoch instead of replaying the same order",
    )

    p = sub.add_parser("snapshot", help="train a model on a stream and save its state")
    _add_model_flags(p)
    p.add_argument("--train", required=True)
    p.add_argument("--label-rate", type=float, default=1.0)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("predict", help="score a stream with a saved model")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", help="prediction table (stdout when omitted)")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    return parser


def _emit(data: bytes, out_path):
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)


def _cmd_synth(args) -> int:
    if args.out_test and not args.test_per_class:
        raise ConfigError("--out-test requires --test-per-class")
    if args.test_per_class and not args.out_test:
        raise ConfigError("--test-per-class requires --out-test")
    train, test = synth_split(
        args.classes, args.dim, args.per_class, args.test_per_class, args.spread, args.seed
    )
    save_any(args.out, train, args.dim, args.classes)
    if args.out_test:
        save_any(args.out_test, test, args.dim, args.classes)
    print(
        json.dumps(
            {"train_samples": len(train), "test_samples": len(test), "dim": args.dim}
        )
    )
    return 0


def _cmd_normalize(args) -> int:
    report = normalize(args.path_in, args.out)
    print(json.dumps({"dimensions": [{"min": a, "max": b} for a, b in report]}))
    return 0


def _cmd_mask(args) -> int:
    header, samples = load_any(args.path_in)
    masked = mask_labels(samples, MaskSchedule(args.label_rate, args.seed))
    save_any(args.out, masked, header.dim, header.num_classes)
    kept = sum(1 for s in masked if s.label != UNLABELED)
    print(json.dumps({"samples": len(masked), "labeled": kept}))
    return 0


def _config_from_args(args, epochs: int) -> ExperimentConfig:
    return ExperimentConfig(
        train=args.train,
        test=args.test,
        model=args.model,
        rho=args.rho,
        alpha=args.alpha,
        beta=args.beta,
        delta=args.delta,
        c_uncert=args.c_uncert,
        k_sens=args.k_sens,
        label_rate=args.label_rate,
        use_unlabeled=args.use_unlabeled,
        epochs=epochs,
        trials=args.trials,
        seed=args.seed,
        theta1=args.theta1,
        theta2=args.theta2,
        reshuffle_epochs=getattr(args, "reshuffle_epochs", False),
    )


def _cmd_run_semi(args) -> int:
    report = run_semi_supervised(_config_from_args(args, epochs=1))
    _emit(report_emit(report, args.format), args.out)
    return 0


def _cmd_run_continual(args) -> int:
    report = run_continual(_config_from_args(args, epochs=args.epochs))
    _emit(report_emit(report, args.format), args.out)
    return 0


def _cmd_snapshot(args) -> int:
    from .harness import _build_model  # same construction path as the protocols

    header, samples = load_any(args.train)
    if args.label_rate < 1.0:
        samples = mask_labels(samples, MaskSchedule(args.label_rate, args.seed))
    config = ExperimentConfig(
        train=args.train,
        test=args.train,
        model=args.model,
        rho=args.rho,
        alpha=args.alpha,
        beta=args.beta,
        delta=args.delta,
        c_uncert=args.c_uncert,
        k_sens=args.k_sens,
        label_rate=args.label_rate,
        use_unlabeled=args.model != "fam",
        epochs=args.epochs,
        seed=args.seed,
    )
    model = _build_model(config, header.dim, header.num_classes)
    for _ in range(args.epochs):
        for sample in samples:
            label = None if sample.label == UNLABELED else sample.label
            if label is None and isinstance(model, FamModel):
                continue
            model.observe(sample.values, label)
    model.save(args.out)
    print(json.dumps({"nodes": model.num_nodes, "model": args.model, "out": args.out}))
    return 0


def _load_snapshot(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == b"LPMS":
        return LpartModel.load(path)
    if magic == b"FAMS":
        return FamModel.load(path)
    raise FormatError(f"unrecognized snapshot magic {magic!r}", offset=0)


def _cmd_predict(args) -> int:
    model = _load_snapshot(args.snapshot)
    _, samples = load_any(args.test)
    rows = []
    for i, sample in enumerate(samples):
        if isinstance(model, FamModel):
            rows.append(
                {"index": i, "label": sample.label, "predicted": model.predict(sample.values),
                 "u1": None, "u2": None}
            )
        else:
            pred = model.predict(sample.values)
            rows.append(
                {"index": i, "label": sample.label, "predicted": pred.label,
                 "u1": pred.u1, "u2": pred.u2}
            )
    if args.format == "json":
        payload = (json.dumps({"predictions": rows}, indent=2) + "\n").encode()
    else:
        buf = io.StringIO()
        writer = _csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "label", "predicted", "u1", "u2"])
        for r in rows:
            writer.writerow(
                [r["index"], r["label"], r["predicted"],
                 "" if r["u1"] is None else r["u1"], "" if r["u2"] is None else r["u2"]]
            )
        payload = buf.getvalue().encode()
    _emit(payload, args.out)
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "normalize": _cmd_normalize,
    "mask": _cmd_mask,
    "run-semi": _cmd_run_semi,
    "run-continual": _cmd_run_continual,
    "snapshot": _cmd_snapshot,
    "predict": _cmd_predict,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

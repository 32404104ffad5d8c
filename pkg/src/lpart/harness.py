"""Experiment orchestration: seeded multi-trial protocols and report emission.

Two protocols are provided. The semi-supervised run trains for a single
epoch on a shuffled, label-masked stream and scores test accuracy; the
continual run replays the same masked stream for several epochs and scores
after each one, including accuracy over the subset of test samples whose
uncertainty scores clear the configured thresholds.

Trial t derives its shuffle and mask seed as base_seed + t, so any trial is
reproducible in isolation. Reports are plain dicts with a fixed key order;
identical configurations serialize to byte-identical JSON.
"""

from __future__ import annotations

import csv as _csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .art import ArtHyperParams
from .errors import ConfigError
from .fam import FamModel
from .model import LpartHyperParams, LpartModel
from .streams import MaskSchedule, UNLABELED, load_any, mask_labels, shuffle

__all__ = [
    "ExperimentConfig",
    "EpochMetrics",
    "TrialReport",
    "run_semi_supervised",
    "run_continual",
    "report_emit",
    "aggregate_mean_std",
]

_RESHUFFLE_STRIDE = 1_000_003


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs; validated at construction."""

    train: str
    test: str
    model: str = "lpart"
    rho: float = 0.9
    alpha: float = 0.001
    beta: float = 1.0
    delta: float = 0.5
    c_uncert: float = 2.0
    k_sens: float = 1.0
    label_rate: float = 1.0
    use_unlabeled: bool = True
    epochs: int = 1
    trials: int = 1
    seed: int = 0
    theta1: float = 0.5
    theta2: float = 0.5
    reshuffle_epochs: bool = False

    def __post_init__(self):
        if self.model not in ("lpart", "fam"):
            raise ConfigError(f"model must be 'lpart' or 'fam', got {self.model!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not (0.0 <= self.label_rate <= 1.0):
            raise ConfigError(f"label_rate must lie in [0, 1], got {self.label_rate}")
        if self.theta1 < 0.0 or self.theta2 < 0.0:
            raise ConfigError("uncertainty thresholds must be >= 0")
        if self.model == "fam" and self.use_unlabeled:
            raise ConfigError(
                "the supervised FAM baseline cannot consume unlabeled data; "
                "pass use_unlabeled=False"
            )

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "train": str(self.train),
            "test": str(self.test),
            "rho": self.rho,
            "alpha": self.alpha,
            "beta": self.beta,
            "delta": self.delta,
            "c_uncert": self.c_uncert,
            "k_sens": self.k_sens,
            "label_rate": self.label_rate,
            "use_unlabeled": self.use_unlabeled,
            "epochs": self.epochs,
            "trials": self.trials,
            "seed": self.seed,
            "theta1": self.theta1,
            "theta2": self.theta2,
            "reshuffle_epochs": self.reshuffle_epochs,
        }


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    accuracy: float
    filtered_accuracy: Optional[float]
    uncertain_rate: float
    node_count: int
    abstain_count: int
    filtered_count: int
    test_size: int

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "accuracy": self.accuracy,
            "filtered_accuracy": self.filtered_accuracy,
            "uncertain_rate": self.uncertain_rate,
            "node_count": self.node_count,
            "abstain_count": self.abstain_count,
            "filtered_count": self.filtered_count,
            "test_size": self.test_size,
        }


@dataclass(frozen=True)
class TrialReport:
    trial: int
    seed: int
    epochs: list[EpochMetrics] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "epochs": [e.to_dict() for e in self.epochs],
        }


def _population_std(values: list[float], mean: float) -> float:
    return math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))


def aggregate_mean_std(values: list[float]) -> tuple[float, float]:
    """Mean and population standard deviation (exactly 0.0 for constant input)."""
    if not values:
        raise ValueError("cannot aggregate an empty list")
    if min(values) == max(values):
        return values[0], 0.0
    mean = sum(values) / len(values)
    return mean, _population_std(values, mean)


def _load_pair(config: ExperimentConfig):
    train_header, train_samples = load_any(config.train)
    test_header, test_samples = load_any(config.test)
    if train_header.dim != test_header.dim:
        raise ConfigError(
            f"train dim {train_header.dim} != test dim {test_header.dim}"
        )
    num_classes = max(train_header.num_classes, test_header.num_classes)
    if not test_samples:
        raise ConfigError("test stream is empty")
    if any(s.label == UNLABELED for s in test_samples):
        raise ConfigError("test stream contains unlabeled samples; evaluation needs labels")
    return train_header.dim, num_classes, train_samples, test_samples


def _build_model(config: ExperimentConfig, dim: int, num_classes: int):
    art = ArtHyperParams(alpha=config.alpha, rho=config.rho, beta=config.beta)
    if config.model == "fam":
        return FamModel(dim, num_classes, art=art)
    params = LpartHyperParams(
        num_classes=num_classes,
        art=art,
        delta=config.delta,
        c_uncert=config.c_uncert,
        k_sens=config.k_sens,
    )
    return LpartModel(dim, params)


def _evaluate(model, test_samples, config: ExperimentConfig, epoch: int) -> EpochMetrics:
    test_size = len(test_samples)
    correct = abstain = filtered = filtered_correct = 0
    is_fam = isinstance(model, FamModel)
    for sample in test_samples:
        if is_fam:
            ok = model.predict(sample.values) == sample.label
            correct += ok
            filtered += 1
            filtered_correct += ok
            continue
        pred = model.predict(sample.values)
        ok = pred.label == sample.label
        correct += ok
        abstain += pred.is_abstain
        if pred.u1 <= config.theta1 and pred.u2 <= config.theta2:
            filtered += 1
            filtered_correct += ok
    return EpochMetrics(
        epoch=epoch,
        accuracy=correct / test_size,
        filtered_accuracy=(filtered_correct / filtered) if filtered else None,
        uncertain_rate=1.0 - filtered / test_size,
        node_count=model.num_nodes,
        abstain_count=abstain,
        filtered_count=filtered,
        test_size=test_size,
    )


def _run_trial(config: ExperimentConfig, dim, num_classes, train_samples, test_samples,
               trial: int) -> TrialReport:
    seed = config.seed + trial
    stream = mask_labels(shuffle(train_samples, seed), MaskSchedule(config.label_rate, seed))
    if not config.use_unlabeled:
        stream = [s for s in stream if s.label != UNLABELED]
    model = _build_model(config, dim, num_classes)
    metrics = []
    for epoch in range(1, config.epochs + 1):
        epoch_stream = stream
        if config.reshuffle_epochs and epoch > 1:
            epoch_stream = shuffle(stream, seed + _RESHUFFLE_STRIDE * (epoch - 1))
        for sample in epoch_stream:
            label = None if sample.label == UNLABELED else sample.label
            model.observe(sample.values, label)
        metrics.append(_evaluate(model, test_samples, config, epoch))
    return TrialReport(trial=trial, seed=seed, epochs=metrics)


def _aggregate(trials: list[TrialReport], epochs: int) -> list[dict]:
    rows = []
    for e in range(epochs):
        per = [t.epochs[e] for t in trials]
        entry = {"epoch": e + 1}
        for name, values in (
            ("accuracy", [m.accuracy for m in per]),
            ("uncertain_rate", [m.uncertain_rate for m in per]),
            ("node_count", [float(m.node_count) for m in per]),
            ("abstain_count", [float(m.abstain_count) for m in per]),
        ):
            mean, std = aggregate_mean_std(values)
            entry[f"{name}_mean"] = mean
            entry[f"{name}_std"] = std
        defined = [m.filtered_accuracy for m in per if m.filtered_accuracy is not None]
        if defined:
            mean, std = aggregate_mean_std(defined)
            entry["filtered_accuracy_mean"] = mean
            entry["filtered_accuracy_std"] = std
        else:
            entry["filtered_accuracy_mean"] = None
            entry["filtered_accuracy_std"] = None
        rows.append(entry)
    return rows


def _run(config: ExperimentConfig) -> dict:
    dim, num_classes, train_samples, test_samples = _load_pair(config)
    trials = [
        _run_trial(config, dim, num_classes, train_samples, test_samples, t)
        for t in range(config.trials)
    ]
    return {
        "config": config.to_dict(),
        "trials": [t.to_dict() for t in trials],
        "aggregate": {"per_epoch": _aggregate(trials, config.epochs)},
    }


def run_semi_supervised(config: ExperimentConfig) -> dict:
    """Single-epoch protocol: shuffle, mask, optionally drop unlabeled, train, score."""
    if config.epochs != 1:
        raise ConfigError(f"the semi-supervised protocol is single-epoch, got {config.epochs}")
    return _run(config)


def run_continual(config: ExperimentConfig) -> dict:
    """Multi-epoch protocol replaying the masked stream; scores after every epoch.

    With epochs=1 the output coincides with run_semi_supervised for the same
    configuration. Per-epoch reshuffling is opt-in via reshuffle_epochs.
    """
    return _run(config)


def report_emit(report: dict, fmt: str) -> bytes:
    """Serialize a report deterministically as JSON or CSV."""
    if fmt == "json":
        return (json.dumps(report, indent=2) + "\n").encode()
    if fmt != "csv":
        raise ConfigError(f"format must be 'json' or 'csv', got {fmt!r}")
    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    metric_names = [
        "accuracy",
        "filtered_accuracy",
        "uncertain_rate",
        "node_count",
        "abstain_count",
        "filtered_count",
        "test_size",
    ]
    writer.writerow(["kind", "trial", "seed", "epoch"] + metric_names)
    for trial in report["trials"]:
        for em in trial["epochs"]:
            writer.writerow(
                ["trial", trial["trial"], trial["seed"], em["epoch"]]
                + [em[name] if em[name] is not None else "" for name in metric_names]
            )
    for row in report["aggregate"]["per_epoch"]:
        for kind in ("mean", "std"):
            writer.writerow(
                [kind, "", "", row["epoch"]]
                + [
                    ("" if row.get(f"{name}_{kind}") is None else row.get(f"{name}_{kind}", ""))
                    for name in metric_names
                ]
            )
    return buf.getvalue().encode()

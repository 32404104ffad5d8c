"""Feature-stream files and the dataset plumbing around them.

The on-disk format is little-endian binary: magic ``LPFT``, u32 version,
u64 sample count, u32 feature dimension, u32 class count, then one record
per sample of i32 label (-1 marks an unlabeled sample) followed by the
float32 feature values. A CSV twin (header ``label,f0,...,f{d-1}``) exists
for interoperability; extension ``.csv`` selects it in the conveniences.

Readers stream record by record with constant memory; every format error
reports the byte offset of the offending field. Feature values are expected
in [0, 1]; ``normalize`` is the tool that maps raw-valued files into that
range and therefore reads with the range check relaxed.
"""

from __future__ import annotations

import csv as _csv
import struct
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import FormatError

__all__ = [
    "UNLABELED",
    "FeatureSample",
    "StreamHeader",
    "MaskSchedule",
    "read_header",
    "read_stream",
    "read_all",
    "write_stream",
    "read_csv",
    "write_csv",
    "load_any",
    "save_any",
    "normalize",
    "mask_labels",
    "shuffle",
    "synth_clusters",
    "synth_split",
]

UNLABELED = -1

_MAGIC = b"LPFT"
_VERSION = 1
_HEADER = struct.Struct("<4sIQII")


@dataclass(frozen=True)
class FeatureSample:
    """One stream element: a class index (UNLABELED when absent) and float32 features."""

    label: int
    values: np.ndarray


@dataclass(frozen=True)
class StreamHeader:
    count: int
    dim: int
    num_classes: int
    version: int = _VERSION


@dataclass(frozen=True)
class MaskSchedule:
    """Seeded Bernoulli label keeping: each labeled sample keeps its label with
    probability label_rate; everything else becomes unlabeled."""

    label_rate: float
    seed: int

    def __post_init__(self):
        if not (0.0 <= self.label_rate <= 1.0):
            raise ValueError(f"label_rate must lie in [0, 1], got {self.label_rate}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")


# ---- binary format ----


def _read_exact(fh, size: int, offset: int, what: str) -> bytes:
    data = fh.read(size)
    if len(data) != size:
        raise FormatError(f"truncated while reading {what}", offset=offset + len(data))
    return data


def _parse_header(fh) -> StreamHeader:
    raw = _read_exact(fh, _HEADER.size, 0, "header")
    magic, version, count, dim, num_classes = _HEADER.unpack(raw)
    if magic != _MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {_MAGIC!r}", offset=0)
    if version != _VERSION:
        raise FormatError(f"unsupported format version {version}", offset=4)
    if dim < 1:
        raise FormatError(f"feature dimension must be >= 1, got {dim}", offset=16)
    if num_classes < 1:
        raise FormatError(f"class count must be >= 1, got {num_classes}", offset=20)
    return StreamHeader(count=count, dim=dim, num_classes=num_classes, version=version)


def read_header(path) -> StreamHeader:
    with open(path, "rb") as fh:
        return _parse_header(fh)


def read_stream(path, strict: bool = True) -> Iterator[FeatureSample]:
    """Yield samples one by one (constant memory per sample).

    With strict=True (the default) feature values must lie in [0, 1];
    strict=False only requires them finite, which is what ``normalize``
    needs to ingest raw-valued files.
    """
    with open(path, "rb") as fh:
        header = _parse_header(fh)
        record = struct.Struct(f"<i{header.dim}f")
        offset = _HEADER.size
        for i in range(header.count):
            raw = _read_exact(fh, record.size, offset, f"record {i}")
            fields = record.unpack(raw)
            label = fields[0]
            if label != UNLABELED and not 0 <= label < header.num_classes:
                raise FormatError(
                    f"record {i} label {label} outside {{-1}} u [0, {header.num_classes})",
                    offset=offset,
                )
            values = np.array(fields[1:], dtype=np.float32)
            if not np.all(np.isfinite(values)):
                raise FormatError(f"record {i} contains a non-finite feature", offset=offset + 4)
            if strict and (values.min() < 0.0 or values.max() > 1.0):
                raise FormatError(
                    f"record {i} contains a feature outside [0, 1]", offset=offset + 4
                )
            yield FeatureSample(label=label, values=values)
            offset += record.size
        if fh.read(1):
            raise FormatError("trailing bytes after the last record", offset=offset)


def read_all(path, strict: bool = True) -> tuple[StreamHeader, list[FeatureSample]]:
    header = read_header(path)
    return header, list(read_stream(path, strict=strict))


def write_stream(path, samples: Iterable[FeatureSample], dim: int, num_classes: int,
                 check_range: bool = True) -> int:
    """Write samples to a binary stream file; returns the number written.

    The sample count is patched into the header after the pass, so any
    iterable works without being materialized.
    """
    if dim < 1 or num_classes < 1:
        raise ValueError("dim and num_classes must be positive")
    count = 0
    record = struct.Struct(f"<i{dim}f")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, 0, dim, num_classes))
        for sample in samples:
            values = np.asarray(sample.values, dtype=np.float32)
            if values.shape != (dim,):
                raise ValueError(
                    f"sample {count} has shape {values.shape}, expected ({dim},)"
                )
            label = int(sample.label)
            if label != UNLABELED and not 0 <= label < num_classes:
                raise ValueError(f"sample {count} label {label} out of range")
            if not np.all(np.isfinite(values)):
                raise ValueError(f"sample {count} contains a non-finite feature")
            if check_range and (values.min() < 0.0 or values.max() > 1.0):
                raise ValueError(f"sample {count} contains a feature outside [0, 1]")
            fh.write(record.pack(label, *map(float, values)))
            count += 1
        fh.seek(8)
        fh.write(struct.pack("<Q", count))
    return count


# ---- CSV twin ----


def write_csv(path, samples: Iterable[FeatureSample]) -> int:
    count = 0
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        header_written = False
        for sample in samples:
            if not header_written:
                writer.writerow(["label"] + [f"f{i}" for i in range(len(sample.values))])
                header_written = True
            writer.writerow([int(sample.label)] + [repr(float(v)) for v in sample.values])
            count += 1
    return count


def read_csv(path) -> tuple[int, list[FeatureSample]]:
    """Parse the CSV twin; returns (dim, samples). Labels may be -1."""
    samples = []
    with open(path, newline="") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "label":
            raise FormatError(f"CSV header must start with 'label', got {header}")
        dim = len(header) - 1
        if dim < 1:
            raise FormatError("CSV header declares no feature columns")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dim + 1:
                raise FormatError(f"CSV line {row_no} has {len(row)} fields, expected {dim + 1}")
            try:
                label = int(row[0])
                values = np.array([float(v) for v in row[1:]], dtype=np.float32)
            except ValueError as exc:
                raise FormatError(f"CSV line {row_no}: {exc}") from exc
            samples.append(FeatureSample(label=label, values=values))
    return dim, samples


def load_any(path, strict: bool = True) -> tuple[StreamHeader, list[FeatureSample]]:
    """Load a stream from a binary or ``.csv`` path; CSV infers the class count."""
    if str(path).endswith(".csv"):
        dim, samples = read_csv(path)
        labels = [s.label for s in samples if s.label != UNLABELED]
        num_classes = max(labels) + 1 if labels else 1
        for i, s in enumerate(samples):
            if s.label != UNLABELED and s.label < 0:
                raise FormatError(f"CSV sample {i} has invalid label {s.label}")
        return StreamHeader(count=len(samples), dim=dim, num_classes=num_classes), samples
    return read_all(path, strict=strict)


def save_any(path, samples: Sequence[FeatureSample], dim: int, num_classes: int,
             check_range: bool = True) -> int:
    if str(path).endswith(".csv"):
        return write_csv(path, samples)
    return write_stream(path, samples, dim, num_classes, check_range=check_range)


# ---- offline normalization ----


def normalize(path_in, path_out) -> list[tuple[float, float]]:
    """Two-pass min-max rescale of every dimension into [0, 1].

    Returns the per-dimension (min, max) observed on the input. Constant
    dimensions map to 0.5. Idempotent on its own output.
    """
    header = read_header(path_in)
    lo = np.full(header.dim, np.inf)
    hi = np.full(header.dim, -np.inf)
    for sample in read_stream(path_in, strict=False):
        np.minimum(lo, sample.values, out=lo)
        np.maximum(hi, sample.values, out=hi)
    if header.count == 0:
        lo = np.zeros(header.dim)
        hi = np.ones(header.dim)
    span = hi - lo
    constant = span <= 0.0

    def rescaled():
        for sample in read_stream(path_in, strict=False):
            x = sample.values.astype(np.float64)
            out = np.where(constant, 0.5, (x - lo) / np.where(constant, 1.0, span))
            yield FeatureSample(label=sample.label, values=out.astype(np.float32))

    write_stream(path_out, rescaled(), header.dim, header.num_classes)
    return [(float(a), float(b)) for a, b in zip(lo, hi)]


# ---- stream transforms ----


def mask_labels(samples: Sequence[FeatureSample], schedule: MaskSchedule) -> list[FeatureSample]:
    """Weaken labels per the schedule; features, order, and length are untouched.

    One uniform draw is consumed per originally-labeled sample, in stream
    order, so the mask is a pure function of (stream labels, rate, seed).
    """
    rng = np.random.Generator(np.random.PCG64(schedule.seed))
    out = []
    for sample in samples:
        if sample.label != UNLABELED and rng.random() >= schedule.label_rate:
            out.append(FeatureSample(label=UNLABELED, values=sample.values))
        else:
            out.append(sample)
    return out


def shuffle(samples: Sequence[FeatureSample], seed: int) -> list[FeatureSample]:
    """Seeded Fisher-Yates permutation (swaps from the back, one draw per step)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    out = list(samples)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        out[i], out[j] = out[j], out[i]
    return out


# ---- synthetic data ----


def synth_split(num_classes: int, dim: int, train_per_class: int, test_per_class: int,
                spread: float, seed: int) -> tuple[list[FeatureSample], list[FeatureSample]]:
    """Isotropic Gaussian blobs around shared per-class centers.

    Centers are drawn once in [0.2, 0.8]^dim from the seed; train samples are
    drawn first, then test samples, so both splits share geometry without
    overlapping. Values are clipped to [0, 1] and every sample is labeled.
    """
    if num_classes < 1 or dim < 1 or train_per_class < 0 or test_per_class < 0:
        raise ValueError("num_classes, dim must be positive; per-class counts non-negative")
    if not (spread > 0.0):
        raise ValueError(f"spread must be positive, got {spread}")
    rng = np.random.Generator(np.random.PCG64(seed))
    centers = rng.uniform(0.2, 0.8, size=(num_classes, dim))

    def draw(per_class: int) -> list[FeatureSample]:
        out = []
        for c in range(num_classes):
            points = centers[c] + spread * rng.standard_normal((per_class, dim))
            np.clip(points, 0.0, 1.0, out=points)
            out.extend(
                FeatureSample(label=c, values=row.astype(np.float32)) for row in points
            )
        return out

    return draw(train_per_class), draw(test_per_class)


def synth_clusters(num_classes: int, dim: int, samples_per_class: int, spread: float,
                   seed: int) -> list[FeatureSample]:
    """Fully-labeled Gaussian blob stream (single split)."""
    train, _ = synth_split(num_classes, dim, samples_per_class, 0, spread, seed)
    return train

"""Simplified Fuzzy ARTMAP baseline: supervised category learning with match tracking.

Every node commits to a class at creation. When the best activated node
disagrees with the supervised label, the working vigilance is raised just
above that node's match score and the search repeats, until either an
agreeing node learns the sample or a fresh node is created. Unlabeled
samples are rejected; this baseline is the fully-supervised comparison
line for the propagating learner.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .art import ArtHyperParams, complement_code
from .errors import FormatError
from .model import _INITIAL_CAPACITY, _SnapshotReader

__all__ = ["FamNode", "FamModel"]

_MAGIC = b"FAMS"
_VERSION = 1


@dataclass(frozen=True)
class FamNode:
    """One committed category: weight box plus its immutable class."""

    weight: np.ndarray
    class_label: int


class FamModel:
    """Match-tracking Fuzzy ARTMAP with a per-node committed class label."""

    def __init__(self, dim: int, num_classes: int, art: ArtHyperParams = ArtHyperParams(),
                 match_eps: float = 1e-6):
        if not (isinstance(dim, int) and dim >= 1):
            raise ValueError(f"dim must be a positive integer, got {dim}")
        if not (isinstance(num_classes, int) and num_classes >= 1):
            raise ValueError(f"num_classes must be a positive integer, got {num_classes}")
        if not (match_eps > 0.0):
            raise ValueError(f"match_eps must be positive, got {match_eps}")
        self.art = art
        self.num_classes = num_classes
        self.match_eps = match_eps
        self._dim = dim
        self._count = 0
        cap = _INITIAL_CAPACITY
        self._weights = np.empty((cap, 2 * dim), dtype=np.float64)
        self._norms = np.empty(cap, dtype=np.float64)
        self._labels = np.zeros(cap, dtype=np.int64)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def num_nodes(self) -> int:
        return self._count

    def __len__(self) -> int:
        return self._count

    def node(self, index: int) -> FamNode:
        if not 0 <= index < self._count:
            raise IndexError(f"node index {index} out of range [0, {self._count})")
        return FamNode(weight=self._weights[index].copy(), class_label=int(self._labels[index]))

    def observe(self, x, y) -> None:
        """Learn one labeled sample; the working vigilance starts at the base rho."""
        if y is None:
            raise ValueError("the supervised baseline requires a label for every sample")
        y = int(y)
        if not 0 <= y < self.num_classes:
            raise ValueError(f"label {y} out of range [0, {self.num_classes})")
        coded = self._coded(x)
        if self._count == 0:
            self._append_node(coded, y)
            return
        t_scores, v_scores = kernels.scan(
            self._weights, self._norms, self._count, coded, self.art.alpha, float(coded.sum())
        )
        working_rho = self.art.rho
        while working_rho <= 1.0:
            eligible = np.flatnonzero(v_scores >= working_rho)
            if eligible.size == 0:
                break
            winner = int(eligible[np.argmax(t_scores[eligible])])
            if self._labels[winner] == y:
                self._norms[winner] = kernels.min_learn(
                    self._weights, winner, coded, self.art.beta
                )
                return
            working_rho = float(v_scores[winner]) + self.match_eps
        self._append_node(coded, y)

    def predict(self, x) -> int:
        """Class of the best activated node (highest-T fallback when none activates)."""
        if self._count == 0:
            raise RuntimeError("cannot predict with an empty model")
        coded = self._coded(x)
        t_scores, v_scores = kernels.scan(
            self._weights, self._norms, self._count, coded, self.art.alpha, float(coded.sum())
        )
        activated = np.flatnonzero(v_scores >= self.art.rho)
        if activated.size:
            winner = int(activated[np.argmax(t_scores[activated])])
        else:
            winner = int(np.argmax(t_scores))
        return int(self._labels[winner])

    def _coded(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] != self._dim:
            raise ValueError(f"expected a vector of dimension {self._dim}, got shape {arr.shape}")
        return complement_code(arr)

    def _append_node(self, coded: np.ndarray, y: int) -> None:
        if self._count == self._weights.shape[0]:
            self._weights = np.concatenate([self._weights, np.empty_like(self._weights)])
            self._norms = np.concatenate([self._norms, np.empty_like(self._norms)])
            self._labels = np.concatenate([self._labels, np.zeros_like(self._labels)])
        j = self._count
        self._weights[j] = coded
        self._norms[j] = coded.sum()
        self._labels[j] = y
        self._count = j + 1

    # ---- persistence (same container idiom as the propagating learner) ----

    def snapshot(self) -> bytes:
        head = struct.pack(
            "<4sI4dII",
            _MAGIC,
            _VERSION,
            self.art.alpha,
            self.art.rho,
            self.art.beta,
            self.match_eps,
            self.num_classes,
            self._dim,
        )
        n = self._count
        payload = b"".join(
            [
                head,
                struct.pack("<Q", n),
                np.ascontiguousarray(self._weights[:n]).tobytes(),
                np.ascontiguousarray(self._labels[:n]).tobytes(),
            ]
        )
        return payload + struct.pack("<I", zlib.crc32(payload))

    @classmethod
    def restore(cls, data: bytes) -> "FamModel":
        reader = _SnapshotReader(data, _MAGIC)
        alpha, rho, beta, match_eps = reader.unpack("<4d")
        num_classes, dim = reader.unpack("<II")
        (count,) = reader.unpack("<Q")
        try:
            model = cls(
                int(dim),
                int(num_classes),
                art=ArtHyperParams(alpha=alpha, rho=rho, beta=beta),
                match_eps=match_eps,
            )
        except ValueError as exc:
            raise FormatError(f"snapshot carries invalid hyperparameters: {exc}") from exc
        weights = reader.array(np.float64, (count, 2 * dim))
        labels = reader.array(np.int64, (count,))
        reader.finish()
        if count and (labels.min() < 0 or labels.max() >= num_classes):
            raise FormatError("snapshot carries a node label outside the class range")
        cap = max(_INITIAL_CAPACITY, int(count))
        model._weights = np.zeros((cap, 2 * dim), dtype=np.float64)
        model._norms = np.zeros(cap, dtype=np.float64)
        model._labels = np.zeros(cap, dtype=np.int64)
        model._weights[:count] = weights
        model._norms[:count] = weights.sum(axis=1)
        model._labels[:count] = labels
        model._count = int(count)
        return model

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.snapshot())

    @classmethod
    def load(cls, path) -> "FamModel":
        with open(path, "rb") as fh:
            return cls.restore(fh.read())

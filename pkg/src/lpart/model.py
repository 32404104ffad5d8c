"""The label-propagating ART learner.

A model holds an ordered set of category nodes. Each node pairs a Fuzzy ART
weight vector with a label density function ``q`` (non-negative mass per
class) and a flag recording whether any labeled sample ever activated it.

observe() runs one online step: complement-code the input, scan every node
for choice/match scores, add direct label mass to all activated nodes, run
co-activation label propagation when two or more nodes activate, learn the
winner's weights, or create a new node when nothing activates.

predict() is read-only: it scores the winner's normalized label density and
returns the argmax label together with two uncertainty scores --
u1 = entropy of the label distribution, u2 = 1 - tanh(k * total mass).
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .art import ArtHyperParams, complement_code
from .errors import FormatError

__all__ = [
    "ABSTAIN",
    "LpartHyperParams",
    "LpartNode",
    "ObserveResult",
    "Prediction",
    "LpartModel",
    "label_distribution",
    "uncertainty_entropy",
    "uncertainty_count",
]

ABSTAIN = -1

_MAGIC = b"LPMS"
_VERSION = 1
_INITIAL_CAPACITY = 64


@dataclass(frozen=True)
class LpartHyperParams:
    """ART parameters plus propagation rate delta, mass divisor c_uncert (> 1),
    count-uncertainty sensitivity k_sens (> 0), and the fixed class count."""

    num_classes: int
    art: ArtHyperParams = ArtHyperParams()
    delta: float = 0.5
    c_uncert: float = 2.0
    k_sens: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.num_classes, int) and self.num_classes >= 1):
            raise ValueError(f"num_classes must be a positive integer, got {self.num_classes}")
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if not (self.c_uncert > 1.0 and np.isfinite(self.c_uncert)):
            raise ValueError(f"c_uncert must be a finite real > 1, got {self.c_uncert}")
        if not (self.k_sens > 0.0 and np.isfinite(self.k_sens)):
            raise ValueError(f"k_sens must be a finite real > 0, got {self.k_sens}")


@dataclass(frozen=True)
class LpartNode:
    """Snapshot view of one category node (arrays are copies)."""

    weight: np.ndarray
    density: np.ndarray
    has_direct_label: bool
    created_at: int


@dataclass(frozen=True)
class ObserveResult:
    """Outcome of one observe step: the learned-or-created node index, the
    activated-set size (0 means a node was created), and whether label
    propagation modified any node."""

    node: int
    activated: int
    propagated: bool

    @property
    def created(self) -> bool:
        return self.activated == 0


@dataclass(frozen=True)
class Prediction:
    label: int
    u1: float
    u2: float
    winner: int

    @property
    def is_abstain(self) -> bool:
        return self.label == ABSTAIN


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0.0]
    return float(-(nz * np.log(nz)).sum() + 0.0)  # + 0.0 avoids -0.0 for one-hot input


def uncertainty_entropy(p) -> float:
    """Entropy -sum p ln p of a probability vector (0 ln 0 taken as 0)."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"probability vector must be non-empty 1-D, got shape {arr.shape}")
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("probability vector must be non-negative and finite")
    if abs(float(arr.sum()) - 1.0) > 1e-9:
        raise ValueError(f"probability vector must sum to 1, got {arr.sum()}")
    return _entropy(arr)


def uncertainty_count(density_sum: float, k: float) -> float:
    """Count-based uncertainty 1 - tanh(k * density_sum), decreasing in the mass."""
    if not (density_sum >= 0.0):
        raise ValueError(f"density sum must be non-negative, got {density_sum}")
    if not (k > 0.0):
        raise ValueError(f"sensitivity k must be positive, got {k}")
    return 1.0 - float(np.tanh(k * density_sum))


def label_distribution(node: LpartNode) -> Optional[np.ndarray]:
    """Normalized label density of a node, or None when the node holds no mass."""
    total = float(node.density.sum())
    if total <= 0.0:
        return None
    return node.density / total


class LpartModel:
    """Streaming learner over feature vectors in [0, 1]^dim.

    observe() mutates and must be serialized by the caller; predict() is
    read-only. Node storage is a set of flat, preallocated arrays so the
    per-sample scan runs as a single kernel call over contiguous memory.
    """

    def __init__(self, dim: int, params: LpartHyperParams):
        if not (isinstance(dim, int) and dim >= 1):
            raise ValueError(f"dim must be a positive integer, got {dim}")
        self.params = params
        self._dim = dim
        self._count = 0
        self._seen = 0
        cap = _INITIAL_CAPACITY
        self._weights = np.empty((cap, 2 * dim), dtype=np.float64)
        self._norms = np.empty(cap, dtype=np.float64)
        self._density = np.zeros((cap, params.num_classes), dtype=np.float64)
        self._direct = np.zeros(cap, dtype=bool)
        self._created = np.zeros(cap, dtype=np.int64)

    # ---- introspection ----

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def num_nodes(self) -> int:
        return self._count

    @property
    def observed_count(self) -> int:
        return self._seen

    def __len__(self) -> int:
        return self._count

    def node(self, index: int) -> LpartNode:
        if not 0 <= index < self._count:
            raise IndexError(f"node index {index} out of range [0, {self._count})")
        return LpartNode(
            weight=self._weights[index].copy(),
            density=self._density[index].copy(),
            has_direct_label=bool(self._direct[index]),
            created_at=int(self._created[index]),
        )

    def nodes(self) -> list[LpartNode]:
        return [self.node(j) for j in range(self._count)]

    # ---- learning ----

    def observe(self, x, y: Optional[int] = None) -> ObserveResult:
        """One online step; see the module docstring for the exact order."""
        coded = self._coded(x)
        if y is not None:
            y = self._checked_label(y)

        n = self._count
        ordinal = self._seen
        propagated = False
        if n:
            t_scores, v_scores = kernels.scan(
                self._weights, self._norms, n, coded, self.params.art.alpha, float(coded.sum())
            )
            activated = np.flatnonzero(v_scores >= self.params.art.rho)
        else:
            activated = np.empty(0, dtype=np.intp)

        if activated.size:
            if y is not None:
                self._density[activated, y] += 1.0
                self._direct[activated] = True
            if activated.size > 1:
                propagated = self._propagate(activated)
            winner = int(activated[np.argmax(t_scores[activated])])
            self._norms[winner] = kernels.min_learn(
                self._weights, winner, coded, self.params.art.beta
            )
            self._seen = ordinal + 1
            return ObserveResult(node=winner, activated=int(activated.size), propagated=propagated)

        created = self._append_node(coded, y, ordinal)
        self._seen = ordinal + 1
        return ObserveResult(node=created, activated=0, propagated=False)

    def propagate_labels(self, indices: Sequence[int]) -> None:
        """Run co-activation propagation over an explicit activated set (size >= 2)."""
        idx = np.asarray(indices, dtype=np.intp)
        if idx.size < 2:
            raise ValueError(f"propagation requires at least 2 co-activated nodes, got {idx.size}")
        if np.unique(idx).size != idx.size:
            raise ValueError("activated set contains duplicate indices")
        if idx.size and (idx.min() < 0 or idx.max() >= self._count):
            raise ValueError(f"activated index out of range [0, {self._count})")
        self._propagate(idx)

    def _propagate(self, activated: np.ndarray) -> bool:
        # Label-absent nodes receive delta * (normalized co-activated mass)
        # + (1 - delta) * (normalized own mass), shrunk by 1/C. All reads use
        # pre-update densities (simultaneous semantics). A node with no
        # co-activated mass is skipped; a node with no own mass drops the own
        # term and ends up with total mass delta/C instead of 1/C.
        targets = activated[~self._direct[activated]]
        if targets.size == 0:
            return False
        block = self._density[activated].copy()  # pre-update masses, (|A|, C)
        position = {int(j): i for i, j in enumerate(activated)}
        delta = self.params.delta
        updates = {}
        for k in targets:
            i = position[int(k)]
            # direct sum over the co-activated set minus k; computing it as
            # total - own would cancel away tiny neighbor masses
            neighbor = block[:i].sum(axis=0) + block[i + 1:].sum(axis=0)
            neighbor_sum = float(neighbor.sum())
            if neighbor_sum <= 0.0:
                continue
            mixed = (delta / neighbor_sum) * neighbor
            own_sum = float(block[i].sum())
            if own_sum > 0.0:
                mixed += ((1.0 - delta) / own_sum) * block[i]
            updates[int(k)] = mixed / self.params.c_uncert
        for k, q in updates.items():
            self._density[k] = q
        return bool(updates)

    def _append_node(self, coded: np.ndarray, y: Optional[int], ordinal: int) -> int:
        if self._count == self._weights.shape[0]:
            self._grow()
        j = self._count
        self._weights[j] = coded
        self._norms[j] = coded.sum()
        self._density[j] = 0.0
        if y is not None:
            self._density[j, y] = 1.0
        self._direct[j] = y is not None
        self._created[j] = ordinal
        self._count = j + 1
        return j

    def _grow(self):
        self._weights = np.concatenate([self._weights, np.empty_like(self._weights)])
        self._norms = np.concatenate([self._norms, np.empty_like(self._norms)])
        self._density = np.concatenate([self._density, np.zeros_like(self._density)])
        self._direct = np.concatenate([self._direct, np.zeros_like(self._direct)])
        self._created = np.concatenate([self._created, np.zeros_like(self._created)])

    # ---- inference ----

    def predict(self, x) -> Prediction:
        """Winner's argmax label with uncertainty scores; never mutates the model.

        The winner is the highest-T activated node, falling back to the
        highest-T node overall when nothing clears vigilance. A winner with
        zero label mass yields ABSTAIN with u1 = ln(num_classes) and u2 = 1.
        """
        if self._count == 0:
            raise RuntimeError("cannot predict with an empty model")
        coded = self._coded(x)
        t_scores, v_scores = kernels.scan(
            self._weights, self._norms, self._count, coded, self.params.art.alpha, float(coded.sum())
        )
        activated = np.flatnonzero(v_scores >= self.params.art.rho)
        if activated.size:
            winner = int(activated[np.argmax(t_scores[activated])])
        else:
            winner = int(np.argmax(t_scores))
        q = self._density[winner]
        total = float(q.sum())
        if total <= 0.0:
            return Prediction(
                label=ABSTAIN, u1=float(np.log(self.params.num_classes)), u2=1.0, winner=winner
            )
        p = q / total
        return Prediction(
            label=int(np.argmax(p)),
            u1=_entropy(p),
            u2=uncertainty_count(total, self.params.k_sens),
            winner=winner,
        )

    # ---- validation helpers ----

    def _coded(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] != self._dim:
            raise ValueError(f"expected a vector of dimension {self._dim}, got shape {arr.shape}")
        return complement_code(arr)

    def _checked_label(self, y) -> int:
        y = int(y)
        if not 0 <= y < self.params.num_classes:
            raise ValueError(f"label {y} out of range [0, {self.params.num_classes})")
        return y

    # ---- persistence ----

    def snapshot(self) -> bytes:
        """Versioned binary state; restore() reproduces bit-identical behavior."""
        p = self.params
        head = struct.pack(
            "<4sI6dII",
            _MAGIC,
            _VERSION,
            p.art.alpha,
            p.art.rho,
            p.art.beta,
            p.delta,
            p.c_uncert,
            p.k_sens,
            p.num_classes,
            self._dim,
        )
        body = [head, struct.pack("<QQ", self._seen, self._count)]
        n = self._count
        body.append(np.ascontiguousarray(self._weights[:n]).tobytes())
        body.append(np.ascontiguousarray(self._density[:n]).tobytes())
        body.append(self._direct[:n].astype(np.uint8).tobytes())
        body.append(np.ascontiguousarray(self._created[:n]).tobytes())
        payload = b"".join(body)
        return payload + struct.pack("<I", zlib.crc32(payload))

    @classmethod
    def restore(cls, data: bytes) -> "LpartModel":
        reader = _SnapshotReader(data, _MAGIC)
        alpha, rho, beta, delta, c_uncert, k_sens = reader.unpack("<6d")
        num_classes, dim = reader.unpack("<II")
        seen, count = reader.unpack("<QQ")
        try:
            params = LpartHyperParams(
                num_classes=int(num_classes),
                art=ArtHyperParams(alpha=alpha, rho=rho, beta=beta),
                delta=delta,
                c_uncert=c_uncert,
                k_sens=k_sens,
            )
            model = cls(int(dim), params)
        except ValueError as exc:
            raise FormatError(f"snapshot carries invalid hyperparameters: {exc}") from exc
        weights = reader.array(np.float64, (count, 2 * dim))
        density = reader.array(np.float64, (count, num_classes))
        direct = reader.array(np.uint8, (count,))
        created = reader.array(np.int64, (count,))
        reader.finish()
        model._seen = int(seen)
        model._count = int(count)
        cap = max(_INITIAL_CAPACITY, int(count))
        model._weights = np.zeros((cap, 2 * dim), dtype=np.float64)
        model._norms = np.zeros(cap, dtype=np.float64)
        model._density = np.zeros((cap, num_classes), dtype=np.float64)
        model._direct = np.zeros(cap, dtype=bool)
        model._created = np.zeros(cap, dtype=np.int64)
        model._weights[:count] = weights
        model._norms[:count] = weights.sum(axis=1)
        model._density[:count] = density
        model._direct[:count] = direct.astype(bool)
        model._created[:count] = created
        return model

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.snapshot())

    @classmethod
    def load(cls, path) -> "LpartModel":
        with open(path, "rb") as fh:
            return cls.restore(fh.read())


class _SnapshotReader:
    """Length-checked cursor over snapshot bytes with a trailing CRC32."""

    def __init__(self, data: bytes, magic: bytes):
        if len(data) < 12:
            raise FormatError("snapshot truncated before header", offset=len(data))
        stored_crc = struct.unpack_from("<I", data, len(data) - 4)[0]
        payload = data[:-4]
        if zlib.crc32(payload) != stored_crc:
            raise FormatError("snapshot checksum mismatch (corrupt or truncated)")
        self._data = payload
        self._pos = 0
        got_magic, version = self.unpack("<4sI")
        if got_magic != magic:
            raise FormatError(f"bad snapshot magic {got_magic!r}, expected {magic!r}", offset=0)
        if version != _VERSION:
            raise FormatError(f"unsupported snapshot version {version}", offset=4)

    def unpack(self, fmt: str):
        size = struct.calcsize(fmt)
        if self._pos + size > len(self._data):
            raise FormatError("snapshot truncated", offset=self._pos)
        values = struct.unpack_from(fmt, self._data, self._pos)
        self._pos += size
        return values

    def array(self, dtype, shape) -> np.ndarray:
        want = int(np.prod(shape)) * np.dtype(dtype).itemsize
        if self._pos + want > len(self._data):
            raise FormatError("snapshot truncated in node data", offset=self._pos)
        arr = np.frombuffer(self._data, dtype=dtype, count=int(np.prod(shape)), offset=self._pos)
        self._pos += want
        return arr.reshape(shape).copy()

    def finish(self):
        if self._pos != len(self._data):
            raise FormatError("trailing bytes after snapshot payload", offset=self._pos)

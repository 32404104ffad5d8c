"""Fuzzy ART primitives: complement coding, choice/match, learning, node creation.

All functions are pure and operate on 1-D float64 arrays. The element-wise
minimum plays the role of the fuzzy AND, and ``|.|`` below is the L1 norm.

    choice   T = |I ^ w| / (alpha + |w|)
    match    V = |I ^ w| / |I|
    learn    w' = beta * (I ^ w) + (1 - beta) * w
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ArtHyperParams",
    "complement_code",
    "choice",
    "match",
    "update_weight",
    "activate",
    "select_winner",
    "create_node",
]


@dataclass(frozen=True)
class ArtHyperParams:
    """Choice parameter alpha (> 0), vigilance rho ([0, 1]), learning rate beta ([0, 1])."""

    alpha: float = 0.001
    rho: float = 0.9
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0.0 and np.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a positive finite real, got {self.alpha}")
        if not (0.0 <= self.rho <= 1.0):
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    return arr


def complement_code(values) -> np.ndarray:
    """Map a [0, 1]-valued feature vector r to its complement coding [r, 1 - r].

    The output has twice the input dimension and L1 norm exactly equal to the
    input dimension (each pair sums to exactly 1.0 in float64).
    """
    r = _as_vector(values, "feature vector")
    bad = np.flatnonzero(~((r >= 0.0) & (r <= 1.0)))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"feature element {i} = {r[i]} outside [0, 1]")
    return np.concatenate([r, 1.0 - r])


def choice(coded, weight, alpha: float) -> float:
    """Choice score T = |I ^ w| / (alpha + |w|)."""
    coded_arr = _as_vector(coded, "coded input")
    w = _as_vector(weight, "weight")
    if coded_arr.shape != w.shape:
        raise ValueError(f"dimension mismatch: input {coded_arr.shape[0]} vs weight {w.shape[0]}")
    if not (alpha > 0.0 and np.isfinite(alpha)):
        raise ValueError(f"alpha must be a positive finite real, got {alpha}")
    return float(np.minimum(coded_arr, w).sum() / (alpha + w.sum()))


def match(coded, weight) -> float:
    """Match score V = |I ^ w| / |I|, in [0, 1] for complement-coded input."""
    coded_arr = _as_vector(coded, "coded input")
    w = _as_vector(weight, "weight")
    if coded_arr.shape != w.shape:
        raise ValueError(f"dimension mismatch: input {coded_arr.shape[0]} vs weight {w.shape[0]}")
    return float(np.minimum(coded_arr, w).sum() / coded_arr.sum())


def update_weight(weight, coded, beta: float) -> np.ndarray:
    """Learned weight beta * (I ^ w) + (1 - beta) * w; never exceeds w element-wise."""
    w = _as_vector(weight, "weight")
    coded_arr = _as_vector(coded, "coded input")
    if coded_arr.shape != w.shape:
        raise ValueError(f"dimension mismatch: input {coded_arr.shape[0]} vs weight {w.shape[0]}")
    if not (0.0 <= beta <= 1.0):
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    shrunk = np.minimum(coded_arr, w)
    if beta == 1.0:
        return shrunk
    # w + beta*(min - w) rather than beta*min + (1-beta)*w: algebraically equal,
    # but exactly monotone (result <= w) and an exact fixed point when min == w
    return w + beta * (shrunk - w)


def activate(
    weights: Sequence, coded, params: ArtHyperParams
) -> list[tuple[int, float]]:
    """All nodes whose match clears vigilance, as (index, T) pairs in index order.

    Pure function of its inputs; an empty weight sequence yields an empty list.
    """
    coded_arr = _as_vector(coded, "coded input")
    out = []
    norm = coded_arr.sum()
    for j, w in enumerate(weights):
        w = _as_vector(w, f"weight {j}")
        if w.shape != coded_arr.shape:
            raise ValueError(f"dimension mismatch: input {coded_arr.shape[0]} vs weight {j}")
        m = np.minimum(coded_arr, w).sum()
        if m / norm >= params.rho:
            out.append((j, float(m / (params.alpha + w.sum()))))
    return out


def select_winner(activated: Iterable[tuple[int, float]]) -> int:
    """Index with the highest T among activated nodes; ties go to the lowest index."""
    best_j = -1
    best_t = -np.inf
    for j, t in activated:
        if t > best_t or (t == best_t and j < best_j):
            best_j, best_t = j, t
    if best_j < 0:
        raise ValueError("winner selection requires a non-empty activated set")
    return best_j


def create_node(coded) -> np.ndarray:
    """Initial weight for a new node: a copy of the coded input itself."""
    return _as_vector(coded, "coded input").copy()

"""Hot-loop kernels: the per-sample node scan and the winner weight update.

A compiled extension (``lpart._native``) is preferred when available; a
pure-NumPy implementation is the fallback. Selection happens once at import
and can be forced with the ``LPART_KERNEL`` environment variable
(``auto`` | ``native`` | ``pure``). ``benchmarks/bench_kernels.py`` compares
the two backends.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "scan", "min_learn", "scan_pure", "min_learn_pure"]


def scan_pure(weights, norms, count, coded, alpha, coded_norm):
    """Choice and match scores of ``coded`` against the first ``count`` node rows.

    Returns (T, V) float64 arrays of length ``count``.
    """
    m = np.minimum(weights[:count], coded).sum(axis=1)
    return m / (alpha + norms[:count]), m / coded_norm


def min_learn_pure(weights, row, coded, beta):
    """In-place learn of one node row; returns the row's new L1 norm.

    Evaluated as w + beta*(min - w) so the update is exactly monotone in
    floating point, with a fast path for beta == 1.
    """
    w = weights[row]
    shrunk = np.minimum(coded, w)
    w_new = shrunk if beta == 1.0 else w + beta * (shrunk - w)
    weights[row] = w_new
    return float(w_new.sum())


def _select():
    mode = os.environ.get("LPART_KERNEL", "auto").lower()
    if mode not in ("auto", "native", "pure"):
        raise ValueError(f"LPART_KERNEL must be auto, native, or pure, got {mode!r}")
    if mode == "pure":
        return "pure", scan_pure, min_learn_pure
    try:
        from lpart import _native
    except ImportError:
        if mode == "native":
            raise ImportError(
                "LPART_KERNEL=native but the compiled lpart._native extension is not available"
            )
        return "pure", scan_pure, min_learn_pure

    def scan_native(weights, norms, count, coded, alpha, coded_norm):
        out_t = np.empty(count)
        out_v = np.empty(count)
        _native.scan(weights, norms, count, coded, alpha, coded_norm, out_t, out_v)
        return out_t, out_v

    def min_learn_native(weights, row, coded, beta):
        return _native.min_learn(weights, row, coded, beta)

    return "native", scan_native, min_learn_native


BACKEND, scan, min_learn = _select()

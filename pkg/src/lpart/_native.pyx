# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled node-scan and weight-update kernels (see lpart.kernels)."""


def scan(double[:, ::1] weights, double[::1] norms, Py_ssize_t count,
         double[::1] coded, double alpha, double coded_norm,
         double[::1] out_t, double[::1] out_v):
    """Fill out_t / out_v with choice and match scores for the first count rows."""
    cdef Py_ssize_t j, i, m = coded.shape[0]
    cdef double s, w, x
    for j in range(count):
        s = 0.0
        for i in range(m):
            w = weights[j, i]
            x = coded[i]
            s += w if w < x else x
        out_t[j] = s / (alpha + norms[j])
        out_v[j] = s / coded_norm


def min_learn(double[:, ::1] weights, Py_ssize_t row, double[::1] coded,
              double beta):
    """Update one node row in place. Returns the new L1 norm.

    Evaluated as w + beta*(min - w) (exactly monotone), beta == 1 short-circuits
    to the plain element-wise minimum; mirrors the pure-NumPy fallback bit for bit.
    """
    cdef Py_ssize_t i, m = coded.shape[0]
    cdef double s = 0.0, w, x, shrunk, updated
    if beta == 1.0:
        for i in range(m):
            w = weights[row, i]
            x = coded[i]
            updated = w if w < x else x
            weights[row, i] = updated
            s += updated
        return s
    for i in range(m):
        w = weights[row, i]
        x = coded[i]
        shrunk = w if w < x else x
        updated = w + beta * (shrunk - w)
        weights[row, i] = updated
        s += updated
    return s

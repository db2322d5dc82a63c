# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: batched Gram assembly and sparse atom summation."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def gram_batch(const double complex[:, ::1] table, const double complex[::1] omega,
               const long long[:, ::1] ks, const long long[:, ::1] ls):
    """Gram matrices of many atom subsets from the shift-difference table.

    ``out[t, i, j] = <atom_j, atom_i>`` for the atoms ``(ks[t, i], ls[t, i])``.
    """
    cdef Py_ssize_t m = ks.shape[0], s = ks.shape[1], n = table.shape[0]
    cdef Py_ssize_t t, i, j
    cdef long long ki, li, dk, dl, ph
    out = np.empty((m, s, s), dtype=np.complex128)
    cdef double complex[:, :, ::1] g = out
    for t in range(m):
        for i in range(s):
            ki = ks[t, i]
            li = ls[t, i]
            for j in range(s):
                dk = (ks[t, j] - ki) % n
                if dk < 0:
                    dk += n
                dl = (ls[t, j] - li) % n
                if dl < 0:
                    dl += n
                ph = (dl * ki) % n
                g[t, i, j] = omega[ph] * table[dk, dl]
    return out


def sparse_synthesis(const double complex[::1] window, const double complex[::1] omega,
                     const long long[::1] ks, const long long[::1] ls,
                     const double complex[::1] values):
    """``sum_j values[j] * pi(ks[j], ls[j]) window`` in O(s*n)."""
    cdef Py_ssize_t n = window.shape[0], s = ks.shape[0]
    cdef Py_ssize_t j, q, src
    cdef long long k, l
    cdef double complex v
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] y = out
    for j in range(s):
        k = ks[j] % n
        l = ls[j] % n
        v = values[j]
        for q in range(n):
            src = q - k
            if src < 0:
                src += n
            y[q] += v * omega[(l * q) % n] * window[src]
    return out

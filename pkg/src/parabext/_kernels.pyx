# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: pairwise-sum energy counting and direct character sums.

Mirrors the contracts of ``_kernels_py``; selected at import by ``backend``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin
from libcpp.algorithm cimport lower_bound, sort, upper_bound

cnp.import_array()

BACKEND_NAME = "compiled"

DENSE_LIMIT = 1 << 22

DEF TWO_PI = 6.283185307179586476925286766559


def pair_energy(rows, int p):
    cdef cnp.ndarray[cnp.int8_t, ndim=2, mode="c"] r = np.ascontiguousarray(rows, dtype=np.int8)
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t D = r.shape[1]
    if n == 0:
        return 0
    if D * np.log2(p) > 62:
        raise ValueError(f"digit rows too wide to encode: p={p}, D={D}")

    cdef cnp.ndarray[cnp.int64_t, ndim=1] pw_arr = p ** np.arange(D, dtype=np.int64)
    cdef long long* pw = <long long*> cnp.PyArray_DATA(pw_arr)
    cdef double space_f = float(p) ** D
    cdef long long total = 0

    if space_f <= <double> DENSE_LIMIT:
        total = _pair_energy_dense(r, p, pw, <long long> space_f, n, D)
    else:
        total = _pair_energy_sparse(r, p, pw, n, D)
    return int(total)


cdef long long _pair_energy_dense(cnp.int8_t[:, ::1] r, int p, long long* pw,
                                  long long space, Py_ssize_t n, Py_ssize_t D):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts_arr = np.zeros(space, dtype=np.int64)
    cdef long long* counts = <long long*> cnp.PyArray_DATA(counts_arr)
    cdef Py_ssize_t i, j, k
    cdef long long key
    cdef int s
    for i in range(n):
        for j in range(i, n):
            key = 0
            for k in range(D):
                s = r[i, k] + r[j, k]
                if s >= p:
                    s -= p
                key += s * pw[k]
            counts[key] += 1 if i == j else 2
    cdef long long acc = 0
    for i in range(space):
        acc += counts[i] * counts[i]
    return acc


cdef long long _pair_energy_sparse(cnp.int8_t[:, ::1] r, int p, long long* pw,
                                   Py_ssize_t n, Py_ssize_t D):
    # sum_v c(v)^2 = 4*sum c_up^2 + 4*sum_{x in E} c_up(2x) + |E|,
    # with c_up counting unordered pairs i < j (2x injective, char > 2).
    cdef Py_ssize_t n_up = n * (n - 1) // 2
    cdef cnp.ndarray[cnp.int64_t, ndim=1] keys_arr = np.empty(n_up, dtype=np.int64)
    cdef long long* keys = <long long*> cnp.PyArray_DATA(keys_arr)
    cdef Py_ssize_t i, j, k, pos = 0
    cdef long long key
    cdef int s
    for i in range(n):
        for j in range(i + 1, n):
            key = 0
            for k in range(D):
                s = r[i, k] + r[j, k]
                if s >= p:
                    s -= p
                key += s * pw[k]
            keys[pos] = key
            pos += 1
    sort(keys, keys + n_up)

    cdef long long total = n
    cdef long long run
    cdef Py_ssize_t start = 0
    while start < n_up:
        pos = start + 1
        while pos < n_up and keys[pos] == keys[start]:
            pos += 1
        run = pos - start
        total += 4 * run * run
        start = pos

    cdef long long* lo
    cdef long long* hi
    for i in range(n):
        key = 0
        for k in range(D):
            s = r[i, k] + r[i, k]
            if s >= p:
                s -= p
            key += s * pw[k]
        lo = lower_bound(keys, keys + n_up, key)
        hi = upper_bound(keys, keys + n_up, key)
        total += 4 * (hi - lo)
    return total


def char_transform(trace_rows, weights, eval_digits, int p, int sign):
    cdef cnp.ndarray[cnp.int8_t, ndim=2, mode="c"] tr = np.ascontiguousarray(trace_rows, dtype=np.int8)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1, mode="c"] w = np.ascontiguousarray(weights, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int8_t, ndim=2, mode="c"] ev = np.ascontiguousarray(eval_digits, dtype=np.int8)
    cdef Py_ssize_t n = tr.shape[0]
    cdef Py_ssize_t D = tr.shape[1]
    cdef Py_ssize_t m = ev.shape[0]
    if ev.shape[1] != D:
        raise ValueError("trace rows and evaluation digits disagree on width")

    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out_arr = np.zeros(m, dtype=np.complex128)
    if n == 0:
        return out_arr

    cdef cnp.ndarray[cnp.float64_t, ndim=1] om_re = np.empty(p, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] om_im = np.empty(p, dtype=np.float64)
    cdef Py_ssize_t k
    for k in range(p):
        om_re[k] = cos(TWO_PI * sign * k / p)
        om_im[k] = sin(TWO_PI * sign * k / p)

    cdef double complex* out = <double complex*> cnp.PyArray_DATA(out_arr)
    cdef double complex* wp = <double complex*> cnp.PyArray_DATA(w)
    cdef Py_ssize_t i, j
    cdef long long ph
    cdef double re, im, wr, wi
    for j in range(m):
        re = 0.0
        im = 0.0
        for i in range(n):
            ph = 0
            for k in range(D):
                ph += tr[i, k] * ev[j, k]
            ph = ph % p
            wr = wp[i].real
            wi = wp[i].imag
            re += wr * om_re[ph] - wi * om_im[ph]
            im += wr * om_im[ph] + wi * om_re[ph]
        out[j] = re + 1j * im
    return out_arr

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, floor, fabs, M_PI

cnp.import_array()

cdef double FLAT_PEAK_RTOL = 1e-12


def train_window(double t_start, double fs, Py_ssize_t n, double f0, double f1,
                 double Tc, double amp):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double t, q, u, half_rate = (f1 - f0) / (2.0 * Tc)
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            t = t_start + <double>k / fs
            if t < 0.0:
                o[k] = 0.0
                continue
            q = t / Tc
            u = Tc * (q - floor(q))
            o[k] = amp * sin(2.0 * M_PI * (f0 + half_rate * u) * u)
    return out


cdef inline double _dot(const double* a, const double* b, Py_ssize_t n) noexcept nogil:
    # four independent accumulators so the compiler can pipeline the adds
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t i = 0
    while i + 4 <= n:
        s0 += a[i] * b[i]
        s1 += a[i + 1] * b[i + 1]
        s2 += a[i + 2] * b[i + 2]
        s3 += a[i + 3] * b[i + 3]
        i += 4
    while i < n:
        s0 += a[i] * b[i]
        i += 1
    return (s0 + s1) + (s2 + s3)


def xcorr_direct(window, template):
    cdef double[::1] w = np.ascontiguousarray(window, dtype=np.float64)
    cdef double[::1] tp = np.ascontiguousarray(template, dtype=np.float64)
    cdef Py_ssize_t L = w.shape[0]
    if tp.shape[0] != L:
        raise ValueError("window and template lengths differ")
    out = np.empty(L, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(L):
            # window[k:] against template[:L-k], then the wrapped head
            o[k] = _dot(&w[k], &tp[0], L - k) + _dot(&w[0], &tp[L - k], k)
    return out


cpdef double parabolic_offset(double c_prev, double c_peak, double c_next):
    cdef double denom = c_prev - 2.0 * c_peak + c_next
    cdef double delta
    if fabs(denom) < FLAT_PEAK_RTOL * fabs(c_peak) or denom == 0.0:
        return 0.0
    delta = 0.5 * (c_prev - c_next) / denom
    if delta > 0.5:
        return 0.5
    if delta < -0.5:
        return -0.5
    return delta


def peak_refine(c):
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t L = cv.shape[0]
    cdef Py_ssize_t i, k = 0
    cdef double best = cv[0]
    for i in range(1, L):
        if cv[i] > best:
            best = cv[i]
            k = i
    return k, parabolic_offset(cv[(k - 1 + L) % L], best, cv[(k + 1) % L])


def guided_peak_refine(c, env, Py_ssize_t half_width):
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] ev = np.ascontiguousarray(env, dtype=np.float64)
    cdef Py_ssize_t L = cv.shape[0]
    cdef Py_ssize_t i, j, k_env = 0, k = 0
    cdef double best = ev[0]
    for i in range(1, L):
        if ev[i] > best:
            best = ev[i]
            k_env = i
    k = (k_env - half_width) % L
    if k < 0:
        k += L
    best = cv[k]
    for i in range(-half_width + 1, half_width + 1):
        j = (k_env + i) % L
        if j < 0:
            j += L
        if cv[j] > best:
            best = cv[j]
            k = j
    return k, parabolic_offset(cv[(k - 1 + L) % L], best, cv[(k + 1) % L])

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: column sums of phase-rotated unit vectors and the
in-place controlled-phase statevector update. Contracts match _kernels_py.

All phases are in turns; angles are converted once at the sincos call.
"""

import numpy as np

cimport cython
from libc.math cimport cos, sin

cdef double TWO_PI = 6.283185307179586476925287


def colsum_sq_phases(const double[:, ::1] phases, double[::1] out):
    """out[v] = |sum_k exp(2*pi*i*phases[k, v])|^2."""
    cdef Py_ssize_t K = phases.shape[0]
    cdef Py_ssize_t V = phases.shape[1]
    cdef Py_ssize_t k, v
    cdef double re, im, a
    with nogil:
        for v in range(V):
            re = 0.0
            im = 0.0
            for k in range(K):
                a = TWO_PI * phases[k, v]
                re += cos(a)
                im += sin(a)
            out[v] = re * re + im * im


def colsum_sq_scaled(
    const double complex[:, ::1] zbase,
    const double[:, ::1] noise,
    double eps,
    double[::1] out,
):
    """out[v] = |sum_k zbase[k, v] * exp(2*pi*i*eps*noise[k, v])|^2."""
    cdef Py_ssize_t K = zbase.shape[0]
    cdef Py_ssize_t V = zbase.shape[1]
    cdef Py_ssize_t k, v
    cdef double re, im, a, c, s, zr, zi
    with nogil:
        for v in range(V):
            re = 0.0
            im = 0.0
            if eps == 0.0:
                for k in range(K):
                    re += zbase[k, v].real
                    im += zbase[k, v].imag
            else:
                for k in range(K):
                    a = TWO_PI * eps * noise[k, v]
                    c = cos(a)
                    s = sin(a)
                    zr = zbase[k, v].real
                    zi = zbase[k, v].imag
                    re += zr * c - zi * s
                    im += zr * s + zi * c
            out[v] = re * re + im * im


def colsum_sq_doubling(
    const double complex[:, ::1] zbase,
    const double[:, ::1] noise,
    double eps0,
    int levels,
    double[:, ::1] out,
):
    """Row l of out gets |sum_k zbase * exp(2*pi*i*(eps0*2^l)*noise)|^2.

    One sincos pass at eps0; higher levels square the rotation in place.
    """
    cdef Py_ssize_t K = zbase.shape[0]
    cdef Py_ssize_t V = zbase.shape[1]
    rot_arr = np.empty((K, V), dtype=np.complex128)
    cdef double complex[:, ::1] rot = rot_arr
    cdef Py_ssize_t k, v
    cdef int level
    cdef double re, im, a, c, s, zr, zi, rr, ri
    with nogil:
        for k in range(K):
            for v in range(V):
                a = TWO_PI * eps0 * noise[k, v]
                rot[k, v] = cos(a) + 1j * sin(a)
        for level in range(levels + 1):
            for v in range(V):
                re = 0.0
                im = 0.0
                for k in range(K):
                    zr = zbase[k, v].real
                    zi = zbase[k, v].imag
                    rr = rot[k, v].real
                    ri = rot[k, v].imag
                    re += zr * rr - zi * ri
                    im += zr * ri + zi * rr
                out[level, v] = re * re + im * im
            if level < levels:
                for k in range(K):
                    for v in range(V):
                        rot[k, v] = rot[k, v] * rot[k, v]


def controlled_phase(
    double complex[::1] amps, int n, int control, int target, double turns
):
    """In-place controlled phase: indices with both bits set gain
    exp(2*pi*i*turns)."""
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t i
    cdef unsigned long long mask = (1ULL << control) | (1ULL << target)
    cdef double a = TWO_PI * turns
    cdef double c = cos(a)
    cdef double s = sin(a)
    cdef double zr, zi
    with nogil:
        for i in range(size):
            if (<unsigned long long> i) & mask == mask:
                zr = amps[i].real
                zi = amps[i].imag
                amps[i] = (zr * c - zi * s) + 1j * (zr * s + zi * c)

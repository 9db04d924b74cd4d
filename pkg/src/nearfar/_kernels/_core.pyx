# cython: language_level=3
"""Compiled spherical-wave kernels (hot inner loops of the NF grid searches).

Mirrors the pure-numpy ``_fallback`` module; see it for the math notes.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cdef extern from "math.h" nogil:
    void sincos(double x, double *sin_out, double *cos_out)

cnp.import_array()


def pairwise_distances(const double[:, ::1] points, const double[:, ::1] positions):
    cdef Py_ssize_t g_count = points.shape[0]
    cdef Py_ssize_t n_count = positions.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((g_count, n_count))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t g, n
    cdef double dx, dy, dz
    for g in range(g_count):
        for n in range(n_count):
            dx = points[g, 0] - positions[n, 0]
            dy = points[g, 1] - positions[n, 1]
            dz = points[g, 2] - positions[n, 2]
            o[g, n] = sqrt(dx * dx + dy * dy + dz * dz)
    return out


def nf_steering_block(const double[:, ::1] positions, const double[:, ::1] points,
                      const double[::1] origin, double inv_wavelength, double amp_ratio):
    cdef Py_ssize_t g_count = points.shape[0]
    cdef Py_ssize_t n_count = positions.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty(
        (g_count, n_count), dtype=np.complex128)
    cdef double[:, ::1] o = <double[:g_count, :2 * n_count]> (<double*> out.data)
    cdef Py_ssize_t g, n
    cdef double dx, dy, dz, dist, d, amp, phase, si, co
    cdef double two_pi = 2.0 * np.pi
    for g in range(g_count):
        dx = points[g, 0] - origin[0]
        dy = points[g, 1] - origin[1]
        dz = points[g, 2] - origin[2]
        d = sqrt(dx * dx + dy * dy + dz * dz)
        for n in range(n_count):
            dx = points[g, 0] - positions[n, 0]
            dy = points[g, 1] - positions[n, 1]
            dz = points[g, 2] - positions[n, 2]
            dist = sqrt(dx * dx + dy * dy + dz * dz)
            if dist == 0.0:
                raise ValueError(
                    "singular range: evaluation point coincides with an array element")
            amp = amp_ratio * d / dist
            phase = -two_pi * inv_wavelength * dist
            sincos(phase, &si, &co)
            o[g, 2 * n] = amp * co
            o[g, 2 * n + 1] = amp * si
    return out


def nf_probe_objectives(const double[:, ::1] positions, const double[:, ::1] points,
                        const double[::1] origin, const double complex[:, ::1] vmat,
                        double f0_over_c, double wsub_over_c,
                        const double[::1] amp_ratios):
    cdef Py_ssize_t g_count = points.shape[0]
    cdef Py_ssize_t n_count = positions.shape[0]
    cdef Py_ssize_t q_count = vmat.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((q_count, g_count))
    cdef double[:, ::1] o = out
    cdef cnp.ndarray[cnp.float64_t, ndim=1] acc_arr = np.zeros(2 * q_count)
    cdef double[::1] acc = acc_arr
    cdef Py_ssize_t g, n, q
    cdef double dx, dy, dz, dist, d, amp, ph0, ph1
    cdef double cr, ci, er, ei, vr, vi, tr
    cdef double two_pi = 2.0 * np.pi
    cdef double s0, c0
    for g in range(g_count):
        dx = points[g, 0] - origin[0]
        dy = points[g, 1] - origin[1]
        dz = points[g, 2] - origin[2]
        d = sqrt(dx * dx + dy * dy + dz * dz)
        for q in range(2 * q_count):
            acc[q] = 0.0
        for n in range(n_count):
            dx = points[g, 0] - positions[n, 0]
            dy = points[g, 1] - positions[n, 1]
            dz = points[g, 2] - positions[n, 2]
            dist = sqrt(dx * dx + dy * dy + dz * dz)
            if dist == 0.0:
                raise ValueError(
                    "singular range: probe point coincides with an array element")
            amp = d / dist
            ph0 = two_pi * f0_over_c * dist
            ph1 = two_pi * wsub_over_c * dist
            sincos(ph0, &s0, &c0)
            cr = amp * c0
            ci = amp * s0
            sincos(ph1, &ei, &er)
            for q in range(q_count):
                vr = vmat[q, n].real
                vi = vmat[q, n].imag
                acc[2 * q] += cr * vr - ci * vi
                acc[2 * q + 1] += cr * vi + ci * vr
                tr = cr * er - ci * ei
                ci = cr * ei + ci * er
                cr = tr
        for q in range(q_count):
            o[q, g] = amp_ratios[q] * sqrt(acc[2 * q] ** 2 + acc[2 * q + 1] ** 2)
    return out

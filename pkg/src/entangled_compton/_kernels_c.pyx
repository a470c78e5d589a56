# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``.

Same signatures and return values; one fused pass over the nodes with the
panel-local running integral accumulated in place.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


cdef inline double _phase(double phi, double complex c1, double c2, double kappa,
                          double complex zeta, double upsilon, double eA0, double e2A02) nogil:
    return kappa * phi + 2.0 * eA0 * (zeta.real * c1.real - zeta.imag * c1.imag) \
        - 0.5 * e2A02 * upsilon * c2


cdef inline double complex _cis(double x) nogil:
    return cos(x) + 1j * sin(x)


def vertex_moments(const double[::1] weights, const double[::1] phi, const double[::1] env,
                   const double complex[::1] carrier, const double[::1] a2, const double complex[::1] c1,
                   const double[::1] c2, double kappa, double complex zeta, double upsilon,
                   double eA0, double e2A02):
    cdef Py_ssize_t i, n = weights.shape[0]
    cdef double complex e, wave
    cdef double complex s0 = 0, s1 = 0, s2 = 0
    for i in range(n):
        e = weights[i] * _cis(_phase(phi[i], c1[i], c2[i], kappa, zeta, upsilon, eA0, e2A02))
        wave = env[i] * carrier[i]
        s0 += wave * e
        s1 += wave.conjugate() * e
        s2 += a2[i] * e
    return np.array([s0, s1, s2])


def pair_moments(const double[::1] weights, const double[:, ::1] smat, const double[::1] phi,
                 const double[::1] env, const double complex[::1] carrier, const double[::1] a2,
                 const double complex[::1] c1, const double[::1] c2, tuple first, tuple second,
                 double eA0, double e2A02):
    cdef double k1 = first[0], u1 = first[2], k2 = second[0], u2 = second[2]
    cdef double complex z1 = first[1], z2 = second[1]
    cdef Py_ssize_t n = weights.shape[0], order = smat.shape[0]
    cdef Py_ssize_t n_panels = n // order
    cdef Py_ssize_t p, i, j, a, b, base

    inner_arr = np.empty((3, n), dtype=complex)
    outer_arr = np.empty((3, n), dtype=complex)
    cdef double complex[:, ::1] inner = inner_arr
    cdef double complex[:, ::1] outer = outer_arr
    cdef double complex e1, e2, wave, fa
    cdef double complex[3] j1, j2, it, fld, run, offset
    cdef double complex[3][3] theta, off
    for a in range(3):
        j1[a] = 0
        j2[a] = 0
        it[a] = 0
        offset[a] = 0
        for b in range(3):
            theta[a][b] = 0
            off[a][b] = 0

    for i in range(n):
        e1 = _cis(_phase(phi[i], c1[i], c2[i], k1, z1, u1, eA0, e2A02))
        e2 = _cis(_phase(phi[i], c1[i], c2[i], k2, z2, u2, eA0, e2A02))
        wave = env[i] * carrier[i]
        fld[0] = wave
        fld[1] = wave.conjugate()
        fld[2] = a2[i]
        for a in range(3):
            inner[a, i] = fld[a] * e1
            outer[a, i] = fld[a] * e2 * weights[i]
            j1[a] += weights[i] * inner[a, i]
            j2[a] += outer[a, i]
            it[a] += weights[i] * fld[a] * e1 * e2

    # running inner integral, panel by panel, contracted with the outer factor
    for p in range(n_panels):
        base = p * order
        for i in range(order):
            for b in range(3):
                run[b] = offset[b]
                for j in range(order):
                    run[b] += smat[i, j] * inner[b, base + j]
            for a in range(3):
                fa = outer[a, base + i]
                for b in range(3):
                    theta[a][b] += fa * run[b]
                    off[a][b] += fa * (run[b] - 0.5 * j1[b])
        for j in range(order):
            for b in range(3):
                offset[b] += weights[base + j] * inner[b, base + j]

    theta_arr = np.empty((3, 3), dtype=complex)
    off_arr = np.empty((3, 3), dtype=complex)
    for a in range(3):
        for b in range(3):
            theta_arr[a, b] = theta[a][b]
            off_arr[a, b] = off[a][b]
    return (np.array([j1[0], j1[1], j1[2]]), np.array([j2[0], j2[1], j2[2]]),
            np.array([it[0], it[1], it[2]]), theta_arr, off_arr)

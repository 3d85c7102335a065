# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 slot integrator and Hebbian map (mirrors ``_pykernels``)."""

import numpy as np

from libc.math cimport sin, tanh, sqrt

cdef enum:
    ZERO = 0
    CONSTANT = 1
    IMPULSE = 2
    SINUSOID = 3

cdef enum:
    TANH = 0
    LOGISTIC = 1
    ALGEBRAIC = 2


cdef inline void _drive(const double[::1] const_, const double[:, ::1] cols,
                        const int[::1] kind, const double[:, ::1] par,
                        double t, double[::1] s, double[::1] d) noexcept nogil:
    cdef Py_ssize_t n = d.shape[0], m = kind.shape[0], i, k
    for k in range(m):
        if kind[k] == CONSTANT:
            s[k] = par[k, 0]
        elif kind[k] == IMPULSE:
            s[k] = par[k, 0] if (0.0 <= t and t < par[k, 1]) else 0.0
        elif kind[k] == SINUSOID:
            s[k] = par[k, 0] * sin(par[k, 1] * t + par[k, 2])
        else:
            s[k] = 0.0
    for i in range(n):
        d[i] = const_[i]
        for k in range(m):
            d[i] += cols[i, k] * s[k]


cdef inline void _matvec_add(const double[:, ::1] M, double[::1] x, double[::1] d,
                             double[::1] y) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef double acc
    for i in range(n):
        acc = d[i]
        for j in range(n):
            acc += M[i, j] * x[j]
        y[i] = acc


def rk4_slot(const double[:, ::1] M, const double[::1] const_, const double[:, ::1] cols,
             const int[::1] kind, const double[:, ::1] par, const double[::1] x0,
             double t0, double dt, Py_ssize_t nsteps, double[:, ::1] out):
    cdef Py_ssize_t n = x0.shape[0], m = kind.shape[0], i, step
    cdef double h2 = 0.5 * dt, c6 = dt / 6.0
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef double[:, ::1] work = np.zeros((8, n))
    cdef double[::1] tmp = work[0], k1 = work[1], k2 = work[2], k3 = work[3], k4 = work[4]
    cdef double[::1] d0 = work[5], dh = work[6], d1 = work[7]
    cdef double[::1] s = np.zeros(m + 1)
    with nogil:
        for i in range(n):
            out[0, i] = x[i]
        for step in range(nsteps):
            _drive(const_, cols, kind, par, t0 + step * dt, s, d0)
            _drive(const_, cols, kind, par, t0 + (step + 0.5) * dt, s, dh)
            _drive(const_, cols, kind, par, t0 + (step + 1) * dt, s, d1)
            _matvec_add(M, x, d0, k1)
            for i in range(n):
                tmp[i] = x[i] + h2 * k1[i]
            _matvec_add(M, tmp, dh, k2)
            for i in range(n):
                tmp[i] = x[i] + h2 * k2[i]
            _matvec_add(M, tmp, dh, k3)
            for i in range(n):
                tmp[i] = x[i] + dt * k3[i]
            _matvec_add(M, tmp, d1, k4)
            for i in range(n):
                x[i] = x[i] + c6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                out[step + 1, i] = x[i]


cdef inline double _phi(double y, int code) noexcept nogil:
    if code == TANH:
        return tanh(y)
    if code == LOGISTIC:
        return tanh(0.5 * y)
    return y / sqrt(1.0 + y * y)


cdef inline double _clip(double y, double lo, double hi) noexcept nogil:
    if y > hi:
        return hi
    if y < lo:
        return lo
    return y


def hebbian_step(double[:, ::1] A, const Py_ssize_t[::1] ei, const Py_ssize_t[::1] ej,
                 const signed char[::1] sign, const double[::1] x,
                 double ca_plus, double ca_minus, double lo_plus, double hi_plus,
                 double lo_minus, double hi_minus, int phi_code):
    cdef Py_ssize_t e, i, j
    cdef double a, drive, new
    with nogil:
        for e in range(ei.shape[0]):
            i = ei[e]
            j = ej[e]
            a = A[i, j]
            drive = _phi(x[i] * x[j], phi_code)
            if sign[e] > 0:
                new = _clip(ca_plus * a + drive, lo_plus, hi_plus)
            else:
                new = _clip(ca_minus * a + drive, lo_minus, hi_minus)
            A[i, j] = new
            A[j, i] = new

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled flow kernels for the catalog models.

Same contract as ``_flows_py``: model 0 = Lorenz (n = 4), 1 = Euler top
(n = 3); ``which`` picks ``(p0, h0)`` or ``(p1, h1)``; ``copies`` >= 1.
"""

from libc.math cimport sin, cos, exp, expm1, sinh, fabs, isfinite
from libc.stdlib cimport malloc, free

import numpy as np

cdef enum:
    LORENZ = 0
    EULER = 1
    MAXN = 4

cdef double TAYLOR = 1e-4


cdef inline bint _small(double u, double eta) noexcept nogil:
    return fabs(eta) * (1.0 + fabs(u)) < TAYLOR


cdef inline double k_sin(double u, double eta) noexcept nogil:
    cdef double z2
    if _small(u, eta):
        z2 = (eta * u) * (eta * u)
        return u * (1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0)
    return sin(eta * u) / eta


cdef inline double k_cos(double u, double eta) noexcept nogil:
    cdef double z2, half
    if _small(u, eta):
        z2 = (eta * u) * (eta * u)
        return -eta * u * u * (0.5 - z2 / 24.0 + z2 * z2 / 720.0 - z2 * z2 * z2 / 40320.0)
    half = sin(0.5 * eta * u)
    return -2.0 * half * half / eta


cdef inline double k_exp(double u, double eta) noexcept nogil:
    cdef double z
    if _small(u, eta):
        z = eta * u
        return -u * (1.0 - z + 2.0 * z * z / 3.0 - z * z * z / 3.0)
    return expm1(-2.0 * eta * u) / (2.0 * eta)


cdef inline double k_sinh(double u, double eta) noexcept nogil:
    cdef double z2
    if _small(u, eta):
        z2 = (eta * u) * (eta * u)
        return 2.0 * u * (1.0 + z2 / 6.0 + z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0)
    return 2.0 * sinh(eta * u) / eta


cdef inline void _mul(int model, double eta, const double* a, const double* b, double* out) noexcept nogil:
    cdef double c, s, e
    if model == LORENZ:
        c = cos(eta * a[3])
        s = sin(eta * a[3])
        out[0] = a[0] + b[0]
        out[1] = a[1] + b[1] * c + b[2] * s
        out[2] = a[2] - b[1] * s + b[2] * c
        out[3] = a[3] + b[3]
    else:
        e = exp(-eta * a[0])
        out[0] = a[0] + b[0]
        out[1] = a[1] + b[1] * e
        out[2] = a[2] + b[2] * e


cdef inline void _d1t(int model, double eta, const double* a, const double* b, double* v) noexcept nogil:
    cdef double c, s, e
    if model == LORENZ:
        c = cos(eta * a[3])
        s = sin(eta * a[3])
        v[3] = v[3] + eta * (-b[1] * s + b[2] * c) * v[1] + eta * (-b[1] * c - b[2] * s) * v[2]
    else:
        e = exp(-eta * a[0])
        v[0] = v[0] - eta * e * (b[1] * v[1] + b[2] * v[2])


cdef inline void _d2t(int model, double eta, const double* a, double* v) noexcept nogil:
    cdef double c, s, e, v1, v2
    if model == LORENZ:
        c = cos(eta * a[3])
        s = sin(eta * a[3])
        v1 = v[1]
        v2 = v[2]
        v[1] = c * v1 - s * v2
        v[2] = s * v1 + c * v2
    else:
        e = exp(-eta * a[0])
        v[1] = e * v[1]
        v[2] = e * v[2]


cdef inline void _apply(int model, double eta, int which, const double* x, const double* w, double* out) noexcept nogil:
    cdef double p01, p02, p12
    if model == LORENZ:
        if which == 0:
            p01 = -0.5 * x[2]
            p02 = 0.5 * x[1]
            p12 = 0.0
        else:
            p01 = 0.25 * k_sin(x[3], eta)
            p02 = 0.25 * k_cos(x[3], eta)
            p12 = -0.5 * x[0]
        out[3] = 0.0
    else:
        if which == 0:
            p01 = -x[2]
            p02 = x[1]
            p12 = -0.5 * eta * (x[1] * x[1] + x[2] * x[2]) + k_exp(x[0], eta)
        else:
            p01 = -x[1]
            p02 = x[2]
            p12 = -eta * x[1] * x[2] + 2.0 * k_exp(x[0], eta)
    out[0] = p01 * w[1] + p02 * w[2]
    out[1] = -p01 * w[0] + p12 * w[2]
    out[2] = -p02 * w[0] - p12 * w[1]


cdef inline void _grad(int model, double eta, int which, const double* x, double* g) noexcept nogil:
    cdef double e
    if model == LORENZ:
        if which == 0:
            g[0] = -2.0 * x[0]
            g[1] = -k_cos(x[3], eta)
            g[2] = k_sin(x[3], eta)
            g[3] = x[2] * cos(eta * x[3]) + x[1] * sin(eta * x[3])
        else:
            g[0] = 0.0
            g[1] = 2.0 * x[1]
            g[2] = 2.0 * x[2]
            g[3] = 0.0
    else:
        e = exp(eta * x[0])
        if which == 0:
            g[0] = eta * e * x[1] * x[2] + k_sinh(x[0], eta)
            g[1] = e * x[2]
            g[2] = e * x[1]
        else:
            g[0] = -0.5 * eta * e * (x[1] * x[1] + x[2] * x[2]) - 0.5 * k_sinh(x[0], eta)
            g[1] = -e * x[1]
            g[2] = -e * x[2]


cdef void _field(int model, double eta, int which, int copies, const double* s,
                 double* out, double* work) noexcept nogil:
    # work holds 2 * (copies + 1) group elements: prefixes then suffixes
    cdef int n = 4 if model == LORENZ else 3
    cdef int k, i
    cdef double grad[MAXN]
    cdef double w[MAXN]
    cdef double* prefix = work
    cdef double* suffix = work + (copies + 1) * n
    if copies == 1:
        _grad(model, eta, which, s, grad)
        _apply(model, eta, which, s, grad, out)
        return
    for i in range(n):
        prefix[i] = 0.0
        suffix[copies * n + i] = 0.0
    for k in range(copies):
        _mul(model, eta, prefix + k * n, s + k * n, prefix + (k + 1) * n)
    for k in range(copies - 1, -1, -1):
        _mul(model, eta, s + k * n, suffix + (k + 1) * n, suffix + k * n)
    _grad(model, eta, which, prefix + copies * n, grad)
    for k in range(copies):
        for i in range(n):
            w[i] = grad[i]
        _d1t(model, eta, prefix + (k + 1) * n, suffix + (k + 1) * n, w)
        _d2t(model, eta, prefix + k * n, w)
        _apply(model, eta, which, s + k * n, w, out + k * n)


def field(int model, double eta, int which, int copies, x):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef int dim = xv.shape[0]
    out = np.empty(dim)
    cdef double[::1] ov = out
    cdef double* work = <double*> malloc(2 * (copies + 1) * MAXN * sizeof(double))
    if work == NULL:
        raise MemoryError()
    try:
        _field(model, eta, which, copies, &xv[0], &ov[0], work)
    finally:
        free(work)
    return out


def rk4(int model, double eta, int which, int copies, x0, double dt, long n_steps, long sample_every):
    """Fixed-step RK4; returns ``(samples, filled)`` exactly like the fallback."""
    cdef double[::1] xin = np.ascontiguousarray(x0, dtype=np.float64)
    cdef int dim = xin.shape[0]
    cdef long n_rows = n_steps // sample_every + 1 + (1 if n_steps % sample_every else 0)
    samples = np.empty((n_rows, dim))
    cdef double[:, ::1] sv = samples
    cdef double* buf = <double*> malloc((6 * dim + 2 * (copies + 1) * MAXN) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* x = buf
    cdef double* k1 = buf + dim
    cdef double* k2 = buf + 2 * dim
    cdef double* k3 = buf + 3 * dim
    cdef double* k4 = buf + 4 * dim
    cdef double* tmp = buf + 5 * dim
    cdef double* work = buf + 6 * dim
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef long step, row = 1
    cdef int i
    cdef bint finite
    try:
        with nogil:
            for i in range(dim):
                x[i] = xin[i]
                sv[0, i] = x[i]
            for step in range(1, n_steps + 1):
                _field(model, eta, which, copies, x, k1, work)
                for i in range(dim):
                    tmp[i] = x[i] + h2 * k1[i]
                _field(model, eta, which, copies, tmp, k2, work)
                for i in range(dim):
                    tmp[i] = x[i] + h2 * k2[i]
                _field(model, eta, which, copies, tmp, k3, work)
                for i in range(dim):
                    tmp[i] = x[i] + dt * k3[i]
                _field(model, eta, which, copies, tmp, k4, work)
                for i in range(dim):
                    x[i] = x[i] + h6 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
                if step % sample_every == 0 or step == n_steps:
                    finite = True
                    for i in range(dim):
                        if not isfinite(x[i]):
                            finite = False
                    if not finite:
                        break
                    for i in range(dim):
                        sv[row, i] = x[i]
                    row += 1
    finally:
        free(buf)
    return samples, row

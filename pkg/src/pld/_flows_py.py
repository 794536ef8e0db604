"""Pure-Python flow kernels for the catalog models.

Mirror of ``_flows.pyx``; selected by :mod:`pld._backend` when the compiled
extension is unavailable. Plain floats and ``math`` beat numpy at n <= 12.

Model ids: 0 = Lorenz (n = 4), 1 = Euler top (n = 3).
``which`` selects ``(p0, h0)`` or ``(p1, h1)``.  ``copies`` = N >= 1; the
state is N concatenated group elements and the Hamiltonian is
``h o (g_1 ... g_N)``.
"""

import math

import numpy as np

from .deform import (cos_kernel_f, cosh_kernel_f, exp_kernel_f, sin_kernel_f,
                     sinh_kernel_f)

LORENZ, EULER = 0, 1
DIMS = (4, 3)


def _mul(model, eta, a, b):
    if model == LORENZ:
        c = math.cos(eta * a[3])
        s = math.sin(eta * a[3])
        return [a[0] + b[0], a[1] + b[1] * c + b[2] * s,
                a[2] - b[1] * s + b[2] * c, a[3] + b[3]]
    e = math.exp(-eta * a[0])
    return [a[0] + b[0], a[1] + b[1] * e, a[2] + b[2] * e]


def _d1t(model, eta, a, b, v):
    """``D1(a, b)^T v`` where ``D1 = d(a.b)/da``."""
    if model == LORENZ:
        c = math.cos(eta * a[3])
        s = math.sin(eta * a[3])
        j13 = eta * (-b[1] * s + b[2] * c)
        j23 = eta * (-b[1] * c - b[2] * s)
        return [v[0], v[1], v[2], v[3] + j13 * v[1] + j23 * v[2]]
    e = math.exp(-eta * a[0])
    return [v[0] - eta * e * (b[1] * v[1] + b[2] * v[2]), v[1], v[2]]


def _d2t(model, eta, a, v):
    """``D2(a)^T v`` where ``D2 = d(a.b)/db`` (independent of b)."""
    if model == LORENZ:
        c = math.cos(eta * a[3])
        s = math.sin(eta * a[3])
        return [v[0], c * v[1] - s * v[2], s * v[1] + c * v[2], v[3]]
    e = math.exp(-eta * a[0])
    return [v[0], e * v[1], e * v[2]]


def _entries(model, eta, which, x):
    """Upper entries ``(pi_01, pi_02, pi_12)``; everything else is zero."""
    if model == LORENZ:
        if which == 0:
            return -0.5 * x[2], 0.5 * x[1], 0.0
        return 0.25 * sin_kernel_f(x[3], eta), 0.25 * cos_kernel_f(x[3], eta), -0.5 * x[0]
    if which == 0:
        return -x[2], x[1], -0.5 * eta * (x[1] * x[1] + x[2] * x[2]) + exp_kernel_f(x[0], eta)
    return -x[1], x[2], -eta * x[1] * x[2] + 2.0 * exp_kernel_f(x[0], eta)


def _apply(model, eta, which, x, w):
    p01, p02, p12 = _entries(model, eta, which, x)
    out = [p01 * w[1] + p02 * w[2], -p01 * w[0] + p12 * w[2], -p02 * w[0] - p12 * w[1]]
    if model == LORENZ:
        out.append(0.0)
    return out


def _grad(model, eta, which, x):
    if model == LORENZ:
        if which == 0:
            return [-2.0 * x[0], -cos_kernel_f(x[3], eta), sin_kernel_f(x[3], eta),
                    x[2] * math.cos(eta * x[3]) + x[1] * math.sin(eta * x[3])]
        return [0.0, 2.0 * x[1], 2.0 * x[2], 0.0]
    e = math.exp(eta * x[0])
    if which == 0:
        return [eta * e * x[1] * x[2] + sinh_kernel_f(x[0], eta), e * x[2], e * x[1]]
    return [-0.5 * eta * e * (x[1] * x[1] + x[2] * x[2]) - 0.5 * sinh_kernel_f(x[0], eta),
            -e * x[1], -e * x[2]]


def _field(model, eta, which, copies, s):
    n = DIMS[model]
    if copies == 1:
        return _apply(model, eta, which, s, _grad(model, eta, which, s))
    parts = [s[k * n:(k + 1) * n] for k in range(copies)]
    ident = [0.0] * n
    prefix = [ident]
    for g in parts:
        prefix.append(_mul(model, eta, prefix[-1], g))
    suffix = [ident] * (copies + 1)
    for k in range(copies - 1, -1, -1):
        suffix[k] = _mul(model, eta, parts[k], suffix[k + 1])
    grad = _grad(model, eta, which, prefix[copies])
    out = []
    for k in range(copies):
        # d m / d g_k = D1(P_k, S_{k+1}) D2(P_{k-1})
        w = _d2t(model, eta, prefix[k], _d1t(model, eta, prefix[k + 1], suffix[k + 1], grad))
        out.extend(_apply(model, eta, which, parts[k], w))
    return out


def field(model, eta, which, copies, x):
    return np.array(_field(model, eta, which, copies, [float(v) for v in x]))


def rk4(model, eta, which, copies, x0, dt, n_steps, sample_every):
    """Fixed-step RK4; returns ``(samples, filled)``.

    Rows are the states at steps ``0, sample_every, 2*sample_every, ...``
    and at ``n_steps``.  ``filled`` is short of the row count when a
    non-finite state stopped the run.
    """
    n_rows = n_steps // sample_every + 1 + (1 if n_steps % sample_every else 0)
    x = [float(v) for v in x0]
    dim = len(x)
    out = np.empty((n_rows, dim))
    out[0] = x
    row = 1
    h = dt
    h2 = 0.5 * dt
    h6 = dt / 6.0
    f = _field
    for step in range(1, n_steps + 1):
        try:
            k1 = f(model, eta, which, copies, x)
            k2 = f(model, eta, which, copies, [x[i] + h2 * k1[i] for i in range(dim)])
            k3 = f(model, eta, which, copies, [x[i] + h2 * k2[i] for i in range(dim)])
            k4 = f(model, eta, which, copies, [x[i] + h * k3[i] for i in range(dim)])
        except OverflowError:
            # math.exp raises where C returns inf; same outcome
            return out, row
        x = [x[i] + h6 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(dim)]
        if step % sample_every == 0 or step == n_steps:
            if not all(math.isfinite(v) for v in x):
                return out, row
            out[row] = x
            row += 1
    return out, row

"""Removable-singularity kernels shared by every deformed bracket.

Each kernel is written as ``f(u; eta)`` and is finite and smooth at
``eta == 0``.  Away from the origin the numerically stable forms
(half-angle identities, ``expm1``) are used; when ``|eta| * (1 + |u|)``
drops below :data:`TAYLOR_THRESHOLD` a four-term Taylor expansion takes
over.  All functions accept scalars or numpy arrays for ``u``.
"""

import math

import numpy as np

TAYLOR_THRESHOLD = 1e-4


def _small(eta, u):
    return abs(eta) * (1.0 + np.abs(u)) < TAYLOR_THRESHOLD


def sin_kernel(u, eta):
    """``sin(eta*u)/eta``, tending to ``u``."""
    u = np.asarray(u, dtype=float)
    z2 = (eta * u) ** 2
    taylor = u * (1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 ** 3 / 5040.0)
    if eta == 0.0:
        return taylor
    # the unused branch may be 0/0 where the series applies
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(_small(eta, u), taylor, np.sin(eta * u) / eta)


def cos_kernel(u, eta):
    """``(cos(eta*u) - 1)/eta``, tending to ``0``."""
    u = np.asarray(u, dtype=float)
    z2 = (eta * u) ** 2
    taylor = -eta * u * u * (0.5 - z2 / 24.0 + z2 * z2 / 720.0 - z2 ** 3 / 40320.0)
    if eta == 0.0:
        return taylor
    half = np.sin(0.5 * eta * u)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(_small(eta, u), taylor, -2.0 * half * half / eta)


def exp_kernel(u, eta):
    """``(exp(-2*eta*u) - 1)/(2*eta)``, tending to ``-u``."""
    u = np.asarray(u, dtype=float)
    z = eta * u
    taylor = -u * (1.0 - z + 2.0 * z * z / 3.0 - z ** 3 / 3.0)
    if eta == 0.0:
        return taylor
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(_small(eta, u), taylor, np.expm1(-2.0 * z) / (2.0 * eta))


def cosh_kernel(u, eta):
    """``(exp(eta*u) + exp(-eta*u) - 2)/eta**2``, tending to ``u**2``."""
    u = np.asarray(u, dtype=float)
    z2 = (eta * u) ** 2
    taylor = u * u * (1.0 + z2 / 12.0 + z2 * z2 / 360.0 + z2 ** 3 / 20160.0)
    if eta == 0.0:
        return taylor
    half = np.sinh(0.5 * eta * u)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(_small(eta, u), taylor, 4.0 * half * half / (eta * eta))


def sinh_kernel(u, eta):
    """``(exp(eta*u) - exp(-eta*u))/eta``: derivative of :func:`cosh_kernel`."""
    u = np.asarray(u, dtype=float)
    z2 = (eta * u) ** 2
    taylor = 2.0 * u * (1.0 + z2 / 6.0 + z2 * z2 / 120.0 + z2 ** 3 / 5040.0)
    if eta == 0.0:
        return taylor
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(_small(eta, u), taylor, 2.0 * np.sinh(eta * u) / eta)


def deformation_kernels(eta, u):
    """Return the tuple ``(S, V, E, W)`` evaluated at ``u``.

    Examples
    --------
    >>> deformation_kernels(0.0, 3.0)
    (3.0, 0.0, -3.0, 9.0)
    """
    out = (sin_kernel(u, eta), cos_kernel(u, eta),
           exp_kernel(u, eta), cosh_kernel(u, eta))
    if np.ndim(u) == 0:
        return tuple(float(v) for v in out)
    return out


# Scalar versions for tight loops where numpy dispatch dominates.

def sin_kernel_f(u, eta):
    if abs(eta) * (1.0 + abs(u)) < TAYLOR_THRESHOLD:
        z2 = (eta * u) ** 2
        return u * (1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 ** 3 / 5040.0)
    return math.sin(eta * u) / eta


def cos_kernel_f(u, eta):
    if abs(eta) * (1.0 + abs(u)) < TAYLOR_THRESHOLD:
        z2 = (eta * u) ** 2
        return -eta * u * u * (0.5 - z2 / 24.0 + z2 * z2 / 720.0 - z2 ** 3 / 40320.0)
    half = math.sin(0.5 * eta * u)
    return -2.0 * half * half / eta


def exp_kernel_f(u, eta):
    if abs(eta) * (1.0 + abs(u)) < TAYLOR_THRESHOLD:
        z = eta * u
        return -u * (1.0 - z + 2.0 * z * z / 3.0 - z ** 3 / 3.0)
    return math.expm1(-2.0 * eta * u) / (2.0 * eta)


def cosh_kernel_f(u, eta):
    if abs(eta) * (1.0 + abs(u)) < TAYLOR_THRESHOLD:
        z2 = (eta * u) ** 2
        return u * u * (1.0 + z2 / 12.0 + z2 * z2 / 360.0 + z2 ** 3 / 20160.0)
    half = math.sinh(0.5 * eta * u)
    return 4.0 * half * half / (eta * eta)


def sinh_kernel_f(u, eta):
    if abs(eta) * (1.0 + abs(u)) < TAYLOR_THRESHOLD:
        z2 = (eta * u) ** 2
        return 2.0 * u * (1.0 + z2 / 6.0 + z2 * z2 / 120.0 + z2 ** 3 / 5040.0)
    return 2.0 * math.sinh(eta * u) / eta

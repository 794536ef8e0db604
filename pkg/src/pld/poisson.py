"""Point-evaluated Poisson geometry on R^n.

A :class:`PoissonStructure` is a bivector field ``x -> pi(x)`` (an
antisymmetric matrix) with optional analytic partials
``x -> d[k] = d pi / d x_k``.  Hamiltonian vector fields follow the
convention ``xdot_i = {x_i, H} = sum_j pi_ij(x) dH/dx_j``.
"""

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

FD_STEP = 1e-6
GRAD_CHECK_STEP = 1e-5


@dataclass(frozen=True)
class ScalarField:
    dim: int
    eval: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    name: str = "f"

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class PoissonStructure:
    dim: int
    bivector: Callable[[np.ndarray], np.ndarray]
    partials: Optional[Callable[[np.ndarray], np.ndarray]] = None
    casimirs: tuple = ()
    rank_generic: int = 2
    name: str = "pi"

    def __call__(self, x):
        return self.bivector(np.asarray(x, dtype=float))

    def derivatives(self, x):
        """Array ``d`` of shape (n, n, n) with ``d[k] = d pi / d x_k``."""
        x = np.asarray(x, dtype=float)
        if self.partials is not None:
            return self.partials(x)
        return fd_partials(self.bivector, x)


@dataclass(frozen=True)
class HamiltonianSystem:
    poisson: PoissonStructure
    hamiltonian: ScalarField

    def __post_init__(self):
        if self.poisson.dim != self.hamiltonian.dim:
            raise ValueError("Poisson structure and Hamiltonian differ in dimension")

    def field(self, x):
        return hamiltonian_vf(self.poisson, self.hamiltonian, x)


@dataclass(frozen=True)
class BiHamiltonianSystem:
    sys0: HamiltonianSystem
    sys1: HamiltonianSystem


def fd_partials(bivector, x, step=FD_STEP):
    """Central differences with step ``step * max(1, |x_k|)``."""
    n = x.shape[0]
    out = np.empty((n, n, n))
    for k in range(n):
        h = step * max(1.0, abs(x[k]))
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        out[k] = (bivector(xp) - bivector(xm)) / (xp[k] - xm[k])
    return out


def linear_poisson_from_constants(sc, casimirs=(), name="lie-poisson", rank_generic=2):
    """``pi_ij(x) = sum_k c_ij^k x_k``; partials are the constants."""
    c = np.array(sc.c)
    d = np.ascontiguousarray(np.transpose(c, (2, 0, 1)))

    def bivector(x):
        return c @ x

    def partials(x):
        return d

    return PoissonStructure(sc.dim, bivector, partials, tuple(casimirs), rank_generic, name)


def sum_structure(p0, p1, name=None):
    def bivector(x):
        return p0.bivector(x) + p1.bivector(x)

    def partials(x):
        return p0.derivatives(x) + p1.derivatives(x)

    return PoissonStructure(p0.dim, bivector, partials, (), p0.rank_generic,
                            name or f"{p0.name}+{p1.name}")


def blend_structure(p0, p1, alpha, name=None):
    """``(1 - alpha) p0 + alpha p1``."""
    a0, a1 = 1.0 - alpha, alpha

    def bivector(x):
        return a0 * p0.bivector(x) + a1 * p1.bivector(x)

    def partials(x):
        return a0 * p0.derivatives(x) + a1 * p1.derivatives(x)

    return PoissonStructure(p0.dim, bivector, partials, (), p0.rank_generic,
                            name or f"blend({alpha:g})")


def constant_field(dim, value=0.0, name="const"):
    return ScalarField(dim, lambda x: value, lambda x: np.zeros(dim), name)


def linear_field(coeffs, name="linear"):
    a = np.asarray(coeffs, dtype=float)
    return ScalarField(a.size, lambda x: float(a @ x), lambda x: a.copy(), name)


def coordinate_field(dim, i, name=None):
    e = np.zeros(dim)
    e[i] = 1.0
    return ScalarField(dim, lambda x: float(x[i]), lambda x: e.copy(), name or f"x{i + 1}")


def _check_dims(*dims):
    if len(set(dims)) != 1:
        raise ValueError(f"dimension mismatch: {dims}")


def poisson_bracket(P, f, g, x):
    """``{f, g}(x) = grad f^T pi(x) grad g``."""
    _check_dims(P.dim, f.dim, g.dim)
    x = np.asarray(x, dtype=float)
    return float(f.grad(x) @ P.bivector(x) @ g.grad(x))


def hamiltonian_vf(P, H, x):
    _check_dims(P.dim, H.dim)
    x = np.asarray(x, dtype=float)
    return P.bivector(x) @ H.grad(x)


def _cyclic(a, d):
    # t[i,j,k] = sum_l a[i,l] d[l,j,k]; returns t + cyclic permutations
    t = np.einsum("il,ljk->ijk", a, d)
    return t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1)


def jacobi_residual_at(P, x):
    """Max over (i, j, k) of the Schouten cyclic sum."""
    x = np.asarray(x, dtype=float)
    return float(np.max(np.abs(_cyclic(P.bivector(x), P.derivatives(x)))))


def compatibility_residual_at(P0, P1, x):
    """Max over (i, j, k) of the mixed Schouten cyclic sum ``[pi0, pi1]``."""
    _check_dims(P0.dim, P1.dim)
    x = np.asarray(x, dtype=float)
    mixed = (_cyclic(P0.bivector(x), P1.derivatives(x))
             + _cyclic(P1.bivector(x), P0.derivatives(x)))
    return float(np.max(np.abs(mixed)))


def casimir_residual_at(P, C, x):
    _check_dims(P.dim, C.dim)
    return float(np.max(np.abs(hamiltonian_vf(P, C, x)), initial=0.0))


def bihamiltonian_residual_at(B, x):
    v0 = hamiltonian_vf(B.sys0.poisson, B.sys0.hamiltonian, x)
    v1 = hamiltonian_vf(B.sys1.poisson, B.sys1.hamiltonian, x)
    return float(np.max(np.abs(v0 - v1)))


def fd_gradient(f, x, step=GRAD_CHECK_STEP):
    """Five-point central differences of ``f.eval``."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = step
        g[k] = (-f.eval(x + 2 * e) + 8 * f.eval(x + e) - 8 * f.eval(x - e)
                + f.eval(x - 2 * e)) / (12 * step)
    return g


def gradient_check(f, x):
    """Relative max-abs difference between ``f.grad`` and finite differences."""
    x = np.asarray(x, dtype=float)
    analytic = f.grad(x)
    numeric = fd_gradient(f, x)
    scale = max(1.0, float(np.max(np.abs(analytic))))
    return float(np.max(np.abs(analytic - numeric))) / scale


def numerical_rank(P, x, tol=1e-10):
    s = np.linalg.svd(P.bivector(np.asarray(x, dtype=float)), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


@dataclass(frozen=True)
class ResidualRecord:
    check: str
    structure: str
    point: list
    value: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.value <= self.tolerance))

    def as_dict(self):
        return {"check": self.check, "structure": self.structure,
                "point": [float(v) for v in self.point], "value": float(self.value),
                "tolerance": float(self.tolerance), "pass": self.passed}

    def to_json(self):
        return json.dumps(self.as_dict())


def worst_over(points, fn):
    """Return ``(value, point)`` maximising ``fn`` over ``points``."""
    best_val, best_pt = -np.inf, None
    for p in points:
        v = fn(p)
        if not np.isfinite(v):
            return float("inf"), p
        if v > best_val:
            best_val, best_pt = v, p
    return float(best_val), best_pt


def random_points(dim, count, seed=42, low=-2.0, high=2.0):
    """Uniform samples in ``[low, high]^dim`` from a seeded generator."""
    return np.random.default_rng(seed).uniform(low, high, size=(count, dim))

"""Project coupled flows on G^N through group multiplication.

The multiplication ``G^N -> G`` is a Poisson map for both product
brackets.  So the Hamiltonian flow of ``h o m`` on G^N must project
onto the flow of ``h`` on G.  These functions check that at the level of
vector fields (tangency) and of whole trajectories.
"""

import json
from dataclasses import dataclass

import numpy as np

from .integrate import IntegrationError, IntegratorConfig, integrate
from .models import coupled_model, fold_multiply, multiplication_jacobian
from .poisson import hamiltonian_vf


def reduce_state(G, parts):
    """``parts[0] . parts[1] . ...``; works on stacked samples too."""
    parts = list(parts)
    if not parts:
        raise ValueError("need at least one part")
    return fold_multiply(G, parts)


def reduce_samples(cb, states):
    """Reduce an array of coupled states of shape ``(T, N n)`` to ``(T, n)``."""
    n = cb.base.dim
    S = np.asarray(states, dtype=float).reshape(len(states), cb.copies, n)
    return reduce_state(cb.base.group, [S[:, k] for k in range(cb.copies)])


def reduction_residual(cb, which, start, t_end, dt=1e-3, sample_every=1, method="rk4"):
    """Max over samples of ``|| m(coupled(t)) - base(t) ||_2``.

    ``start`` is a list of ``cb.copies`` group elements (or their
    concatenation).  Integrator aborts propagate as
    :class:`~pld.integrate.IntegrationError`.
    """
    x0 = np.asarray(start, dtype=float).reshape(-1)
    if x0.size != cb.dim:
        raise ValueError(f"start has {x0.size} coordinates, expected {cb.dim}")
    if t_end == 0:
        return 0.0
    cfg = IntegratorConfig(method, dt, t_end, sample_every)
    coupled = integrate(cb.flow(which), x0, cfg)
    base = integrate(cb.base.flow(which), cb.reduction(x0), cfg)
    diff = reduce_samples(cb, coupled.states) - base.states
    return float(np.max(np.linalg.norm(diff, axis=1)))


def tangency_residual(cb, which, x):
    """``|| Dm . X_coupled(x) - X_base(m(x)) ||_inf`` with analytic Jacobians."""
    x = np.asarray(x, dtype=float)
    J = multiplication_jacobian(cb.base.group, cb.split(x))
    lhs = J @ np.asarray(cb.flow(which)(x))
    rhs = np.asarray(cb.base.flow(which)(cb.reduction(x)))
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class GapReport:
    gap: float
    reduced_gap: float


def quasi_bihamiltonian_gap(cb, x):
    """Gap between the two coupled fields at ``x``, and between their projections.

    The coupled fields differ in general; their images under ``Dm`` must
    coincide because both project to the same bi-Hamiltonian field.
    """
    x = np.asarray(x, dtype=float)
    v0 = hamiltonian_vf(cb.p0N, cb.h0N, x) if cb.base.fault else np.asarray(cb.flow(0)(x))
    v1 = hamiltonian_vf(cb.p1N, cb.h1N, x) if cb.base.fault else np.asarray(cb.flow(1)(x))
    J = multiplication_jacobian(cb.base.group, cb.split(x))
    return GapReport(float(np.max(np.abs(v0 - v1))), float(np.max(np.abs(J @ (v0 - v1)))))


def first_integral_drift(cb, which, start, t_end, dt=1e-3, sample_every=10):
    """Relative drift of every monitored first integral along a coupled flow."""
    cfg = IntegratorConfig("rk4", dt, t_end, sample_every)
    traj = integrate(cb.flow(which), np.asarray(start, dtype=float).reshape(-1), cfg,
                     cb.monitors(which))
    return {name: traj.drift(name) for name in traj.invariants}


@dataclass(frozen=True)
class ReductionRecord:
    model: str
    eta: float
    which: int
    N: int
    seed: int
    residual: float
    tolerance: float = 1e-6
    error: str = ""

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def as_dict(self):
        d = {"model": self.model, "eta": self.eta, "which": self.which, "N": self.N,
             "seed": self.seed, "residual": self.residual, "pass": self.passed}
        if self.error:
            d["error"] = self.error
        return d

    def to_json(self):
        # inf is not valid JSON; report it as null
        d = self.as_dict()
        if not np.isfinite(d["residual"]):
            d["residual"] = None
        return json.dumps(d)


def random_start(cb, seed, low=-1.0, high=1.0):
    return np.random.default_rng(seed).uniform(low, high, cb.dim)


def reduction_experiment(bundle, which, N, seed, t_end=10.0, dt=1e-3, tol=1e-6):
    cb = coupled_model(bundle, N)
    try:
        r = reduction_residual(cb, which, random_start(cb, seed), t_end, dt)
        err = ""
    except IntegrationError as e:
        r, err = float("inf"), str(e)
    return ReductionRecord(bundle.name, bundle.eta, which, N, seed, r, tol, err)

"""Fixed-step RK4 and adaptive Dormand-Prince integration with monitors.

Catalog flows (:class:`pld.models.KernelField`) run the whole RK4 loop in
the flow kernel; any other callable goes through the numpy loop below.
Invariants are monitored, not enforced: RK4 is not a Poisson integrator.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import _backend
from .models import KernelField


class IntegrationError(RuntimeError):
    """Non-finite state; carries the last finite sample."""

    def __init__(self, message, last_time, last_state, partial=None):
        super().__init__(message)
        self.last_time = float(last_time)
        self.last_state = np.asarray(last_state, dtype=float)
        self.partial = partial

    def diagnostic(self):
        return {"error": str(self), "last_time": self.last_time,
                "last_state": [float(v) for v in self.last_state]}


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    dt: float = 1e-3
    t_end: float = 1.0
    sample_every: int = 1
    rtol: float = 1e-9
    atol: float = 1e-12

    def __post_init__(self):
        if self.method not in ("rk4", "dopri5"):
            raise ValueError(f"method must be rk4 or dopri5, got {self.method!r}")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError("sample_every must be a positive integer")
        for name in ("rtol", "atol"):
            v = getattr(self, name)
            if not 0 < v <= 1e-2:
                raise ValueError(f"{name} must lie in (0, 1e-2], got {v}")

    @property
    def n_steps(self):
        return max(1, int(round(self.t_end / self.dt)))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    invariants: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.states.shape[0] != self.times.shape[0]:
            raise ValueError("times and states differ in length")
        for k, v in self.invariants.items():
            if len(v) != len(self.times):
                raise ValueError(f"monitor {k!r} has the wrong length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return self.times.shape[0]

    @property
    def dim(self):
        return self.states.shape[1]

    def drift(self, name):
        """``max |I(t) - I(0)| / |I(0)|``; the denominator is 1 where ``I(0) = 0``."""
        v = np.asarray(self.invariants[name])
        scale = abs(v[0]) if v[0] != 0 else 1.0
        return float(np.max(np.abs(v - v[0])) / scale)

    def max_drift(self):
        return max((self.drift(k) for k in self.invariants), default=0.0)

    def csv_header(self):
        cols = ["t"] + [f"x{i + 1}" for i in range(self.dim)] + list(self.invariants)
        return ",".join(cols)

    def to_csv(self, path):
        cols = [self.times[:, None], self.states] + [np.asarray(v)[:, None] for v in self.invariants.values()]
        np.savetxt(path, np.hstack(cols), fmt="%.17g", delimiter=",",
                   header=self.csv_header(), comments="")


def _safe_eval(m, x):
    try:
        return m.eval(x)
    except OverflowError:
        return math.nan


def _monitor_values(monitors, states):
    with np.errstate(over="ignore", invalid="ignore"):
        return {m.name: np.array([_safe_eval(m, s) for s in states]) for m in monitors}


def _sample_times(cfg):
    n, se = cfg.n_steps, int(cfg.sample_every)
    steps = list(range(0, n + 1, se))
    if steps[-1] != n:
        steps.append(n)
    return np.array(steps, dtype=float) * (cfg.t_end / n)


def _rk4_numpy(f, x0, cfg):
    n, se = cfg.n_steps, int(cfg.sample_every)
    h = cfg.t_end / n
    x = np.array(x0, dtype=float)
    rows = [x.copy()]
    for step in range(1, n + 1):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                k1 = f(x)
                k2 = f(x + 0.5 * h * k1)
                k3 = f(x + 0.5 * h * k2)
                k4 = f(x + h * k3)
                x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        except OverflowError:
            break
        if step % se == 0 or step == n:
            if not np.all(np.isfinite(x)):
                break
            rows.append(x.copy())
    return np.array(rows)


def _rk4_kernel(f, x0, cfg):
    k = _backend.impl
    samples, filled = k.rk4(_backend.MODEL_IDS[f.model], float(f.eta), int(f.which),
                            int(f.copies), np.asarray(x0, dtype=float), float(cfg.t_end / cfg.n_steps),
                            int(cfg.n_steps), int(cfg.sample_every))
    return samples[:filled]


def _dopri5(f, x0, cfg):
    """RK45 sampled on the fixed grid through its dense-output interpolant."""
    grid = _sample_times(cfg)

    def rhs(t, x):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                return f(x)
        except OverflowError:
            return np.full_like(x, np.nan)

    sol = solve_ivp(rhs, (0.0, cfg.t_end), np.asarray(x0, dtype=float), method="RK45",
                    rtol=cfg.rtol, atol=cfg.atol, t_eval=grid)
    t, y = sol.t, sol.y.T
    good = np.all(np.isfinite(y), axis=1)
    if not good.all():
        stop = int(np.argmin(good))
        t, y = t[:stop], y[:stop]
    return t, y, sol.status == 0 and len(t) == len(grid)


def integrate(field_fn, x0, cfg, monitors=()):
    """Integrate ``x' = field_fn(x)`` from ``x0`` over ``[0, cfg.t_end]``.

    Parameters
    ----------
    field_fn : callable
        Vector field.  A :class:`KernelField` runs in the flow kernel.
    x0 : array_like
    cfg : IntegratorConfig
    monitors : sequence of ScalarField
        Evaluated at every sample.

    Raises
    ------
    IntegrationError
        On a non-finite state.  ``err.partial`` holds the trajectory up to
        the last finite sample.
    """
    x0 = np.asarray(x0, dtype=float)
    dim = getattr(field_fn, "dim", None)
    if dim is not None and dim != x0.size:
        raise ValueError(f"field has dimension {dim}, x0 has {x0.size}")
    grid = _sample_times(cfg)
    if cfg.method == "rk4":
        if isinstance(field_fn, KernelField):
            states = _rk4_kernel(field_fn, x0, cfg)
        else:
            probe = np.asarray(field_fn(x0))
            if probe.shape != x0.shape:
                raise ValueError(f"field returned shape {probe.shape} for x0 of shape {x0.shape}")
            states = _rk4_numpy(field_fn, x0, cfg)
        times = grid[:len(states)]
        complete = len(states) == len(grid)
    else:
        times, states, complete = _dopri5(field_fn, x0, cfg)
    traj = Trajectory(times, states, _monitor_values(monitors, states))
    if not complete:
        raise IntegrationError(f"non-finite state after t = {times[-1]:.6g}",
                               times[-1], states[-1], traj)
    return traj


def _point_segment_distance(p, a, b):
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.linalg.norm(p - a)), 0.0
    s = min(1.0, max(0.0, float((p - a) @ d) / dd))
    return float(np.linalg.norm(p - (a + s * d))), s


def closure_metric(traj, settle):
    """Return ``(distance, period_estimate)`` for the return to ``state(0)``.

    The distance is measured to the piecewise-linear path through the
    samples after ``settle``; the period is the time of closest approach.
    Raises ``ValueError`` with fewer than 10 samples after ``settle``.
    """
    t, X = traj.times, traj.states
    idx = np.nonzero(t > settle)[0]
    if idx.size < 10:
        raise ValueError(f"need >= 10 samples after t = {settle}, have {idx.size}")
    x0 = X[0]
    dist = np.linalg.norm(X[idx] - x0, axis=1)
    j = int(np.argmin(dist))
    best, best_t = float(dist[j]), float(t[idx[j]])
    # refine on the two segments around the closest sample
    k = idx[j]
    for a, b in ((k - 1, k), (k, k + 1)):
        if a < idx[0] or b >= len(t):
            continue
        d, s = _point_segment_distance(x0, X[a], X[b])
        if d < best:
            best, best_t = d, float(t[a] + s * (t[b] - t[a]))
    return best, best_t


def _endpoint(f, x0, t_end, dt):
    n = max(1, int(round(t_end / dt)))
    cfg = IntegratorConfig("rk4", t_end / n, t_end, n)
    return integrate(f, x0, cfg).states[-1]


def convergence_order(field_fn, x0, t_end, dt=None):
    """RK4 order estimate ``log2(e(dt) / e(dt/2))`` against a ``dt/8`` reference.

    Returns ``inf`` when both errors vanish (e.g. a zero field).
    """
    dt = t_end / 32 if dt is None else dt
    ref = _endpoint(field_fn, x0, t_end, dt / 8)
    e1 = float(np.linalg.norm(_endpoint(field_fn, x0, t_end, dt) - ref))
    e2 = float(np.linalg.norm(_endpoint(field_fn, x0, t_end, dt / 2) - ref))
    if e2 == 0.0:
        return math.inf
    return math.log2(e1 / e2)

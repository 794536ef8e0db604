"""Closed Lorenz orbits for several deformation parameters, as SVG panels."""

import math
from dataclasses import dataclass

import numpy as np

from . import svg
from .integrate import IntegratorConfig, closure_metric, integrate
from .models import build_lorenz

FIGURE_ETAS = (0.0, math.pi / 4, -math.pi / 4, math.pi / 8, -math.pi / 8)
ETA_LABELS = {0.0: "eta=0", math.pi / 4: "eta=pi/4", -math.pi / 4: "eta=-pi/4",
              math.pi / 8: "eta=pi/8", -math.pi / 8: "eta=-pi/8"}
PANELS = {"A": (1.0, 2.0, 3.0), "B": (1.0, -1.0, 0.5)}
CLOSURE_TOL = 1e-3
SETTLE = 1.0


@dataclass
class Orbit:
    eta: float
    x0: tuple
    times: np.ndarray
    states: np.ndarray
    distance: float
    period: float

    @property
    def returned(self):
        return bool(np.isfinite(self.distance) and self.distance <= CLOSURE_TOL)

    def as_dict(self):
        return {"eta": self.eta, "x0": list(self.x0), "distance": self.distance,
                "period": self.period, "returned": self.returned}


def orbit(eta, x0, x4=1.0, t_end=60.0, dt=1e-3):
    b = build_lorenz(eta)
    start = np.array(list(x0) + [x4])
    traj = integrate(b.flow(0), start, IntegratorConfig("rk4", dt, t_end, 1))
    try:
        d, T = closure_metric(traj, SETTLE)
    except ValueError:
        d, T = math.inf, math.nan
    return Orbit(eta, tuple(x0), traj.times, traj.states, d, T)


def figure1(panels=("A", "B"), t_end=60.0, dt=1e-3, etas=FIGURE_ETAS, plane=(1, 2)):
    """Integrate every orbit; return ``(svg_panels, orbits)``."""
    out, orbits = [], []
    i, j = plane
    for key in panels:
        x0 = PANELS[key]
        curves, notes = [], []
        for eta in etas:
            o = orbit(eta, x0, t_end=t_end, dt=dt)
            orbits.append(o)
            label = ETA_LABELS.get(eta, f"eta={eta:g}")
            curves.append(svg.Curve(o.states[:, i], o.states[:, j], label))
            notes.append(f"{label}: closure {o.distance:.1e}" if o.returned
                         else f"{label}: not returned")
        out.append(svg.Panel(f"x0 = {x0}, x4 = 1", curves, f"x{i + 1}", f"x{j + 1}", notes))
    return out, orbits

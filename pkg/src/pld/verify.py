"""The invariant suite: every structural claim as a residual with a tolerance.

:func:`run_suite` returns a list of :class:`~pld.poisson.ResidualRecord`,
one per (check, structure), each holding the worst value over the sampled
points.  :func:`suite_report` wraps them as a JSON-ready dict.
"""

import math

import numpy as np

from .algebra import (NonAdmissibleCocycle, cocycle_residual, dual_bracket, jacobi_residual_constants,
                      pencil_constants)
from .groups import (frame_bracket_residual, group_axiom_residuals, multiplicativity_residual,
                     product_group)
from .integrate import IntegrationError, IntegratorConfig, integrate
from .models import block_structure, build, coupled_model, multiplication_jacobian
from .poisson import (ResidualRecord, bihamiltonian_residual_at, casimir_residual_at,
                      compatibility_residual_at, gradient_check, jacobi_residual_at,
                      numerical_rank, poisson_bracket, random_points, worst_over)
from .reduction import quasi_bihamiltonian_gap, reduction_residual, tangency_residual

TOL = {
    "antisymmetry": 0.0,
    "jacobi": 1e-9,
    "compatibility": 1e-9,
    "constants-jacobi": 1e-12,
    "cocycle": 1e-13,
    "dual-bracket": 1e-5,
    "casimir": 1e-10,
    "bihamiltonian": 1e-10,
    "involution": 1e-10,
    "gradient": 1e-6,
    "rank": 0.0,
    "group-axioms": 1e-12,
    "multiplicativity": 1e-10,
    "multiplicativity-fd": 1e-6,
    "coupled-casimir": 1e-9,
    "coupled-involution": 1e-9,
    "tangency": 1e-8,
    "reduction": 1e-6,
    "reduced-gap": 1e-10,
}

ALPHAS = (-1.0, 0.0, 0.5, 1.0)
PENCIL_ALPHAS = (-2.0, -1.0, 0.0, 0.5, 1.0, 2.0)


def _record(check, structure, value, point=(), tol=None):
    tol = TOL[check] if tol is None else tol
    value = float(value) if np.isfinite(value) else math.inf
    return ResidualRecord(check, structure, list(np.asarray(point, dtype=float).ravel()), value, tol)


def _worst(check, structure, points, fn, tol=None):
    value, pt = worst_over(points, fn)
    return _record(check, structure, value, pt if pt is not None else (), tol)


def algebra_checks(b):
    out = []
    lab = f"{b.name}(eta={b.eta:g})"
    for a in PENCIL_ALPHAS:
        sc = pencil_constants(b.pencil, a)
        out.append(_record("constants-jacobi", f"{lab}:lie_alpha={a:g}", jacobi_residual_constants(sc)))
    for a in ALPHAS:
        sc = pencil_constants(b.pencil, a)
        out.append(_record("cocycle", f"{lab}:psi vs lie_alpha={a:g}", cocycle_residual(sc, b.cocycle)))
    try:
        dual = dual_bracket(b.cocycle)
        x = np.linspace(-0.7, 0.9, b.dim)
        val = frame_bracket_residual(b.group, dual, x)
    except NonAdmissibleCocycle:
        x, val = (), math.inf
    out.append(_record("dual-bracket", f"{lab}:dual(psi) vs group frames", val, x))
    return out


def poisson_checks(b, points):
    out = []
    lab = f"{b.name}(eta={b.eta:g})"
    structures = [b.p0, b.p1] + [b.pencil_structure(a) for a in ALPHAS if a not in (0.0, 1.0)]
    for P in structures:
        out.append(_worst("antisymmetry", P.name, points,
                          lambda x: float(np.max(np.abs(P.bivector(x) + P.bivector(x).T)))))
        out.append(_worst("jacobi", P.name, points, lambda x: jacobi_residual_at(P, x)))
    out.append(_worst("compatibility", f"{lab}:[p0,p1]", points,
                      lambda x: compatibility_residual_at(b.p0, b.p1, x)))
    for P in (b.p0, b.p1):
        for C in P.casimirs:
            out.append(_worst("casimir", f"{P.name}:{C.name}", points,
                              lambda x: casimir_residual_at(P, C, x)))
        out.append(_worst("involution", f"{P.name}:{{H0,H1}}", points,
                          lambda x: abs(poisson_bracket(P, b.h0, b.h1, x))))
        out.append(_worst("rank", P.name, points,
                          lambda x: abs(numerical_rank(P, x) - P.rank_generic)))
    out.append(_worst("bihamiltonian", lab, points,
                      lambda x: bihamiltonian_residual_at(b.bihamiltonian, x)))
    for h in (b.h0, b.h1):
        out.append(_worst("gradient", f"{lab}:{h.name}", points, lambda x: gradient_check(h, x)))
    return out


def group_checks(b, points, n_pairs=100):
    out = []
    lab = f"{b.name}(eta={b.eta:g})"
    n = b.dim
    pts = points[:n_pairs]
    G2 = product_group(b.group, 2)
    rng = np.random.default_rng(7)
    for G, dim in ((b.group, n), (G2, 2 * n)):
        trip = rng.uniform(-2, 2, (len(pts), 3, dim))
        worst = max(max(group_axiom_residuals(G, *t).values()) for t in trip)
        out.append(_record("group-axioms", G.name, worst, trip[0, 0]))
    for P in (b.p0, b.p1):
        P2 = block_structure(P, 2)
        for Gx, Px, d in ((b.group, P, n), (G2, P2, 2 * n)):
            pairs = rng.uniform(-2, 2, (len(pts), 2, d))
            an = max(multiplicativity_residual(Gx, Px, g, h) for g, h in pairs)
            fd = max(multiplicativity_residual(Gx, Px, g, h, analytic=False) for g, h in pairs)
            out.append(_record("multiplicativity", f"{Px.name} on {Gx.name}", an, pairs[0, 0]))
            out.append(_record("multiplicativity-fd", f"{Px.name} on {Gx.name}", fd, pairs[0, 0]))
    return out


def projected_field_norm(cb, P, H, x):
    """``|| Dm . P(x) grad H(x) ||_inf``."""
    J = multiplication_jacobian(cb.base.group, cb.split(x))
    return float(np.max(np.abs(J @ P.bivector(x) @ H.grad(x))))


def coupled_checks(b, seed, n_points=20, N=2, t_end=2.0, dt=1e-3):
    """Casimirs, involution, tangency and a short reduction run on G^N."""
    out = []
    cb = coupled_model(b, N)
    lab = f"{b.name}^{N}(eta={b.eta:g})"
    pts = np.random.default_rng(seed + 1).uniform(-1, 1, (n_points, cb.dim))
    # H0N is not a Casimir of p1N on G^N; only its projected field vanishes
    for P, H in ((cb.p1N, cb.h0N), (cb.p0N, cb.h1N)):
        out.append(_worst("coupled-casimir", f"{lab}:Dm X[{H.name}] under {P.name}", pts,
                          lambda x: projected_field_norm(cb, P, H, x)))
    for P in (cb.p0N, cb.p1N):
        for C in P.casimirs:
            out.append(_worst("coupled-casimir", f"{P.name}:{C.name}", pts,
                              lambda x: casimir_residual_at(P, C, x)))
    for P in (cb.p0N, cb.p1N):
        out.append(_worst("coupled-involution", f"{P.name}:{{H0N,H1N}}", pts,
                          lambda x: abs(poisson_bracket(P, cb.h0N, cb.h1N, x))))
    for which in (0, 1):
        out.append(_worst("tangency", f"{lab}:which={which}", pts,
                          lambda x: tangency_residual(cb, which, x)))
    out.append(_worst("reduced-gap", f"{lab}:Dm(X0N - X1N)", pts,
                      lambda x: quasi_bihamiltonian_gap(cb, x).reduced_gap))
    # short horizon from a small start keeps every copy bounded
    start = 0.5 * pts[0]
    for which in (0, 1):
        try:
            r = reduction_residual(cb, which, start, t_end, dt, sample_every=10)
        except IntegrationError:
            r = math.inf
        out.append(_record("reduction", f"{lab}:which={which}", r, start))
    return out


def run_suite(system, etas, seed=42, n_points=100, fault=None, coupled=True):
    records = []
    for eta in etas:
        b = build(system, eta, fault)
        points = random_points(b.dim, n_points, seed)
        records += algebra_checks(b)
        records += poisson_checks(b, points)
        records += group_checks(b, points)
        if coupled:
            records += coupled_checks(b, seed)
    return records


def suite_report(system, etas, seed, records, fault=None):
    failures = [r.as_dict() for r in records if not r.passed]
    return {"system": system, "etas": [float(e) for e in etas], "seed": seed, "fault": fault,
            "n_checks": len(records), "n_failed": len(failures), "pass": not failures,
            "failures": failures, "records": [_json_safe(r.as_dict()) for r in records]}


def _json_safe(d):
    if not np.isfinite(d["value"]):
        d = dict(d, value=None)
    return d


# Limits and dynamics

def loglog_slope(xs, ys):
    xs, ys = np.log10(np.asarray(xs, dtype=float)), np.log10(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


DEFORMATION_ETAS = (1e-1, 1e-2, 1e-3)


def deformation_slopes(system, x=None, etas=DEFORMATION_ETAS, t_end=10.0, dt=1e-3):
    """Log-log slopes of bracket, Casimir and trajectory deviations against eta.

    Bracket and Casimir deviations are maxima over both structures
    (resp. both Hamiltonians) since some are eta-independent.
    """
    b0 = build(system, 0.0)
    if x is None:
        x = random_points(b0.dim, 1, 42)[0] * 0.5
    x = np.asarray(x, dtype=float)
    x0 = {"lorenz": np.array([1.0, 2.0, 3.0, 1.0]), "euler": np.array([0.3, 0.5, -0.2])}[system]
    cfg = IntegratorConfig("rk4", dt, t_end, 10)
    ref = integrate(b0.flow(0), x0, cfg).states
    brk, cas, trj = [], [], []
    for eta in etas:
        b = build(system, eta)
        brk.append(max(np.max(np.abs(b.p0.bivector(x) - b0.p0.bivector(x))),
                       np.max(np.abs(b.p1.bivector(x) - b0.p1.bivector(x)))))
        cas.append(max(abs(b.h0.eval(x) - b0.h0.eval(x)), abs(b.h1.eval(x) - b0.h1.eval(x))))
        traj = integrate(b.flow(0), x0, cfg).states
        trj.append(np.max(np.linalg.norm(traj - ref, axis=1)))
    return {"bracket": loglog_slope(etas, brk), "casimir": loglog_slope(etas, cas),
            "trajectory": loglog_slope(etas, trj)}


def dynamics_checks(system, eta, x0, t_end=50.0, dt=1e-3, agree_t=10.0):
    """Max monitor drift over ``[0, t_end]`` and the (p0,h0)/(p1,h1) state gap."""
    b = build(system, eta)
    traj = integrate(b.flow(0), x0, IntegratorConfig("rk4", dt, t_end, 10), b.monitors())
    cfg = IntegratorConfig("rk4", dt, agree_t, 1)
    a = integrate(b.flow(0), x0, cfg).states
    c = integrate(b.flow(1), x0, cfg).states
    return {"drift": traj.max_drift(),
            "drifts": {k: traj.drift(k) for k in traj.invariants},
            "flow_gap": float(np.max(np.abs(a - c)))}

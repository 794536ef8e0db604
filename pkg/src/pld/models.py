"""Catalog of the two deformed bi-Hamiltonian families and their couplings.

``build_lorenz`` works on R^4 (the integrable Lorenz limit) and
``build_euler`` on R^3 (the Euler top).  Both return a :class:`ModelBundle`
holding the undeformed pencil, the cocycle, the group law, the two
multiplicative brackets, the Hamiltonians and the Casimirs.  At
``eta == 0`` every deformed expression collapses to the linear data.

``coupled_model`` builds the N-fold system on G^N: block-diagonal
product brackets and the Hamiltonians composed with iterated group
multiplication.  Vector fields are generated from these, never typed in.

Faults
------
``fault=<name>`` replaces one sign or term with a wrong one.  The
verification suite is expected to flag every fault in :data:`FAULTS`.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend
from .algebra import CocycleMap, LiePencil, StructureConstants, pencil_constants
from .deform import cos_kernel, cosh_kernel, exp_kernel, sin_kernel, sinh_kernel
from .groups import book_group, product_group, se2_like
from .poisson import (BiHamiltonianSystem, HamiltonianSystem, PoissonStructure, ScalarField,
                      blend_structure, coordinate_field, hamiltonian_vf,
                      linear_poisson_from_constants)

FAULTS = {
    "lorenz": {
        "sign-flip-pi13-p0": "p0 entry pi_13 = -x2/2 instead of +x2/2",
        "sign-flip-pi23": "p1 entry pi_23 = +x1/2 instead of -x1/2",
        "sign-flip-cocycle": "psi(X2) = +eta X3^X4 instead of -eta X3^X4",
    },
    "euler": {
        "sign-flip-eta-pi23-p0": "p0 entry pi_23 uses +eta(x2^2+x3^2)/2",
        "sign-flip-pi13-p1": "p1 entry pi_13 = -x3 instead of +x3",
        "sign-flip-cocycle": "psi(X2) = -eta X2^X1 instead of +eta X2^X1",
    },
}


class UnknownFault(ValueError):
    pass


def _check_fault(model, fault):
    if fault is not None and fault not in FAULTS[model]:
        raise UnknownFault(f"unknown fault {fault!r} for {model}; choose from {sorted(FAULTS[model])}")


def _bivector(n, entries):
    """Antisymmetric matrix from ``{(i, j): value}`` with i < j."""
    m = np.zeros((n, n))
    for (i, j), v in entries.items():
        m[i, j] = v
        m[j, i] = -v
    return m


def _partials(n, dentries):
    """``d[k] = d pi / d x_k`` from ``{(i, j): gradient vector}``."""
    d = np.zeros((n, n, n))
    for (i, j), g in dentries.items():
        d[:, i, j] = g
        d[:, j, i] = -np.asarray(g)
    return d


@dataclass(frozen=True)
class KernelField:
    """Hamiltonian vector field of a catalog flow, evaluated by the flow kernels.

    ``copies > 1`` is the coupled flow on G^copies.  The integrator
    recognises this type and runs the whole RK4 loop in the kernel.
    """
    model: str
    eta: float
    which: int
    copies: int = 1

    @property
    def dim(self):
        return _backend.MODEL_DIMS[self.model] * self.copies

    def __call__(self, x):
        return _backend.impl.field(_backend.MODEL_IDS[self.model], float(self.eta),
                                   int(self.which), int(self.copies), x)


@dataclass(frozen=True)
class ModelBundle:
    name: str
    eta: float
    sc0: StructureConstants
    sc1: StructureConstants
    cocycle: CocycleMap
    group: object
    p0: PoissonStructure
    p1: PoissonStructure
    h0: ScalarField
    h1: ScalarField
    casimirs0: tuple
    casimirs1: tuple
    fault: Optional[str] = None
    bihamiltonian: BiHamiltonianSystem = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bihamiltonian", BiHamiltonianSystem(
            HamiltonianSystem(self.p0, self.h0), HamiltonianSystem(self.p1, self.h1)))

    @property
    def dim(self):
        return self.group.dim

    @property
    def pencil(self):
        return LiePencil(self.sc0, self.sc1)

    def structure(self, which):
        return (self.p0, self.p1)[which]

    def hamiltonian(self, which):
        return (self.h0, self.h1)[which]

    def flow(self, which):
        """Vector field of ``(p_which, h_which)``; kernel-backed unless faulted."""
        if self.fault is None:
            return KernelField(self.name, self.eta, which)
        P, H = self.structure(which), self.hamiltonian(which)
        return lambda x: hamiltonian_vf(P, H, x)

    def monitors(self):
        """Hamiltonians followed by the Casimirs not already listed."""
        out = [self.h0, self.h1]
        for c in self.casimirs0 + self.casimirs1:
            if c.name not in {m.name for m in out}:
                out.append(c)
        return out

    def pencil_structure(self, alpha):
        """Deformed pencil ``(1 - alpha) p0 + alpha p1``."""
        return blend_structure(self.p0, self.p1, alpha, name=f"{self.name}:p_alpha={alpha:g}")

    def linear_pencil(self, alpha):
        return linear_poisson_from_constants(pencil_constants(self.pencil, alpha),
                                             name=f"{self.name}:lie_alpha={alpha:g}")


# Lorenz (R^4)

def lorenz_constants():
    sc0 = StructureConstants.from_brackets(4, {(0, 1): {2: -0.5}, (0, 2): {1: 0.5}})
    sc1 = StructureConstants.from_brackets(4, {(0, 1): {3: 0.25}, (1, 2): {0: -0.5}})
    return sc0, sc1


def lorenz_cocycle(eta, fault=None):
    s2 = 1.0 if fault == "sign-flip-cocycle" else -1.0
    return CocycleMap.from_wedges(4, {1: {(2, 3): s2 * eta}, 2: {(1, 3): eta}})


def build_lorenz(eta, fault=None):
    """Deformed Lorenz bundle on R^4.

    ``p0`` is unchanged by the deformation; ``p1`` picks up the kernels
    ``S(x4)``, ``V(x4)``.  ``x4`` is a Casimir of both brackets.
    """
    _check_fault("lorenz", fault)
    eta = float(eta)
    sc0, sc1 = lorenz_constants()
    s13 = -1.0 if fault == "sign-flip-pi13-p0" else 1.0
    s23 = 1.0 if fault == "sign-flip-pi23" else -1.0

    def p0_biv(x):
        return _bivector(4, {(0, 1): -0.5 * x[2], (0, 2): s13 * 0.5 * x[1]})

    def p0_d(x):
        return _partials(4, {(0, 1): (0, 0, -0.5, 0), (0, 2): (0, s13 * 0.5, 0, 0)})

    def p1_biv(x):
        return _bivector(4, {(0, 1): 0.25 * sin_kernel(x[3], eta),
                             (0, 2): 0.25 * cos_kernel(x[3], eta),
                             (1, 2): s23 * 0.5 * x[0]})

    def p1_d(x):
        c, s = math.cos(eta * x[3]), math.sin(eta * x[3])
        return _partials(4, {(0, 1): (0, 0, 0, 0.25 * c), (0, 2): (0, 0, 0, -0.25 * s),
                             (1, 2): (s23 * 0.5, 0, 0, 0)})

    def h0_eval(x):
        return float(sin_kernel(x[3], eta) * x[2] - cos_kernel(x[3], eta) * x[1] - x[0] ** 2)

    def h0_grad(x):
        c, s = math.cos(eta * x[3]), math.sin(eta * x[3])
        return np.array([-2.0 * x[0], -float(cos_kernel(x[3], eta)),
                         float(sin_kernel(x[3], eta)), x[2] * c + x[1] * s])

    def h1_eval(x):
        return float(x[1] ** 2 + x[2] ** 2)

    def h1_grad(x):
        return np.array([0.0, 2.0 * x[1], 2.0 * x[2], 0.0])

    h0 = ScalarField(4, h0_eval, h0_grad, "H0")
    h1 = ScalarField(4, h1_eval, h1_grad, "H1")
    x4 = coordinate_field(4, 3, "C_x4")
    faulty = fault is not None
    p0 = PoissonStructure(4, p0_biv, None if faulty else p0_d, (h1, x4), 2, "lorenz:p0")
    p1 = PoissonStructure(4, p1_biv, None if faulty else p1_d, (h0, x4), 2, "lorenz:p1")
    return ModelBundle("lorenz", eta, sc0, sc1, lorenz_cocycle(eta, fault), se2_like(eta),
                       p0, p1, h0, h1, (h1, x4), (h0, x4), fault)


def lorenz_coordinate_change(p):
    """Conservative Lorenz-limit coordinates ``(x, y, z)`` to ``(x1, x2, x3)``."""
    x, y, z = np.asarray(p, dtype=float)
    return np.array([x, 2.0 * y, 2.0 * z - 2.0])


def lorenz_coordinate_change_inverse(q):
    x1, x2, x3 = np.asarray(q, dtype=float)
    return np.array([x1, x2 / 2.0, (x3 + 2.0) / 2.0])


# Euler top (R^3)

def euler_constants():
    sc0 = StructureConstants.from_brackets(3, {(0, 1): {2: -1.0}, (0, 2): {1: 1.0}, (1, 2): {0: -1.0}})
    sc1 = StructureConstants.from_brackets(3, {(0, 1): {1: -1.0}, (0, 2): {2: 1.0}, (1, 2): {0: -2.0}})
    return sc0, sc1


def euler_cocycle(eta, fault=None):
    s2 = -1.0 if fault == "sign-flip-cocycle" else 1.0
    return CocycleMap.from_wedges(3, {1: {(1, 0): s2 * eta}, 2: {(2, 0): eta}})


def build_euler(eta, fault=None):
    """Deformed Euler-top bundle on R^3 (group: the book group)."""
    _check_fault("euler", fault)
    eta = float(eta)
    sc0, sc1 = euler_constants()
    se = 1.0 if fault == "sign-flip-eta-pi23-p0" else -1.0
    s13 = -1.0 if fault == "sign-flip-pi13-p1" else 1.0

    def p0_biv(x):
        return _bivector(3, {(0, 1): -x[2], (0, 2): x[1],
                             (1, 2): se * 0.5 * eta * (x[1] ** 2 + x[2] ** 2) + exp_kernel(x[0], eta)})

    def p0_d(x):
        return _partials(3, {(0, 1): (0, 0, -1.0), (0, 2): (0, 1.0, 0),
                             (1, 2): (-math.exp(-2.0 * eta * x[0]), -eta * x[1], -eta * x[2])})

    def p1_biv(x):
        return _bivector(3, {(0, 1): -x[1], (0, 2): s13 * x[2],
                             (1, 2): -eta * x[1] * x[2] + 2.0 * exp_kernel(x[0], eta)})

    def p1_d(x):
        return _partials(3, {(0, 1): (0, -1.0, 0), (0, 2): (0, 0, 1.0),
                             (1, 2): (-2.0 * math.exp(-2.0 * eta * x[0]), -eta * x[2], -eta * x[1])})

    def h0_eval(x):
        return float(math.exp(eta * x[0]) * x[1] * x[2] + cosh_kernel(x[0], eta))

    def h0_grad(x):
        e = math.exp(eta * x[0])
        return np.array([eta * e * x[1] * x[2] + float(sinh_kernel(x[0], eta)), e * x[2], e * x[1]])

    def h1_eval(x):
        return float(-0.5 * math.exp(eta * x[0]) * (x[1] ** 2 + x[2] ** 2) - 0.5 * cosh_kernel(x[0], eta))

    def h1_grad(x):
        e = math.exp(eta * x[0])
        return np.array([-0.5 * eta * e * (x[1] ** 2 + x[2] ** 2) - 0.5 * float(sinh_kernel(x[0], eta)),
                         -e * x[1], -e * x[2]])

    h0 = ScalarField(3, h0_eval, h0_grad, "H0")
    h1 = ScalarField(3, h1_eval, h1_grad, "H1")
    faulty = fault is not None
    p0 = PoissonStructure(3, p0_biv, None if faulty else p0_d, (h1,), 2, "euler:p0")
    p1 = PoissonStructure(3, p1_biv, None if faulty else p1_d, (h0,), 2, "euler:p1")
    return ModelBundle("euler", eta, sc0, sc1, euler_cocycle(eta, fault), book_group(eta),
                       p0, p1, h0, h1, (h1,), (h0,), fault)


BUILDERS = {"lorenz": build_lorenz, "euler": build_euler}


def build(name, eta, fault=None):
    try:
        builder = BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown system {name!r}; choose from {sorted(BUILDERS)}") from None
    return builder(eta, fault)


# Coupled systems on G^N

def fold_multiply(G, parts):
    """``g_1 . g_2 . ... . g_N`` evaluated left to right."""
    parts = [np.asarray(p, dtype=float) for p in parts]
    out = parts[0]
    for p in parts[1:]:
        out = G.multiply(out, p)
    return out


def multiplication_jacobian(G, parts):
    """Jacobian of ``(g_1, ..., g_N) -> g_1 ... g_N``, shape ``(n, N n)``.

    The block for ``g_k`` is ``D1(P_k, S_{k+1}) D2(P_{k-1}, g_k)`` with
    prefix products ``P`` and suffix products ``S``.
    """
    parts = [np.asarray(p, dtype=float) for p in parts]
    N, n = len(parts), G.dim
    e = np.asarray(G.identity, dtype=float)
    prefix = [e]
    for p in parts:
        prefix.append(G.multiply(prefix[-1], p))
    suffix = [e] * (N + 1)
    for k in range(N - 1, -1, -1):
        suffix[k] = G.multiply(parts[k], suffix[k + 1])
    blocks = []
    for k in range(N):
        d1 = G.jac_first(prefix[k + 1], suffix[k + 1])
        d2 = G.jac_second(prefix[k], parts[k])
        blocks.append(d1 @ d2)
    return np.hstack(blocks).reshape(n, N * n)


def block_structure(P, copies, name=None):
    """``P + P + ... + P`` on the product: block-diagonal bivector."""
    n = P.dim

    def bivector(x):
        out = np.zeros((copies * n, copies * n))
        for k in range(copies):
            s = slice(k * n, (k + 1) * n)
            out[s, s] = P.bivector(x[s])
        return out

    def partials(x):
        out = np.zeros((copies * n,) * 3)
        for k in range(copies):
            s = slice(k * n, (k + 1) * n)
            out[s, s, s] = P.derivatives(x[s])
        return out

    return PoissonStructure(copies * n, bivector, partials, (), copies * P.rank_generic,
                            name or f"{P.name}^{copies}")


def pullback(f, G, copies, name=None):
    """``f o (g_1 ... g_N)`` with its chain-rule gradient."""
    n = G.dim

    def ev(x):
        return f.eval(fold_multiply(G, np.asarray(x, dtype=float).reshape(copies, n)))

    def grad(x):
        parts = np.asarray(x, dtype=float).reshape(copies, n)
        return multiplication_jacobian(G, parts).T @ f.grad(fold_multiply(G, parts))

    return ScalarField(copies * n, ev, grad, name or f"{f.name}.m")


def on_copy(f, k, n, copies, name=None):
    """``f o pr_k``."""
    s = slice(k * n, (k + 1) * n)

    def ev(x):
        return f.eval(np.asarray(x, dtype=float)[s])

    def grad(x):
        out = np.zeros(copies * n)
        out[s] = f.grad(np.asarray(x, dtype=float)[s])
        return out

    return ScalarField(copies * n, ev, grad, name or f"{f.name}.pr{k + 1}")


@dataclass(frozen=True)
class CoupledBundle:
    base: ModelBundle
    copies: int
    group: object
    p0N: PoissonStructure
    p1N: PoissonStructure
    h0N: ScalarField
    h1N: ScalarField
    casimirs0N: tuple
    casimirs1N: tuple

    @property
    def dim(self):
        return self.group.dim

    def split(self, x):
        return np.asarray(x, dtype=float).reshape(self.copies, self.base.dim)

    def reduction(self, x):
        return fold_multiply(self.base.group, self.split(x))

    def structure(self, which):
        return (self.p0N, self.p1N)[which]

    def hamiltonian(self, which):
        return (self.h0N, self.h1N)[which]

    def flow(self, which):
        b = self.base
        if b.fault is None:
            return KernelField(b.name, b.eta, which, self.copies)
        P, H = self.structure(which), self.hamiltonian(which)
        return lambda x: hamiltonian_vf(P, H, x)

    def generic_flow(self, which):
        """Same field as :meth:`flow`, through the numpy chain rule."""
        P, H = self.structure(which), self.hamiltonian(which)
        return lambda x: hamiltonian_vf(P, H, x)

    def monitors(self, which):
        """First integrals of the ``which`` coupled flow.

        Both coproduct Hamiltonians, pullbacks of the base Casimirs through
        the multiplication, and the per-copy Casimirs of ``p_which``.
        """
        b = self.base
        out = [self.h0N, self.h1N]
        seen = {b.h0.name, b.h1.name}
        for c in b.casimirs0 + b.casimirs1:
            if c.name not in seen:
                seen.add(c.name)
                out.append(pullback(c, b.group, self.copies))
        out.extend((self.casimirs0N, self.casimirs1N)[which])
        return out


def coupled_model(bundle, N=2):
    """N-fold coupled bundle on G^N, reducing through ``g_1 ... g_N``."""
    if int(N) != N or N < 2:
        raise ValueError(f"need at least two copies, got {N!r}")
    N = int(N)
    b = bundle
    n = b.dim
    G = product_group(b.group, N)
    p0N = block_structure(b.p0, N, f"{b.p0.name}^{N}")
    p1N = block_structure(b.p1, N, f"{b.p1.name}^{N}")
    cas0 = tuple(on_copy(c, k, n, N) for c in b.casimirs0 for k in range(N))
    cas1 = tuple(on_copy(c, k, n, N) for c in b.casimirs1 for k in range(N))
    p0N = PoissonStructure(p0N.dim, p0N.bivector, p0N.partials, cas0, p0N.rank_generic, p0N.name)
    p1N = PoissonStructure(p1N.dim, p1N.bivector, p1N.partials, cas1, p1N.rank_generic, p1N.name)
    h0N = pullback(b.h0, b.group, N, "H0N")
    h1N = pullback(b.h1, b.group, N, "H1N")
    return CoupledBundle(b, N, G, p0N, p1N, h0N, h1N, cas0, cas1)


# Chart (g_1, ..., g_N) -> (g_1 ... g_N, g_2, ..., g_N)

def to_product_chart(cb, x):
    parts = cb.split(x)
    return np.concatenate([cb.reduction(x)] + list(parts[1:]))


def from_product_chart(cb, w):
    G = cb.base.group
    parts = np.asarray(w, dtype=float).reshape(cb.copies, cb.base.dim)
    rest = fold_multiply(G, parts[1:])
    first = G.multiply(parts[0], G.inverse(rest))
    return np.concatenate([first] + list(parts[1:]))


def chart_jacobian(cb, x):
    n, N = cb.base.dim, cb.copies
    J = np.eye(N * n)
    J[:n, :] = multiplication_jacobian(cb.base.group, cb.split(x))
    return J


def pushforward_structure(cb, P, name=None):
    """Bivector of ``P`` (on the ``g`` chart) expressed in ``(x, g_2, ..., g_N)``."""

    def bivector(w):
        x = from_product_chart(cb, w)
        J = chart_jacobian(cb, x)
        return J @ P.bivector(x) @ J.T

    return PoissonStructure(P.dim, bivector, None, (), P.rank_generic, name or f"{P.name}@chart")


def pushforward_field(cb, f, name=None):
    def ev(w):
        return f.eval(from_product_chart(cb, w))

    def grad(w):
        x = from_product_chart(cb, w)
        # df/dw = df/dx . (dw/dx)^-1
        return np.linalg.solve(chart_jacobian(cb, x).T, f.grad(x))

    return ScalarField(f.dim, ev, grad, name or f"{f.name}@chart")


# Model cards

_CARDS = {
    "lorenz": {
        "p0": {"pi12": "-x3/2", "pi13": "x2/2"},
        "p1": {"pi12": "sin(eta*x4)/(4*eta)", "pi13": "(cos(eta*x4)-1)/(4*eta)", "pi23": "-x1/2"},
        "h0": "sin(eta*x4)/eta*x3 - (cos(eta*x4)-1)/eta*x2 - x1^2",
        "h1": "x2^2 + x3^2",
        "casimirs0": ["x2^2 + x3^2", "x4"],
        "casimirs1": ["sin(eta*x4)/eta*x3 - (cos(eta*x4)-1)/eta*x2 - x1^2", "x4"],
    },
    "euler": {
        "p0": {"pi12": "-x3", "pi13": "x2",
               "pi23": "-eta*(x2^2+x3^2)/2 + (exp(-2*eta*x1)-1)/(2*eta)"},
        "p1": {"pi12": "-x2", "pi13": "x3", "pi23": "-eta*x2*x3 + (exp(-2*eta*x1)-1)/eta"},
        "h0": "exp(eta*x1)*x2*x3 + (exp(eta*x1)+exp(-eta*x1)-2)/eta^2",
        "h1": "-exp(eta*x1)*(x2^2+x3^2)/2 - (exp(eta*x1)+exp(-eta*x1)-2)/(2*eta^2)",
        "casimirs0": ["-exp(eta*x1)*(x2^2+x3^2)/2 - (exp(eta*x1)+exp(-eta*x1)-2)/(2*eta^2)"],
        "casimirs1": ["exp(eta*x1)*x2*x3 + (exp(eta*x1)+exp(-eta*x1)-2)/eta^2"],
    },
}


def model_card(bundle):
    """JSON descriptor: name, eta, nonzero bracket entries, Hamiltonians, Casimirs."""
    card = dict(_CARDS[bundle.name])
    return json.dumps({"name": bundle.name, "eta": bundle.eta, "dim": bundle.dim,
                       "fault": bundle.fault, **card}, indent=2)

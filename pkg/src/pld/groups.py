"""Lie groups diffeomorphic to R^n given by explicit group laws.

``multiply``, ``inverse`` and the translation Jacobians of the catalog
groups are closed-form; a :class:`GroupLaw` without analytic Jacobians
falls back to central finite differences.  Frames are returned as
matrices whose columns are the invariant vector fields.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

FD_STEP = 1e-6
EXP_DT = 1e-3


@dataclass(frozen=True)
class GroupLaw:
    dim: int
    multiply: Callable
    identity: np.ndarray
    inverse: Callable
    adjoint: Optional[Callable] = None
    left_inv_frame: Optional[Callable] = None
    right_inv_frame: Optional[Callable] = None
    # d(a.b)/da and d(a.b)/db at (a, b)
    jac_first: Optional[Callable] = None
    jac_second: Optional[Callable] = None
    name: str = "G"


def multiply(G, g, h):
    return G.multiply(np.asarray(g, dtype=float), np.asarray(h, dtype=float))


def inverse(G, g):
    return G.inverse(np.asarray(g, dtype=float))


def _fd_jacobian(fn, x, step=FD_STEP):
    n = x.size
    cols = []
    for k in range(n):
        h = step * max(1.0, abs(x[k]))
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        cols.append((fn(xp) - fn(xm)) / (xp[k] - xm[k]))
    return np.column_stack(cols)


def fd_translation_jacobians(G, g, h):
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    jr = _fd_jacobian(lambda a: G.multiply(a, h), g)
    jl = _fd_jacobian(lambda b: G.multiply(g, b), h)
    return jr, jl


def translation_jacobians(G, g, h, analytic=True):
    """``(J_r, J_l)``: Jacobians of ``a -> a.h`` at ``g`` and ``b -> g.b`` at ``h``."""
    if analytic and G.jac_first is not None and G.jac_second is not None:
        g = np.asarray(g, dtype=float)
        h = np.asarray(h, dtype=float)
        return G.jac_first(g, h), G.jac_second(g, h)
    return fd_translation_jacobians(G, g, h)


def multiplicativity_residual(G, P, g, h, analytic=True):
    """``|| pi(g.h) - J_r pi(g) J_r^T - J_l pi(h) J_l^T ||_inf``."""
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    jr, jl = translation_jacobians(G, g, h, analytic=analytic)
    r = P.bivector(G.multiply(g, h)) - jr @ P.bivector(g) @ jr.T - jl @ P.bivector(h) @ jl.T
    return float(np.max(np.abs(r)))


def adjoint(G, g, X):
    if G.adjoint is None:
        raise NotImplementedError(f"no adjoint table for {G.name}")
    return G.adjoint(np.asarray(g, dtype=float), np.asarray(X, dtype=float))


def invariant_frame(G, side, x):
    x = np.asarray(x, dtype=float)
    if side == "left":
        table = G.left_inv_frame
    elif side == "right":
        table = G.right_inv_frame
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if table is None:
        raise NotImplementedError(f"no {side} frame table for {G.name}")
    return table(x)


def translated_frame(G, side, x):
    """Frame obtained by translating the identity basis: ``T_e l_x`` or ``T_e r_x``."""
    x = np.asarray(x, dtype=float)
    e = np.asarray(G.identity, dtype=float)
    if side == "left":
        return translation_jacobians(G, x, e)[1]
    return translation_jacobians(G, e, x)[0]


def group_exp(G, X, dt=EXP_DT):
    """Time-one flow from the identity of the left-invariant extension of ``X`` (RK4)."""
    X = np.asarray(X, dtype=float)
    n_steps = max(1, int(round(1.0 / dt)))
    h = 1.0 / n_steps

    def f(x):
        return invariant_frame(G, "left", x) @ X

    x = np.array(G.identity, dtype=float)
    for _ in range(n_steps):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def adjoint_by_conjugation(G, g, X, t=1e-3):
    """``d/dt g exp(tX) g^-1`` at ``t = 0`` by central differences."""
    g = np.asarray(g, dtype=float)
    X = np.asarray(X, dtype=float)
    gi = G.inverse(g)
    plus = G.multiply(G.multiply(g, group_exp(G, t * X)), gi)
    minus = G.multiply(G.multiply(g, group_exp(G, -t * X)), gi)
    return (plus - minus) / (2 * t)


def frame_bracket_residual(G, sc, x, step=1e-5):
    """Max-abs of ``[L_a, L_b] - sum_k c_ab^k L_k`` for the left-invariant frame at ``x``.

    The vector-field bracket is ``[A, B] = DB.A - DA.B`` with the frame
    derivative taken by central differences.
    """
    x = np.asarray(x, dtype=float)
    n = G.dim
    frame = invariant_frame(G, "left", x)
    dframe = np.empty((n, n, n))  # dframe[k] = d frame / d x_k
    for k in range(n):
        e = np.zeros(n)
        e[k] = step
        dframe[k] = (invariant_frame(G, "left", x + e) - invariant_frame(G, "left", x - e)) / (2 * step)
    worst = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            lie = (np.einsum("k,ki->i", frame[:, a], dframe[:, :, b])
                   - np.einsum("k,ki->i", frame[:, b], dframe[:, :, a]))
            expected = frame @ sc.c[a, b]
            worst = max(worst, float(np.max(np.abs(lie - expected))))
    return worst


def product_group(G, copies=2):
    """Direct product ``G^copies`` acting componentwise on R^(copies * n)."""
    if copies < 1:
        raise ValueError("copies must be >= 1")
    n = G.dim
    N = copies

    def split(x):
        return np.asarray(x, dtype=float).reshape(x.shape[:-1] + (N, n))

    def mul(a, b):
        a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
        out = G.multiply(split(a), split(b))
        return out.reshape(a.shape)

    def inv(a):
        a = np.asarray(a, dtype=float)
        return G.inverse(split(a)).reshape(a.shape)

    def block(fn):
        def jac(a, b):
            A, B = split(a), split(b)
            J = np.zeros((N * n, N * n))
            for k in range(N):
                J[k * n:(k + 1) * n, k * n:(k + 1) * n] = fn(A[k], B[k])
            return J
        return jac

    jac_first = jac_second = None
    if G.jac_first is not None and G.jac_second is not None:
        jac_first, jac_second = block(G.jac_first), block(G.jac_second)

    return GroupLaw(N * n, mul, np.tile(np.asarray(G.identity, dtype=float), N), inv,
                    jac_first=jac_first, jac_second=jac_second, name=f"{G.name}^{N}")


def group_axiom_residuals(G, g, h, k):
    """Max residuals of the identity, inverse and associativity laws."""
    e = np.asarray(G.identity, dtype=float)
    ident = max(float(np.max(np.abs(G.multiply(e, g) - g))),
                float(np.max(np.abs(G.multiply(g, e) - g))))
    inv = float(np.max(np.abs(G.multiply(g, G.inverse(g)) - e)))
    assoc = float(np.max(np.abs(G.multiply(G.multiply(g, h), k) - G.multiply(g, G.multiply(h, k)))))
    return {"identity": ident, "inverse": inv, "associativity": assoc}


# Catalog group laws. All operate on the last axis so batches broadcast.

def se2_like(eta):
    """Group with Lie algebra ``[X2, X4] = eta X3``, ``[X3, X4] = -eta X2`` on R^4."""

    def mul(g, h):
        g = np.asarray(g, dtype=float)
        h = np.asarray(h, dtype=float)
        c = np.cos(eta * g[..., 3])
        s = np.sin(eta * g[..., 3])
        return np.stack([g[..., 0] + h[..., 0],
                         g[..., 1] + h[..., 1] * c + h[..., 2] * s,
                         g[..., 2] - h[..., 1] * s + h[..., 2] * c,
                         g[..., 3] + h[..., 3]], axis=-1)

    def inv(g):
        g = np.asarray(g, dtype=float)
        c = np.cos(eta * g[..., 3])
        s = np.sin(eta * g[..., 3])
        return np.stack([-g[..., 0],
                         -g[..., 1] * c + g[..., 2] * s,
                         -g[..., 1] * s - g[..., 2] * c,
                         -g[..., 3]], axis=-1)

    def jac_first(g, h):
        c, s = np.cos(eta * g[3]), np.sin(eta * g[3])
        J = np.eye(4)
        J[1, 3] = eta * (-h[1] * s + h[2] * c)
        J[2, 3] = eta * (-h[1] * c - h[2] * s)
        return J

    def jac_second(g, h):
        c, s = np.cos(eta * g[3]), np.sin(eta * g[3])
        return np.array([[1.0, 0, 0, 0], [0, c, s, 0], [0, -s, c, 0], [0, 0, 0, 1.0]])

    def left(x):
        c, s = np.cos(eta * x[3]), np.sin(eta * x[3])
        return np.array([[1.0, 0, 0, 0], [0, c, s, 0], [0, -s, c, 0], [0, 0, 0, 1.0]])

    def right(x):
        return np.array([[1.0, 0, 0, 0], [0, 1.0, 0, eta * x[2]],
                         [0, 0, 1.0, -eta * x[1]], [0, 0, 0, 1.0]])

    def ad(g, X):
        c, s = np.cos(eta * g[3]), np.sin(eta * g[3])
        A = np.array([[1.0, 0, 0, 0],
                      [0, c, s, -eta * g[2]],
                      [0, -s, c, eta * g[1]],
                      [0, 0, 0, 1.0]])
        return A @ X

    return GroupLaw(4, mul, np.zeros(4), inv, ad, left, right, jac_first, jac_second,
                    name=f"G_lorenz(eta={eta:g})")


def book_group(eta):
    """Group with Lie algebra ``[X1, X2] = -eta X2``, ``[X1, X3] = -eta X3`` on R^3."""

    def mul(g, h):
        g = np.asarray(g, dtype=float)
        h = np.asarray(h, dtype=float)
        e = np.exp(-eta * g[..., 0])
        return np.stack([g[..., 0] + h[..., 0],
                         g[..., 1] + h[..., 1] * e,
                         g[..., 2] + h[..., 2] * e], axis=-1)

    def inv(g):
        g = np.asarray(g, dtype=float)
        e = np.exp(eta * g[..., 0])
        return np.stack([-g[..., 0], -g[..., 1] * e, -g[..., 2] * e], axis=-1)

    def jac_first(g, h):
        e = np.exp(-eta * g[0])
        J = np.eye(3)
        J[1, 0] = -eta * h[1] * e
        J[2, 0] = -eta * h[2] * e
        return J

    def jac_second(g, h):
        e = np.exp(-eta * g[0])
        return np.diag([1.0, e, e])

    def left(x):
        e = np.exp(-eta * x[0])
        return np.diag([1.0, e, e])

    def right(x):
        return np.array([[1.0, 0, 0], [-eta * x[1], 1.0, 0], [-eta * x[2], 0, 1.0]])

    def ad(g, X):
        e = np.exp(-eta * g[0])
        A = np.array([[1.0, 0, 0], [eta * g[1], e, 0], [eta * g[2], 0, e]])
        return A @ X

    return GroupLaw(3, mul, np.zeros(3), inv, ad, left, right, jac_first, jac_second,
                    name=f"G_euler(eta={eta:g})")

"""Lie algebras on R^n given by structure constants, and adjoint 1-cocycles.

Conventions
-----------
* ``StructureConstants.c[i, j, k]`` is the ``X_k`` component of
  ``[X_i, X_j]``.
* ``CocycleMap.psi[i]`` is the antisymmetric matrix of ``psi(X_i)``, where
  the wedge ``u ^ v`` is stored as ``u v^T - v u^T``.  Hence
  ``psi(X_i) = sum_{j<k} psi[i, j, k] X_j ^ X_k``.
* Residual norms are max-abs.
"""

import json
from dataclasses import dataclass, field

import numpy as np

JACOBI_TOL = 1e-12


class DimensionError(ValueError):
    """Operands of incompatible dimension."""


class NonAdmissibleCocycle(ValueError):
    """A cocycle whose dual bracket violates the Jacobi identity."""


def _antisym_completion(dim, entries):
    arr = np.zeros((dim, dim, dim))
    for i, j, k, value in entries:
        arr[i, j, k] = value
        arr[j, i, k] = -value
    return arr


@dataclass(frozen=True, eq=False)
class StructureConstants:
    dim: int
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if self.dim < 1 or c.shape != (self.dim,) * 3:
            raise DimensionError(f"expected constants of shape {(self.dim,) * 3}, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def from_brackets(cls, dim, brackets):
        """Build from ``{(i, j): {k: value}}`` with antisymmetric completion.

        Indices are 0-based.
        """
        entries = [(i, j, k, v) for (i, j), row in brackets.items() for k, v in row.items()]
        return cls(dim, _antisym_completion(dim, entries))

    @classmethod
    def zeros(cls, dim):
        return cls(dim, np.zeros((dim, dim, dim)))

    def is_antisymmetric(self):
        return bool(np.array_equal(self.c, -self.c.transpose(1, 0, 2)))

    def ad(self, u):
        """Matrix of ``ad_u``: column j is ``[u, X_j]``."""
        return np.einsum("i,ijk->kj", np.asarray(u, dtype=float), self.c)

    def to_json(self):
        entries = [[int(i), int(j), int(k), float(self.c[i, j, k])]
                   for i, j, k in zip(*np.nonzero(self.c)) if i < j]
        return json.dumps({"dim": self.dim, "entries": entries})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(data["dim"], _antisym_completion(data["dim"], data["entries"]))

    def __eq__(self, other):
        if not isinstance(other, StructureConstants):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.c, other.c)


@dataclass(frozen=True, eq=False)
class CocycleMap:
    dim: int
    psi: np.ndarray = field(repr=False)

    def __post_init__(self):
        psi = np.array(self.psi, dtype=float)
        if self.dim < 1 or psi.shape != (self.dim,) * 3:
            raise DimensionError(f"expected cocycle of shape {(self.dim,) * 3}, got {psi.shape}")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @classmethod
    def from_wedges(cls, dim, images):
        """Build from ``{i: {(j, k): value}}`` meaning ``psi(X_i) += value X_j ^ X_k``."""
        psi = np.zeros((dim, dim, dim))
        for i, terms in images.items():
            for (j, k), v in terms.items():
                psi[i, j, k] += v
                psi[i, k, j] -= v
        return cls(dim, psi)

    @classmethod
    def zeros(cls, dim):
        return cls(dim, np.zeros((dim, dim, dim)))

    def image(self, u):
        """``psi(u)`` as an antisymmetric matrix."""
        return np.einsum("i,ijk->jk", np.asarray(u, dtype=float), self.psi)

    def to_json(self):
        # antisymmetric pair is (j, k) here, so the listed half is j < k
        entries = [[int(i), int(j), int(k), float(self.psi[i, j, k])]
                   for i, j, k in zip(*np.nonzero(self.psi)) if j < k]
        return json.dumps({"dim": self.dim, "entries": entries})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        psi = np.zeros((data["dim"],) * 3)
        for i, j, k, v in data["entries"]:
            psi[i, j, k] = v
            psi[i, k, j] = -v
        return cls(data["dim"], psi)


@dataclass(frozen=True)
class LiePencil:
    sc0: StructureConstants
    sc1: StructureConstants


def lie_bracket(sc, u, v):
    """``[u, v]`` with ``w_k = sum_ij u_i v_j c_ij^k``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (sc.dim,) or v.shape != (sc.dim,):
        raise DimensionError(f"vectors must have shape ({sc.dim},), got {u.shape} and {v.shape}")
    return np.einsum("i,j,ijk->k", u, v, sc.c)


def jacobi_residual_constants(sc):
    """Max-abs cyclic sum ``[[X_a,X_b],X_c] + cyclic`` over all basis triples."""
    c = sc.c
    # [[X_a, X_b], X_c]_m = sum_l c[a,b,l] c[l,c,m]
    t = np.einsum("abl,lcm->abcm", c, c)
    total = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(total))) if total.size else 0.0


def pencil_constants(p, alpha):
    if p.sc0.dim != p.sc1.dim:
        raise DimensionError("pencil endpoints differ in dimension")
    if alpha == 0:
        return p.sc0
    if alpha == 1:
        return p.sc1
    return StructureConstants(p.sc0.dim, (1.0 - alpha) * p.sc0.c + alpha * p.sc1.c)


def _ad_wedge(ad, m):
    # Leibniz rule on Lambda^2 in matrix form
    return ad @ m + m @ ad.T


def cocycle_residual(sc, psi):
    r"""Max-abs of ``ad_{X_a} psi(X_b) - ad_{X_b} psi(X_a) - psi([X_a, X_b])``."""
    if sc.dim != psi.dim:
        raise DimensionError(f"algebra has dim {sc.dim}, cocycle has dim {psi.dim}")
    n = sc.dim
    basis = np.eye(n)
    ads = [sc.ad(basis[a]) for a in range(n)]
    worst = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            r = (_ad_wedge(ads[a], psi.psi[b]) - _ad_wedge(ads[b], psi.psi[a])
                 - psi.image(sc.c[a, b]))
            worst = max(worst, float(np.max(np.abs(r))))
    return worst


def dual_bracket(psi, tol=JACOBI_TOL):
    """Structure constants of the dual algebra: ``c[a, b, i] = psi[i, a, b]``.

    Raises :class:`NonAdmissibleCocycle` if the result fails Jacobi.
    """
    sc = StructureConstants(psi.dim, np.transpose(psi.psi, (1, 2, 0)))
    residual = jacobi_residual_constants(sc)
    if residual > tol:
        raise NonAdmissibleCocycle(f"dual bracket violates Jacobi (residual {residual:.3g})")
    return sc

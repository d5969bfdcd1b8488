"""Metric Lie algebras given by structure constants.

Convention: ``c[i, j, k]`` is the ``e_k`` coefficient of ``[e_i, e_j]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import CenterDegenerate, DimensionMismatch, InvalidInput
from .numkernel import (
    DEFAULT_TOL,
    BilinearForm,
    Subspace,
    TolerancePolicy,
    common_kernel,
    null_space,
    orthogonal_complement,
    restrict_form,
    signature,
)

__all__ = [
    "StructureTensor",
    "MetricLieAlgebra",
    "JMap",
    "bracket",
    "center",
    "commutator_ideal",
    "is_abelian",
    "is_two_step_nilpotent",
    "j_map",
    "skew_derivations",
    "derivation_residual",
    "is_ad_invariant",
    "ad_matrices",
    "killing_form",
    "change_basis",
    "adapted_basis",
    "su2_structure",
    "heisenberg_structure",
]


class StructureTensor:
    """Antisymmetric three-index array of structure constants."""

    def __init__(self, c, tol: TolerancePolicy = DEFAULT_TOL, check: bool = True):
        c = np.array(c, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise InvalidInput(f"structure tensor must be n x n x n, got {c.shape}")
        self.c = c
        self.c.setflags(write=False)
        if check:
            if self.antisymmetry_residual() > tol.abs_tol:
                raise InvalidInput("structure constants are not antisymmetric")
            if self.jacobi_residual() > tol.abs_tol * max(1.0, float(np.max(np.abs(c), initial=0.0)) ** 2):
                raise InvalidInput("structure constants violate the Jacobi identity")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @classmethod
    def zeros(cls, n: int) -> "StructureTensor":
        return cls(np.zeros((n, n, n)), check=False)

    @classmethod
    def from_entries(cls, n: int, entries, tol: TolerancePolicy = DEFAULT_TOL) -> "StructureTensor":
        """Build from ``(i, j, k, value)`` triples (0-indexed), filling in antisymmetry."""
        c = np.zeros((n, n, n))
        for i, j, k, val in entries:
            c[i, j, k] = val
            c[j, i, k] = -val
        return cls(c, tol)

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.c + self.c.transpose(1, 0, 2)), initial=0.0))

    def jacobi_residual(self) -> float:
        c = self.c
        # [[e_i,e_j],e_k] + cyclic, coefficient on e_m
        t = np.einsum("ijl,lkm->ijkm", c, c)
        jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return float(np.max(np.abs(jac), initial=0.0))


@dataclass(frozen=True)
class MetricLieAlgebra:
    structure: StructureTensor
    metric: BilinearForm
    name: str = ""

    def __post_init__(self):
        if self.structure.dim != self.metric.dim:
            raise DimensionMismatch("structure tensor and metric have different dimensions")

    @property
    def dim(self) -> int:
        return self.structure.dim

    @property
    def c(self) -> np.ndarray:
        return self.structure.c

    @property
    def gram(self) -> np.ndarray:
        return self.metric.gram

    @classmethod
    def from_arrays(cls, c, gram, name: str = "", tol: TolerancePolicy = DEFAULT_TOL) -> "MetricLieAlgebra":
        return cls(StructureTensor(c, tol), BilinearForm(gram, tol), name)


@dataclass
class JMap:
    center_basis: Subspace
    v_basis: Subspace
    matrices: list = field(default_factory=list)
    kernel: Subspace | None = None  # ker j inside z, in center-basis coordinates

    @property
    def z_dim(self) -> int:
        return self.center_basis.dim

    @property
    def v_dim(self) -> int:
        return self.v_basis.dim

    def stacked(self) -> np.ndarray:
        """Matrix of Z -> vec(j(Z)); injective iff j is."""
        if not self.matrices:
            return np.zeros((self.v_dim * self.v_dim, 0))
        return np.column_stack([m.ravel() for m in self.matrices])

    def is_injective(self, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        return self.kernel is not None and self.kernel.dim == 0


def bracket(L: MetricLieAlgebra, x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (L.dim,) or y.shape != (L.dim,):
        raise DimensionMismatch(f"vectors must have length {L.dim}")
    return np.einsum("i,j,ijk->k", x, y, L.c)


def ad_matrices(L: MetricLieAlgebra) -> list[np.ndarray]:
    """``ad(e_i)`` as matrices: column j is ``[e_i, e_j]``."""
    return [L.c[i].T.copy() for i in range(L.dim)]


def center(L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    if L.dim == 0:
        return Subspace.zero(0)
    # x central iff [x, e_j] = 0 for all j: rows indexed by (j, k)
    m = L.c.transpose(1, 2, 0).reshape(L.dim * L.dim, L.dim)
    return Subspace.from_orthonormal(null_space(m, tol))


def commutator_ideal(L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    n = L.dim
    vecs = L.c.reshape(n * n, n).T
    return Subspace(vecs, n, tol)


def is_abelian(L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return float(np.max(np.abs(L.c), initial=0.0)) <= tol.abs_tol


def is_two_step_nilpotent(L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff [[n,n],n] = 0 and [n,n] != 0; abelian algebras are excluded."""
    if is_abelian(L, tol):
        return False
    triple = np.einsum("ijl,lkm->ijkm", L.c, L.c)
    return float(np.max(np.abs(triple))) <= tol.abs_tol * max(1.0, float(np.max(np.abs(L.c))) ** 2)


def change_basis(L: MetricLieAlgebra, p) -> MetricLieAlgebra:
    """Express ``L`` in the basis given by the columns of ``p``."""
    p = np.asarray(p, dtype=float)
    pinv = np.linalg.inv(p)
    c = np.einsum("ia,jb,ijk,ck->abc", p, p, L.c, pinv, optimize=True)
    gram = p.T @ L.gram @ p
    return MetricLieAlgebra(StructureTensor(c, check=False), BilinearForm(gram), L.name)


def adapted_basis(L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL):
    """Center, its orthogonal complement, and the basis matrix ``[Z | V]``.

    Raises :class:`CenterDegenerate` when the metric is degenerate on the center.
    """
    z = center(L, tol)
    if signature(restrict_form(L.metric, z), tol).null:
        raise CenterDegenerate("the center is a degenerate subspace")
    v = orthogonal_complement(z, L.metric, tol)
    zc = Subspace(z.canonical, L.dim, tol)
    vc = Subspace(v.canonical, L.dim, tol)
    return zc, vc, np.hstack([zc.basis, vc.basis])


def j_map(L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> JMap:
    """Solve <[X, Y], Z_a> = <j(Z_a) X, Y> for every center basis vector Z_a."""
    z, v, _ = adapted_basis(L, tol)
    zb, vb = z.basis, v.basis
    gv = vb.T @ L.gram @ vb
    gv_inv = np.linalg.inv(gv)
    # pair[a, p, q] = <[V_p, V_q], Z_a>
    br = np.einsum("ip,jq,ijk->pqk", vb, vb, L.c, optimize=True)
    pair = np.einsum("pqk,kl,la->apq", br, L.gram, zb)
    mats = [gv_inv @ pair[a].T for a in range(z.dim)]
    jm = JMap(z, v, mats)
    jm.kernel = Subspace.from_orthonormal(null_space(jm.stacked(), tol)) if z.dim else Subspace.zero(0)
    return jm


def _derivation_system(c: np.ndarray) -> np.ndarray:
    """Linear map vec(D) -> D[e_i,e_j] - [De_i,e_j] - [e_i,De_j], D[k, l] row-major."""
    n = c.shape[0]
    eye = np.eye(n)
    # D[e_i,e_j]_k = sum_l c[i,j,l] D[k,l]
    t1 = np.einsum("ijl,kp->ijkpl", c, eye)
    # [De_i, e_j]_k = sum_l D[l,i] c[l,j,k]
    t2 = np.einsum("pjk,iq->ijkpq", c, eye)
    # [e_i, De_j]_k = sum_l D[l,j] c[i,l,k]
    t3 = np.einsum("ipk,jq->ijkpq", c, eye)
    return (t1 - t2 - t3).reshape(n ** 3, n * n)


def _skew_system(gram: np.ndarray) -> np.ndarray:
    """Linear map vec(D) -> D^T G + G D (row-major vec)."""
    n = gram.shape[0]
    eye = np.eye(n)
    # (D^T G)[a,b] = sum_k D[k,a] G[k,b]; (G D)[a,b] = sum_k G[a,k] D[k,b]
    t1 = np.einsum("pb,aq->abpq", gram, eye)
    t2 = np.einsum("ap,bq->abpq", gram, eye)
    return (t1 + t2).reshape(n * n, n * n)


def derivation_residual(L: MetricLieAlgebra, d) -> float:
    d = np.asarray(d, dtype=float)
    return float(np.max(np.abs(_derivation_system(L.c) @ d.ravel()), initial=0.0))


def skew_residual(form: BilinearForm, d) -> float:
    d = np.asarray(d, dtype=float)
    return float(np.max(np.abs(d.T @ form.gram + form.gram @ d), initial=0.0))


def skew_derivations(L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> list[np.ndarray]:
    """Basis of Der(n) ∩ so(n), Frobenius-orthonormal."""
    n = L.dim
    system = np.vstack([_derivation_system(L.c), _skew_system(L.gram)])
    ns = null_space(system, tol)
    return [ns[:, k].reshape(n, n) for k in range(ns.shape[1])]


def is_ad_invariant(metric: BilinearForm, L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    g = metric.gram
    for ad in ad_matrices(L):
        if np.max(np.abs(ad.T @ g + g @ ad), initial=0.0) > tol.abs_tol * max(1.0, np.max(np.abs(g))):
            return False
    return True


def killing_form(L: MetricLieAlgebra) -> np.ndarray:
    ads = ad_matrices(L)
    n = L.dim
    k = np.empty((n, n))
    for i, j in product(range(n), repeat=2):
        k[i, j] = np.trace(ads[i] @ ads[j])
    return k


def su2_structure() -> np.ndarray:
    """[E1,E2]=E3, [E2,E3]=E1, [E3,E1]=E2."""
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    return c


def heisenberg_structure(extra_central: int = 0, coeff: float = 1.0) -> np.ndarray:
    """h3 (basis X1, X2, Z with [X1,X2] = coeff Z) plus abelian central directions."""
    n = 3 + extra_central
    c = np.zeros((n, n, n))
    c[0, 1, 2] = coeff
    c[1, 0, 2] = -coeff
    return c

"""Transvections, the symmetry subspace at e, and the main-theorem check.

A Killing field of N is encoded as a pair (u, D) with u in n and D in
h^aut: the right-invariant field of u plus the linear field of D. Its value
at e is u and its covariant derivative at e is

    (nabla_W V)_e = nabla_W u - [W, u] + D(W).

Transvections at e are the pairs where this vanishes for every W.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import DataSet, build_nilpotent, compact_split, embed_g
from .errors import TheoremMismatch, ZNotCentral
from .geometry import levi_civita_2step
from .isotropy import frobenius_orthonormalize, isotropy_split
from .liealg import MetricLieAlgebra
from .numkernel import (
    DEFAULT_TOL,
    SignatureReport,
    Subspace,
    TolerancePolicy,
    common_kernel,
    null_space,
    principal_angles,
    restrict_form,
    signature,
)

__all__ = [
    "KillingPair",
    "TransvectionSpace",
    "SymmetricIsotropy",
    "MainTheoremReport",
    "ANTI_ISOMORPHISM_SIGN",
    "nabla_killing_at_e",
    "transvection_space",
    "fixed_point_subspace",
    "symmetric_isotropy",
    "transvection_for_central",
    "verify_main_theorem",
]

# Killing fields bracket with the opposite sign of iso^aut(N) = n x| h^aut
ANTI_ISOMORPHISM_SIGN = -1.0

ISOTROPY_ASSUMPTION = "full isotropy H assumed equal to H^aut"


@dataclass
class KillingPair:
    u: np.ndarray
    d: np.ndarray

    def value_at_e(self) -> np.ndarray:
        return self.u


@dataclass
class TransvectionSpace:
    basis: list
    s_e: Subspace
    s_e_signature: SignatureReport
    residual: float = 0.0

    @property
    def index(self) -> int:
        return self.s_e.dim


@dataclass
class SymmetricIsotropy:
    basis: list
    n_component_residual: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.basis)


def _nabla_u_matrix(L: MetricLieAlgebra, gamma: np.ndarray, u) -> np.ndarray:
    """Columns W -> nabla_W u - [W, u]."""
    u = np.asarray(u, dtype=float)
    nab = np.einsum("wjk,j->kw", gamma, u)
    br = np.einsum("wjk,j->kw", L.c, u)
    return nab - br


def nabla_killing_at_e(L: MetricLieAlgebra, pair: KillingPair, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Matrix of W -> (nabla_W V)_e; raises CenterDegenerate via the connection."""
    gamma = levi_civita_2step(L, tol).gamma
    return _nabla_u_matrix(L, gamma, pair.u) + np.asarray(pair.d, dtype=float)


def transvection_space(L: MetricLieAlgebra, haut_basis, tol: TolerancePolicy = DEFAULT_TOL) -> TransvectionSpace:
    """Kernel of (u, alpha) -> (nabla V)_e over n + h^aut, with V = (u, sum alpha_a D_a)."""
    n = L.dim
    haut = list(haut_basis)
    gamma = levi_civita_2step(L, tol).gamma
    cols = [_nabla_u_matrix(L, gamma, e).ravel() for e in np.eye(n)]
    cols += [np.asarray(dm, dtype=float).ravel() for dm in haut]
    big = np.column_stack(cols)
    ns = null_space(big, tol)
    pairs = []
    for k in range(ns.shape[1]):
        x = ns[:, k]
        u = x[:n].copy()
        # scale to a unit value at e, first significant entry positive
        nu = float(np.linalg.norm(u))
        if nu > tol.abs_tol:
            lead = u[int(np.argmax(np.abs(u) > 1e-9 * nu))]
            x = x * (np.sign(lead) / nu)
            u = x[:n].copy()
        dm = sum((a * m for a, m in zip(x[n:], haut)), np.zeros((n, n)))
        pairs.append(KillingPair(u, dm))
    us = np.column_stack([p.u for p in pairs]) if pairs else np.zeros((n, 0))
    s_e = Subspace(us, n, tol)
    resid = max((float(np.max(np.abs(big @ ns[:, k]))) for k in range(ns.shape[1])), default=0.0)
    return TransvectionSpace(pairs, s_e, signature(restrict_form(L.metric, s_e), tol), resid)


def fixed_point_subspace(L: MetricLieAlgebra, haut_basis, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """Common kernel of h^aut acting on n (fixed vectors of the connected isotropy)."""
    haut = list(haut_basis)
    if not haut:
        return Subspace.full(L.dim)
    return common_kernel(haut, tol)


def symmetric_isotropy(L: MetricLieAlgebra, tspace: TransvectionSpace,
                       tol: TolerancePolicy = DEFAULT_TOL) -> SymmetricIsotropy:
    """span of brackets of transvections; must lie in the isotropy (zero value at e).

    In n x| h^aut, [(u1, D1), (u2, D2)] = ([u1, u2] + D1 u2 - D2 u1, [D1, D2]);
    the Killing-field bracket is this times ANTI_ISOMORPHISM_SIGN.
    """
    pairs = tspace.basis
    mats, worst = [], 0.0
    for i, p in enumerate(pairs):
        for q in pairs[i + 1:]:
            u = np.einsum("i,j,ijk->k", p.u, q.u, L.c) + p.d @ q.u - q.d @ p.u
            dm = p.d @ q.d - q.d @ p.d
            u, dm = ANTI_ISOMORPHISM_SIGN * u, ANTI_ISOMORPHISM_SIGN * dm
            worst = max(worst, float(np.linalg.norm(u)))
            mats.append(dm)
    return SymmetricIsotropy(frobenius_orthonormalize(mats, tol), worst)


def transvection_for_central(d: DataSet, z, tol: TolerancePolicy = DEFAULT_TOL) -> KillingPair:
    """The pair (Z, pi(Z)/2) for Z in the center c of g."""
    z = np.asarray(z, dtype=float)
    c = compact_split(d.g, tol).c
    if not c.contains(z):
        raise ZNotCentral("Z is not in the center of g")
    k = d.g_dim
    dm = np.zeros((d.dim, d.dim))
    dm[k:, k:] = 0.5 * d.pi(z)
    return KillingPair(embed_g(d, z), dm)


@dataclass
class MainTheoremReport:
    s_e: Subspace
    f0: Subspace
    c: Subspace
    s_e_signature: SignatureReport
    angles: dict = field(default_factory=dict)
    equal: bool = False
    nondegenerate: bool = False
    haut_dim: int = 0
    transvection_residual: float = 0.0
    symmetric_isotropy_dim: int = 0
    symmetric_isotropy_residual: float = 0.0
    assumption: str = ISOTROPY_ASSUMPTION

    @property
    def ok(self) -> bool:
        return self.equal and self.nondegenerate

    def as_dict(self) -> dict:
        return {
            "index_of_symmetry": self.s_e.dim,
            "dims": {"s_e": self.s_e.dim, "F0": self.f0.dim, "c": self.c.dim},
            "s_e_signature": self.s_e_signature.as_dict(),
            "max_principal_angles": dict(self.angles),
            "s_e_equals_F0_equals_c": self.equal,
            "s_e_nondegenerate": self.nondegenerate,
            "haut_dim": self.haut_dim,
            "transvection_residual": self.transvection_residual,
            "symmetric_isotropy_dim": self.symmetric_isotropy_dim,
            "symmetric_isotropy_n_residual": self.symmetric_isotropy_residual,
            "assumption": self.assumption,
        }


def _max_angle(a: Subspace, b: Subspace) -> float:
    if a.dim != b.dim:
        return float(np.pi / 2)
    ang = principal_angles(a, b)
    return float(np.max(ang)) if ang.size else 0.0


def verify_main_theorem(d: DataSet, tol: TolerancePolicy = DEFAULT_TOL, strict: bool = True,
                        angle_tol: float = 1e-7, split=None) -> MainTheoremReport:
    """Compare s_e (transvections), F0 (fixed points) and c (center of g) inside n."""
    L = build_nilpotent(d, tol)
    split = isotropy_split(d, tol) if split is None else split
    haut = split.orthonormal_basis(tol)
    ts = transvection_space(L, haut, tol)
    f0 = fixed_point_subspace(L, haut, tol)
    cb = compact_split(d.g, tol).c.canonical
    c = Subspace(np.vstack([cb, np.zeros((d.v_dim, cb.shape[1]))]), d.dim, tol)
    angles = {"s_e_F0": _max_angle(ts.s_e, f0), "s_e_c": _max_angle(ts.s_e, c), "F0_c": _max_angle(f0, c)}
    equal = ts.s_e.equals(f0, angle_tol) and ts.s_e.equals(c, angle_tol) and f0.equals(c, angle_tol)
    sym = symmetric_isotropy(L, ts, tol)
    rep = MainTheoremReport(ts.s_e, f0, c, ts.s_e_signature, angles, equal, ts.s_e_signature.null == 0,
                            split.total_dim, ts.residual, sym.dim, sym.n_component_residual)
    if strict and not rep.ok:
        raise TheoremMismatch(f"s_e, F0 and c disagree or s_e is degenerate: {angles}")
    return rep

"""The isotropy algebra h^aut of n(g, v, pi), assembled as gbar + u.

gbar enters through Z -> (ad Z, pi Z); u is the skew part of the commutant
of pi acting on v (and trivially on g). The assembly is cross-checked against
the direct skew-derivation solve on the built algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .dataset import DataSet, build_nilpotent, compact_split
from .errors import TheoremMismatch, ZNotInGbar
from .liealg import _skew_system, derivation_residual, skew_derivations
from .numkernel import DEFAULT_TOL, TolerancePolicy, _orth, null_space

__all__ = [
    "IsotropySplit",
    "GroupCheck",
    "commutant_skew",
    "embed_gbar",
    "isotropy_split",
    "group_level_check",
    "frobenius_orthonormalize",
]


def frobenius_orthonormalize(mats, tol: TolerancePolicy = DEFAULT_TOL) -> list:
    """Orthonormal basis (Frobenius pairing) of span(mats), rank-filtered."""
    mats = list(mats)
    if not mats:
        return []
    n = mats[0].shape
    q = _orth(np.column_stack([m.ravel() for m in mats]), tol)
    return [q[:, k].reshape(n) for k in range(q.shape[1])]


def _span_residual(mats, basis) -> float:
    """Largest Frobenius distance from a matrix in ``mats`` to span(basis)."""
    if not mats:
        return 0.0
    if not basis:
        return max(float(np.linalg.norm(m)) for m in mats)
    q, _ = np.linalg.qr(np.column_stack([b.ravel() for b in basis]))
    worst = 0.0
    for m in mats:
        x = m.ravel()
        worst = max(worst, float(np.linalg.norm(x - q @ (q.T @ x))))
    return worst


def commutant_skew(d: DataSet, tol: TolerancePolicy = DEFAULT_TOL) -> list:
    """Basis of u: skew maps of v commuting with every pi(Z_a), Frobenius-orthonormal."""
    m = d.v_dim
    if m == 0:
        return []
    eye = np.eye(m)
    rows = [np.kron(eye, p.T) - np.kron(p, eye) for p in d.pi.matrices]
    rows.append(_skew_system(d.v_metric.gram))
    ns = null_space(np.vstack(rows), tol)
    return [ns[:, k].reshape(m, m) for k in range(ns.shape[1])]


def embed_gbar(d: DataSet, z, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """(ad Z) + (pi Z) as a block matrix on n = g + v."""
    z = np.asarray(z, dtype=float)
    k = d.g_dim
    n = d.dim
    out = np.zeros((n, n))
    if not np.any(z):
        return out
    gbar = compact_split(d.g, tol).gbar
    if gbar.dim == 0 or not gbar.contains(z):
        raise ZNotInGbar("Z is not in the commutator ideal of g")
    out[:k, :k] = np.tensordot(z, d.g.c, axes=1).T
    out[k:, k:] = d.pi(z)
    return out


@dataclass
class IsotropySplit:
    gbar_part: list
    u_part: list
    direct: list = field(default_factory=list, repr=False)
    residuals: dict = field(default_factory=dict)

    @property
    def total_dim(self) -> int:
        return len(self.gbar_part) + len(self.u_part)

    def basis(self) -> list:
        return list(self.gbar_part) + list(self.u_part)

    def orthonormal_basis(self, tol: TolerancePolicy = DEFAULT_TOL) -> list:
        return frobenius_orthonormalize(self.basis(), tol)

    def as_dict(self) -> dict:
        return {
            "gbar_dim": len(self.gbar_part),
            "u_dim": len(self.u_part),
            "total_dim": self.total_dim,
            "direct_dim": len(self.direct),
            "residuals": dict(self.residuals),
        }


def isotropy_split(d: DataSet, tol: TolerancePolicy = DEFAULT_TOL, span_tol: float = 1e-8) -> IsotropySplit:
    """h^aut = gbar + u, verified against skew_derivations of the built algebra."""
    k = d.g_dim
    n = d.dim
    gb = compact_split(d.g, tol).gbar.canonical
    gbar_part = [embed_gbar(d, gb[:, a], tol) for a in range(gb.shape[1])]
    u_part = []
    for b in commutant_skew(d, tol):
        m = np.zeros((n, n))
        m[k:, k:] = b
        u_part.append(m)
    L = build_nilpotent(d, tol, check=False)
    direct = skew_derivations(L, tol)
    assembled = gbar_part + u_part
    res = {
        "derivation": max((derivation_residual(L, m) for m in assembled), default=0.0),
        "skew": max((float(np.max(np.abs(m.T @ L.gram + L.gram @ m))) for m in assembled), default=0.0),
        "gbar_u_commutator": max((float(np.linalg.norm(a @ b - b @ a)) for a in gbar_part for b in u_part),
                                 default=0.0),
        "u_on_g": max((float(np.max(np.abs(m[:, :k]), initial=0.0)) for m in u_part), default=0.0),
        "assembled_in_direct": _span_residual(assembled, direct),
        "direct_in_assembled": _span_residual(direct, assembled),
    }
    split = IsotropySplit(gbar_part, u_part, direct, res)
    if len(direct) != split.total_dim:
        raise TheoremMismatch(f"assembled dimension {split.total_dim} differs from direct solve {len(direct)}")
    if res["assembled_in_direct"] > span_tol or res["direct_in_assembled"] > span_tol:
        raise TheoremMismatch("assembled isotropy and the direct solve span different spaces")
    return split


@dataclass
class GroupCheck:
    ok: bool
    rep_residual: float
    bracket_residual: float
    metric_residual: float

    def __bool__(self) -> bool:
        return self.ok


def group_level_check(d: DataSet, z, t: float, samples=None, tol: TolerancePolicy = DEFAULT_TOL,
                      bound: float = 1e-8) -> GroupCheck:
    """pi(phi Z') = T pi(Z') T^-1 with phi = exp(t ad Z), T = exp(t pi Z).

    Also checks that phi + T is an isometric automorphism of n. ``samples``
    are vectors of g (default: the standard basis).
    """
    z = np.asarray(z, dtype=float)
    k = d.g_dim
    if np.any(z):
        embed_gbar(d, z, tol)  # precondition: Z in gbar
    ad = np.tensordot(z, d.g.c, axes=1).T if k else np.zeros((0, 0))
    phi = sla.expm(t * ad)
    tm = sla.expm(t * d.pi(z))
    tinv = np.linalg.inv(tm)
    samples = np.eye(k) if samples is None else np.atleast_2d(np.asarray(samples, dtype=float))
    rep = 0.0
    for zp in samples:
        rep = max(rep, float(np.linalg.norm(d.pi(phi @ zp) - tm @ d.pi(zp) @ tinv)))
    L = build_nilpotent(d, tol, check=False)
    full = sla.block_diag(phi, tm)
    # F [x, y] = [F x, F y] on basis vectors
    lhs = np.einsum("ijl,ml->ijm", L.c, full)
    rhs = np.einsum("ai,bj,abm->ijm", full, full, L.c, optimize=True)
    br = float(np.max(np.abs(lhs - rhs), initial=0.0))
    met = float(np.max(np.abs(full.T @ L.gram @ full - L.gram), initial=0.0))
    ok = rep <= bound and br <= bound and met <= bound
    return GroupCheck(ok, rep, br, met)

"""Natural reductivity of 2-step nilpotent metric Lie algebras.

For the presentation group N x H^aut the criterion is algebraic: j(z) must
be a subalgebra of so(v) with [j(Z), j(Z')] = j(tau_Z Z') for skew tau_Z.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    JacobiFailure,
    JNotInjective,
    NotReductiveDecomposition,
    NotSubalgebra,
)
from .liealg import JMap, MetricLieAlgebra, StructureTensor, j_map
from .numkernel import DEFAULT_TOL, BilinearForm, Subspace, TolerancePolicy, null_space

__all__ = [
    "TauMap",
    "NatRedCertificate",
    "check_j_subalgebra",
    "solve_tau",
    "induced_center_bracket",
    "is_naturally_reductive",
    "SemidirectAlgebra",
    "check_natred_definition",
]


@dataclass
class TauMap:
    matrices: list
    z_gram: np.ndarray
    relation_residual: float = 0.0
    skew_residual: float = 0.0


@dataclass
class NatRedCertificate:
    is_subalgebra: bool
    tau: TauMap | None
    induced_bracket: StructureTensor | None
    verdict: bool
    j_injective: bool
    caveat: str | None = None
    jmap: JMap | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "is_subalgebra": self.is_subalgebra,
            "j_injective": self.j_injective,
            "caveat": self.caveat,
        }
        if self.tau is not None:
            out["tau_relation_residual"] = self.tau.relation_residual
            out["tau_skew_residual"] = self.tau.skew_residual
        return out


def _commutator(a, b):
    return a @ b - b @ a


def _image_fit(jm: JMap, target: np.ndarray):
    """Least-squares coefficients of ``target`` in span{j(Z_c)} and the residual."""
    s = jm.stacked()
    if s.shape[1] == 0:
        return np.zeros(0), float(np.linalg.norm(target))
    coef, *_ = np.linalg.lstsq(s, target.ravel(), rcond=None)
    return coef, float(np.linalg.norm(s @ coef - target.ravel()))


def check_j_subalgebra(jm: JMap, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    mats = jm.matrices
    scale = max(1.0, max((float(np.linalg.norm(m)) for m in mats), default=1.0)) ** 2
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            _, res = _image_fit(jm, _commutator(mats[a], mats[b]))
            if res > tol.abs_tol * scale:
                return False
    return True


def solve_tau(jm: JMap, z_gram, tol: TolerancePolicy = DEFAULT_TOL) -> TauMap:
    """tau_{Z_a} with [j(Z_a), j(Z_b)] = j(tau_{Z_a} Z_b), by coordinates in the j-image."""
    z_gram = np.asarray(z_gram, dtype=float)
    if jm.kernel is None or jm.kernel.dim:
        raise JNotInjective("tau is only determined when j is injective")
    if not check_j_subalgebra(jm, tol):
        raise NotSubalgebra("j(z) is not closed under commutators")
    mats = jm.matrices
    k = len(mats)
    taus = []
    rel = 0.0
    for a in range(k):
        t = np.zeros((k, k))
        for b in range(k):
            target = _commutator(mats[a], mats[b])
            coef, res = _image_fit(jm, target)
            t[:, b] = coef
            rel = max(rel, res)
        taus.append(t)
    skew = max((float(np.max(np.abs(t.T @ z_gram + z_gram @ t), initial=0.0)) for t in taus), default=0.0)
    return TauMap(taus, z_gram, rel, skew)


def induced_center_bracket(tau: TauMap, jm: JMap | None = None,
                           tol: TolerancePolicy = DEFAULT_TOL) -> StructureTensor:
    """[Z_a, Z_b]_z = tau_{Z_a}(Z_b), checked for Jacobi, representation property and ad-invariance."""
    k = len(tau.matrices)
    c = np.zeros((k, k, k))
    for a, t in enumerate(tau.matrices):
        c[a] = t.T  # c[a, b, :] = tau_a[:, b]
    st = StructureTensor(c, check=False)
    scale = max(1.0, float(np.max(np.abs(c), initial=0.0))) ** 2
    if st.antisymmetry_residual() > 1e3 * tol.abs_tol or st.jacobi_residual() > 1e3 * tol.abs_tol * scale:
        raise JacobiFailure("induced bracket on z is not a Lie bracket")
    g = tau.z_gram
    for a in range(k):
        ad = c[a].T
        if np.max(np.abs(ad.T @ g + g @ ad), initial=0.0) > 1e3 * tol.abs_tol * max(1.0, np.max(np.abs(g))):
            raise JacobiFailure("metric on z is not ad-invariant for the induced bracket")
    if jm is not None:
        mats = jm.matrices
        for a in range(k):
            for b in range(k):
                lhs = _commutator(mats[a], mats[b])
                rhs = np.tensordot(c[a, b], np.asarray(mats), axes=1)
                if np.max(np.abs(lhs - rhs)) > 1e3 * tol.abs_tol * scale:
                    raise JacobiFailure("j is not a representation of the induced bracket")
    return st


def _skew_tau_exists(jm: JMap, z_gram, tol: TolerancePolicy) -> bool:
    """Whether skew tau_Z satisfying the bracket relation exist (j possibly not injective)."""
    mats = jm.matrices
    k = len(mats)
    if k == 0:
        return True
    m = jm.v_dim
    stacked = jm.stacked()  # (m*m, k)
    for a in range(k):
        # unknown T (k x k), row-major; sum_c T[c, b] j_c = [j_a, j_b] for each b
        rows, rhs = [], []
        for b in range(k):
            blk = np.zeros((m * m, k * k))
            for cidx in range(k):
                blk[:, cidx * k + b] = stacked[:, cidx]
            rows.append(blk)
            rhs.append(_commutator(mats[a], mats[b]).ravel())
        eye = np.eye(k)
        skew = (np.einsum("pb,aq->abpq", z_gram, eye) + np.einsum("ap,bq->abpq", z_gram, eye)).reshape(k * k, k * k)
        rows.append(skew)
        rhs.append(np.zeros(k * k))
        A, y = np.vstack(rows), np.concatenate(rhs)
        sol, *_ = np.linalg.lstsq(A, y, rcond=None)
        if np.linalg.norm(A @ sol - y) > 1e3 * tol.abs_tol * max(1.0, np.linalg.norm(y)):
            return False
    return True


def is_naturally_reductive(L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> NatRedCertificate:
    jm = j_map(L, tol)
    zb = jm.center_basis.basis
    z_gram = zb.T @ L.gram @ zb
    sub = check_j_subalgebra(jm, tol)
    injective = jm.kernel.dim == 0
    if not injective:
        ok = sub and _skew_tau_exists(jm, z_gram, tol)
        return NatRedCertificate(
            sub, None, None, ok, False,
            caveat="j is not injective: the conditions are only necessary, the converse is not asserted",
            jmap=jm,
        )
    if not sub:
        return NatRedCertificate(False, None, None, False, True, jmap=jm)
    tau = solve_tau(jm, z_gram, tol)
    scale = max(1.0, max(float(np.linalg.norm(m)) for m in jm.matrices)) ** 2
    skew_ok = tau.skew_residual <= 1e3 * tol.abs_tol * scale
    try:
        br = induced_center_bracket(tau, jm, tol)
    except JacobiFailure:
        br = None
    return NatRedCertificate(True, tau, br, bool(skew_ok and br is not None), True, jmap=jm)


@dataclass
class SemidirectAlgebra:
    """The Lie algebra n x| h for h a space of skew derivations of n.

    Basis order: the basis of n, then ``h_basis``. The bracket follows
    [U, V] = [U, V]_n, [A, B] = AB - BA, [A, U] = A(U).
    """
    n: MetricLieAlgebra
    h_basis: list

    @property
    def dim(self) -> int:
        return self.n.dim + len(self.h_basis)

    def structure(self) -> np.ndarray:
        n, h = self.n.dim, len(self.h_basis)
        tot = n + h
        c = np.zeros((tot, tot, tot))
        c[:n, :n, :n] = self.n.c
        if h:
            hs = np.column_stack([b.ravel() for b in self.h_basis])
            for a, A in enumerate(self.h_basis):
                for u in range(n):
                    c[n + a, u, :n] = A[:, u]
                    c[u, n + a, :n] = -A[:, u]
                for b, B in enumerate(self.h_basis):
                    coef, *_ = np.linalg.lstsq(hs, (A @ B - B @ A).ravel(), rcond=None)
                    c[n + a, n + b, n:] = coef
        return c

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.structure())

    def value_at_e(self, x) -> np.ndarray:
        """Value at the identity of the Killing field of ``x``: its n-component."""
        return np.asarray(x)[: self.n.dim]


def check_natred_definition(amb: SemidirectAlgebra, m_basis=None, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Evaluate <[U,V]_m, W> + <V, [U,W]_m> = 0 on a basis of the complement m.

    ``m_basis`` columns live in the ambient coordinates; default m = n. The
    metric on m is transported through the value at e, and [, ]_m is the
    m-component along the isotropy h = span(h_basis).
    """
    n, h = amb.n.dim, len(amb.h_basis)
    tot = n + h
    if m_basis is None:
        m_basis = np.eye(tot)[:, :n]
    mb = np.asarray(m_basis, dtype=float)
    hb = np.eye(tot)[:, n:]
    full = np.hstack([mb, hb])
    if np.linalg.matrix_rank(full) != tot:
        raise NotReductiveDecomposition("m and h do not span the ambient algebra")
    c = amb.structure()
    br = lambda x, y: np.einsum("i,j,ijk->k", x, y, c)
    finv = np.linalg.inv(full)
    k = mb.shape[1]

    def m_part(x):
        coords = finv @ x
        return mb @ coords[:k]

    scale = max(1.0, float(np.max(np.abs(c), initial=0.0)))
    for a in range(h):
        for i in range(k):
            w = br(hb[:, a], mb[:, i])
            if np.linalg.norm(w - m_part(w)) > 1e3 * tol.abs_tol * scale:
                raise NotReductiveDecomposition("ad(h) does not preserve m")
    g = amb.n.gram
    ip = lambda x, y: float(amb.value_at_e(x) @ g @ amb.value_at_e(y))
    for i in range(k):
        for j in range(k):
            uv = m_part(br(mb[:, i], mb[:, j]))
            for l in range(k):
                uw = m_part(br(mb[:, i], mb[:, l]))
                if abs(ip(uv, mb[:, l]) + ip(mb[:, j], uw)) > 1e3 * tol.abs_tol * scale:
                    return False
    return True

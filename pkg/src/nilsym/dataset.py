"""Data sets (g, v, pi) and the 2-step nilpotent algebras they define."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidDataSet, NotCompact
from .liealg import (
    MetricLieAlgebra,
    StructureTensor,
    center,
    commutator_ideal,
    is_ad_invariant,
    killing_form,
)
from .numkernel import (
    DEFAULT_TOL,
    BilinearForm,
    SignatureReport,
    Subspace,
    TolerancePolicy,
    common_kernel,
    null_space,
    signature,
)

__all__ = [
    "Representation",
    "DataSet",
    "ValidationReport",
    "CompactSplit",
    "validate_data_set",
    "build_nilpotent",
    "recover_data_set",
    "compact_split",
    "embed_g",
    "embed_v",
    "MAX_TOTAL_DIM",
]

# soft limit on dim g + dim v; the dense solvers scale like dim^4
MAX_TOTAL_DIM = 24


@dataclass
class Representation:
    g_dim: int
    v_dim: int
    matrices: list

    def __post_init__(self):
        self.matrices = [np.asarray(m, dtype=float) for m in self.matrices]
        if len(self.matrices) != self.g_dim:
            raise DimensionMismatch(f"expected {self.g_dim} matrices, got {len(self.matrices)}")
        for m in self.matrices:
            if m.shape != (self.v_dim, self.v_dim):
                raise DimensionMismatch(f"pi matrix has shape {m.shape}, expected {(self.v_dim, self.v_dim)}")

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if not self.matrices:
            return np.zeros((self.v_dim, self.v_dim))
        return np.tensordot(z, np.asarray(self.matrices), axes=1)

    def stacked(self) -> np.ndarray:
        if not self.matrices:
            return np.zeros((self.v_dim * self.v_dim, 0))
        return np.column_stack([m.ravel() for m in self.matrices])


@dataclass
class DataSet:
    g: MetricLieAlgebra
    v_metric: BilinearForm
    pi: Representation
    name: str = ""

    def __post_init__(self):
        if self.pi.g_dim != self.g.dim or self.pi.v_dim != self.v_metric.dim:
            raise DimensionMismatch("representation does not match g and v dimensions")

    @property
    def g_dim(self) -> int:
        return self.g.dim

    @property
    def v_dim(self) -> int:
        return self.v_metric.dim

    @property
    def dim(self) -> int:
        return self.g_dim + self.v_dim

    def total_gram(self) -> np.ndarray:
        n, k = self.dim, self.g_dim
        gram = np.zeros((n, n))
        gram[:k, :k] = self.g.gram
        gram[k:, k:] = self.v_metric.gram
        return gram

    def is_lorentzian(self, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        return signature(BilinearForm(self.total_gram()), tol).kind == "lorentzian"


@dataclass
class ValidationReport:
    axioms: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    signatures: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return all(self.axioms.values())

    @property
    def lorentzian(self) -> bool:
        return self.signatures.get("total") is not None and self.signatures["total"].kind == "lorentzian"

    def as_dict(self) -> dict:
        return {
            "valid": self.valid,
            "lorentzian": self.lorentzian,
            "axioms": dict(self.axioms),
            "residuals": dict(self.residuals),
            "signatures": {k: s.as_dict() for k, s in self.signatures.items()},
            "messages": list(self.messages),
        }


def validate_data_set(d: DataSet, tol: TolerancePolicy = DEFAULT_TOL) -> ValidationReport:
    """Check the four data-set axioms and classify the signatures involved."""
    rep = ValidationReport()
    pis = d.pi.matrices
    gv = d.v_metric.gram
    scale = max(1.0, max((float(np.max(np.abs(p))) for p in pis), default=1.0))

    sig_g = signature(d.g.metric, tol)
    sig_v = signature(d.v_metric, tol)
    sig_t = signature(BilinearForm(d.total_gram()), tol)
    rep.signatures = {"g": sig_g, "v": sig_v, "total": sig_t}
    rep.axioms["nondegenerate"] = sig_g.null == 0 and sig_v.null == 0
    if not rep.axioms["nondegenerate"]:
        rep.messages.append("metric on g or v is degenerate")

    # (1) ad-invariance
    rep.axioms["ad_invariant"] = is_ad_invariant(d.g.metric, d.g, tol)
    if not rep.axioms["ad_invariant"]:
        rep.messages.append("metric on g is not ad-invariant")

    # (2) homomorphism
    c = d.g.c
    hom = 0.0
    for a in range(d.g_dim):
        for b in range(d.g_dim):
            lhs = d.pi(c[a, b])
            rhs = pis[a] @ pis[b] - pis[b] @ pis[a]
            hom = max(hom, float(np.max(np.abs(lhs - rhs), initial=0.0)))
    rep.residuals["homomorphism"] = hom
    rep.axioms["homomorphism"] = hom <= tol.abs_tol * scale ** 2 * 10
    if not rep.axioms["homomorphism"]:
        rep.messages.append("pi is not a Lie algebra homomorphism")

    # (3) faithful, no trivial subrepresentation
    faithful = null_space(d.pi.stacked(), tol).shape[1] == 0 if d.g_dim else True
    no_trivial = common_kernel(pis, tol).dim == 0 if pis else d.v_dim == 0
    rep.axioms["faithful"] = bool(faithful)
    rep.axioms["no_trivial_subrep"] = bool(no_trivial)
    if not faithful:
        rep.messages.append("pi is not faithful")
    if not no_trivial:
        rep.messages.append("pi has a trivial subrepresentation")

    # (4) skew-adjointness
    skew = max((float(np.max(np.abs(p.T @ gv + gv @ p), initial=0.0)) for p in pis), default=0.0)
    rep.residuals["skew"] = skew
    rep.axioms["skew_adjoint"] = skew <= tol.abs_tol * scale * max(1.0, float(np.max(np.abs(gv))))
    if not rep.axioms["skew_adjoint"]:
        rep.messages.append("pi(Z) is not skew-adjoint for the metric on v")

    if d.dim > MAX_TOTAL_DIM:
        rep.messages.append(f"total dimension {d.dim} exceeds the soft limit {MAX_TOTAL_DIM}")
    return rep


def embed_g(d: DataSet, z) -> np.ndarray:
    out = np.zeros(d.dim)
    out[: d.g_dim] = z
    return out


def embed_v(d: DataSet, x) -> np.ndarray:
    out = np.zeros(d.dim)
    out[d.g_dim:] = x
    return out


def build_nilpotent(d: DataSet, tol: TolerancePolicy = DEFAULT_TOL, check: bool = True) -> MetricLieAlgebra:
    """n = g + v with [g, n] = 0 and <[X, Y], Z> = <pi(Z) X, Y>.

    Basis order: the basis of g first, then the basis of v.
    """
    if check:
        rep = validate_data_set(d, tol)
        if not rep.valid:
            raise InvalidDataSet("; ".join(rep.messages))
    k, m = d.g_dim, d.v_dim
    n = k + m
    gv = d.v_metric.gram
    # pair[b, p, q] = <pi(Z_b) X_p, X_q>
    pair = np.array([(gv @ p).T for p in d.pi.matrices]).reshape(k, m, m)
    coeff = np.einsum("ab,bpq->pqa", np.linalg.inv(d.g.gram), pair)
    c = np.zeros((n, n, n))
    c[k:, k:, :k] = coeff
    c = 0.5 * (c - c.transpose(1, 0, 2))
    return MetricLieAlgebra(StructureTensor(c, tol), BilinearForm(d.total_gram()), d.name)


@dataclass
class CompactSplit:
    gbar: Subspace
    c: Subspace
    killing_eigenvalues: np.ndarray


def compact_split(g: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> CompactSplit:
    """g = [g, g] + center(g), with a compactness check on the Killing form."""
    gbar = commutator_ideal(g, tol)
    c = center(g, tol)
    if g.dim == 0:
        return CompactSplit(gbar, c, np.zeros(0))
    kf = killing_form(g)
    ev = np.linalg.eigvalsh(kf)
    thr = tol.rank_threshold(kf.shape, float(np.max(np.abs(ev), initial=0.0)))
    if np.any(ev > thr):
        raise NotCompact("Killing form has a positive direction")
    kker = Subspace.from_orthonormal(null_space(kf, tol))
    if not kker.equals(c):
        raise NotCompact("Killing form kernel differs from the center")
    if gbar.dim + c.dim != g.dim or (gbar + c).dim != g.dim:
        raise NotCompact("g is not the direct sum of [g, g] and its center")
    return CompactSplit(gbar, c, ev)


def recover_data_set(L: MetricLieAlgebra, tol: TolerancePolicy = DEFAULT_TOL) -> DataSet:
    """Data set ((z, [,]_z), z-perp, j) of a naturally reductive algebra with injective j.

    The result is expressed in the adapted basis ``[center | complement]``
    returned by :func:`nilsym.liealg.adapted_basis`.
    """
    from .errors import JNotInjective, NotNaturallyReductive
    from .natred import is_naturally_reductive

    cert = is_naturally_reductive(L, tol)
    if not cert.j_injective:
        raise JNotInjective("j has a nontrivial kernel; L has a flat factor or degenerate [n, n]")
    if not cert.verdict:
        raise NotNaturallyReductive("j(z) is not a subalgebra compatible with a skew tau")
    jm = cert.jmap
    zb = jm.center_basis.basis
    vb = jm.v_basis.basis
    gz = BilinearForm(zb.T @ L.gram @ zb)
    gv = BilinearForm(vb.T @ L.gram @ vb)
    g = MetricLieAlgebra(cert.induced_bracket, gz)
    pi = Representation(g.dim, gv.dim, [m.copy() for m in jm.matrices])
    return DataSet(g, gv, pi, L.name)

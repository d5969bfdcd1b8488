"""Orthogonal decomposition of v into pi(g)-invariant pieces.

Riemannian v splits into irreducibles. Lorentzian v carries exactly one
2-dimensional Lorentzian block v0 (spanned by two invariant lightlike lines,
on which pi(Z) acts as a multiple of a boost) plus Riemannian irreducibles.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .dataset import DataSet, compact_split
from .errors import DecompositionFailure, InvalidInput, NoBoostPart, NotScalarMultiple, NoTimelikeFixed
from .numkernel import (
    DEFAULT_TOL,
    BilinearForm,
    Subspace,
    TolerancePolicy,
    common_kernel,
    kernel,
    metric_orthonormal_basis,
    null_space,
    orthogonal_complement,
    restrict_form,
    signature,
)

__all__ = [
    "IsotypicBlock",
    "InvariantDecomposition",
    "KernelReport",
    "invariant_decomposition",
    "find_invariant_lightlike_pair",
    "extract_J_lambda",
    "kernel_decomposition",
    "timelike_fixed_vector",
    "metric_projector",
]

MAX_RETRIES = 8
CLUSTER_TOL = 1e-7


@dataclass
class IsotypicBlock:
    subspace: Subspace
    kind: str  # lorentzian_v0 | riemannian_irreducible
    J: np.ndarray | None = None
    lam: np.ndarray | None = None  # lambda(Z_a) for the canonical basis of c
    lightlike_lines: tuple | None = None
    commutant_dim: int | None = None

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim}
        if self.lam is not None:
            out["lambda"] = [float(x) for x in self.lam]
        if self.commutant_dim is not None:
            out["commutant_dim"] = self.commutant_dim
        return out


@dataclass
class InvariantDecomposition:
    blocks: list = field(default_factory=list)
    v_metric: BilinearForm | None = None

    def lorentzian_blocks(self) -> list:
        return [b for b in self.blocks if b.kind == "lorentzian_v0"]

    def invariance_residual(self, maps) -> float:
        worst = 0.0
        n = self.v_metric.dim
        for b in self.blocks:
            p = metric_projector(b.subspace, self.v_metric)
            for m in maps:
                worst = max(worst, float(np.linalg.norm((np.eye(n) - p) @ m @ p)))
        return worst

    def orthogonality_residual(self) -> float:
        g = self.v_metric.gram
        worst = 0.0
        for i, a in enumerate(self.blocks):
            for b in self.blocks[i + 1:]:
                worst = max(worst, float(np.max(np.abs(a.subspace.basis.T @ g @ b.subspace.basis), initial=0.0)))
        return worst

    def total_dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def as_dict(self) -> dict:
        return {"blocks": [b.as_dict() for b in self.blocks], "dims": [b.dim for b in self.blocks]}


def metric_projector(s: Subspace, form: BilinearForm) -> np.ndarray:
    """Projector onto ``s`` along its form-orthogonal complement."""
    b = s.basis
    if b.shape[1] == 0:
        return np.zeros((form.dim, form.dim))
    g = form.gram
    return b @ np.linalg.solve(b.T @ g @ b, b.T @ g)


def _block_coords(s: Subspace, form: BilinearForm):
    """Basis of s and the matrix sending a vector of v to its s-coordinates."""
    b = s.canonical
    g = form.gram
    return b, np.linalg.solve(b.T @ g @ b, b.T @ g)


def _first_pivot(s: Subspace) -> int:
    _, _, piv = sla.qr(s.orthonormal.T, mode="economic", pivoting=True)
    return int(np.min(piv[: s.dim]))


def _sign_normalize(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    i = int(np.argmax(np.abs(v) > 1e-12))
    return -v if v[i] < 0 else v


def find_invariant_lightlike_pair(maps, form: BilinearForm, tol: TolerancePolicy = DEFAULT_TOL,
                                  rng: np.random.Generator | None = None):
    """Two lightlike vectors spanning an invariant Lorentzian plane.

    A generic combination A of the commuting skew maps has a real eigenvalue
    pair +-lambda (lambda > 0); the eigenvectors are lightlike and each spans
    an invariant line.
    """
    maps = [np.asarray(m, dtype=float) for m in maps]
    if not maps:
        raise NoBoostPart("no maps given")
    if common_kernel(maps, tol).dim:
        raise NoBoostPart("the maps have a common kernel; the lightlike pair needs a boost part")
    rng = np.random.default_rng(0) if rng is None else rng
    scale = max(float(np.linalg.norm(m, 2)) for m in maps)
    for _ in range(MAX_RETRIES):
        coef = rng.standard_normal(len(maps))
        a = np.tensordot(coef, np.asarray(maps), axes=1)
        ev, vec = np.linalg.eig(a)
        real = np.abs(ev.imag) <= 1e-9 * max(1.0, scale)
        if not np.any(real & (ev.real > 1e-7 * max(1.0, scale))):
            continue
        cand = np.where(real)[0]
        ip = cand[np.argmax(ev.real[cand])]
        im = cand[np.argmin(ev.real[cand])]
        w0 = _sign_normalize(vec[:, ip].real)
        w1 = _sign_normalize(vec[:, im].real)
        return w0, w1
    raise NoBoostPart("no real eigenvalue pair found after retries")


def _commutant(mats: list, n: int, tol: TolerancePolicy, symmetric: bool) -> list:
    """Matrices B commuting with every A in ``mats``; symmetric or all."""
    eye = np.eye(n)
    rows = []
    for a in mats:
        # vec(BA - AB), row-major vec(B)
        rows.append(np.kron(eye, a.T) - np.kron(a, eye))
    if symmetric:
        perm = np.zeros((n * n, n * n))
        for i in range(n):
            for j in range(n):
                perm[i * n + j, j * n + i] = 1.0
        rows.append(np.eye(n * n) - perm)
    sysm = np.vstack(rows) if rows else np.zeros((0, n * n))
    ns = null_space(sysm, tol)
    return [ns[:, k].reshape(n, n) for k in range(ns.shape[1])]


def _clusters(ev: np.ndarray) -> list:
    scale = max(1.0, float(np.max(np.abs(ev))))
    groups, cur = [], [0]
    for i in range(1, len(ev)):
        if ev[i] - ev[i - 1] > CLUSTER_TOL * scale:
            groups.append(cur)
            cur = [i]
        else:
            cur.append(i)
    groups.append(cur)
    return groups


def _split_riemannian(q: np.ndarray, maps, tol: TolerancePolicy, rng) -> list:
    """Split span(q) (form-orthonormal columns) into irreducibles; returns (basis, commutant dim)."""
    k = q.shape[1]
    if k == 0:
        return []
    # in form-orthonormal coordinates the maps are skew-symmetric
    mats = [q.T @ maps.gram @ m @ q for m in maps.mats]
    sym = _commutant(mats, k, tol, symmetric=True)
    if len(sym) <= 1:
        full = len(_commutant(mats, k, tol, symmetric=False))
        if full not in (1, 2, 4):
            raise DecompositionFailure(f"commutant dimension {full} is not that of a real division algebra")
        return [(q, full)]
    for _ in range(MAX_RETRIES):
        s = sum(c * b for c, b in zip(rng.standard_normal(len(sym)), sym))
        s = 0.5 * (s + s.T)
        ev, vec = np.linalg.eigh(s)
        groups = _clusters(ev)
        if len(groups) < 2:
            continue
        out = []
        for g in groups:
            out.extend(_split_riemannian(q @ vec[:, g], maps, tol, rng))
        return out
    raise DecompositionFailure("generic commutant element kept a single eigenvalue cluster")


@dataclass
class _Maps:
    mats: list
    gram: np.ndarray


def extract_J_lambda(block: Subspace, d: DataSet, tol: TolerancePolicy = DEFAULT_TOL,
                     lorentzian: bool = False):
    """pi(Z_a) restricted to ``block`` as lambda(Z_a) J, Z_a the canonical basis of c.

    J is written in the canonical basis of the block and scaled to unit
    spectral radius; the first nonzero lambda is made non-negative. Returns
    ``(None, zeros)`` when c acts trivially on the block.
    """
    c = compact_split(d.g, tol).c
    cb = c.canonical
    b, coords = _block_coords(block, d.v_metric)
    mats = [coords @ d.pi(cb[:, a]) @ b for a in range(cb.shape[1])]
    if not mats:
        return None, np.zeros(0)
    stacked = np.column_stack([m.ravel() for m in mats])
    u, s, vh = np.linalg.svd(stacked, full_matrices=False)
    if s[0] <= tol.abs_tol:
        return None, np.zeros(len(mats))
    jm = u[:, 0].reshape(b.shape[1], b.shape[1])
    lam = s[0] * vh[0]
    # spectral radius rather than the largest singular value: the canonical
    # block basis need not be orthonormal, and J^2 = -+Id is similarity invariant
    norm = float(np.max(np.abs(np.linalg.eigvals(jm))))
    if norm <= tol.abs_tol:
        raise NotScalarMultiple("pi(c) acts nilpotently on the block")
    jm, lam = jm / norm, lam * norm
    nz = np.where(np.abs(lam) > 1e-12 * max(1.0, float(np.max(np.abs(lam)))))[0]
    if nz.size and lam[nz[0]] < 0:
        jm, lam = -jm, -lam
    resid = max(float(np.linalg.norm(m - l * jm)) for m, l in zip(mats, lam))
    if resid > 1e-8 * max(1.0, s[0]):
        raise NotScalarMultiple(f"pi(c) on the block is not a multiple of one map (residual {resid:.2e})")
    target = np.eye(b.shape[1]) if lorentzian else -np.eye(b.shape[1])
    if np.linalg.norm(jm @ jm - target) > 1e-6:
        raise NotScalarMultiple("J does not square to the expected multiple of the identity")
    return jm, lam


def invariant_decomposition(d: DataSet, tol: TolerancePolicy = DEFAULT_TOL, seed: int = 0) -> InvariantDecomposition:
    """Orthogonal invariant decomposition of v, deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    form = d.v_metric
    sig = signature(form, tol)
    maps = _Maps(d.pi.matrices, form.gram)
    blocks = []
    rest = Subspace.full(d.v_dim)
    if sig.kind == "lorentzian":
        split = compact_split(d.g, tol)
        gb = split.gbar.canonical
        if gb.shape[1]:
            u0 = common_kernel([d.pi(gb[:, a]) for a in range(gb.shape[1])], tol)
        else:
            u0 = Subspace.full(d.v_dim)
        if u0.dim < 2:
            raise DecompositionFailure("u0 is too small to host the Lorentzian block")
        b0, coords = _block_coords(u0, form)
        cb = split.c.canonical
        cmaps = [coords @ d.pi(cb[:, a]) @ b0 for a in range(cb.shape[1])]
        w0, w1 = find_invariant_lightlike_pair(cmaps, restrict_form(form, Subspace(b0)), tol, rng)
        w0, w1 = b0 @ w0, b0 @ w1
        v0 = Subspace(np.column_stack([w0, w1]), d.v_dim, tol)
        jm, lam = extract_J_lambda(v0, d, tol, lorentzian=True)
        lines = (_sign_normalize(w0), _sign_normalize(w1))
        blocks.append(IsotypicBlock(v0, "lorentzian_v0", jm, lam, lines))
        rest = orthogonal_complement(v0, form, tol)
    elif sig.kind != "riemannian":
        raise DecompositionFailure(f"v has signature class {sig.kind}; expected riemannian or lorentzian")
    if rest.dim:
        if signature(restrict_form(form, rest), tol).kind != "riemannian":
            raise DecompositionFailure("complement of v0 is not positive definite")
        q, _ = metric_orthonormal_basis(form, rest, tol)
        riem = []
        for basis, cdim in _split_riemannian(q, maps, tol, rng):
            s = Subspace(basis, d.v_dim, tol)
            jm, lam = extract_J_lambda(s, d, tol)
            riem.append(IsotypicBlock(s, "riemannian_irreducible", jm, lam, None, cdim))
        riem.sort(key=lambda b: (-b.dim, _first_pivot(b.subspace)))
        blocks.extend(riem)
    return InvariantDecomposition(blocks, form)


@dataclass
class KernelReport:
    kernel: Subspace
    pieces: list  # ker pi(Z) intersected with each block
    nondegenerate: bool
    signature_kind: str
    contains_v0: bool
    direct_sum: bool
    all_or_nothing: bool | None  # only evaluated for Z in c

    def as_dict(self) -> dict:
        return {
            "kernel_dim": self.kernel.dim,
            "piece_dims": [p.dim for p in self.pieces],
            "nondegenerate": self.nondegenerate,
            "signature": self.signature_kind,
            "contains_v0": self.contains_v0,
            "direct_sum": self.direct_sum,
            "all_or_nothing": self.all_or_nothing,
        }


def kernel_decomposition(d: DataSet, z, decomposition: InvariantDecomposition | None = None,
                         tol: TolerancePolicy = DEFAULT_TOL) -> KernelReport:
    """ker pi(Z) split along the blocks, with its non-degeneracy verified."""
    dec = invariant_decomposition(d, tol) if decomposition is None else decomposition
    z = np.asarray(z, dtype=float)
    ker = kernel(d.pi(z), tol)
    pieces = [ker.intersect(b.subspace, tol) for b in dec.blocks]
    direct = sum(p.dim for p in pieces) == ker.dim
    sig = signature(restrict_form(d.v_metric, ker), tol)
    v0 = dec.lorentzian_blocks()
    contains_v0 = bool(v0) and ker.contains_subspace(v0[0].subspace)
    aon = None
    c = compact_split(d.g, tol).c
    if c.contains(z):
        aon = all(p.dim in (0, b.dim) for p, b in zip(pieces, dec.blocks))
    return KernelReport(ker, pieces, sig.null == 0, sig.kind, contains_v0, direct, aon)


def timelike_fixed_vector(maps, form: BilinearForm, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """A timelike vector annihilated by all ``maps`` (compact semisimple action assumed)."""
    maps = list(maps)
    if not maps:
        raise InvalidInput("timelike_fixed_vector needs at least one map")
    fixed = common_kernel(maps, tol)
    if fixed.dim == 0:
        raise NoTimelikeFixed("the maps have no common fixed vector")
    h = fixed.orthonormal.T @ form.gram @ fixed.orthonormal
    ev, vec = np.linalg.eigh(0.5 * (h + h.T))
    if ev[0] >= -tol.abs_tol:
        raise NoTimelikeFixed("the fixed subspace contains no timelike vector")
    return _sign_normalize(fixed.orthonormal @ vec[:, 0])

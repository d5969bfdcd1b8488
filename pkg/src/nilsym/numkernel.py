"""Indefinite linear algebra primitives.

Everything here works on small dense float64 matrices. Decisions about
rank, nullity and signature all go through a :class:`TolerancePolicy` so
that the threshold logic lives in one place.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import AmbientDegenerate, DimensionMismatch, InvalidForm, InvalidInput

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "BilinearForm",
    "SignatureReport",
    "Subspace",
    "signature",
    "restrict_form",
    "orthogonal_complement",
    "null_space",
    "kernel",
    "common_kernel",
    "is_skew_adjoint",
    "principal_angles",
    "metric_orthonormal_basis",
]


@dataclass(frozen=True)
class TolerancePolicy:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    rank_tol_factor: float = 1e-12

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "rank_tol_factor"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"{name} must be strictly positive")

    def rank_threshold(self, shape: Sequence[int], largest: float) -> float:
        """Singular values at or below this value count as zero.

        The relative part keeps decisions scale-free; the ``abs_tol`` floor
        stops pure round-off (a matrix that should be exactly zero) from
        being read as full rank.
        """
        rel = self.rank_tol_factor * max(max(shape, default=1), 1) * largest
        return max(rel, self.abs_tol)


DEFAULT_TOL = TolerancePolicy()


class BilinearForm:
    """Symmetric bilinear form given by its Gram matrix."""

    def __init__(self, gram, tol: TolerancePolicy = DEFAULT_TOL):
        g = np.array(gram, dtype=float)
        if g.ndim == 0:
            g = g.reshape(1, 1)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidForm(f"Gram matrix must be square, got shape {g.shape}")
        if g.size and np.max(np.abs(g - g.T)) > tol.abs_tol * max(1.0, np.max(np.abs(g))):
            raise InvalidForm("Gram matrix is not symmetric")
        self.gram = 0.5 * (g + g.T)
        self.gram.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __call__(self, x, y) -> float:
        return float(np.asarray(x) @ self.gram @ np.asarray(y))

    def __repr__(self):
        return f"BilinearForm(dim={self.dim})"

    @classmethod
    def diag(cls, *entries) -> "BilinearForm":
        return cls(np.diag(np.asarray(entries, dtype=float)))

    @classmethod
    def euclidean(cls, n: int) -> "BilinearForm":
        return cls(np.eye(n))

    def is_nondegenerate(self, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        return signature(self, tol).null == 0


@dataclass(frozen=True)
class SignatureReport:
    positive: int
    negative: int
    null: int
    kind: str  # riemannian | lorentzian | degenerate | higher_index

    @property
    def dim(self) -> int:
        return self.positive + self.negative + self.null

    def as_dict(self) -> dict:
        return {"positive": self.positive, "negative": self.negative,
                "null": self.null, "class": self.kind}


def _classify(pos: int, neg: int, null: int) -> str:
    if null:
        return "degenerate"
    if neg == 0:
        return "riemannian"
    if neg == 1:
        return "lorentzian"
    return "higher_index"


def signature(form: BilinearForm, tol: TolerancePolicy = DEFAULT_TOL) -> SignatureReport:
    """Count eigenvalue signs of ``form``; a zero-dimensional form is Riemannian."""
    if not isinstance(form, BilinearForm):
        form = BilinearForm(form, tol)
    if form.dim == 0:
        return SignatureReport(0, 0, 0, "riemannian")
    ev = np.linalg.eigvalsh(form.gram)
    thr = tol.rank_threshold(form.gram.shape, float(np.max(np.abs(ev))))
    pos = int(np.sum(ev > thr))
    neg = int(np.sum(ev < -thr))
    null = form.dim - pos - neg
    return SignatureReport(pos, neg, null, _classify(pos, neg, null))


def null_space(a, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``a`` via SVD."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    m, n = a.shape
    if n == 0:
        return np.zeros((0, 0))
    if m == 0:
        return np.eye(n)
    if m > n:
        # tall systems (derivation solves): same singular values and right
        # vectors from the n x n triangular factor, without the m x m U
        a = np.linalg.qr(a, mode="r")
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    thr = tol.rank_threshold(a.shape, float(s[0]) if s.size else 0.0)
    rank = int(np.sum(s > thr))
    return vh[rank:].T.copy()


def _orth(vectors: np.ndarray, tol: TolerancePolicy) -> np.ndarray:
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    thr = tol.rank_threshold(vectors.shape, float(s[0]))
    return u[:, : int(np.sum(s > thr))]


def _pivot_form(q: np.ndarray) -> np.ndarray:
    """Basis of span(q) that is the identity on a canonical set of pivot rows.

    Column-pivoted QR on the rows of an orthonormal basis only sees the
    orthogonal projector, so the pivots (and the result) depend on the
    subspace alone. Coordinate subspaces come out as the coordinate vectors.
    """
    n, k = q.shape
    if k == 0:
        return q
    _, _, piv = sla.qr(q.T, mode="economic", pivoting=True)
    rows = np.sort(piv[:k])
    b = q @ np.linalg.inv(q[rows, :])
    b[np.abs(b) < 1e-15] = 0.0
    return b


class Subspace:
    """Linear subspace of R^n.

    ``basis`` is the working basis: the caller's columns when they were
    linearly independent, otherwise the canonical one. ``canonical`` is the
    pivoted form (identity on canonical pivot rows), which depends only on
    the span; ``orthonormal`` is a Euclidean-orthonormal basis.
    """

    def __init__(self, basis, ambient_dim: int | None = None,
                 tol: TolerancePolicy = DEFAULT_TOL, *, _orthonormal: np.ndarray | None = None):
        if _orthonormal is None:
            b = np.asarray(basis, dtype=float)
            if b.ndim == 1:
                b = b.reshape(-1, 1)
            if b.size == 0:
                n = ambient_dim if ambient_dim is not None else b.shape[0]
                b = np.zeros((n, 0))
            if ambient_dim is not None and b.shape[0] != ambient_dim:
                raise DimensionMismatch(f"basis has {b.shape[0]} rows, expected {ambient_dim}")
            q = _orth(b, tol)
            given = b if q.shape[1] == b.shape[1] else None
        else:
            q = _orthonormal
            given = None
        self._q = q
        self.canonical = _pivot_form(q)
        # user-supplied independent columns are kept as the working basis
        self.basis = self.canonical if given is None else given.copy()
        self.ambient_dim = q.shape[0]

    @classmethod
    def from_orthonormal(cls, q: np.ndarray) -> "Subspace":
        return cls(None, _orthonormal=np.asarray(q, dtype=float))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls.from_orthonormal(np.zeros((n, 0)))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls.from_orthonormal(np.eye(n))

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        idx = list(indices)
        return cls.from_orthonormal(np.eye(n)[:, idx])

    @property
    def dim(self) -> int:
        return self._q.shape[1]

    @property
    def orthonormal(self) -> np.ndarray:
        """Euclidean-orthonormal basis of the same span."""
        return self._q

    @property
    def projector(self) -> np.ndarray:
        """Euclidean orthogonal projector onto the subspace."""
        return self._q @ self._q.T

    def contains(self, v, tol: float = 1e-8) -> bool:
        v = np.asarray(v, dtype=float)
        r = v - self.projector @ v
        return float(np.linalg.norm(r)) <= tol * max(1.0, float(np.linalg.norm(v)))

    def contains_subspace(self, other: "Subspace", tol: float = 1e-8) -> bool:
        if other.dim == 0:
            return True
        r = other.orthonormal - self.projector @ other.orthonormal
        return float(np.linalg.norm(r, 2)) <= tol

    def equals(self, other: "Subspace", tol: float = 1e-7) -> bool:
        """Equality by dimension plus largest principal angle below ``tol``."""
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        if self.dim == 0:
            return True
        return float(np.max(principal_angles(self, other))) < tol

    def intersect(self, other: "Subspace", tol: TolerancePolicy = DEFAULT_TOL) -> "Subspace":
        n = self.ambient_dim
        # x in both iff (I-P1)x = 0 and (I-P2)x = 0
        stacked = np.vstack([np.eye(n) - self.projector, np.eye(n) - other.projector])
        return Subspace.from_orthonormal(null_space(stacked, tol))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(np.hstack([self._q, other._q]), self.ambient_dim)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def principal_angles(a: Subspace, b: Subspace) -> np.ndarray:
    if a.dim == 0 or b.dim == 0:
        return np.zeros(0)
    return sla.subspace_angles(a.orthonormal, b.orthonormal)


def restrict_form(form: BilinearForm, s: Subspace) -> BilinearForm:
    """Gram matrix of ``form`` on the canonical basis of ``s``."""
    if s.ambient_dim != form.dim:
        raise DimensionMismatch(f"subspace lives in R^{s.ambient_dim}, form has dim {form.dim}")
    b = s.basis
    return BilinearForm(b.T @ form.gram @ b)


def orthogonal_complement(s: Subspace, form: BilinearForm,
                          tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    if s.ambient_dim != form.dim:
        raise DimensionMismatch("subspace and form dimensions differ")
    if signature(form, tol).null:
        raise AmbientDegenerate("orthogonal complement needs a non-degenerate ambient form")
    if s.dim == 0:
        return Subspace.full(form.dim)
    return Subspace.from_orthonormal(null_space(s.orthonormal.T @ form.gram, tol))


def kernel(a, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return Subspace.from_orthonormal(null_space(a, tol))


def common_kernel(maps: Sequence, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    maps = [np.atleast_2d(np.asarray(m, dtype=float)) for m in maps]
    if not maps:
        raise InvalidInput("common_kernel needs at least one map")
    cols = {m.shape[1] for m in maps}
    if len(cols) != 1:
        raise DimensionMismatch(f"maps have inconsistent column counts {sorted(cols)}")
    return kernel(np.vstack(maps), tol)


def is_skew_adjoint(a, form: BilinearForm, tol: float = 1e-9) -> bool:
    a = np.asarray(a, dtype=float)
    g = form.gram
    if a.shape != g.shape:
        raise DimensionMismatch(f"map shape {a.shape} vs form dim {form.dim}")
    resid = np.linalg.norm(a.T @ g + g @ a)
    return bool(resid <= tol * (1.0 + np.linalg.norm(g) * np.linalg.norm(a)))


def metric_orthonormal_basis(form: BilinearForm, s: Subspace | None = None,
                             tol: TolerancePolicy = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Basis of ``s`` that is orthonormal for ``form``, negative directions first.

    Returns ``(basis, signs)`` with ``basis.T @ G @ basis = diag(signs)``.
    Raises :class:`AmbientDegenerate` when the restriction is degenerate.
    """
    q = np.eye(form.dim) if s is None else s.orthonormal
    if q.shape[1] == 0:
        return q, np.zeros(0)
    h = q.T @ form.gram @ q
    ev, vec = np.linalg.eigh(0.5 * (h + h.T))
    thr = tol.rank_threshold(h.shape, float(np.max(np.abs(ev))))
    if np.any(np.abs(ev) <= thr):
        raise AmbientDegenerate("restricted form is degenerate")
    order = np.argsort(ev)
    ev, vec = ev[order], vec[:, order]
    basis = q @ vec / np.sqrt(np.abs(ev))
    return basis, np.sign(ev)

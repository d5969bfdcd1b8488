"""Built-in examples and a seeded generator of random Lorentzian data sets."""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .dataset import DataSet, Representation, validate_data_set
from .liealg import MetricLieAlgebra, StructureTensor, heisenberg_structure, su2_structure
from .numkernel import BilinearForm

__all__ = [
    "ROTATION",
    "BOOST",
    "quat_left",
    "quat_right",
    "heis3_timelike",
    "boost3",
    "su2_mixed",
    "heis3_riemannian",
    "heis3_flatline",
    "heis3_nullline",
    "nonsubalgebra_example",
    "GALLERY",
    "gallery_names",
    "get_example",
    "random_lorentzian_data_set",
]

ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])
BOOST = np.array([[0.0, 1.0], [1.0, 0.0]])


def _qmul(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def quat_left(q) -> np.ndarray:
    """Matrix of x -> q x on H = R^4 with basis (1, i, j, k)."""
    e = np.eye(4)
    return np.column_stack([_qmul(q, e[:, m]) for m in range(4)])


def quat_right(q) -> np.ndarray:
    """Matrix of x -> x q."""
    e = np.eye(4)
    return np.column_stack([_qmul(e[:, m], q) for m in range(4)])


_I, _J, _K = np.eye(4)[1], np.eye(4)[2], np.eye(4)[3]


def _spin_half() -> list[np.ndarray]:
    # realified C^2 = H; E_k -> left multiplication by half the unit quaternions
    return [0.5 * quat_left(q) for q in (_I, _J, _K)]


def _spin_one() -> list[np.ndarray]:
    c = su2_structure()
    return [c[i].T.copy() for i in range(3)]


def _blockdiag(*blocks):
    return sla.block_diag(*blocks) if blocks else np.zeros((0, 0))


def heis3_timelike() -> DataSet:
    """g = R Z with <Z, Z> = -1, v = R^2 Euclidean, pi(Z) = rotation."""
    g = MetricLieAlgebra(StructureTensor.zeros(1), BilinearForm([[-1.0]]))
    return DataSet(g, BilinearForm.euclidean(2), Representation(1, 2, [ROTATION]), "heis3-timelike")


def boost3() -> DataSet:
    """g = R Z with <Z, Z> = 1, v = R^{1,1}, pi(Z) = boost."""
    g = MetricLieAlgebra(StructureTensor.zeros(1), BilinearForm([[1.0]]))
    return DataSet(g, BilinearForm.diag(-1.0, 1.0), Representation(1, 2, [BOOST]), "boost3")


def su2_mixed() -> DataSet:
    """g = su(2) + R Z0, v = realified C^2 + R^{1,1}.

    su(2) acts by the standard representation on C^2 and trivially on the
    R^{1,1} block; Z0 acts as complex multiplication by i on C^2 and as the
    boost on R^{1,1}.
    """
    c = np.zeros((4, 4, 4))
    c[:3, :3, :3] = su2_structure()
    # -Killing/8 on su(2) (Killing form is -2 Id in this basis), 1 on Z0
    gg = np.diag([0.25, 0.25, 0.25, 1.0])
    g = MetricLieAlgebra(StructureTensor(c), BilinearForm(gg))
    zero2 = np.zeros((2, 2))
    pis = [_blockdiag(m, zero2) for m in _spin_half()]
    pis.append(_blockdiag(quat_right(_I), BOOST))
    gv = BilinearForm(np.diag([1.0, 1.0, 1.0, 1.0, -1.0, 1.0]))
    return DataSet(g, gv, Representation(4, 6, pis), "su2-mixed")


def heis3_riemannian() -> DataSet:
    g = MetricLieAlgebra(StructureTensor.zeros(1), BilinearForm([[1.0]]))
    return DataSet(g, BilinearForm.euclidean(2), Representation(1, 2, [ROTATION]), "heis3-riemannian")


def heis3_flatline() -> MetricLieAlgebra:
    """h3 + R, Euclidean; basis X1, X2, Z, W with [X1, X2] = Z."""
    return MetricLieAlgebra(StructureTensor(heisenberg_structure(1)), BilinearForm.euclidean(4), "heis3-flatline")


def heis3_nullline() -> MetricLieAlgebra:
    """[X1, X2] = Z1 with the center span{Z1, Z2} hyperbolic, so [n, n] is lightlike."""
    gram = np.eye(4)
    gram[2:, 2:] = BOOST
    return MetricLieAlgebra(StructureTensor(heisenberg_structure(1)), BilinearForm(gram), "heis3-nullline")


def nonsubalgebra_example() -> MetricLieAlgebra:
    """z = R^2, v = R^4 with j(Z1) a complex structure and j(Z2) a single-plane rotation.

    [j(Z1), j(Z2)] falls outside span{j(Z1), j(Z2)}, so the algebra is not
    naturally reductive for its isometric automorphism presentation.
    """
    j1 = _blockdiag(ROTATION, ROTATION)
    j2 = np.zeros((4, 4))
    j2[1, 2], j2[2, 1] = -1.0, 1.0
    c = np.zeros((6, 6, 6))
    for a, jm in enumerate((j1, j2)):
        # Euclidean metric: <[X_p, X_q], Z_a> = <j_a X_p, X_q> = jm[q, p]
        c[2:, 2:, a] = jm.T
    return MetricLieAlgebra(StructureTensor(c), BilinearForm.euclidean(6), "nonsubalgebra")


GALLERY = {
    "heis3-timelike": heis3_timelike,
    "boost3": boost3,
    "su2-mixed": su2_mixed,
    "heis3-riemannian": heis3_riemannian,
    "heis3-flatline": heis3_flatline,
    "heis3-nullline": heis3_nullline,
    "nonsubalgebra": nonsubalgebra_example,
}


def gallery_names() -> list[str]:
    return list(GALLERY)


def get_example(name: str):
    try:
        return GALLERY[name]()
    except KeyError:
        raise KeyError(f"unknown gallery example {name!r}; known: {', '.join(GALLERY)}") from None


def _random_basis_change(rng: np.random.Generator, n: int, strength: float = 0.3) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0))
    while True:
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        p = q @ (np.eye(n) + strength * rng.standard_normal((n, n)) / np.sqrt(n))
        sv = np.linalg.svd(p, compute_uv=False)
        # the smallest singular value guard matters in dimension one, where cond is always 1
        if sv[0] / sv[-1] < 20 and sv[-1] > 0.3:
            return p


def _signed(rng, size, lo=0.5, hi=2.0):
    return rng.uniform(lo, hi, size) * rng.choice([-1.0, 1.0], size)


def random_lorentzian_data_set(rng: np.random.Generator, max_dim: int = 16,
                               mix_basis: bool = True, max_tries: int = 200) -> DataSet:
    """Random validated Lorentzian data set built from blocks.

    Blocks: realified su(2) irreps (spin 1/2 on R^4, spin 1 on R^3), rotation
    generators on R^2, and one boost on R^{1,1} when v is the Lorentzian
    factor. The center of g acts on each block through a multiple of its
    complex (or boost) structure, so compactness holds by construction.
    """
    for _ in range(max_tries):
        v_lorentz = bool(rng.random() < 0.5)
        n_su2 = int(rng.integers(0, 2))
        k = int(rng.integers(1, 3))
        blocks = []  # (su2 matrices or None, J or None, block gram)
        if v_lorentz:
            blocks.append((None, BOOST, np.diag([-1.0, 1.0])))
        budget = max_dim - 3 * n_su2 - k - sum(b[2].shape[0] for b in blocks)
        kinds = ["rot2"] + (["half", "one"] if n_su2 else [])
        for _ in range(int(rng.integers(1, 4))):
            kind = kinds[int(rng.integers(len(kinds)))]
            size = {"rot2": 2, "half": 4, "one": 3}[kind]
            if size > budget:
                continue
            budget -= size
            if kind == "rot2":
                blocks.append((None, ROTATION, np.eye(2)))
            elif kind == "half":
                blocks.append((_spin_half(), quat_right(_I), np.eye(4)))
            else:
                blocks.append((_spin_one(), None, np.eye(3)))
        if n_su2 and not any(b[0] is not None for b in blocks):
            if budget >= 3:
                blocks.append((_spin_one(), None, np.eye(3)))
            else:
                continue
        if not blocks or (not v_lorentz and len(blocks) == 0):
            continue
        lam = np.zeros((len(blocks), k))
        for i, (su, jmat, _) in enumerate(blocks):
            if jmat is not None:
                lam[i] = _signed(rng, k)
                if su is not None and rng.random() < 0.3:
                    lam[i] = 0.0
        if np.linalg.matrix_rank(lam, tol=1e-3) < k:
            continue
        scales = rng.uniform(0.5, 2.0, len(blocks))
        gv = _blockdiag(*[s * b[2] for s, b in zip(scales, blocks)])
        m = gv.shape[0]
        # g = su(2)^{n_su2} + R^k
        gd = 3 * n_su2 + k
        c = np.zeros((gd, gd, gd))
        if n_su2:
            c[:3, :3, :3] = su2_structure()
        if v_lorentz:
            gc = np.diag(rng.uniform(0.5, 2.0, k))
        else:
            gc = np.diag(np.concatenate([[-rng.uniform(0.5, 2.0)], rng.uniform(0.5, 2.0, k - 1)]))
        q, _ = np.linalg.qr(rng.standard_normal((k, k)))
        gc = q.T @ gc @ q
        lam = lam @ q  # keep pi(c) consistent with the rotated c basis
        gg = _blockdiag(*([rng.uniform(0.5, 2.0) * np.eye(3)] if n_su2 else []), gc)
        pis = []
        for a in range(3 * n_su2):
            pis.append(_blockdiag(*[(b[0][a] if b[0] is not None else np.zeros_like(b[2])) for b in blocks]))
        for a in range(k):
            pis.append(_blockdiag(*[(lam[i, a] * b[1] if b[1] is not None else np.zeros_like(b[2]))
                                    for i, b in enumerate(blocks)]))
        g = MetricLieAlgebra(StructureTensor(c), BilinearForm(gg))
        d = DataSet(g, BilinearForm(gv), Representation(gd, m, pis), "random")
        if mix_basis:
            d = transform_data_set(d, _random_basis_change(rng, gd), _random_basis_change(rng, m))
        rep = validate_data_set(d)
        if rep.valid and rep.lorentzian:
            return d
    raise RuntimeError("could not generate a valid Lorentzian data set")


def transform_data_set(d: DataSet, pg, pv) -> DataSet:
    """Change bases of g and v by the columns of ``pg`` and ``pv``."""
    from .liealg import change_basis

    g2 = change_basis(d.g, pg)
    pvinv = np.linalg.inv(pv)
    mats = [pvinv @ d.pi(pg[:, a]) @ pv for a in range(d.g_dim)]
    gv = pv.T @ d.v_metric.gram @ pv
    return DataSet(g2, BilinearForm(0.5 * (gv + gv.T)), Representation(d.g_dim, d.v_dim, mats), d.name)

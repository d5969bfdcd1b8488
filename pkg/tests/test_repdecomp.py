import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilsym import gallery
from nilsym.dataset import DataSet, Representation, compact_split
from nilsym.errors import InvalidInput, NoBoostPart, NoTimelikeFixed
from nilsym.numkernel import BilinearForm, Subspace, restrict_form, signature
from nilsym.repdecomp import (
    extract_J_lambda,
    find_invariant_lightlike_pair,
    invariant_decomposition,
    kernel_decomposition,
    metric_projector,
    timelike_fixed_vector,
)


def test_e1_single_riemannian_block():
    d = gallery.heis3_timelike()
    dec = invariant_decomposition(d)
    assert [b.kind for b in dec.blocks] == ["riemannian_irreducible"]
    b = dec.blocks[0]
    assert np.allclose(b.J, gallery.ROTATION) and np.allclose(b.lam, [1.0])
    assert b.commutant_dim == 2


def test_e2_lorentzian_block_and_lines():
    d = gallery.boost3()
    dec = invariant_decomposition(d)
    assert [b.kind for b in dec.blocks] == ["lorentzian_v0"]
    b = dec.blocks[0]
    assert np.allclose(b.J @ b.J, np.eye(2))
    assert np.allclose(b.J, gallery.BOOST) and np.allclose(b.lam, [1.0])
    s = 1 / np.sqrt(2)
    got = sorted(tuple(np.round(w, 12)) for w in b.lightlike_lines)
    assert np.allclose(got, sorted([(s, s), (s, -s)]))
    for w in b.lightlike_lines:
        assert abs(d.v_metric(w, w)) < 1e-12


def test_e3_blocks():
    d = gallery.su2_mixed()
    dec = invariant_decomposition(d)
    assert [b.kind for b in dec.blocks] == ["lorentzian_v0", "riemannian_irreducible"]
    assert dec.blocks[0].subspace.equals(Subspace.coordinate(6, [4, 5]))
    assert dec.blocks[1].subspace.equals(Subspace.coordinate(6, range(4)))
    # right-i plus the su(2) action: commutant is C
    assert dec.blocks[1].commutant_dim == 2
    assert dec.invariance_residual(d.pi.matrices) < 1e-12
    assert dec.orthogonality_residual() < 1e-12


def test_riemannian_only_split_into_irreducibles():
    g = gallery.heis3_timelike().g
    pi = np.kron(np.diag([1.0, 2.0]), gallery.ROTATION)
    d = DataSet(g, BilinearForm.euclidean(4), Representation(1, 4, [pi]))
    dec = invariant_decomposition(d)
    assert [b.dim for b in dec.blocks] == [2, 2]
    assert sorted(float(b.lam[0]) for b in dec.blocks) == pytest.approx([1.0, 2.0])


def test_metric_projector_examples():
    form = BilinearForm.diag(-1, 1)
    p = metric_projector(Subspace.coordinate(2, [0]), form)
    assert np.allclose(p, np.diag([1.0, 0.0]))
    assert np.allclose(metric_projector(Subspace.zero(2), form), 0.0)


def test_lightlike_pair_errors():
    with pytest.raises(NoBoostPart):
        find_invariant_lightlike_pair([], BilinearForm.diag(-1, 1))
    with pytest.raises(NoBoostPart):
        find_invariant_lightlike_pair([np.zeros((2, 2))], BilinearForm.diag(-1, 1))
    with pytest.raises(NoBoostPart):
        # a rotation has no real eigenvalues
        find_invariant_lightlike_pair([gallery.ROTATION], BilinearForm.euclidean(2))


def test_extract_J_lambda_trivial_block():
    d = gallery.su2_mixed()
    # spin-1/2 block with Z0 acting as right-i
    jm, lam = extract_J_lambda(Subspace.coordinate(6, range(4)), d)
    assert np.allclose(jm @ jm, -np.eye(4)) and np.allclose(lam, [1.0])


def test_kernel_examples():
    d = gallery.su2_mixed()
    z0 = np.eye(4)[3]
    rep = kernel_decomposition(d, z0)
    assert rep.kernel.dim == 0 and rep.all_or_nothing
    rep = kernel_decomposition(d, np.eye(4)[0])  # su(2) element: kernel is v0
    assert rep.kernel.equals(Subspace.coordinate(6, [4, 5]))
    assert rep.nondegenerate and rep.contains_v0 and rep.all_or_nothing is None
    rep = kernel_decomposition(d, np.zeros(4))
    assert rep.kernel.dim == 6 and rep.signature_kind == "lorentzian"


def test_timelike_fixed_vector():
    d = gallery.su2_mixed()
    su = d.pi.matrices[:3]
    w = timelike_fixed_vector(su, d.v_metric)
    assert d.v_metric(w, w) < 0
    assert all(np.allclose(m @ w, 0.0) for m in su)
    with pytest.raises(InvalidInput):
        timelike_fixed_vector([], d.v_metric)
    with pytest.raises(NoTimelikeFixed):
        timelike_fixed_vector([gallery.ROTATION], BilinearForm.euclidean(2))
    with pytest.raises(NoTimelikeFixed):
        m = np.zeros((3, 3))
        m[1:, 1:] = gallery.ROTATION
        timelike_fixed_vector([m], BilinearForm.diag(1, -1, -1))


def test_seed_determinism():
    d = gallery.random_lorentzian_data_set(np.random.default_rng(11))
    a = invariant_decomposition(d, seed=3)
    b = invariant_decomposition(d, seed=3)
    assert [x.dim for x in a.blocks] == [x.dim for x in b.blocks]
    for x, y in zip(a.blocks, b.blocks):
        assert x.subspace.equals(y.subspace)


@given(st.integers(0, 2**32 - 1))
def test_random_decomposition_properties(seed):
    rng = np.random.default_rng(seed)
    d = gallery.random_lorentzian_data_set(rng, max_dim=14)
    dec = invariant_decomposition(d)
    assert dec.total_dim() == d.v_dim
    assert dec.invariance_residual(d.pi.matrices) < 1e-9
    assert dec.orthogonality_residual() < 1e-9
    lor = signature(d.v_metric).kind == "lorentzian"
    assert len(dec.lorentzian_blocks()) == (1 if lor else 0)
    if lor:
        assert dec.blocks[0].kind == "lorentzian_v0"
    for b in dec.blocks[1:] if lor else dec.blocks:
        assert signature(restrict_form(d.v_metric, b.subspace)).kind == "riemannian"
        assert b.commutant_dim in (1, 2, 4)
    # kernels of random central elements are non-degenerate and all-or-nothing
    cb = compact_split(d.g).c.canonical
    z = cb @ rng.standard_normal(cb.shape[1])
    rep = kernel_decomposition(d, z, dec)
    assert rep.nondegenerate and rep.direct_sum and rep.all_or_nothing

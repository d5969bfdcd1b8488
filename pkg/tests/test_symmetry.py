import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilsym import gallery
from nilsym.dataset import DataSet, Representation, build_nilpotent
from nilsym.errors import ZNotCentral
from nilsym.geometry import geodesic_residual
from nilsym.isotropy import isotropy_split
from nilsym.liealg import MetricLieAlgebra, StructureTensor
from nilsym.numkernel import BilinearForm, Subspace
from nilsym.symmetry import (
    KillingPair,
    fixed_point_subspace,
    nabla_killing_at_e,
    symmetric_isotropy,
    transvection_for_central,
    transvection_space,
    verify_main_theorem,
)


def test_e1_index_one_timelike():
    rep = verify_main_theorem(gallery.heis3_timelike())
    assert rep.ok and rep.s_e.dim == 1
    assert rep.s_e.equals(Subspace.coordinate(3, [0]))
    assert rep.s_e_signature.negative == 1


def test_e2_index_one_spacelike():
    rep = verify_main_theorem(gallery.boost3())
    assert rep.ok and rep.s_e.dim == 1 and rep.s_e_signature.positive == 1


def test_e3_theorem():
    rep = verify_main_theorem(gallery.su2_mixed())
    assert rep.ok and rep.s_e.equals(Subspace.coordinate(10, [3]))
    assert rep.haut_dim == 5
    assert rep.symmetric_isotropy_residual < 1e-10


def test_central_transvection_is_killing_and_parallel():
    d = gallery.heis3_timelike()
    L = build_nilpotent(d)
    p = transvection_for_central(d, np.ones(1))
    assert np.allclose(nabla_killing_at_e(L, p), 0.0)
    assert geodesic_residual(L, p.u, p.d, np.linspace(0, 1, 5)) < 1e-6
    with pytest.raises(ZNotCentral):
        transvection_for_central(gallery.su2_mixed(), np.eye(4)[0])


def test_non_transvection_pair():
    L = build_nilpotent(gallery.heis3_timelike())
    pair = KillingPair(np.array([0.0, 1.0, 0.0]), np.zeros((3, 3)))
    assert np.max(np.abs(nabla_killing_at_e(L, pair))) > 0.1


def test_fixed_points_without_isotropy_is_everything():
    L = build_nilpotent(gallery.heis3_timelike())
    assert fixed_point_subspace(L, []).dim == 3


def _two_dim_center():
    # g = R^2 Lorentzian, v = R^4, pi(Z1), pi(Z2) independent rotations on two planes
    g = MetricLieAlgebra(StructureTensor.zeros(2), BilinearForm.diag(-1.0, 1.0))
    r = gallery.ROTATION
    z = np.zeros((2, 2))
    pis = [np.block([[r, z], [z, 2 * r]]), np.block([[3 * r, z], [z, -r]])]
    return DataSet(g, BilinearForm.euclidean(4), Representation(2, 4, pis))


def test_two_dim_center_symmetric_isotropy():
    d = _two_dim_center()
    L = build_nilpotent(d)
    haut = isotropy_split(d).orthonormal_basis()
    ts = transvection_space(L, haut)
    assert ts.index == 2 and ts.residual < 1e-10
    sym = symmetric_isotropy(L, ts)
    # [(Z1, pi/2), (Z2, pi/2)] has zero value at e
    assert sym.n_component_residual < 1e-10
    rep = verify_main_theorem(d)
    assert rep.ok and rep.s_e_signature.kind == "lorentzian"


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_random_main_theorem(seed):
    d = gallery.random_lorentzian_data_set(np.random.default_rng(seed), max_dim=12)
    rep = verify_main_theorem(d)
    assert rep.ok
    assert rep.transvection_residual < 1e-9
    assert rep.symmetric_isotropy_residual < 1e-9

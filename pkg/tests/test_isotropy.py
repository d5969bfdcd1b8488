import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilsym import gallery
from nilsym.dataset import build_nilpotent
from nilsym.errors import ZNotInGbar
from nilsym.isotropy import (
    commutant_skew,
    embed_gbar,
    frobenius_orthonormalize,
    group_level_check,
    isotropy_split,
)
from nilsym.liealg import derivation_residual


def test_commutant_examples():
    assert len(commutant_skew(gallery.heis3_timelike())) == 1
    assert len(commutant_skew(gallery.boost3())) == 1
    # C^2 with su(2) + right-i: only right-i survives; R^{1,1}: the boost
    assert len(commutant_skew(gallery.su2_mixed())) == 2


def test_isotropy_dims():
    assert isotropy_split(gallery.heis3_timelike()).total_dim == 1
    assert isotropy_split(gallery.boost3()).total_dim == 1
    s = isotropy_split(gallery.su2_mixed())
    assert (len(s.gbar_part), len(s.u_part), s.total_dim) == (3, 2, 5)
    assert s.as_dict()["direct_dim"] == 5


def test_isotropy_elements_are_skew_derivations():
    d = gallery.su2_mixed()
    L = build_nilpotent(d)
    for m in isotropy_split(d).basis():
        assert derivation_residual(L, m) < 1e-12
        assert np.max(np.abs(m.T @ L.gram + L.gram @ m)) < 1e-12


def test_embed_gbar():
    d = gallery.su2_mixed()
    assert np.allclose(embed_gbar(d, np.zeros(4)), 0.0)
    m = embed_gbar(d, np.eye(4)[0])
    assert np.allclose(m[4:, 4:], d.pi.matrices[0])
    with pytest.raises(ZNotInGbar):
        embed_gbar(d, np.eye(4)[3])
    with pytest.raises(ZNotInGbar):
        embed_gbar(gallery.heis3_timelike(), np.ones(1))


def test_frobenius_orthonormalize():
    a = np.eye(2)
    out = frobenius_orthonormalize([a, 2 * a, gallery.ROTATION])
    assert len(out) == 2
    g = np.array([[np.sum(x * y) for y in out] for x in out])
    assert np.allclose(g, np.eye(2))


def test_group_level_check():
    d = gallery.su2_mixed()
    assert group_level_check(d, np.eye(4)[0], 0.7)
    chk = group_level_check(d, np.array([0.3, -1.0, 0.5, 0.0]), 2.0)
    assert chk.ok and chk.metric_residual < 1e-8
    with pytest.raises(ZNotInGbar):
        group_level_check(d, np.eye(4)[3], 1.0)


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_random_isotropy_matches_direct_solve(seed):
    d = gallery.random_lorentzian_data_set(np.random.default_rng(seed), max_dim=12)
    s = isotropy_split(d)  # raises TheoremMismatch on disagreement
    assert s.residuals["gbar_u_commutator"] < 1e-9
    assert s.residuals["u_on_g"] < 1e-12

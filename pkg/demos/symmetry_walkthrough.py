"""Walk through the symmetry analysis of the three reference data sets.

For each example: build n = g + v, check the connection against the
Koszul formula, decompose v, assemble the isotropy algebra and compare the
symmetry subspace s_e with the fixed-point set F0 and the center c of g.

    python3 demos/symmetry_walkthrough.py
"""
import numpy as np

from nilsym import gallery
from nilsym.dataset import build_nilpotent, validate_data_set
from nilsym.geometry import flat_factor_analysis, koszul_connection, levi_civita_2step
from nilsym.isotropy import isotropy_split
from nilsym.natred import is_naturally_reductive
from nilsym.repdecomp import invariant_decomposition
from nilsym.symmetry import verify_main_theorem


def describe(name):
    d = gallery.get_example(name)
    val = validate_data_set(d)
    L = build_nilpotent(d)
    print(f"== {name}: dim g = {d.g_dim}, dim v = {d.v_dim}")
    print(f"   g is {val.signatures['g'].kind}, v is {val.signatures['v'].kind}")
    gap = np.max(np.abs(levi_civita_2step(L).gamma - koszul_connection(L).gamma))
    print(f"   closed-form vs Koszul connection: {gap:.1e}")
    print(f"   flat factor: {flat_factor_analysis(L).verdict}")
    print(f"   naturally reductive: {is_naturally_reductive(L).verdict}")
    dec = invariant_decomposition(d)
    for b in dec.blocks:
        lam = np.round(b.lam, 6).tolist() if b.lam is not None else None
        print(f"   block {b.kind:<22} dim {b.dim}  lambda {lam}")
    split = isotropy_split(d)
    print(f"   h^aut: gbar {len(split.gbar_part)} + u {len(split.u_part)} = {split.total_dim}")
    rep = verify_main_theorem(d)
    print(f"   index of symmetry {rep.s_e.dim}, s_e {rep.s_e_signature.kind}, "
          f"s_e = F0 = c: {rep.equal}")


if __name__ == "__main__":
    for name in ("heis3-timelike", "boost3", "su2-mixed"):
        describe(name)

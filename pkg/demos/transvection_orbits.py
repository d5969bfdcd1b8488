"""Transvection orbits are geodesics; a generic Killing orbit is not.

On the timelike Heisenberg example, the pair (Z, pi(Z)/2) is a
transvection at e and its orbit through e solves the geodesic equation.
The pair (X1 + Z, 0), a left translation, is a Killing field whose orbit
leaves the geodesic. Orbits in pure v directions are one-parameter
subgroups and happen to be geodesics too, so they make a poor contrast.

    python3 demos/transvection_orbits.py
"""
import numpy as np

from nilsym import gallery
from nilsym.dataset import build_nilpotent
from nilsym.geometry import geodesic_integrate, geodesic_residual, killing_flow
from nilsym.symmetry import transvection_for_central

d = gallery.heis3_timelike()
L = build_nilpotent(d)  # basis Z, X1, X2
ts = np.linspace(0.0, 1.0, 101)

pair = transvection_for_central(d, np.ones(1))
print("transvection (Z, pi(Z)/2)")
print(f"  geodesic residual on [0, 1]: {geodesic_residual(L, pair.u, pair.d, ts):.2e}")
tr = geodesic_integrate(L, np.zeros(3), pair.u, 1.0, step=1e-3)
end = killing_flow(L, pair.u, pair.d, np.zeros(3), 1.0)
print(f"  RK4 geodesic vs orbit at t = 1: {np.linalg.norm(tr.x[-1] - end):.2e}")

u = np.array([1.0, 1.0, 0.0])
print("Killing pair (X1 + Z, 0)")
print(f"  geodesic residual on [0, 1]: {geodesic_residual(L, u, np.zeros((3, 3)), ts):.2e}")
tr = geodesic_integrate(L, np.zeros(3), u, 1.0, step=1e-3)
end = killing_flow(L, u, np.zeros((3, 3)), np.zeros(3), 1.0)
print(f"  RK4 geodesic vs orbit at t = 1: {np.linalg.norm(tr.x[-1] - end):.2e}")

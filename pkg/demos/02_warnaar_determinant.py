"""
A determinant of theta factorials
=================================

The matrix with entries (a z_k^±)_{j-1} (b z_k^±)_{n-j} has a product
determinant. Compare LU elimination with the closed form and look at the
conditioning diagnostic that explains the rare disagreements.
"""

import numpy as np

from ellselberg import Nome
from ellselberg.detkit import det_condition, rel_residual, warnaar_det_closed, warnaar_det_direct, warnaar_matrix

rng = np.random.default_rng(0)
nome = Nome.from_polar(0.35, 0.5, 0.4, -0.8)


def draw(size=None):
    return rng.uniform(0.3, 0.9, size) * np.exp(2j * np.pi * rng.uniform(size=size))


for n in range(1, 6):
    a, b = draw(2)
    zs = draw(n)
    direct = warnaar_det_direct(a, b, zs, nome)
    closed = warnaar_det_closed(a, b, zs, nome)
    kappa = det_condition(warnaar_matrix(a, b, zs, nome))
    print(f"n={n}  det={direct:.6e}  residual={rel_residual(direct, closed):.1e}  condition={kappa:.1e}")

# Equal variables make two columns coincide: both sides vanish.
print("z1 = z2:", warnaar_det_direct(0.4, 0.5j, [0.7, 0.7], nome), warnaar_det_closed(0.4, 0.5j, [0.7, 0.7], nome))

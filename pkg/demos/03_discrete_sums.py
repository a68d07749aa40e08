"""
Discrete elliptic Selberg sums
==============================

Sample balanced parameters, compare both sides of the summation and the
transformation, then rebuild the transformation from a determinant of
one-variable sums.
"""

from ellselberg import Nome
from ellselberg import discrete as ds
from ellselberg.detkit import det, rel_residual

nome = Nome.from_polar(0.20, 0.3, 0.45, 1.1)

# Summation: a closed form for a sum over 0 <= x_1 < ... < x_n <= N.
S = ds.sample_discrete_params(seed=1, n=2, N=5, mode="mbs", nome=nome)
print("summation   lhs", ds.mbs_lhs(S, nome))
print("            rhs", ds.mbs_rhs(S, nome))

# Transformation: a sum with seven parameters equals a sum with parameters (lambda, ...).
P = ds.sample_discrete_params(seed=2, n=3, N=5, mode="mbt", nome=nome)
lhs, rhs = ds.mbt_lhs(P, nome), ds.mbt_rhs(P, nome)
print("transform   lhs", lhs)
print("            rhs", rhs, " residual", rel_residual(lhs, rhs))

# How much the sums cancel bounds how far roundoff can push the residual.
print("cancellation factors:", {k: round(v, 1) for k, v in ds.conditioning(P, nome).items()})

# The determinantal route: det S = prefactor * (either side).
S_direct = ds.sjk_matrix(P, nome)
S_other = ds.sjk_matrix(P, nome, "transformed")
pf = ds.prefactor_pf(P, nome)
print("det S / lhs  =", det(S_direct) / lhs)
print("det S' / rhs =", det(S_other) / rhs)
print("prefactor    =", pf)
print("Cauchy-Binet =", ds.sjk_cauchy_binet(P, nome), "vs det", det(S_direct))

# With cd = aq the right-hand sum keeps only the tuple (0, 1, ..., n-1).
D = ds.sample_discrete_params(seed=3, n=3, N=5, mode="mbt", nome=nome, degenerate=True)
print("single tuple", ds.mbt_rhs(D, nome, tuples=[(0, 1, 2)]), "full", ds.mbt_rhs(D, nome))

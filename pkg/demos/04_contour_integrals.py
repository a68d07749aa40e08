"""
Elliptic beta and Selberg integrals
===================================

Integrate over the unit torus with the offset trapezoidal rule and compare
with the gamma-product evaluations; finish with the determinant identity
that turns one-variable integrals into the two-variable one.
"""

from ellselberg import Nome
from ellselberg import continuous as cs
from ellselberg.detkit import det, rel_residual
from ellselberg.torus import torus_integrate_adaptive

nome = Nome.from_polar(0.20, 0.3, 0.45, 1.1)

# One variable: watch the trapezoidal estimates settle as the node count doubles.
P = cs.sample_continuous_params(seed=0, variant="esi", n=1, t_mode="tq", nome=nome)
value, info = torus_integrate_adaptive(cs.selberg_integrand(P, nome), 1, tol=1e-12, full_output=True)
for M, est in info["history"]:
    print(f"M={M:4d}  integral={est:.15f}")
print("beta integral lhs", cs.beta_integral_lhs(P, nome))
print("              rhs", cs.beta_integral_rhs(P, nome))

# Two variables, general t.
P2 = cs.sample_continuous_params(seed=1, variant="esi", n=2, t_mode="general", nome=nome)
lhs, rhs = cs.selberg_lhs(P2, nome), cs.selberg_rhs(P2, nome)
print("Selberg n=2 residual", rel_residual(lhs, rhs))

# The transformation and its sign-of-v invariance.
Q = cs.sample_continuous_params(seed=2, variant="eit", n=1, t_mode="tq", nome=nome)
print("transformation residual", rel_residual(cs.rains_lhs(Q, nome), cs.rains_rhs(Q, nome)))
print("v -> -v residual", rel_residual(cs.rains_rhs(Q, nome), cs.rains_rhs(cs.negate_v(Q), nome)))

# At t = q the n = 2 integral is a determinant of one-variable integrals.
P3 = cs.sample_continuous_params(seed=3, variant="esi", n=2, t_mode="tq", nome=nome)
I = cs.ijk_matrix(P3, nome, "quadrature")
print("I_jk by quadrature:\n", I)
D, other = cs.di_check(P3, nome)
print("det I", D, " prefactor * integral", other)
print("closed form of det I", cs.ijk_det_closed(P3, nome), "vs", det(cs.ijk_matrix(P3, nome, "closed")))

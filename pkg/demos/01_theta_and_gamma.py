"""
Theta and elliptic gamma functions
==================================

Evaluate the two building blocks and watch their functional equations hold
to machine precision.
"""

import numpy as np

from ellselberg import Nome, elliptic_gamma, reciprocal_gamma, shifted_factorial, theta

# A nome with generic phases keeps us off the real axis.
nome = Nome.from_polar(0.20, 0.3, 0.45, 1.1)
p, q = nome.p, nome.q

# theta has zeros at the integer powers of p
print("theta(1)   =", theta(1.0, nome))
print("theta(p)   =", abs(theta(p, nome)))

# quasi-periodicity: theta(pz) = -theta(z)/z
z = 0.7 + 0.4j
print("theta(pz) + theta(z)/z =", abs(theta(p * z, nome) + theta(z, nome) / z))

# the gamma function turns multiplication by q into a theta factor
g = elliptic_gamma(z, nome)
print("Gamma(qz) - theta(z) Gamma(z) =", abs(elliptic_gamma(q * z, nome) - theta(z, nome) * g))

# ... and k steps into a shifted factorial
k = 4
print("Gamma(q^k z) / Gamma(z) vs (z)_k:",
      elliptic_gamma(q**k * z, nome) / g, shifted_factorial(z, k, nome))

# reflection: Gamma(z) Gamma(pq/z) = 1
print("Gamma(z) Gamma(pq/z) =", g * elliptic_gamma(p * q / z, nome))

# 1/Gamma is entire in z and vanishes exactly at the poles of Gamma
print("1/Gamma(1) =", reciprocal_gamma(1.0, nome))

# vectorised evaluation along the unit circle
circle = np.exp(2j * np.pi * np.arange(8) / 8 + 0.1j)
print("|theta| on the unit circle:", np.round(np.abs(theta(circle, nome)), 4))

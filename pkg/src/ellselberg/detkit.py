"""Dense complex determinants, the Andreief / Cauchy-Binet expansion and
Warnaar's theta-factorial determinant."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import pm_product, qpow, shifted_factorial, theta
from .errors import EllipticDomainError

__all__ = [
    "DiscreteMeasure",
    "det",
    "det_condition",
    "moment_matrix",
    "andreief_lhs",
    "andreief_rhs",
    "warnaar_matrix",
    "warnaar_det_direct",
    "warnaar_det_closed",
    "rel_residual",
]


def _square(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise EllipticDomainError(f"expected a nonempty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise EllipticDomainError("matrix has non-finite entries")
    return m


def det(m):
    """Determinant of a square complex matrix (LU with partial pivoting)."""
    m = _square(m)
    if m.shape[0] == 1:
        return complex(m[0, 0])
    return complex(np.linalg.det(m))


def det_condition(m):
    """Componentwise relative condition number of the determinant.

    ``sum_{jk} |m_jk (m^{-1})_kj|``: relative perturbations of size ``eps`` in
    the entries move ``det(m)`` by about ``eps`` times this, whatever
    algorithm computes the determinant. Infinite for singular matrices.
    """
    m = _square(m)
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError:
        return math.inf
    return float(np.sum(np.abs(m * inv.T)))


def rel_residual(lhs, rhs, floor=1e-30):
    """``|lhs - rhs| / max(|lhs| + |rhs|, floor)``."""
    return abs(lhs - rhs) / max(abs(lhs) + abs(rhs), floor)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite measure ``sum_i weights[i] * delta(points[i])``."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(complex(x) for x in self.points)
        wts = tuple(complex(w) for w in self.weights)
        if len(pts) != len(wts):
            raise EllipticDomainError("points and weights differ in length")
        if len(set(pts)) != len(pts):
            raise EllipticDomainError("support points must be distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def __len__(self):
        return len(self.points)


def _evaluate(handles, points):
    """Matrix ``[h_j(x_i)]`` with rows indexed by handle."""
    return np.array([[complex(h(x)) for x in points] for h in handles], dtype=complex)


def moment_matrix(fs, gs, mu):
    """``[sum_x f_j(x) g_k(x) w(x)]_{j,k}``."""
    F = _evaluate(fs, mu.points)
    G = _evaluate(gs, mu.points)
    w = np.asarray(mu.weights, dtype=complex)
    return (F * w) @ G.T


def andreief_lhs(fs, gs, mu):
    """Determinant of the moment matrix of ``fs`` against ``gs``."""
    if len(fs) != len(gs):
        raise EllipticDomainError("fs and gs must have the same length")
    return det(moment_matrix(fs, gs, mu))


def andreief_rhs(fs, gs, mu, reverse=False):
    """Cauchy-Binet side: sum over increasing index tuples of
    ``det[f_j(x_k)] det[g_j(x_k)] prod w(x_k)``.

    Equal to ``1/n!`` times the sum over all n-tuples, since the summand is
    symmetric and vanishes on repeated points. ``reverse`` sums the tuples in
    reverse lexicographic order (used to check conditioning).
    """
    n = len(fs)
    if n != len(gs):
        raise EllipticDomainError("fs and gs must have the same length")
    F = _evaluate(fs, mu.points)
    G = _evaluate(gs, mu.points)
    return cauchy_binet(F, G, np.asarray(mu.weights, dtype=complex), reverse=reverse)


def cauchy_binet(F, G, w, reverse=False):
    """Cauchy-Binet expansion of ``det(F diag(w) G^T)`` for n x m matrices F, G."""
    n, m = F.shape
    if n > m:
        return 0j
    combos = np.array(list(itertools.combinations(range(m), n)), dtype=int)
    if reverse:
        combos = combos[::-1]
    if n == 1:
        terms = F[0, combos[:, 0]] * G[0, combos[:, 0]] * w[combos[:, 0]]
    else:
        # (T, n, n) stacks of column selections
        dF = np.linalg.det(np.moveaxis(F[:, combos], 1, 0))
        dG = np.linalg.det(np.moveaxis(G[:, combos], 1, 0))
        terms = dF * dG * np.prod(w[combos], axis=1)
    return complex(np.sum(terms))


def warnaar_matrix(a, b, zs, nome):
    """Matrix with (j, k) entry ``(a z_k^±)_{j-1} (b z_k^±)_{n-j}``, j, k = 1..n."""
    zs = np.asarray(zs, dtype=complex)
    n = zs.size
    M = np.empty((n, n), dtype=complex)
    for j in range(1, n + 1):
        M[j - 1] = pm_product("factorial", a, zs, nome, k=j - 1) * pm_product(
            "factorial", b, zs, nome, k=n - j
        )
    return M


def warnaar_det_direct(a, b, zs, nome):
    """Numerical determinant of :func:`warnaar_matrix`."""
    return det(warnaar_matrix(a, b, zs, nome))


def warnaar_det_closed(a, b, zs, nome):
    """Closed-form evaluation of the Warnaar determinant.

    ``b^{C(n,2)} q^{C(n,3)} prod_j (q^{j-n} a/b, q^{n-j} ab)_{j-1}
    prod_{j<k} z_k^{-1} theta(z_k z_j^±)``.
    """
    zs = np.asarray(zs, dtype=complex)
    n = zs.size
    q = nome.q
    out = complex(b) ** math.comb(n, 2) * qpow(q, math.comb(n, 3))
    for j in range(1, n + 1):
        out *= shifted_factorial(qpow(q, j - n) * a / b, j - 1, nome)
        out *= shifted_factorial(qpow(q, n - j) * a * b, j - 1, nome)
    for j in range(n):
        for k in range(j + 1, n):
            out *= theta(zs[k] * zs[j], nome) * theta(zs[k] / zs[j], nome) / zs[k]
    return out

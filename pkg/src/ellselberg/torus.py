"""Trapezoidal quadrature on the unit torus ``|z_1| = ... = |z_n| = 1``.

The normalised contour integral ``∮ f(z) dz/(2πi z)`` of a function analytic
in an annulus around ``|z| = 1`` is approximated by the mean of ``f`` over
the half-offset nodes ``exp(2πi (m + 1/2) / M)``. The error decays like
``r^M`` where ``r < 1`` is the modulus of the nearest singularity (or its
reciprocal), so doubling ``M`` roughly squares the error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError

__all__ = [
    "QuadGrid",
    "DEFAULT_CAPS",
    "torus_nodes",
    "root_nodes",
    "torus_integrate",
    "torus_integrate_adaptive",
    "PairIntegrand",
]

#: Node cap per dimension for the adaptive integrator.
DEFAULT_CAPS = {1: 1024, 2: 256, 3: 64}


@dataclass(frozen=True)
class QuadGrid:
    dims: int
    nodes_per_dim: int
    offset: bool = True

    def __post_init__(self):
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.nodes_per_dim < 8:
            raise ValueError("need at least 8 nodes per dimension")
        if not self.offset:
            raise ValueError("only half-offset grids are supported")

    def nodes(self):
        return torus_nodes(self.nodes_per_dim)


def torus_nodes(M):
    """``exp(2πi (m + 1/2) / M)`` for m = 0..M-1."""
    return np.exp(2j * np.pi * (np.arange(M) + 0.5) / M)


def root_nodes(M):
    """``exp(2πi r / M)`` for r = 0..M-1 (products and ratios of offset nodes)."""
    return np.exp(2j * np.pi * np.arange(M) / M)


def torus_integrate(f, grid):
    """Mean of ``f`` over the tensor grid.

    ``f`` is either an object with a ``grid_values(M)`` method returning the
    ``M x ... x M`` array of values (see :class:`PairIntegrand`), or a
    vectorised callable ``f(z_1, ..., z_n)``.
    """
    M, n = grid.nodes_per_dim, grid.dims
    if hasattr(f, "grid_values"):
        vals = f.grid_values(M)
    else:
        z = grid.nodes()
        vals = np.asarray(f(*np.meshgrid(*([z] * n), indexing="ij")), dtype=complex)
        vals = np.broadcast_to(vals, (M,) * n)
    # numpy's pairwise summation: fixed order for a fixed array shape
    return complex(np.sum(vals) / M**n)


def torus_integrate_adaptive(f, dims, tol=1e-10, start=16, cap=None, full_output=False):
    """Double ``M`` from ``start`` until the estimate has settled.

    With ``d_k = |I_k - I_{k-1}|`` (relative to ``|I_k|``) the estimate is
    accepted when ``d_k <= tol``, or, once three estimates exist and
    ``d_k < d_{k-1} / 2``, when the geometric extrapolation
    ``d_k (d_k / d_{k-1})^2`` of the remaining error is below ``tol``.

    Returns the value, or ``(value, info)`` with ``info`` holding the node
    count and the estimate history when ``full_output`` is set.

    Raises
    ------
    QuadratureError
        If the cap (``DEFAULT_CAPS[dims]`` by default) is reached first.
    """
    if cap is None:
        cap = DEFAULT_CAPS.get(dims, 32)
    M = max(8, start)
    history = [(M, torus_integrate(f, QuadGrid(dims, M)))]
    diffs = []
    while True:
        if M * 2 > cap:
            estimates = [v for _, v in history[-2:]]
            raise QuadratureError(
                f"torus quadrature not converged at M={M} (cap {cap}): last estimates {estimates}",
                estimates=estimates, nodes=M,
            )
        M *= 2
        value = torus_integrate(f, QuadGrid(dims, M))
        scale = max(abs(value), 1e-300)
        diffs.append(abs(value - history[-1][1]) / scale)
        history.append((M, value))
        d = diffs[-1]
        done = d <= tol
        if not done and len(diffs) >= 2 and 0 < d < 0.5 * diffs[-2]:
            # geometric regime: d_k ~ c r^M, remaining error ~ c r^{2M} = d_k (d_k/d_{k-1})^2
            done = d * (d / diffs[-2]) ** 2 <= tol
        if done:
            if full_output:
                return value, {"nodes": M, "history": history, "diffs": diffs}
            return value


class PairIntegrand:
    """Integrand ``prod_j weight(z_j) * prod_{j<k} pair(z_j z_k) pair(z_j / z_k)``.

    This is the shape of every Selberg-type integrand here: a one-variable
    weight and a cross factor depending on ``z_j^± z_k^±`` only, with ``pair``
    already symmetrised (``pair(x) = g(x) g(1/x)``). On the offset grid the
    products and ratios of nodes are roots of unity, so the cross factor needs
    only ``M`` evaluations of ``pair`` per grid.
    """

    def __init__(self, weight, pair, dims):
        self.weight = weight
        self.pair = pair
        self.dims = dims

    def __call__(self, *zs):
        if len(zs) != self.dims:
            raise ValueError(f"expected {self.dims} variables")
        zs = [np.asarray(z, dtype=complex) for z in zs]
        out = 1.0 + 0j
        for z in zs:
            out = out * self.weight(z)
        for j in range(self.dims):
            for k in range(j + 1, self.dims):
                out = out * self.pair(zs[j] * zs[k]) * self.pair(zs[j] / zs[k])
        return out

    def grid_values(self, M):
        n = self.dims
        W = np.asarray(self.weight(torus_nodes(M)), dtype=complex)
        vals = W
        for _ in range(1, n):
            vals = np.multiply.outer(vals, W)
        if n > 1:
            H = np.asarray(self.pair(root_nodes(M)), dtype=complex)
            m = np.arange(M)
            # node_j * node_k = root^{m_j + m_k + 1}, node_j / node_k = root^{m_j - m_k}
            cross = H[(m[:, None] + m[None, :] + 1) % M] * H[(m[:, None] - m[None, :]) % M]
            for j in range(n):
                for k in range(j + 1, n):
                    shape = [1] * n
                    shape[j] = shape[k] = M
                    vals = vals * cross.reshape(shape)
        return vals

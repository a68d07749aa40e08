"""Theta functions, the elliptic gamma function and elliptic shifted factorials.

All functions take a :class:`Nome` carrying the two bases ``p`` and ``q``
(``|p|, |q| < 1``) together with the truncation policy of the infinite
products. Every function accepts scalars or numpy arrays; a scalar input
gives a Python ``complex`` back.

Conventions::

    theta(z)      = prod_{j>=0} (1 - p^j z) (1 - p^{j+1} / z)
    Gamma(z)      = prod_{j,k>=0} (1 - p^{j+1} q^{k+1} / z) / (1 - p^j q^k z)
    (z)_k         = theta(z) theta(zq) ... theta(zq^{k-1})
    C             = prod_{j>=1} (1 - p^j) (1 - q^j)

so that ``Gamma(qz) = theta(z) Gamma(z)``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EllipticDomainError, NearPoleError, TruncationError

__all__ = [
    "Nome",
    "GammaFactors",
    "theta",
    "elliptic_gamma",
    "reciprocal_gamma",
    "gamma_factors",
    "shifted_factorial",
    "sf_ratio",
    "sf_table",
    "dedekind_constant",
    "pm_product",
    "qpow",
    "qpowers",
    "POLE_GUARD",
]

#: Denominator factors smaller than this are treated as poles.
POLE_GUARD = 1e-12

# elements x factors processed per numpy block
_BLOCK = 1 << 20


@dataclass(frozen=True)
class Nome:
    """The pair of bases ``(p, q)`` plus the product truncation policy.

    Parameters
    ----------
    p, q : complex
        Bases with ``|p| < 1`` and ``|q| < 1``.
    cutoff : float
        Factors ``1 - w`` with ``|w| < cutoff`` are dropped from every product.
    max_terms : int
        Upper bound on the number of factors (pairs of factors for theta)
        a single product may use before :class:`TruncationError` is raised.
    """

    p: complex
    q: complex
    cutoff: float = 1e-17
    max_terms: int = 4096

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "q", complex(self.q))
        if not (abs(self.p) < 1 and abs(self.q) < 1):
            raise EllipticDomainError(f"need |p|, |q| < 1, got p={self.p}, q={self.q}")
        if not self.cutoff > 0:
            raise EllipticDomainError("cutoff must be positive")
        if int(self.max_terms) < 1:
            raise EllipticDomainError("max_terms must be >= 1")

    @classmethod
    def from_polar(cls, p_mod, p_arg, q_mod, q_arg, **kwargs):
        return cls(p_mod * np.exp(1j * p_arg), q_mod * np.exp(1j * q_arg), **kwargs)

    def with_cutoff(self, cutoff):
        return Nome(self.p, self.q, cutoff, self.max_terms)


# ---------------------------------------------------------------- powers


def qpow(q, k):
    """``q**k`` for an integer exponent, by repeated squaring (no logarithms)."""
    return complex(q) ** int(k)


def qpowers(q, ks):
    """Vector of ``q**k`` for integer exponents ``ks``."""
    q = complex(q)
    return np.array([q ** int(k) for k in np.ravel(ks)], dtype=complex).reshape(np.shape(ks))


def _power_table(x, count):
    out = np.empty(count, dtype=complex)
    acc = 1.0 + 0j
    for i in range(count):
        out[i] = acc
        acc *= x
    return out


# ------------------------------------------------------------ truncation


def _radius_exponent(z):
    """Smallest e >= 0 with max(|z|, 1/|z|) <= 2**e over the array."""
    a = np.abs(z)
    r = max(float(np.max(a)), float(np.max(1.0 / a)))
    return max(0, math.ceil(math.log2(r)))


@functools.lru_cache(maxsize=512)
def _theta_powers(p, cutoff, max_terms, rexp):
    # pairs j = 0..J-1, J = first j >= 1 with |p|^j R < cutoff
    R = 2.0**rexp
    if p == 0:
        J = 1
    else:
        J = 1
        ap = abs(p)
        while ap**J * R >= cutoff:
            J += 1
            if J > max_terms:
                raise TruncationError(f"theta product needs more than {max_terms} factor pairs")
    return _power_table(p, J + 1)


@functools.lru_cache(maxsize=512)
def _gamma_lattice(p, q, cutoff, max_terms, rexp):
    """Coefficients ``p^j q^k`` over the lattice ``|p|^j |q|^k R >= cutoff``."""
    logR = rexp * math.log(2.0)
    budget = logR - math.log(cutoff)

    def extent(x):
        if x == 0:
            return 0
        return int(math.floor(budget / -math.log(abs(x))))

    jmax, kmax = extent(p), extent(q)
    pp = _power_table(p, jmax + 1)
    qq = _power_table(q, kmax + 1)
    lp = math.log(abs(p)) if p != 0 else -math.inf
    lq = math.log(abs(q)) if q != 0 else -math.inf
    coeffs = []
    for j in range(jmax + 1):
        for k in range(kmax + 1):
            lj = 0.0 if j == 0 else j * lp
            lk = 0.0 if k == 0 else k * lq
            if lj + lk + logR >= math.log(cutoff):
                coeffs.append(pp[j] * qq[k])
            else:
                break
    if len(coeffs) > max_terms:
        raise TruncationError(
            f"elliptic gamma lattice has {len(coeffs)} factors, more than max_terms={max_terms}"
        )
    Q = np.array(coeffs, dtype=complex)
    return Q, p * q * Q


def _as_complex_array(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise EllipticDomainError("argument must be nonzero")
    return z


def _blockwise(z, nfactors, kernel):
    """Apply ``kernel`` (reducing over a trailing factor axis) in memory-bounded blocks."""
    flat = z.ravel()
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, _BLOCK // max(nfactors, 1))
    for start in range(0, flat.size, step):
        out[start:start + step] = kernel(flat[start:start + step, None])
    return out.reshape(z.shape)


def _finish(z_in, out):
    return complex(out) if np.ndim(z_in) == 0 else out


# ------------------------------------------------------------- functions


def theta(z, nome):
    """Modified Jacobi theta function ``theta(z; p)``.

    Parameters
    ----------
    z : complex or array_like
        Nonzero argument(s).
    nome : Nome

    Returns
    -------
    complex or ndarray
    """
    za = _as_complex_array(z)
    if za.size == 0:
        return za.copy()
    pw = _theta_powers(nome.p, nome.cutoff, nome.max_terms, _radius_exponent(za))
    lo, hi = pw[:-1], pw[1:]
    out = _blockwise(za, lo.size, lambda x: np.prod((1 - lo * x) * (1 - hi / x), axis=-1))
    return _finish(z, out)


def _gamma_kernel(za, nome, reciprocal):
    Q, P = _gamma_lattice(nome.p, nome.q, nome.cutoff, nome.max_terms, _radius_exponent(za))

    def kernel(x):
        num = 1 - P / x
        den = 1 - Q * x
        if reciprocal:
            num, den = den, num
        if np.any(np.abs(den) < POLE_GUARD):
            raise NearPoleError("argument within guard radius of a pole")
        return np.prod(num / den, axis=-1)

    return _blockwise(za, Q.size, kernel)


def elliptic_gamma(z, nome):
    """Elliptic gamma function ``Gamma(z; p, q)``.

    Raises :class:`NearPoleError` when a denominator factor ``1 - p^j q^k z``
    is smaller than :data:`POLE_GUARD` in magnitude. Use
    :func:`reciprocal_gamma` or :func:`gamma_factors` when the reciprocal is
    what is needed.
    """
    za = _as_complex_array(z)
    if za.size == 0:
        return za.copy()
    return _finish(z, _gamma_kernel(za, nome, reciprocal=False))


def reciprocal_gamma(z, nome):
    """``1 / Gamma(z)``, exactly zero on the pole lattice of ``Gamma``."""
    za = _as_complex_array(z)
    if za.size == 0:
        return za.copy()
    return _finish(z, _gamma_kernel(za, nome, reciprocal=True))


@dataclass
class GammaFactors:
    """Lattice factors of a product of elliptic gamma values, kept undivided.

    ``value()`` multiplies the ratios ``numerator[i] / denominator[i]`` in
    order; the shorter list is padded with ones. Keeping ratios of O(1)
    factors avoids overflow when many gamma values are combined, and lets a
    zero in one gamma's reciprocal cancel against finite factors elsewhere.
    """

    numerator_factors: list = field(default_factory=list)
    denominator_factors: list = field(default_factory=list)

    def __mul__(self, other):
        return GammaFactors(
            list(self.numerator_factors) + list(other.numerator_factors),
            list(self.denominator_factors) + list(other.denominator_factors),
        )

    def reciprocal(self):
        return GammaFactors(list(self.denominator_factors), list(self.numerator_factors))

    def value(self):
        num = np.asarray(self.numerator_factors, dtype=complex)
        den = np.asarray(self.denominator_factors, dtype=complex)
        n = max(num.size, den.size)
        num = np.concatenate([num, np.ones(n - num.size, dtype=complex)])
        den = np.concatenate([den, np.ones(n - den.size, dtype=complex)])
        if np.any(den == 0):
            raise NearPoleError("division by an exactly zero gamma factor")
        return complex(np.prod(num / den))

    assemble = value


def gamma_factors(z, nome, reciprocal=False):
    """Emit the lattice factors of ``Gamma(z)`` (or ``1/Gamma(z)``) without dividing."""
    z = complex(z)
    if z == 0:
        raise EllipticDomainError("argument must be nonzero")
    Q, P = _gamma_lattice(nome.p, nome.q, nome.cutoff, nome.max_terms, _radius_exponent(np.array(z)))
    num = list(1 - P / z)
    den = list(1 - Q * z)
    if reciprocal:
        num, den = den, num
    return GammaFactors(num, den)


def shifted_factorial(z, k, nome):
    """Elliptic shifted factorial ``(z)_k = prod_{i<k} theta(z q^i)``; ``(z)_0 = 1``."""
    k = int(k)
    if k < 0:
        raise EllipticDomainError("k must be nonnegative")
    za = np.asarray(z, dtype=complex)
    if k == 0:
        return _finish(z, np.ones(za.shape, dtype=complex))
    args = za[..., None] * _power_table(nome.q, k)
    return _finish(z, np.prod(theta(args, nome), axis=-1))


def _interleaved_steps(nums, dens, k, nome, guard):
    """Per-step ratios prod_m theta(num_m q^i) / theta(den_m q^i), i = 0..k-1."""
    nums = np.asarray(nums, dtype=complex).ravel()
    dens = np.asarray(dens, dtype=complex).ravel()
    width = max(nums.size, dens.size)
    qp = _power_table(nome.q, k)
    tn = np.ones((width, k), dtype=complex)
    td = np.ones((width, k), dtype=complex)
    if nums.size:
        tn[: nums.size] = theta(nums[:, None] * qp, nome)
    if dens.size:
        td[: dens.size] = theta(dens[:, None] * qp, nome)
    if np.any(np.abs(td) <= guard):
        raise NearPoleError("shifted factorial in a denominator vanishes")
    return np.prod(tn / td, axis=0)


def sf_ratio(nums, dens, k, nome, guard=0.0):
    """``prod (num)_k / prod (den)_k`` evaluated as a product of O(1) theta ratios.

    ``nums`` and ``dens`` are sequences of arguments (the repeated-variable
    shorthand ``(a, b, c)_k = (a)_k (b)_k (c)_k``).
    """
    k = int(k)
    if k < 0:
        raise EllipticDomainError("k must be nonnegative")
    if k == 0:
        return 1.0 + 0j
    return complex(np.prod(_interleaved_steps(nums, dens, k, nome, guard)))


def sf_table(nums, dens, N, nome, guard=0.0):
    """``sf_ratio(nums, dens, x)`` for x = 0..N as an array of length N+1."""
    out = np.ones(N + 1, dtype=complex)
    if N > 0:
        out[1:] = np.cumprod(_interleaved_steps(nums, dens, N, nome, guard))
    return out


def dedekind_constant(nome):
    """``C = prod_{j>=1} (1 - p^j)(1 - q^j)``, truncated at the nome cutoff."""
    out = 1.0 + 0j
    for x in (nome.p, nome.q):
        term = x
        count = 0
        while abs(term) >= nome.cutoff:
            out *= 1 - term
            term *= x
            count += 1
            if count > nome.max_terms:
                raise TruncationError("constant C did not converge within max_terms")
    return out


_KINDS = {
    "theta": lambda w, nome, k: theta(w, nome),
    "gamma": lambda w, nome, k: elliptic_gamma(w, nome),
    "rgamma": lambda w, nome, k: reciprocal_gamma(w, nome),
    "factorial": lambda w, nome, k: shifted_factorial(w, k, nome),
}


def pm_product(kind, base, zs, nome, k=None, power=1):
    """Expand the ``±`` shorthand: product of ``f(base * prod_i zs[i]**(±power))``.

    Examples: ``Gamma(t z^±)`` is ``pm_product("gamma", t, z, nome)``;
    ``Gamma(z^{±2})`` is ``pm_product("gamma", 1, z, nome, power=2)``;
    ``Gamma(t z^± w^±)`` is ``pm_product("gamma", t, (z, w), nome)``;
    ``(a z^±)_k`` is ``pm_product("factorial", a, z, nome, k=k)``.
    Array-valued ``zs`` entries broadcast.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if kind == "factorial" and k is None:
        raise ValueError("factorial shorthand needs k")
    # a tuple/list means several variables; anything else is one (possibly array) variable
    if not isinstance(zs, (tuple, list)):
        zs = (zs,)
    zs = [np.asarray(z, dtype=complex) for z in zs]
    fn = _KINDS[kind]
    out = None
    for signs in itertools.product((1, -1), repeat=len(zs)):
        arg = np.asarray(base, dtype=complex)
        for s, z in zip(signs, zs):
            arg = arg * z ** (s * power)
        val = fn(arg, nome, k)
        out = val if out is None else out * val
    return complex(out) if np.ndim(out) == 0 else out

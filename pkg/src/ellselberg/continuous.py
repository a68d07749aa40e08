"""Elliptic beta and Selberg integrals and the integral transformation.

All integrals are over the unit torus and use the offset trapezoidal rule of
:mod:`ellselberg.torus`. Parameters must lie strictly inside the unit disc
(no contour deformation is attempted).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    dedekind_constant,
    elliptic_gamma,
    qpow,
    reciprocal_gamma,
    sf_ratio,
)
from .detkit import det
from .errors import EllipticDomainError, SamplingError
from .torus import DEFAULT_CAPS, PairIntegrand, torus_integrate_adaptive

__all__ = [
    "ContinuousParams",
    "selberg_integrand",
    "rains_integrand",
    "beta_integral_lhs",
    "beta_integral_rhs",
    "selberg_lhs",
    "selberg_rhs",
    "rains_lhs",
    "rains_rhs",
    "ijk_params",
    "ijk_matrix",
    "ijk_det_closed",
    "di_prefactor",
    "di_check",
    "integral_cancellation",
    "sample_continuous_params",
    "negate_v",
]

#: Relative tolerance handed to the adaptive quadrature, per dimension.
QUAD_TOL = {1: 1e-11, 2: 1e-9, 3: 1e-7}

#: Sampler margin below 1 for contour moduli, per dimension (node caps are tighter for n >= 2).
CONTOUR_MARGIN = {1: 0.07, 2: 0.1, 3: 0.15}


@dataclass(frozen=True)
class ContinuousParams:
    """Parameters of the continuous identities.

    ``variant="esi"``: six ``ts`` with ``t^{2n-2} t_1...t_6 = pq``.
    ``variant="eit"``: four ``ts``, four ``us`` and ``v`` with
    ``v^2 = pq / (t^{n-1} t_1...t_4) = t^{n-1} u_1...u_4 / (pq)``.
    """

    variant: str
    n: int
    t: complex
    ts: tuple
    us: tuple = ()
    v: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "ts", tuple(complex(x) for x in self.ts))
        object.__setattr__(self, "us", tuple(complex(x) for x in self.us))
        object.__setattr__(self, "v", complex(self.v))
        if self.n < 1:
            raise EllipticDomainError("n must be >= 1")
        if self.variant == "esi":
            if len(self.ts) != 6 or self.us:
                raise EllipticDomainError("esi takes six ts and no us")
        elif self.variant == "eit":
            if len(self.ts) != 4 or len(self.us) != 4:
                raise EllipticDomainError("eit takes four ts and four us")
        else:
            raise EllipticDomainError(f"unknown variant {self.variant!r}")
        worst = max(self.contour_moduli())
        if not worst < 1:
            raise EllipticDomainError(f"parameter of modulus {worst:.4g} off the unit-circle contour")

    def contour_moduli(self):
        """Moduli that must stay below 1 for the unit torus to be a valid contour."""
        mods = [abs(x) for x in self.ts + self.us]
        if self.n > 1:
            mods.append(abs(self.t))
        if self.variant == "eit":
            mods += [abs(x * self.v) for x in self.ts] + [abs(x / self.v) for x in self.us]
        return mods

    def balancing_residuals(self, nome):
        pq = nome.p * nome.q
        tn = self.t ** (self.n - 1)
        if self.variant == "esi":
            lhs = tn * tn * np.prod(self.ts)
            return [abs(lhs - pq) / abs(pq)]
        v2 = self.v**2
        r1 = pq / (tn * np.prod(self.ts))
        r2 = tn * np.prod(self.us) / pq
        return [abs(v2 - r1) / abs(r1), abs(v2 - r2) / abs(r2)]

    def named(self):
        out = [("t", self.t)] + [(f"t{i + 1}", x) for i, x in enumerate(self.ts)]
        out += [(f"u{i + 1}", x) for i, x in enumerate(self.us)]
        if self.variant == "eit":
            out.append(("v", self.v))
        return out


# --------------------------------------------------------------- integrands


def _weight(params_list, nome):
    """``z -> prod_k Gamma(w_k z^±) / Gamma(z^{±2})``."""
    ws = [complex(w) for w in params_list]

    def weight(z):
        z = np.asarray(z, dtype=complex)
        out = reciprocal_gamma(z * z, nome) * reciprocal_gamma(1 / (z * z), nome)
        for w in ws:
            out = out * elliptic_gamma(w * z, nome) * elliptic_gamma(w / z, nome)
        return out

    return weight


def _pair(t, nome):
    """``x -> Gamma(t x^±) / Gamma(x^±)``; the cross factor is pair(z_j z_k) pair(z_j/z_k)."""

    def pair(x):
        x = np.asarray(x, dtype=complex)
        return (
            elliptic_gamma(t * x, nome) * elliptic_gamma(t / x, nome)
            * reciprocal_gamma(x, nome) * reciprocal_gamma(1 / x, nome)
        )

    return pair


def selberg_integrand(params, nome):
    """Integrand of the elliptic Selberg integral (without the ``C^n / 2^n n!`` factor)."""
    return PairIntegrand(_weight(params.ts, nome), _pair(params.t, nome), params.n)


def rains_integrand(ts, us, t, n, nome):
    return PairIntegrand(_weight(tuple(ts) + tuple(us), nome), _pair(t, nome), n)


# --------------------------------------------------------------- identities


def _integrate(f, dims, tol, cap):
    if tol is None:
        tol = QUAD_TOL.get(dims, 1e-6)
    return torus_integrate_adaptive(f, dims, tol=tol, cap=cap)


def selberg_lhs(params, nome, tol=None, cap=None):
    """``C^n / (2^n n!)`` times the torus integral of :func:`selberg_integrand`."""
    n = params.n
    norm = dedekind_constant(nome) ** n / (2**n * math.factorial(n))
    return norm * _integrate(selberg_integrand(params, nome), n, tol, cap)


def selberg_rhs(params, nome):
    """``prod_{m=1}^n Gamma(t^m)/Gamma(t) prod_{j<k} Gamma(t^{m-1} t_j t_k)``."""
    t, ts = params.t, params.ts
    pairs = [ts[j] * ts[k] for j, k in itertools.combinations(range(6), 2)]
    out = 1.0 + 0j
    for m in range(1, params.n + 1):
        if m > 1:
            out *= elliptic_gamma(t**m, nome) / elliptic_gamma(t, nome)
        out *= complex(np.prod(elliptic_gamma(np.array(pairs) * t ** (m - 1), nome)))
    return out


def _require_n1(params):
    if params.n != 1 or params.variant != "esi":
        raise EllipticDomainError("beta integral needs an esi parameter set with n = 1")


def beta_integral_lhs(params, nome, tol=None, cap=None):
    """``(C/2) ∮ prod_k Gamma(t_k z^±) / Gamma(z^{±2}) dz/(2πi z)``."""
    _require_n1(params)
    return selberg_lhs(params, nome, tol, cap)


def beta_integral_rhs(params, nome):
    """``prod_{j<k} Gamma(t_j t_k)``."""
    _require_n1(params)
    return selberg_rhs(params, nome)


def rains_lhs(params, nome, tol=None, cap=None):
    """Torus integral with parameters ``t_k, u_k`` (no normalising constant)."""
    f = rains_integrand(params.ts, params.us, params.t, params.n, nome)
    return _integrate(f, params.n, tol, cap)


def rains_rhs(params, nome, tol=None, cap=None):
    """Gamma prefactor times the integral with parameters ``t_k v, u_k / v``."""
    t, ts, us, v = params.t, params.ts, params.us, params.v
    pre = 1.0 + 0j
    for m in range(1, params.n + 1):
        tm = t ** (m - 1)
        for j, k in itertools.combinations(range(4), 2):
            pre *= elliptic_gamma(tm * ts[j] * ts[k], nome) * elliptic_gamma(tm * us[j] * us[k], nome)
    f = rains_integrand([x * v for x in ts], [x / v for x in us], t, params.n, nome)
    return pre * _integrate(f, params.n, tol, cap)


# -------------------------------------------------------------- proof replay


def _require_tq(params, nome):
    if params.variant != "esi":
        raise EllipticDomainError("proof replay needs an esi parameter set")
    if abs(params.t - nome.q) > 1e-14 * max(1.0, abs(nome.q)):
        raise EllipticDomainError("proof replay needs t = q")


def ijk_params(params, nome, j, k):
    """One-variable parameters of entry (j, k): ``t_1 q^{j-1}, t_2 q^{n-j}, t_3 q^{k-1}, t_4 q^{n-k}``."""
    q, n = nome.q, params.n
    t1, t2, t3, t4, t5, t6 = params.ts
    ts = (t1 * qpow(q, j - 1), t2 * qpow(q, n - j), t3 * qpow(q, k - 1), t4 * qpow(q, n - k), t5, t6)
    return ContinuousParams("esi", 1, q, ts)


def ijk_matrix(params, nome, method="quadrature", tol=None, cap=None):
    """Matrix of one-variable beta integrals ``I_{jk}``.

    ``method="quadrature"`` integrates each entry numerically;
    ``method="closed"`` uses the beta-integral product of 15 gamma values.
    """
    _require_tq(params, nome)
    n = params.n
    out = np.empty((n, n), dtype=complex)
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            P = ijk_params(params, nome, j, k)
            if method == "quadrature":
                out[j - 1, k - 1] = beta_integral_lhs(P, nome, tol, cap)
            elif method == "closed":
                out[j - 1, k - 1] = beta_integral_rhs(P, nome)
            else:
                raise ValueError(f"unknown method {method!r}")
    return out


def di_prefactor(params, nome):
    """``(t_2 t_4)^{C(n,2)} q^{2C(n,3)} prod_j (q^{j-n} t_1/t_2, q^{n-j} t_1 t_2, q^{j-n} t_3/t_4, q^{n-j} t_3 t_4)_{j-1}``."""
    q, n = nome.q, params.n
    t1, t2, t3, t4 = params.ts[:4]
    out = (t2 * t4) ** math.comb(n, 2) * qpow(q, 2 * math.comb(n, 3))
    for j in range(1, n + 1):
        out *= sf_ratio([qpow(q, j - n) * t1 / t2, qpow(q, n - j) * t1 * t2,
                         qpow(q, j - n) * t3 / t4, qpow(q, n - j) * t3 * t4], [], j - 1, nome)
    return out


def ijk_det_closed(params, nome):
    """Closed form of ``det(I_{jk})`` after pulling out gamma factors and applying
    Warnaar's determinant to the remaining theta-factorial matrix."""
    _require_tq(params, nome)
    q, n = nome.q, params.n
    ts = params.ts
    t1, t2, t3, t4 = ts[:4]
    out = (t2 * t4) ** math.comb(n, 2) * qpow(q, 2 * math.comb(n, 3))
    out *= (elliptic_gamma(t1 * t2 * qpow(q, n - 1), nome) * elliptic_gamma(t3 * t4 * qpow(q, n - 1), nome)) ** n
    for m in range(1, n + 1):
        for j, k in itertools.combinations(range(6), 2):
            if (j, k) in ((0, 1), (2, 3)):
                continue
            out *= elliptic_gamma(ts[j] * ts[k] * qpow(q, m - 1), nome)
    for j in range(1, n + 1):
        out *= sf_ratio([q, qpow(q, j - n) * t1 / t2, qpow(q, j - n) * t3 / t4], [], j - 1, nome)
    return out


def di_check(params, nome, tol=None, cap=None):
    """``(det I, prefactor * selberg_lhs)`` for a t = q parameter set."""
    _require_tq(params, nome)
    D = det(ijk_matrix(params, nome, "quadrature", tol, cap))
    return D, di_prefactor(params, nome) * selberg_lhs(params, nome, tol, cap)


# ------------------------------------------------------------------ sampling


def _window(target_modulus, count, margin):
    g = target_modulus ** (1.0 / count)
    if g <= 0.5:
        return 0.3, 0.75
    hi = min(g + 0.08, 1 - margin)
    if g >= hi:
        # balancing forces a parameter at or beyond the contour bound
        raise SamplingError(f"balancing forces geometric mean {g:.3f} >= {hi:.3f}; no admissible draw")
    return g - 0.12, hi


def _draw(rng, lo, hi, count):
    r = rng.uniform(lo, hi, size=count)
    phase = np.exp(2j * np.pi * rng.uniform(size=count))
    return r * phase


def integral_cancellation(params, nome, M=None):
    """Worst ``mean |f| / |∮ f|`` over the integrals a check of ``params`` evaluates.

    The Selberg integral uses its closed form as reference value; the
    transformation uses the trapezoidal estimate on the same grid. ``M``
    defaults to ``min(DEFAULT_CAPS[n], 128)`` (256 for the one-dimensional
    transformation); only the order of magnitude matters here.
    """
    n = params.n
    if M is None:
        M = min(DEFAULT_CAPS.get(n, 32), 128 if params.variant == "esi" or n > 1 else 256)
    if params.variant == "esi":
        ref = selberg_rhs(params, nome) * (2**n * math.factorial(n)) / dedekind_constant(nome) ** n
        grids = [(selberg_integrand(params, nome).grid_values(M), ref)]
    else:
        v = params.v
        fs = [rains_integrand(params.ts, params.us, params.t, n, nome),
              rains_integrand([x * v for x in params.ts], [x / v for x in params.us], params.t, n, nome)]
        grids = []
        for f in fs:
            vals = f.grid_values(M)
            grids.append((vals, np.sum(vals) / vals.size))
    worst = 0.0
    for vals, ref in grids:
        mean_abs = float(np.mean(np.abs(vals)))
        worst = max(worst, mean_abs / abs(ref) if ref != 0 else np.inf)
    return worst


def sample_continuous_params(seed, variant, n, t_mode, nome, margin=None, max_tries=5000,
                             max_cancellation=1e3):
    """Draw a balanced parameter set whose integrals converge on the unit torus.

    Free parameters get uniform phases and moduli from a window around the
    geometric mean forced by balancing (``[0.3, 0.75]`` when that mean is at
    most 0.5); the last parameter (``t_6``, or ``u_4`` together with ``v``) is
    solved from balancing. Draws with any contour modulus above
    ``1 - margin`` are rejected (``margin`` defaults to
    ``CONTOUR_MARGIN[n]``).

    Draws whose integrals cancel by more than ``max_cancellation`` (see
    :func:`integral_cancellation`) are rejected as well; pass ``None`` to
    keep them.

    ``t_mode`` is ``"tq"`` (``t = q``) or ``"general"`` (``|t|`` in
    [0.5, 0.6] for the Selberg integral, [0.3, 0.6] for the transformation).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if margin is None:
        margin = CONTOUR_MARGIN.get(n, 0.15)
    p, q = nome.p, nome.q
    pq = p * q
    for _ in range(max_tries):
        if t_mode == "tq":
            t = q
        elif t_mode == "general":
            lo = 0.5 if variant == "esi" else 0.3
            t = _draw(rng, lo, 0.6, 1)[0]
        else:
            raise ValueError(f"unknown t_mode {t_mode!r}")
        tn = t ** (n - 1)
        if variant == "esi":
            target = pq / (tn * tn)
            lo, hi = _window(abs(target), 6, margin)
            free = _draw(rng, lo, hi, 5)
            ts = tuple(free) + (target / np.prod(free),)
            try:
                P = ContinuousParams("esi", n, t, ts)
            except EllipticDomainError:
                continue
        elif variant == "eit":
            target = pq * pq / (tn * tn)
            lo, hi = _window(abs(target), 8, margin)
            free = _draw(rng, lo, hi, 7)
            ts = tuple(free[:4])
            us = tuple(free[4:]) + (target / (np.prod(free)),)
            v = np.sqrt(pq / (tn * np.prod(ts)))
            try:
                P = ContinuousParams("eit", n, t, ts, us, v)
            except EllipticDomainError:
                continue
        else:
            raise ValueError(f"unknown variant {variant!r}")
        if max(P.contour_moduli()) > 1 - margin:
            continue
        if max_cancellation is not None and integral_cancellation(P, nome) > max_cancellation:
            continue
        return P
    raise SamplingError(f"no admissible {variant} parameters (n={n}, t_mode={t_mode}) after {max_tries} draws")


def negate_v(params):
    """Same transformation parameters with the other square root ``-v``."""
    return replace(params, v=-params.v)

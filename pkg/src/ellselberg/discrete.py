"""Discrete elliptic Selberg sums at t = q.

Both sides of the multivariable elliptic Bailey transformation and of the
discrete Selberg summation, their one-variable (Frenkel-Turaev) cases, and
the determinantal route between them: the moment matrix ``S``, its
Cauchy-Binet expansion and the bookkeeping prefactor.

The sums run over increasing tuples ``0 <= x_1 < ... < x_n <= N`` of

    prod_{j<k} (q^{x_j} theta(q^{x_k-x_j}) theta(A q^{x_j+x_k}))^2
    * prod_j w(x_j)

with a one-variable weight ``w`` built from a ``theta(A q^{2x})/theta(A)``
factor and a ratio of shifted factorials. Every weight is accumulated as a
running product of O(1) theta ratios.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .core import qpow, qpowers, sf_ratio, sf_table, shifted_factorial, theta
from .detkit import cauchy_binet, det
from .errors import NearPoleError, SamplingError

__all__ = [
    "DiscreteParams",
    "GUARD",
    "enumerate_tuples",
    "tuple_array",
    "selberg_sum",
    "selberg_terms",
    "cancellation",
    "conditioning",
    "mbt_lhs",
    "mbt_rhs",
    "mbt_rhs_prefactor",
    "mbs_lhs",
    "mbs_rhs",
    "sjk_factors",
    "sjk_matrix",
    "sjk_cauchy_binet",
    "prefactor_pf",
    "sample_discrete_params",
    "check_guards",
]

#: Minimum magnitude of any theta factor that appears in a denominator.
GUARD = 1e-10


@dataclass(frozen=True)
class DiscreteParams:
    """Parameters of the discrete identities.

    ``mode`` is ``"mbt"`` (seven parameters, ``bcdefg = q^{4+N-2n} a^3``) or
    ``"mbs"`` (``g`` unused, ``bcde = q^{N+3-2n} a^2``). ``lam`` is
    ``a^2 q^{2-n} / (bcd)``, only meaningful for ``mbt``.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    e: complex
    f: complex
    g: complex
    N: int
    n: int
    lam: complex
    mode: str = "mbt"

    @classmethod
    def balanced_mbt(cls, a, b, c, d, e, f, N, n, nome):
        """Solve ``g`` from the balancing condition."""
        _check_sizes(N, n)
        q = nome.q
        g = qpow(q, 4 + N - 2 * n) * a**3 / (b * c * d * e * f)
        lam = a**2 * qpow(q, 2 - n) / (b * c * d)
        return cls(*map(complex, (a, b, c, d, e, f, g)), int(N), int(n), complex(lam), "mbt")

    @classmethod
    def balanced_mbs(cls, a, b, c, d, N, n, nome):
        """Solve ``e`` from the balancing condition; ``f = g = 0`` are unused."""
        _check_sizes(N, n)
        e = qpow(nome.q, N + 3 - 2 * n) * a**2 / (b * c * d)
        return cls(*map(complex, (a, b, c, d, e)), 0j, 0j, int(N), int(n), 0j, "mbs")

    def balancing_residual(self, nome):
        q = nome.q
        if self.mode == "mbt":
            lhs = self.b * self.c * self.d * self.e * self.f * self.g
            rhs = qpow(q, 4 + self.N - 2 * self.n) * self.a**3
        else:
            lhs = self.b * self.c * self.d * self.e
            rhs = qpow(q, self.N + 3 - 2 * self.n) * self.a**2
        return abs(lhs - rhs) / abs(rhs)

    def named(self):
        keys = "abcdefg" if self.mode == "mbt" else "abcde"
        out = [(k, getattr(self, k)) for k in keys]
        if self.mode == "mbt":
            out.append(("lambda", self.lam))
        return out


def _check_sizes(N, n):
    if N < 0 or n < 1 or n > N + 1:
        raise ValueError(f"need 1 <= n <= N+1, got n={n}, N={N}")


def enumerate_tuples(n, N):
    """Yield increasing tuples ``0 <= x_1 < ... < x_n <= N`` in lexicographic order."""
    if n < 1 or n > N + 1:
        return iter(())
    return itertools.combinations(range(N + 1), n)


def tuple_array(n, N):
    return np.array(list(enumerate_tuples(n, N)), dtype=int).reshape(-1, n)


def selberg_terms(A, nums, dens, N, n, nome, tuples=None, weight_power=1):
    """Per-tuple summands of :func:`selberg_sum`, in tuple order."""
    q = nome.q
    xs = np.arange(N + 1)
    qx = qpowers(q, xs)
    w = theta(A * qpowers(q, 2 * xs), nome) / theta(A, nome)
    w = w * sf_table(nums, dens, N, nome) * qpowers(q, weight_power * xs)
    # cross[x, y] = (q^x theta(q^{y-x}) theta(A q^{x+y}))^2 for x < y
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    upper = X < Y
    cross = np.ones((N + 1, N + 1), dtype=complex)
    if np.any(upper):
        cross[upper] = (
            qx[X[upper]]
            * theta(qpowers(q, Y[upper] - X[upper]), nome)
            * theta(A * qpowers(q, X[upper] + Y[upper]), nome)
        ) ** 2
    T = tuple_array(n, N) if tuples is None else np.asarray(tuples, dtype=int).reshape(-1, n)
    if T.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    terms = np.prod(w[T], axis=1)
    for j in range(n):
        for k in range(j + 1, n):
            terms = terms * cross[T[:, j], T[:, k]]
    return terms


def selberg_sum(A, nums, dens, N, n, nome, tuples=None, weight_power=1):
    """Sum over increasing tuples of the squared cross factor times weights.

    ``w(x) = theta(A q^{2x})/theta(A) * (nums)_x/(dens)_x * q^{weight_power x}``.
    """
    return complex(np.sum(selberg_terms(A, nums, dens, N, n, nome, tuples, weight_power)))


def cancellation(terms):
    """``sum |t| / |sum t|``: the factor by which roundoff in the terms is amplified."""
    terms = np.asarray(terms)
    total = abs(np.sum(terms))
    if total == 0:
        return np.inf
    return float(np.sum(np.abs(terms)) / total)


def _mbt_lhs_data(P, nome):
    q = nome.q
    a = P.a
    nums = [a, P.b, P.c, P.d, P.e, P.f, P.g, qpow(q, -P.N)]
    dens = [q, a * q / P.b, a * q / P.c, a * q / P.d, a * q / P.e, a * q / P.f, a * q / P.g,
            a * qpow(q, P.N + 1)]
    return a, nums, dens


def _mbt_rhs_data(P, nome):
    q = nome.q
    a, lam = P.a, P.lam
    nums = [lam, lam * P.b / a, lam * P.c / a, lam * P.d / a, P.e, P.f, P.g, qpow(q, -P.N)]
    dens = [q, a * q / P.b, a * q / P.c, a * q / P.d, lam * q / P.e, lam * q / P.f,
            lam * q / P.g, lam * qpow(q, P.N + 1)]
    return lam, nums, dens


def mbt_lhs(params, nome, reverse=False):
    """Left side of the multivariable elliptic Bailey transformation."""
    A, nums, dens = _mbt_lhs_data(params, nome)
    T = tuple_array(params.n, params.N)
    return selberg_sum(A, nums, dens, params.N, params.n, nome, T[::-1] if reverse else T)


def mbt_rhs_prefactor(params, nome):
    """``(a/λ)^{(N+1-n)n} (aq)_N^n/(λq)_N^n prod_j (...)`` in front of the right-hand sum."""
    P = params
    q, a, lam, N, n = nome.q, P.a, P.lam, P.N, P.n
    out = (a / lam) ** ((N + 1 - n) * n)
    out *= sf_ratio([a * q] * n, [lam * q] * n, N, nome)
    for j in range(1, n + 1):
        out *= sf_ratio([P.b, P.c, P.d], [lam * P.b / a, lam * P.c / a, lam * P.d / a], j - 1, nome)
        out *= sf_ratio([lam * q / P.e, lam * q / P.f, lam * q / P.g],
                        [a * q / P.e, a * q / P.f, a * q / P.g], N + 1 - j, nome)
    return out


def mbt_rhs(params, nome, tuples=None, reverse=False):
    """Right side of the transformation; ``tuples`` restricts the sum (for degeneration checks)."""
    A, nums, dens = _mbt_rhs_data(params, nome)
    T = tuple_array(params.n, params.N) if tuples is None else np.asarray(tuples, dtype=int)
    if reverse:
        T = T[::-1]
    return mbt_rhs_prefactor(params, nome) * selberg_sum(A, nums, dens, params.N, params.n, nome, T)


def mbs_lhs(params, nome, reverse=False):
    """Left side of the discrete elliptic Selberg summation."""
    P = params
    q, a = nome.q, P.a
    nums = [a, P.b, P.c, P.d, P.e, qpow(q, -P.N)]
    dens = [q, a * q / P.b, a * q / P.c, a * q / P.d, a * q / P.e, a * qpow(q, P.N + 1)]
    T = tuple_array(P.n, P.N)
    return selberg_sum(a, nums, dens, P.N, P.n, nome, T[::-1] if reverse else T)


def mbs_rhs(params, nome):
    """Closed-form evaluation of the discrete elliptic Selberg sum."""
    P = params
    q, a, b, c, d, e, N, n = nome.q, P.a, P.b, P.c, P.d, P.e, P.N, P.n
    # n(n-1)(3N+1-2n)/3 as displayed in the literature, plus C(n,2): without
    # it the two sides differ by exactly q^{C(n,2)} (checked for p = 0 too)
    qexp = n * (n - 1) * (3 * N + 1 - 2 * n) // 3 + math.comb(n, 2)
    out = b ** (n * (N + 1 - n)) * qpow(q, qexp)
    out *= shifted_factorial(a * q, N, nome) ** n
    for j in range(1, n + 1):
        out *= sf_ratio([q, b, c, d, e, qpow(q, -N)], [], j - 1, nome)
        aq = a * qpow(q, 2 - j)
        out *= sf_ratio([aq / (b * c), aq / (b * d), aq / (b * e)], [], N + 1 - n, nome)
        out *= sf_ratio([], [a * q / b, a * q / c, a * q / d, a * q / e], N + 1 - j, nome)
    return out


# ---------------------------------------------------------- proof replay


def _pair_table(u, v, inv, xs, count, nome):
    """``(u q^x, v q^{-x} / inv)_count`` for every x, shape (len(xs),)."""
    q = nome.q
    up = qpowers(q, xs)
    dn = qpowers(q, -xs)
    return shifted_factorial(u * up, count, nome) * shifted_factorial(v * dn / inv, count, nome)


def _ratio_rows(u1, v1, u2, v2, inv, n, xs, nome, norm1, norm2, index_first=True):
    """Rows ``R_j(x) = (u1 q^x, v1 q^{-x}/inv)_{j-1} (u2 q^x, v2 q^{-x}/inv)_{n-j} / norm_j``."""
    rows = np.empty((n, xs.size), dtype=complex)
    for j in range(1, n + 1):
        num = _pair_table(u1, v1, inv, xs, j - 1, nome) * _pair_table(u2, v2, inv, xs, n - j, nome)
        den = (sf_ratio(norm1, [], j - 1, nome) * sf_ratio(norm2, [], n - j, nome))
        if abs(den) < GUARD:
            raise NearPoleError("normalising factorial of S-matrix row vanishes")
        rows[j - 1] = num / den
    return rows


def sjk_factors(params, nome, form="direct"):
    """Factor ``S = F diag(w) G^T diag(colscale)``.

    Returns ``(F, w, G, colscale)``. ``form="direct"`` uses the defining
    one-variable sum; ``form="transformed"`` uses the sum obtained by applying
    the one-variable transformation to each entry.
    """
    P = params
    q, a, lam, N, n = nome.q, P.a, P.lam, P.N, P.n
    xs = np.arange(N + 1)
    if form == "direct":
        A, nums, dens = _mbt_lhs_data(P, nome)
        F = _ratio_rows(P.b, P.b, P.c, P.c, a, n, xs, nome, [P.b, P.b / a], [P.c, P.c / a])
        G = _ratio_rows(P.e, P.e, P.f, P.f, a, n, xs, nome, [P.e, P.e / a], [P.f, P.f / a])
        colscale = np.ones(n, dtype=complex)
    elif form == "transformed":
        A, nums, dens = _mbt_rhs_data(P, nome)
        F = _ratio_rows(lam * P.b / a, P.b, lam * P.c / a, P.c, a, n, xs, nome,
                        [lam * P.b / a, P.b / a], [lam * P.c / a, P.c / a])
        G = _ratio_rows(P.e, P.e, P.f, P.f, lam, n, xs, nome, [P.e, P.e / lam], [P.f, P.f / lam])
        colscale = np.empty(n, dtype=complex)
        for k in range(1, n + 1):
            colscale[k - 1] = (a / lam) ** N * sf_ratio(
                [a * q, lam * qpow(q, 2 - k) / P.e, lam * qpow(q, 1 - n + k) / P.f, lam * q / P.g],
                [lam * q, a * qpow(q, 2 - k) / P.e, a * qpow(q, 1 - n + k) / P.f, a * q / P.g],
                N, nome)
    else:
        raise ValueError(f"unknown form {form!r}")
    w = theta(A * qpowers(q, 2 * xs), nome) / theta(A, nome)
    w = w * sf_table(nums, dens, N, nome) * qpowers(q, (2 * n - 1) * xs)
    return F, w, G, colscale


def sjk_matrix(params, nome, form="direct"):
    """The n x n matrix of one-variable sums ``S_{jk}``."""
    F, w, G, colscale = sjk_factors(params, nome, form)
    return (F * w) @ G.T * colscale[None, :]


def sjk_cauchy_binet(params, nome, form="direct"):
    """``det S`` expanded over increasing tuples of the grid ``x = 0..N``."""
    F, w, G, colscale = sjk_factors(params, nome, form)
    return cauchy_binet(F, G, w) * complex(np.prod(colscale))


def prefactor_pf(params, nome):
    """Ratio ``det S / (sum side)`` shared by both sides of the transformation."""
    P = params
    q, a, b, c, e, f, n = nome.q, P.a, P.b, P.c, P.e, P.f, P.n
    out = (c * f / a**2) ** math.comb(n, 2) * qpow(q, 2 * math.comb(n, 3))
    for j in range(1, n + 1):
        out *= sf_ratio(
            [qpow(q, j - n) * b / c, qpow(q, n - j) * b * c / a,
             qpow(q, j - n) * e / f, qpow(q, n - j) * e * f / a],
            [b, b / a, c, c / a, e, e / a, f, f / a],
            j - 1, nome, guard=GUARD)
    return out


# --------------------------------------------------------------- sampling


def _guard_arguments(P, nome):
    """(argument, length) pairs of every shifted factorial used in a denominator."""
    q, a, lam, N, n = nome.q, P.a, P.lam, P.N, P.n
    out = [(a, 1), (q, N), (a * q / P.b, N + 1), (a * q / P.c, N + 1), (a * q / P.d, N + 1),
           (a * q / P.e, N + 1), (a * qpow(q, N + 1), N)]
    if P.mode == "mbs":
        return out
    out += [(a * q / P.f, N + 1), (a * q / P.g, N + 1), (lam, 1), (lam * q, N),
            (lam * q / P.e, N), (lam * q / P.f, N), (lam * q / P.g, N), (lam * qpow(q, N + 1), N)]
    for j in range(1, n + 1):
        out += [(lam * P.b / a, j - 1), (lam * P.c / a, j - 1), (lam * P.d / a, j - 1)]
    # S-matrix normalisations (both forms) and the prefactor
    for u in (P.b, P.c, P.e, P.f):
        out += [(u, n - 1), (u / a, n - 1)]
    out += [(lam * P.b / a, n - 1), (lam * P.c / a, n - 1), (P.e / lam, n - 1), (P.f / lam, n - 1)]
    for k in range(1, n + 1):
        out += [(a * qpow(q, 2 - k) / P.e, N), (a * qpow(q, 1 - n + k) / P.f, N)]
    return out


def check_guards(params, nome, guard=GUARD):
    """Raise :class:`NearPoleError` if a denominator theta factor is below ``guard``."""
    for arg, length in _guard_arguments(params, nome):
        if length <= 0:
            continue
        vals = theta(arg * qpowers(nome.q, np.arange(length)), nome)
        if np.min(np.abs(vals)) < guard:
            raise NearPoleError(f"denominator factor ({arg})_{length} within {guard} of zero")


def _random_point(rng, lo=0.3, hi=0.8):
    return complex(rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform()))


def conditioning(params, nome):
    """Cancellation factors of every sum that a check of ``params`` evaluates.

    Keys: ``"lhs"``, ``"rhs"`` (``mbt`` only) and ``"sjk"`` (worst entry of the
    S matrix over both forms, ``mbt`` only).
    """
    P = params
    if P.mode == "mbs":
        q, a = nome.q, P.a
        nums = [a, P.b, P.c, P.d, P.e, qpow(q, -P.N)]
        dens = [q, a * q / P.b, a * q / P.c, a * q / P.d, a * q / P.e, a * qpow(q, P.N + 1)]
        return {"lhs": cancellation(selberg_terms(a, nums, dens, P.N, P.n, nome))}
    out = {
        "lhs": cancellation(selberg_terms(*_mbt_lhs_data(P, nome), P.N, P.n, nome)),
        "rhs": cancellation(selberg_terms(*_mbt_rhs_data(P, nome), P.N, P.n, nome)),
    }
    worst = 0.0
    for form in ("direct", "transformed"):
        F, w, G, _ = sjk_factors(P, nome, form)
        terms = F[:, None, :] * G[None, :, :] * w
        worst = max(worst, max(cancellation(terms[j, k]) for j in range(P.n) for k in range(P.n)))
    out["sjk"] = worst
    return out


def sample_discrete_params(seed, n, N, mode, nome, degenerate=False, max_tries=1000,
                           max_cancellation=1e4):
    """Draw a balanced, pole-free parameter set.

    Free parameters have moduli uniform in [0.3, 0.8] and uniform phases; the
    last one (``g`` for ``mbt``, ``e`` for ``mbs``) is solved from balancing.
    With ``degenerate=True`` (``mbt`` only) ``d = aq/c`` is imposed, which
    collapses the right-hand sum onto the tuple ``(0, 1, ..., n-1)``.

    Draws whose sums cancel by more than ``max_cancellation`` (see
    :func:`conditioning`) are also rejected: their residuals measure roundoff
    amplification rather than the identity. Pass ``None`` to keep them.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    _check_sizes(N, n)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    reasons = {}
    for _ in range(max_tries):
        if mode == "mbt":
            a, b, c, d, e, f = (_random_point(rng) for _ in range(6))
            if degenerate:
                d = a * nome.q / c
            P = DiscreteParams.balanced_mbt(a, b, c, d, e, f, N, n, nome)
            solved = P.g
        elif mode == "mbs":
            a, b, c, d = (_random_point(rng) for _ in range(4))
            P = DiscreteParams.balanced_mbs(a, b, c, d, N, n, nome)
            solved = P.e
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if abs(solved) > 3:
            reasons["solved parameter > 3"] = reasons.get("solved parameter > 3", 0) + 1
            continue
        if mode == "mbt" and not (1e-3 <= abs(P.lam) <= 1e3):
            reasons["lambda out of range"] = reasons.get("lambda out of range", 0) + 1
            continue
        try:
            check_guards(P, nome)
        except NearPoleError:
            reasons["denominator guard"] = reasons.get("denominator guard", 0) + 1
            continue
        if max_cancellation is not None and max(conditioning(P, nome).values()) > max_cancellation:
            reasons["cancellation"] = reasons.get("cancellation", 0) + 1
            continue
        return P
    raise SamplingError(f"no admissible {mode} parameters after {max_tries} draws: {reasons}")


def with_params(params, **changes):
    return replace(params, **changes)

import itertools

import numpy as np
import pytest

from ellselberg import EllipticDomainError, Nome, elliptic_gamma, pm_product, reciprocal_gamma
from ellselberg import continuous as cs
from ellselberg.detkit import det, rel_residual
from ellselberg.torus import QuadGrid, torus_integrate

NOME = Nome.from_polar(0.20, 0.3, 0.45, 1.1)


def esi(seed, n=1, mode="tq", nome=NOME):
    return cs.sample_continuous_params(seed, "esi", n, mode, nome)


def eit(seed, n=1, nome=NOME):
    return cs.sample_continuous_params(seed, "eit", n, "tq", nome)


# ---------------------------------------------------------------- params


def test_params_validation():
    with pytest.raises(EllipticDomainError):
        cs.ContinuousParams("esi", 1, 0.3, (0.5,) * 5)
    with pytest.raises(EllipticDomainError):
        cs.ContinuousParams("eit", 1, 0.3, (0.5,) * 4)
    with pytest.raises(EllipticDomainError):
        cs.ContinuousParams("esi", 1, 0.3, (0.5,) * 5 + (1.2,))
    with pytest.raises(EllipticDomainError):
        cs.ContinuousParams("xyz", 1, 0.3, (0.5,) * 6)


def test_sampled_balancing_exact():
    for seed in range(5):
        for n in (1, 2):
            P = esi(seed, n)
            assert max(P.balancing_residuals(NOME)) <= 1e-12
            Q = eit(seed, n)
            # both v^2 equalities at once
            r1, r2 = Q.balancing_residuals(NOME)
            assert r1 <= 1e-12 and r2 <= 1e-12


def test_sampler_deterministic_and_contour_valid():
    assert esi(3, 2, "general") == esi(3, 2, "general")
    for seed in range(10):
        P = esi(seed, 2, "general")
        assert max(P.contour_moduli()) < 1
        assert abs(P.t) <= 0.6


def test_sampler_reports_infeasible_balancing():
    # at t = q and n = 3 balancing pushes the mean modulus of t_k past 1 for this nome
    with pytest.raises(cs.SamplingError):
        esi(0, 3)


def test_negate_v():
    Q = eit(1)
    R = cs.negate_v(Q)
    assert R.v == -Q.v
    assert max(R.balancing_residuals(NOME)) <= 1e-12


# ---------------------------------------------------------------- integrands


def test_beta_integrand_inversion_and_sign_symmetry():
    P = esi(2)
    f = cs.selberg_integrand(P, NOME)
    neg = cs.ContinuousParams("esi", 1, P.t, tuple(-x for x in P.ts))
    g = cs.selberg_integrand(neg, NOME)
    for z in (0.3 + 0.95j, np.exp(0.7j), 1.1 * np.exp(-2.0j)):
        assert rel_residual(f(z), f(1 / z)) <= 1e-12
        assert rel_residual(f(z), g(-z)) <= 1e-12


def test_beta_integrand_matches_shorthand():
    P = esi(4)
    f = cs.selberg_integrand(P, NOME)
    z = np.exp(0.4j)
    ref = np.prod([pm_product("gamma", t, z, NOME) for t in P.ts]) / pm_product("gamma", 1, z, NOME, power=2)
    assert rel_residual(f(z), ref) <= 1e-12


def test_integrand_zero_at_plus_minus_one():
    f = cs.selberg_integrand(esi(1), NOME)
    assert f(1.0) == 0 and f(-1.0) == 0


def test_selberg_integrand_symmetries():
    P = esi(5, 2, "general")
    f = cs.selberg_integrand(P, NOME)
    z1, z2 = np.exp(0.3j), 0.98 * np.exp(2.2j)
    base = f(z1, z2)
    assert rel_residual(base, f(z2, z1)) <= 1e-12
    assert rel_residual(base, f(1 / z1, z2)) <= 1e-12
    assert rel_residual(base, f(z1, 1 / z2)) <= 1e-12


def test_selberg_integrand_cross_factor():
    P = esi(6, 2)
    f = cs.selberg_integrand(P, NOME)
    one = cs.selberg_integrand(cs.ContinuousParams("esi", 1, P.t, P.ts), NOME)
    z1, z2 = np.exp(0.5j), np.exp(-1.9j)
    cross = pm_product("gamma", P.t, (z1, z2), NOME) * pm_product("rgamma", 1, (z1, z2), NOME)
    assert rel_residual(f(z1, z2), one(z1) * one(z2) * cross) <= 1e-12


def test_rains_integrand_symmetry():
    Q = eit(2, 2)
    f = cs.rains_integrand(Q.ts, Q.us, Q.t, 2, NOME)
    z1, z2 = np.exp(1.3j), np.exp(-0.2j)
    assert rel_residual(f(z1, z2), f(z2, 1 / z1)) <= 1e-12


# ---------------------------------------------------------------- convergence


def test_beta_quadrature_converges_geometrically():
    for seed in range(20):
        P = esi(seed)
        f = cs.selberg_integrand(P, NOME)
        rho = max(abs(NOME.p), abs(NOME.q), max(abs(t) for t in P.ts)) + 0.1
        values = [torus_integrate(f, QuadGrid(1, M)) for M in (16, 32, 64, 128)]
        scale = abs(values[-1])
        diffs = [abs(b - a) / scale for a, b in zip(values, values[1:])]
        for prev, cur in zip(diffs, diffs[1:]):
            if prev > 1e-13:
                assert cur <= rho * prev


# ---------------------------------------------------------------- identities


def test_beta_integral():
    for seed in range(10):
        P = esi(seed)
        assert rel_residual(cs.beta_integral_lhs(P, NOME), cs.beta_integral_rhs(P, NOME)) <= 1e-8


def test_beta_integral_small_nome():
    nome = Nome(0.3 * np.exp(0.9j), 0.4 * np.exp(-0.5j))
    for seed in range(5):
        P = esi(seed, nome=nome)
        assert rel_residual(cs.beta_integral_lhs(P, nome), cs.beta_integral_rhs(P, nome)) <= 1e-8


def test_beta_rejects_n2():
    with pytest.raises(EllipticDomainError):
        cs.beta_integral_rhs(esi(0, 2), NOME)


def test_selberg_n1_is_beta():
    P = esi(7)
    assert cs.selberg_lhs(P, NOME) == cs.beta_integral_lhs(P, NOME)
    assert cs.selberg_rhs(P, NOME) == cs.beta_integral_rhs(P, NOME)


def test_beta_rhs_is_fifteen_gammas():
    P = esi(8)
    ref = np.prod([elliptic_gamma(P.ts[j] * P.ts[k], NOME) for j, k in itertools.combinations(range(6), 2)])
    assert rel_residual(cs.beta_integral_rhs(P, NOME), ref) <= 1e-14


@pytest.mark.parametrize("mode", ["tq", "general"])
def test_selberg_n2(mode):
    for seed in range(3):
        P = esi(seed, 2, mode)
        assert rel_residual(cs.selberg_lhs(P, NOME), cs.selberg_rhs(P, NOME)) <= 1e-6


def test_rains_n1():
    for seed in range(5):
        Q = eit(seed)
        assert rel_residual(cs.rains_lhs(Q, NOME), cs.rains_rhs(Q, NOME)) <= 1e-8


def test_rains_n2_tq():
    Q = eit(0, 2)
    assert rel_residual(cs.rains_lhs(Q, NOME), cs.rains_rhs(Q, NOME)) <= 1e-5


def test_rains_v_sign_invariance():
    for seed in range(3):
        Q = eit(seed)
        assert rel_residual(cs.rains_rhs(Q, NOME), cs.rains_rhs(cs.negate_v(Q), NOME)) <= 1e-10


# ---------------------------------------------------------------- proof replay


def test_ijk_entries_substitution():
    P = esi(3, 2)
    q = NOME.q
    E = cs.ijk_params(P, NOME, 2, 1)
    t1, t2, t3, t4, t5, t6 = P.ts
    assert E.ts == (t1 * q, t2, t3, t4 * q, t5, t6)
    # substitutions keep the one-variable balancing
    assert max(E.balancing_residuals(NOME)) <= 1e-12


def test_ijk_closed_entry_is_fifteen_gammas():
    P = esi(4, 2)
    closed = cs.ijk_matrix(P, NOME, "closed")
    E = cs.ijk_params(P, NOME, 1, 2).ts
    ref = np.prod([elliptic_gamma(E[a] * E[b], NOME) for a, b in itertools.combinations(range(6), 2)])
    assert rel_residual(closed[0, 1], ref) <= 1e-14


def test_ijk_quadrature_matches_closed():
    for seed in range(3):
        P = esi(seed, 2)
        quad = cs.ijk_matrix(P, NOME, "quadrature")
        closed = cs.ijk_matrix(P, NOME, "closed")
        assert np.max(np.abs(quad - closed) / (np.abs(quad) + np.abs(closed))) <= 1e-8


def test_ijk_det_closed_form():
    for seed in range(5):
        for n in (1, 2):
            P = esi(seed, n)
            assert rel_residual(det(cs.ijk_matrix(P, NOME, "closed")), cs.ijk_det_closed(P, NOME)) <= 1e-9


def test_di_n1_components_are_beta():
    P = esi(9)
    D, other = cs.di_check(P, NOME)
    beta = cs.beta_integral_lhs(P, NOME)
    assert rel_residual(D, other) <= 1e-12
    assert rel_residual(D, beta) <= 1e-12


def test_di_n2():
    for seed in range(2):
        D, other = cs.di_check(esi(seed, 2), NOME)
        assert rel_residual(D, other) <= 1e-6


def test_di_needs_t_equal_q():
    with pytest.raises(EllipticDomainError):
        cs.di_check(esi(0, 2, "general"), NOME)


def test_reciprocal_gamma_in_pair_is_finite_on_diagonal():
    # the cross factor 1/Gamma(x^±) vanishes at x = 1, so coinciding nodes contribute 0
    pair = cs._pair(NOME.q, NOME)
    assert pair(1.0) == 0
    assert reciprocal_gamma(1.0, NOME) == 0

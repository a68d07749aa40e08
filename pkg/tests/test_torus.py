import numpy as np
import pytest

from ellselberg import QuadratureError
from ellselberg.torus import (
    PairIntegrand,
    QuadGrid,
    torus_integrate,
    torus_integrate_adaptive,
    torus_nodes,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        QuadGrid(1, 4)
    with pytest.raises(ValueError):
        QuadGrid(0, 16)
    with pytest.raises(ValueError):
        QuadGrid(1, 16, offset=False)


def test_nodes_avoid_plus_minus_one():
    z = torus_nodes(16)
    assert np.all(np.abs(np.abs(z) - 1) < 1e-15)
    assert np.min(np.abs(z - 1)) > 0.1
    assert np.min(np.abs(z + 1)) > 0.1


def test_constant_integrates_to_one():
    for dims in (1, 2, 3):
        assert torus_integrate(lambda *zs: np.ones_like(zs[0]), QuadGrid(dims, 8)) == pytest.approx(1)


@pytest.mark.parametrize("m", [3, -3])
def test_monomials_vanish(m):
    assert abs(torus_integrate(lambda z: z**m, QuadGrid(1, 16))) < 1e-15


def test_laurent_polynomial_exact_below_node_count():
    rng = np.random.default_rng(0)
    coeffs = rng.normal(size=15) + 1j * rng.normal(size=15)
    powers = np.arange(-7, 8)

    def f(z):
        return sum(c * z ** int(k) for c, k in zip(coeffs, powers))

    assert torus_integrate(f, QuadGrid(1, 16)) == pytest.approx(coeffs[7], abs=1e-14)


def test_geometric_series_constant_term():
    value = torus_integrate_adaptive(lambda z: 1 / (1 - 0.5 * z), 1, tol=1e-14)
    assert value == pytest.approx(1, abs=1e-14)


def test_two_dimensional_product():
    f = lambda z, w: 1 / ((1 - 0.3 * z) * (1 - 0.4 / w)) + z / w
    assert torus_integrate_adaptive(f, 2, tol=1e-13) == pytest.approx(1, abs=1e-13)


def test_adaptive_reports_history():
    value, info = torus_integrate_adaptive(lambda z: 1 / (1 - 0.9 * z), 1, tol=1e-12, full_output=True)
    assert value == pytest.approx(1, abs=1e-12)
    Ms = [M for M, _ in info["history"]]
    assert Ms == sorted(Ms) and all(b == 2 * a for a, b in zip(Ms, Ms[1:]))
    assert info["nodes"] == Ms[-1] <= 1024


def test_adaptive_raises_at_cap():
    # singularity at |z| = 1/0.999: far too slow for a cap of 64
    with pytest.raises(QuadratureError) as info:
        torus_integrate_adaptive(lambda z: 1 / (1 - 0.999 * z) + 1 / (1 - 0.999 / z), 1, tol=1e-14, cap=64)
    assert len(info.value.estimates) == 2
    assert info.value.nodes == 64


def test_pair_integrand_grid_matches_pointwise():
    weight = lambda z: 1 / (1 - 0.3 * z) / (1 - 0.3 / z)
    pair = lambda x: (1 - 0.2 * x) * (1 - 0.2 / x) + 0.1 * x
    f = PairIntegrand(weight, pair, 3)
    M = 8
    z = torus_nodes(M)
    grid = f.grid_values(M)
    Z = np.meshgrid(z, z, z, indexing="ij")
    assert np.max(np.abs(grid - f(*Z))) < 1e-14


def test_pair_integrand_checks_arity():
    f = PairIntegrand(lambda z: z, lambda x: x, 2)
    with pytest.raises(ValueError):
        f(0.5)


def test_pair_integrand_integral_uses_grid_path():
    weight = lambda z: 1 / (1 - 0.3 * z) / (1 - 0.3 / z)
    pair = lambda x: 1 - 0.25 * (x + 1 / x)
    f = PairIntegrand(weight, pair, 2)
    pointwise = lambda z, w: f(z, w)
    for M in (16, 32):
        assert torus_integrate(f, QuadGrid(2, M)) == pytest.approx(torus_integrate(pointwise, QuadGrid(2, M)), rel=1e-14)

import numpy as np
import pytest

from slantgeo.expr import parse
from slantgeo.geometry import (AlmostContactStructure, GeometryError, ManifoldSpec, builtin,
                               builtin_cosymplectic, check_cosymplectic, christoffel_at,
                               covariant_derivative, metric_compatibility_residual,
                               sample_points, structure_residuals)


def polar_like():
    return ManifoldSpec.from_strings([["1", "0", "0"], ["0", "x1^2", "0"], ["0", "0", "1"]],
                                     [(1, 2), (-1, 1), (-1, 1)])


def test_christoffel_symbols_of_polar_metric():
    gamma = christoffel_at(polar_like(), (2.0, 0.0, 0.0))
    # Gamma[k, i, j] = Gamma^k_ij, with r = x1 = 2
    assert gamma[0, 1, 1] == pytest.approx(-2.0)
    assert gamma[1, 0, 1] == pytest.approx(0.5)
    assert gamma[1, 1, 0] == pytest.approx(0.5)
    mask = np.ones_like(gamma, dtype=bool)
    mask[0, 1, 1] = mask[1, 0, 1] = mask[1, 1, 0] = False
    assert np.all(gamma[mask] == 0.0)


def test_levi_civita_is_metric_compatible(rng):
    m = ManifoldSpec.from_strings(
        [["1 + x2^2", "x1*x2", "0"], ["x1*x2", "2 + sin(x3)", "0"], ["0", "0", "exp(x1)"]],
        [(-0.5, 0.5)] * 3)
    for p in sample_points(m.domain_box, 5, 1):
        assert metric_compatibility_residual(m, p) < 1e-12


def test_covariant_derivative_of_radial_field():
    # d/dr is geodesic: nabla_{d/dr} d/dr = 0; nabla_{d/dtheta} d/dr = (1/r) d/dtheta
    m = polar_like()
    radial = [parse("1", 3), parse("0", 3), parse("0", 3)]
    p = (2.0, 0.3, 0.0)
    np.testing.assert_allclose(covariant_derivative(m, radial, [1, 0, 0], p), 0, atol=1e-15)
    np.testing.assert_allclose(covariant_derivative(m, radial, [0, 1, 0], p), [0, 0.5, 0],
                               atol=1e-15)


@pytest.mark.parametrize("name", ["cosym_r5", "cosym_r7", "cosym_r5_swap"])
def test_builtin_structures_are_cosymplectic(name):
    m, acs = builtin(name)
    verdict = check_cosymplectic(m, acs, samples=10)
    assert verdict.passed
    assert verdict.max_residual == 0.0


def test_builtin_phi_action():
    # phi(d/du_i) = -d/dv_sigma(i), phi(d/dv_j) = d/du_sigma^-1(j)
    _, acs = builtin_cosymplectic(2, permutation=(2, 1))
    phi, xi, eta = acs.at(np.zeros(5))
    np.testing.assert_array_equal(phi @ np.eye(5)[0], -np.eye(5)[3])
    np.testing.assert_array_equal(phi @ np.eye(5)[3], np.eye(5)[0])
    np.testing.assert_array_equal(xi, np.eye(5)[4])
    np.testing.assert_array_equal(eta, np.eye(5)[4])


def test_broken_structure_is_detected():
    m, good = builtin("cosym_r5")
    phi = [list(r) for r in good.phi]
    phi[0][2] = parse("2", 5)  # wrong scaling on one block
    bad = AlmostContactStructure(tuple(tuple(r) for r in phi), good.xi, good.eta, 5)
    assert max(structure_residuals(m, bad, np.zeros(5)).values()) > 0.5
    assert not check_cosymplectic(m, bad, samples=3).passed


def test_non_parallel_structure_fails_nabla_phi():
    # flat structure on a warped metric is no longer parallel
    m = ManifoldSpec.from_strings(
        [["exp(x5)" if i == j and i < 4 else ("1" if i == j else "0") for j in range(5)]
         for i in range(5)], [(-1, 1)] * 5)
    _, acs = builtin("cosym_r5")
    verdict = check_cosymplectic(m, acs, samples=3)
    assert not verdict.passed


@pytest.mark.parametrize("metric, message", [
    ([["1", "x1"], ["0", "1"]], "symmetric"),
    ([["1", "0"]], "2x2"),
])
def test_invalid_metric(metric, message):
    n = 2
    with pytest.raises(GeometryError, match=message):
        ManifoldSpec(n, tuple(tuple(parse(c, n) for c in r) for r in metric), [(0, 1)] * n)


def test_indefinite_metric_rejected():
    m = ManifoldSpec.from_strings([["1", "0"], ["0", "-1"]], [(0, 1)] * 2)
    _, acs = builtin("cosym_r5")
    with pytest.raises(GeometryError, match="positive definite"):
        check_cosymplectic(m, AlmostContactStructure(
            ((parse("0", 2),) * 2,) * 2, (parse("0", 2),) * 2, (parse("0", 2),) * 2, 2),
            samples=2)


def test_sampling_is_seeded_and_inside_box():
    box = [(0, 1), (-2, -1)]
    a, b = sample_points(box, 8, 3), sample_points(box, 8, 3)
    np.testing.assert_array_equal(a, b)
    assert np.all((a[:, 0] >= 0) & (a[:, 0] <= 1) & (a[:, 1] >= -2) & (a[:, 1] <= -1))

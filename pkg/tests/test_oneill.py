import math

import numpy as np
import pytest

from slantgeo import fixtures as fx
from slantgeo.oneill import LocalGeometry, oneill_tensors, second_fundamental_form

from helpers import heisenberg, radial, warped

QUADRIC_POINT = np.array([1.4, 0.2, -0.3, 0.5, 0.1])


@pytest.fixture(scope="module")
def quadric():
    return LocalGeometry(fx.make("slant_quadric"), QUADRIC_POINT)


def _horizontal(geo):
    return range(geo.k, geo.n)


def test_heisenberg_projection_has_A_but_no_T():
    geo = LocalGeometry(heisenberg(), [0.3, -0.2, 0.5])
    sample = oneill_tensors(geo.m, geo=geo)
    assert np.max(np.abs(sample.T)) < 1e-9
    x, y = geo.frame.horizontal.T
    assert geo.norm(geo.A(x, y)) == pytest.approx(0.5, rel=1e-8)
    assert sample.skew_A < 1e-9 and sample.alternation_A < 1e-9
    for a in _horizontal(geo):
        for b in _horizontal(geo):
            np.testing.assert_allclose(geo.A_frame()[:, a, b], geo.A_horizontal_formula(a, b),
                                       atol=1e-9)


def test_warped_projection_dilation_terms():
    geo = LocalGeometry(warped(), [0.1, 0.2, -0.4])
    assert geo.lam == pytest.approx(math.exp(0.4), rel=1e-12)
    np.testing.assert_allclose(geo.grad_ln_lambda, [0, 0, -1], atol=1e-8)
    for a in _horizontal(geo):
        for b in _horizontal(geo):
            np.testing.assert_allclose(geo.A_frame()[:, a, b], geo.A_horizontal_formula(a, b),
                                       atol=1e-8)
            x, y = geo.frame.full[:, a], geo.frame.full[:, b]
            np.testing.assert_allclose(geo.sff(x, y), geo.sff_horizontal_formula(x, y),
                                       atol=1e-8 * geo.lam)
    # g(X, X) v grad ln lambda is the whole of A_X X here
    x = geo.frame.horizontal[:, 0]
    np.testing.assert_allclose(geo.A(x, x), geo.v(geo.grad_ln_lambda), atol=1e-8)
    assert geo.norm_target(geo.tension()) < 1e-8


def test_radial_map_fibres_are_circles():
    p = np.array([0.6, 0.8])
    geo = LocalGeometry(radial(), p)
    v = geo.frame.vertical[:, 0]
    # T_V V = -(1/r) d/dr for the unit tangent of a circle of radius r = 1
    np.testing.assert_allclose(geo.T(v, v), -p, atol=1e-8)
    sample = second_fundamental_form(geo.m, geo=geo)
    assert sample.tension == pytest.approx([1.0], abs=1e-8)
    np.testing.assert_allclose(geo.tension_formula(), sample.tension, atol=1e-8)


def test_skew_symmetry_on_curved_fibres(quadric):
    sample = oneill_tensors(quadric.m, geo=quadric)
    assert np.max(np.abs(sample.T)) > 1e-3 and np.max(np.abs(sample.A)) > 1e-3
    assert sample.skew_T < 1e-8 and sample.skew_A < 1e-8
    assert sample.symmetry_T < 1e-8
    assert sample.T_xi < 1e-8 and sample.A_xi < 1e-8
    # lambda varies along the fibres, so A on horizontal pairs has a symmetric part
    assert sample.alternation_A > 1e-3
    geo = quadric
    for a in _horizontal(geo):
        for b in _horizontal(geo):
            x, y = geo.frame.full[:, a], geo.frame.full[:, b]
            sym = 0.5 * (geo.A(x, y) + geo.A(y, x))
            expected = geo.inner(x, y) * geo.v(geo.grad_ln_lambda)
            np.testing.assert_allclose(sym, expected, atol=1e-8)


def test_tensoriality_under_a_twisted_extension(quadric):
    twisted = LocalGeometry(quadric.m, QUADRIC_POINT, twist=np.array([0.7, -1.1, 0.4, 0.9, 1.3]))
    np.testing.assert_allclose(twisted.frame.full, quadric.frame.full)
    np.testing.assert_allclose(twisted.T_frame(), quadric.T_frame(), atol=1e-7)
    np.testing.assert_allclose(twisted.A_frame(), quadric.A_frame(), atol=1e-7)
    np.testing.assert_allclose(twisted.sff_frame() / quadric.lam,
                               quadric.sff_frame() / quadric.lam, atol=1e-7)
    # the raw connection coefficients do depend on the extension
    assert np.max(np.abs(twisted.frame_nabla - quadric.frame_nabla)) > 0.1


def test_second_fundamental_form_closed_forms(quadric):
    geo, lam = quadric, quadric.lam
    s = geo.sff_frame()
    full, k = geo.frame.full, geo.k
    j = geo.jac
    for a in range(geo.n):
        for b in range(geo.n):
            x, y = full[:, a], full[:, b]
            if a >= k and b >= k:
                expected = geo.sff_horizontal_formula(x, y)
            elif a < k and b < k:
                expected = -j @ geo.T(x, y)
            elif a >= k:
                expected = -j @ geo.A(x, y)
            else:
                expected = -j @ geo.A(y, x)  # symmetric: S(V, X) = S(X, V)
            assert np.max(np.abs(s[:, a, b] - expected)) / lam < 1e-7
    assert second_fundamental_form(geo.m, geo=geo).symmetry < 1e-7


def test_tension_formula_on_curved_fibres(quadric):
    tau = quadric.tension()
    np.testing.assert_allclose(tau / quadric.lam, quadric.tension_formula() / quadric.lam,
                               atol=1e-7)


def test_nabla_D_and_E_formulas(quadric):
    geo = quadric
    for i in range(geo.k):
        v = geo.frame.full[:, i]
        for w in range(geo.k):
            np.testing.assert_allclose(geo.nabla_D(v, w), geo.nabla_D_formula(v, w), atol=1e-7)
            np.testing.assert_allclose(geo.nabla_E(v, w), geo.nabla_E_formula(v, w), atol=1e-7)


def test_brackets(quadric):
    e1 = lambda st: np.eye(5)[0]  # noqa: E731
    e4 = lambda st: np.eye(5)[3]  # noqa: E731
    np.testing.assert_allclose(quadric.bracket(e1, e4), 0, atol=1e-10)
    # [x2 d1, d2] = -d1
    f = lambda st: st.point[1] * np.eye(5)[0]  # noqa: E731
    e2 = lambda st: np.eye(5)[1]  # noqa: E731
    np.testing.assert_allclose(quadric.bracket(f, e2), -np.eye(5)[0], atol=1e-9)

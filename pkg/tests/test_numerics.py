import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from travwave.jets import Jet
from travwave.quadrature import composite_gauss_legendre, gauss_kronrod, gauss_legendre
from travwave.weak import BumpTestFunction, bump_eval, normalization, space_factor, time_integral

from oracles import richardson


# -- jets -------------------------------------------------------------------------

def test_jet_mixed_partials_of_product():
    x = Jet.variable(0.7, 0, 2, 3)
    y = Jet.variable(-1.2, 1, 2, 3)
    f = (x * x * y).exp()
    v = math.exp(0.7 ** 2 * -1.2)
    # d/dx d/dy exp(x^2 y) = exp(.) (2x + 2x^3 y)
    assert f.partial((1, 1)) == pytest.approx(v * (2 * 0.7 + 2 * 0.7 ** 3 * -1.2), rel=1e-14)
    # d^2/dy^2 = x^4 exp(.)
    assert f.partial((0, 2)) == pytest.approx(v * 0.7 ** 4, rel=1e-14)


def test_jet_reciprocal_third_derivative():
    x = Jet.variable(0.3, 0, 1, 3)
    f = 1.0 / (1.0 - x * x)
    # third derivative of 1/(1-u^2) is 24u(1+u^2)/(1-u^2)^4
    assert f.partial((3,)) == pytest.approx(24 * 0.3 * (1 + 0.09) / (1 - 0.09) ** 4, rel=1e-13)


def test_jet_order_guard():
    x = Jet.variable(1.0, 0, 1, 2)
    with pytest.raises(ValueError):
        x.partial((3,))


# -- quadrature ---------------------------------------------------------------------

def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(10)
    for deg in range(20):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert np.dot(w, x ** deg) == pytest.approx(exact, abs=1e-14)


def test_gauss_kronrod_sqrt_endpoint():
    res = gauss_kronrod(np.sqrt, 0.0, 1.0, epsabs=1e-12)
    assert res.value == pytest.approx(2 / 3, abs=1e-12)
    assert res.error <= 1e-11 and res.cells > 1


def test_gauss_kronrod_matches_scipy():
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)  # noqa: E731
    ref = integrate.quad(f, -4, 4, epsabs=1e-13, epsrel=1e-13)[0]
    assert gauss_kronrod(f, -4, 4, epsabs=1e-13).value == pytest.approx(ref, abs=1e-13)


def test_composite_gauss_legendre():
    edges = np.linspace(0, math.pi, 9)
    cells = composite_gauss_legendre(np.sin, edges)
    assert len(cells) == 8 and cells.sum() == pytest.approx(2.0, abs=1e-14)


# -- bump test functions -----------------------------------------------------------

BUMP = BumpTestFunction(gamma0=0.3, s=1.2, d_x=0.8, t_lo=-0.5, t_hi=1.0, amplitude=2.0)


def test_bump_centre_value():
    b = BumpTestFunction(0.0, 1.0, 0.7, 0.0, 2.0)
    tm = 1.0
    expected = math.exp(-1 / 0.49 - 4 / 4.0)
    assert bump_eval(b, tm, b.gamma0 + b.s * tm) == pytest.approx(expected, rel=1e-14)


def test_bump_vanishes_on_boundary_and_outside():
    tm = 0.25
    xc = BUMP.gamma0 + BUMP.s * tm
    for order in ("phi", "t", "x", "xx", "tx", "txx"):
        assert bump_eval(BUMP, tm, xc + BUMP.d_x, order) == 0.0
        assert bump_eval(BUMP, BUMP.t_hi, xc, order) == 0.0
        assert bump_eval(BUMP, tm, xc + 5, order) == 0.0


def test_bump_x_derivative_zero_on_centre_line():
    t = np.linspace(-0.4, 0.9, 21)
    np.testing.assert_allclose(bump_eval(BUMP, t, BUMP.gamma0 + BUMP.s * t, "x"), 0.0, atol=1e-15)


def _fd_partial(order, t, x):
    """Reference partials from nested Richardson differences.

    The third-order mixed partial differentiates the exact phi_xx in t; nesting three
    difference quotients loses too many digits to serve as a 1e-7 reference.
    """
    phi = lambda tt, xx: bump_eval(BUMP, tt, xx)  # noqa: E731
    dx = lambda f: (lambda tt, xx: richardson(lambda v: f(tt, v), xx, h=1e-2))  # noqa: E731
    dt = lambda f: (lambda tt, xx: richardson(lambda v: f(v, xx), tt, h=1e-2))  # noqa: E731
    chain = {"t": dt(phi), "x": dx(phi), "xx": dx(dx(phi)), "tx": dt(dx(phi)), "txx": dt(lambda tt, xx: bump_eval(BUMP, tt, xx, "xx"))}
    return chain[order](t, x)


@pytest.mark.parametrize("order", ["t", "x", "xx", "tx", "txx"])
def test_bump_partials_against_richardson(order):
    rng = np.random.default_rng(7)
    n = 100 if order in ("t", "x", "txx") else 25
    for _ in range(n):
        t = rng.uniform(-0.3, 0.8)
        x = BUMP.gamma0 + BUMP.s * t + rng.uniform(-0.5, 0.5)
        exact = bump_eval(BUMP, t, x, order)
        ref = _fd_partial(order, t, x)
        scale = max(abs(ref), 1e-3 * abs(bump_eval(BUMP, t, x)), 1e-12)
        assert abs(exact - ref) <= 1e-7 * scale + 1e-10


def test_space_factor_matches_bump():
    xi = np.linspace(-0.4, 1.0, 15)
    tm = 0.25
    A = space_factor(BUMP, xi)
    B = bump_eval(BUMP, tm, BUMP.gamma0 + BUMP.s * tm) / space_factor(BUMP, BUMP.gamma0)[0][0]
    np.testing.assert_allclose(A[0] * B, bump_eval(BUMP, tm, xi + BUMP.s * tm), rtol=1e-13, atol=1e-300)


def test_time_integral_and_normalization_against_scipy():
    b = BumpTestFunction(0.0, 1.0, 0.9, 0.0, 1.5)
    ref_t = integrate.quad(lambda t: bump_eval(b, t, b.s * t) / space_factor(b, 0.0)[0][0], 0, 1.5,
                           epsabs=1e-14)[0]
    assert time_integral(b) == pytest.approx(ref_t, rel=1e-10)
    # L1 norms of the partials on a dense midpoint grid in (t, xi)
    n = 800
    t = (np.arange(n) + 0.5) / n * 1.5
    xi = -0.9 + (np.arange(n) + 0.5) / n * 1.8
    T, X = np.meshgrid(t, xi + 0.0, indexing="ij")
    cell = 1.5 / n * 1.8 / n
    ref = sum(np.abs(bump_eval(b, T, X + b.s * T, o)).sum() * cell for o in ("t", "txx", "x", "xx"))
    assert normalization(b, "ch") == pytest.approx(ref, rel=1e-3)


@given(st.floats(0.1, 2.0), st.floats(-2, 2), st.floats(0.2, 3.0), st.floats(-3, 3))
def test_bump_positive_inside(d, s, width, t0):
    b = BumpTestFunction(0.0, s, d, t0, t0 + width)
    t = t0 + 0.5 * width
    assert bump_eval(b, t, s * t + 0.5 * d) > 0
    assert bump_eval(b, t, s * t + 1.01 * d) == 0

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from travwave import CoefficientSpec, eval_coefficient, c_squared_minus


def test_sqrt_sin_at_pi():
    c, cp, _ = eval_coefficient(CoefficientSpec.sqrt_sin(4.0), math.pi)
    assert c == pytest.approx(2.0, abs=1e-14)
    assert cp == pytest.approx(-0.25, abs=1e-14)


def test_lc_director_constant():
    spec = CoefficientSpec.lc_director(1.0, 1.0)
    for u in np.linspace(-3, 3, 7):
        c, cp, cpp = eval_coefficient(spec, u)
        assert (c, cp, cpp) == pytest.approx((1.0, 0.0, 0.0), abs=1e-14)


def test_arctan_linear_at_zero():
    c, cp, cpp = eval_coefficient(CoefficientSpec.arctan_linear(1.0, 2.0), 0.0)
    assert c == pytest.approx(1.5, abs=1e-15)
    assert cp == pytest.approx(1 / math.pi, abs=1e-15)
    assert cpp == pytest.approx(0.0, abs=1e-15)


def test_derivatives_against_finite_differences():
    specs = [CoefficientSpec.sqrt_sin(3.0), CoefficientSpec.arctan_linear(0.5, 2.5),
             CoefficientSpec.lc_director(2.0, 0.5)]
    u = np.linspace(-2, 2, 9)
    h = 1e-5
    for spec in specs:
        c, cp, cpp = eval_coefficient(spec, u)
        cp_fd = (eval_coefficient(spec, u + h)[0] - eval_coefficient(spec, u - h)[0]) / (2 * h)
        cpp_fd = (eval_coefficient(spec, u + h)[1] - eval_coefficient(spec, u - h)[1]) / (2 * h)
        np.testing.assert_allclose(cp, cp_fd, atol=1e-8)
        np.testing.assert_allclose(cpp, cpp_fd, atol=1e-8)


def test_spline_clamps_and_bounds():
    nodes = [(0.0, 1.0), (1.0, 1.5), (2.0, 2.0), (3.0, 1.2)]
    spec = CoefficientSpec.tabulated_spline(nodes)
    assert eval_coefficient(spec, -5.0)[0] == pytest.approx(1.0)
    assert eval_coefficient(spec, 9.0)[0] == pytest.approx(1.2)
    c = eval_coefficient(spec, np.linspace(-1, 4, 5001))[0]
    assert spec.alpha - 1e-12 <= c.min() and c.max() <= spec.beta + 1e-12


def test_from_dict_round_trip():
    for spec in (CoefficientSpec.sqrt_sin(4.0), CoefficientSpec.arctan_linear(1.0, 2.0),
                 CoefficientSpec.lc_director(1.0, 3.0),
                 CoefficientSpec.tabulated_spline([(0.0, 1.0), (1.0, 2.0), (2.0, 1.5)])):
        again = CoefficientSpec.from_dict(spec.to_dict())
        assert again.to_dict() == spec.to_dict()


def test_bad_parameters():
    with pytest.raises(ValueError):
        CoefficientSpec.sqrt_sin(0.5)
    with pytest.raises(ValueError):
        CoefficientSpec.arctan_linear(2.0, 1.0)
    with pytest.raises(ValueError):
        CoefficientSpec.lc_director(-1.0, 1.0)


@given(st.floats(1.01, 50.0))
def test_sqrt_sin_band(q):
    spec = CoefficientSpec.sqrt_sin(q)
    c = eval_coefficient(spec, np.linspace(0, 2 * math.pi, 10_001))[0]
    assert math.sqrt(q - 1) - 1e-12 <= c.min() and c.max() <= math.sqrt(q + 1) + 1e-12
    assert spec.alpha == pytest.approx(math.sqrt(q - 1)) and spec.beta == pytest.approx(math.sqrt(q + 1))


@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.floats(-10, 10))
def test_c_squared_minus_matches_definition(l1, l2, u):
    spec = CoefficientSpec.lc_director(l1, l2)
    c = eval_coefficient(spec, u)[0]
    assert c_squared_minus(spec, 1.3, u) == pytest.approx(c * c - 1.69, abs=1e-12)

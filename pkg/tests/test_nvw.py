import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import trapezoid

from travwave import CoefficientSpec, assemble_nvw, glue_candidates, holder_exponent, speed_regime, wxi_l2
from travwave.errors import (DegenerateEndpoint, DegenerateEverywhere, DivergentIntegral, InadmissiblePlan,
                             NoCandidates, SignViolation, SpeedRegimeError, ValueMismatch)
from travwave.nvw import ConstPiece, MonoPiece, NvwPlan, check_glue_nvw, segment_between, wxi_l2_profile
from travwave.segment import constant_segment
from travwave.weak import first_integral_residual

from conftest import PI, XI_BAR

# int_0^pi dw / sqrt(sin w), 20 digits (mpmath.quad at mp.dps = 30)
INV_SQRT_SIN = 5.24411510858423958558
ARCTAN = CoefficientSpec.arctan_linear(1.0, 2.0)


def test_speed_regimes(sqrt_sin):
    assert speed_regime(ARCTAN, 3.0).kind == "OutsideBand"
    assert speed_regime(sqrt_sin, 2.0).kind == "InteriorBand"
    assert speed_regime(ARCTAN, 2.0).kind == "BoundaryBand"
    assert speed_regime(ARCTAN, -1.5).kind == "InteriorBand"


def test_candidates_sqrt_sin(sqrt_sin):
    cands = glue_candidates(sqrt_sin, 2.0, (-1.0, 7.0))
    np.testing.assert_allclose([c.u_star for c in cands], [0.0, PI, 2 * PI], atol=1e-11)
    for c in cands:
        assert abs(c.cprime) == pytest.approx(0.25, abs=1e-10)
        assert not c.degenerate
        assert abs(math.sin(c.u_star)) <= 1e-11


def test_candidates_arctan():
    cands = glue_candidates(ARCTAN, 1.5, (-10.0, 10.0))
    assert len(cands) == 1 and cands[0].u_star == pytest.approx(0.0, abs=1e-12)


def test_candidates_errors(sqrt_sin):
    with pytest.raises(DegenerateEverywhere):
        glue_candidates(CoefficientSpec.lc_director(1.0, 1.0), 1.0, (0.0, 3.0))
    with pytest.raises(NoCandidates):
        glue_candidates(sqrt_sin, 2.0, (0.5, 2.5))


def test_degenerate_candidate_flag():
    # c^2 = sin^2 + 2 cos^2 touches s^2 = 1 at pi/2 with c' = 0
    spec = CoefficientSpec.lc_director(1.0, 2.0)
    cands = glue_candidates(spec, 1.0, (0.0, PI))
    assert any(c.degenerate and c.u_star == pytest.approx(PI / 2, abs=1e-6) for c in cands)


def test_intro_segment_length(sqrt_sin):
    seg = segment_between(sqrt_sin, 2.0, 1.0, PI, 0.0)
    half = 0.5 * (seg.xi_range[1] - seg.xi_range[0])
    assert 1.0 <= half <= PI / 2
    assert half == pytest.approx(XI_BAR, abs=1e-10)
    assert seg.ends[0].kind == seg.ends[1].kind == "singular"
    assert seg.const["k"] == -1.0   # s^2 - c^2 < 0 on (0, pi)


def test_length_scales_with_k(sqrt_sin):
    lengths = [segment_between(sqrt_sin, 2.0, k, PI, 0.0).xi_range[1] * math.sqrt(k) for k in (1, 4, 9)]
    assert max(lengths) - min(lengths) <= 1e-10


def test_symmetry_about_half_pi(sqrt_sin):
    seg = segment_between(sqrt_sin, 2.0, 1.0, PI, 0.0)
    mid = seg.xi_of_w(PI / 2)
    delta = np.linspace(1e-6, PI / 2 - 1e-6, 200)
    up = seg.xi_of_w(PI / 2 + delta) - mid
    down = seg.xi_of_w(PI / 2 - delta) - mid
    assert np.max(np.abs(up + down)) <= 1e-9


def test_segment_errors(sqrt_sin):
    with pytest.raises(SignViolation):
        segment_between(sqrt_sin, 2.0, 1.0, -1.0, 1.0)
    with pytest.raises(DegenerateEndpoint):
        segment_between(CoefficientSpec.lc_director(1.0, 2.0), 1.0, 1.0, 0.2, PI / 2)
    with pytest.raises(ValueError):
        segment_between(sqrt_sin, 2.0, 0.0, PI, 0.0)


def test_first_integral_on_segments(sqrt_sin):
    for k in (1.0, 0.3, 7.0):
        seg = segment_between(sqrt_sin, 2.0, k, PI, 0.0)
        assert first_integral_residual(seg, 2.0, sqrt_sin) <= 1e-6
    seg = segment_between(ARCTAN, 1.5, 2.0, 0.0, 3.0)
    assert first_integral_residual(seg, 1.5, ARCTAN) <= 1e-6


def _seg(spec, k, a, b):
    return segment_between(spec, 2.0, k, a, b)


def test_glue_examples(sqrt_sin):
    # away from a root: |k1| != |k2| with matching direction
    left = _seg(sqrt_sin, 1.0, PI, PI / 2)
    right = _seg(sqrt_sin, 2.0, PI / 2, 0.0)
    v = check_glue_nvw(left, right, PI / 2, sqrt_sin, 2.0)
    assert not v.admissible and "|k1|" in v.reason
    same = _seg(sqrt_sin, 1.0, PI / 2, 0.0)
    assert check_glue_nvw(left, same, PI / 2, sqrt_sin, 2.0).kind == "SmoothC1"
    c1, c2 = constant_segment("nvw", (("k", 0.0),), 1.0), constant_segment("nvw", (("k", 0.0),), 1.0)
    assert check_glue_nvw(c1, c2, 1.0, sqrt_sin, 2.0).kind == "SmoothC1"
    mono = _seg(sqrt_sin, 1.0, PI, 0.0)
    flat = constant_segment("nvw", (("k", 0.0),), 0.0)
    v = check_glue_nvw(mono, flat, 0.0, sqrt_sin, 2.0)
    assert v.admissible and v.kind == "ConstantJunction"
    with pytest.raises(ValueMismatch):
        check_glue_nvw(mono, constant_segment("nvw", (("k", 0.0),), 0.1), 0.0, sqrt_sin, 2.0)


def test_inflection_singular(sqrt_sin):
    # increasing into the root 2 pi from below and leaving it upwards
    plan = NvwPlan((MonoPiece(1.0, "inc", PI, 2 * PI), MonoPiece(3.0, "inc", 2 * PI, 2 * PI + 1.0)))
    p = assemble_nvw(sqrt_sin, 2.0, plan)
    assert p.breakpoints[0].kind == "InflectionSingular"
    assert p.breakpoints[0].left_slope_limit == p.breakpoints[0].right_slope_limit == math.inf


def _mirror(seg, spec):
    if seg.kind == "constant":
        return seg
    return segment_between(spec, 2.0, abs(seg.const["k"]), seg.w_ends[1], seg.w_ends[0])


@pytest.mark.parametrize("k1,k2,w", [(1.0, 2.0, PI / 2), (1.0, 1.0, PI / 2), (1.0, 3.0, 0.0), (2.0, 2.0, PI)])
def test_glue_mirror_symmetry(sqrt_sin, k1, k2, w):
    left = _seg(sqrt_sin, k1, w + 1.0, w) if w < PI else _seg(sqrt_sin, k1, w - 1.0, w)
    right = _seg(sqrt_sin, k2, w, w - 1.0) if w < PI else _seg(sqrt_sin, k2, w, w + 1.0)
    forward = check_glue_nvw(left, right, w, sqrt_sin, 2.0)
    backward = check_glue_nvw(_mirror(right, sqrt_sin), _mirror(left, sqrt_sin), w, sqrt_sin, 2.0)
    assert forward.admissible == backward.admissible
    assert forward.kind == backward.kind


def test_assemble_examples(sqrt_sin, intro):
    assert [g.kind for g in intro.breakpoints] == ["ConstantJunction", "ConstantJunction"]
    const = assemble_nvw(sqrt_sin, 2.0, NvwPlan((ConstPiece(0.0),)))
    assert const.segments[0].wbar == 0.0 and not const.breakpoints
    bad = NvwPlan((MonoPiece(1.0, "dec", PI, PI / 2), MonoPiece(4.0, "dec", PI / 2, 0.0)))
    with pytest.raises(InadmissiblePlan) as err:
        assemble_nvw(sqrt_sin, 2.0, bad)
    assert err.value.junction == 0
    loose = assemble_nvw(sqrt_sin, 2.0, bad, strict=False)
    assert not loose.admissible
    with pytest.raises(ValueError):
        assemble_nvw(sqrt_sin, 2.0, NvwPlan(()))
    with pytest.raises(SpeedRegimeError):
        assemble_nvw(ARCTAN, 2.0, NvwPlan((ConstPiece(5.0),)))


def test_wxi_l2_intro(sqrt_sin, intro):
    seg = intro.segments[1]
    assert wxi_l2(seg, sqrt_sin, 2.0) == pytest.approx(INV_SQRT_SIN, abs=1e-9)
    assert wxi_l2(intro.segments[0], sqrt_sin, 2.0) == 0.0
    assert wxi_l2_profile(intro, sqrt_sin) == pytest.approx(INV_SQRT_SIN, abs=1e-9)


def test_wxi_l2_against_xi_space_quadrature(sqrt_sin, intro):
    """Trapezoid rule of w_xi^2 in xi away from the ends plus the endpoint pieces in w."""
    seg = intro.segments[1]
    lo, hi = seg.xi_range
    cut = 0.05
    xi = np.linspace(lo + cut, hi - cut, 200_001)
    slope = seg.slope_at(xi)
    middle = trapezoid(slope ** 2, xi)
    w_in, w_out = seg.w_at([lo + cut, hi - cut])
    ends = wxi_l2(seg, sqrt_sin, 2.0, (w_in, PI)) + wxi_l2(seg, sqrt_sin, 2.0, (0.0, w_out))
    assert middle + ends == pytest.approx(INV_SQRT_SIN, rel=1e-8)


def test_wxi_l2_arctan_bound():
    spec = ARCTAN
    A, B = 1 / PI, 3.0
    for w1 in (0.5, 1.0, 3.0):
        seg = segment_between(spec, 1.5, 1.0, 0.0, w1)
        bound = 2 * (1 + w1 * w1) * math.sqrt(math.atan(w1)) / math.sqrt(A * B)
        assert 0 < wxi_l2(seg, spec, 1.5) <= bound


def test_wxi_l2_divergent():
    # c^2 - s^2 = cos^2 u touches zero at pi/2 with c' = 0 there
    spec = CoefficientSpec.lc_director(1.0, 2.0)
    seg = segment_between(spec, 1.0, 1.0, 1.0, 2.0)
    with pytest.raises(DivergentIntegral):
        wxi_l2(seg, spec, 1.0)
    assert 0 < wxi_l2(seg, spec, 1.0, (1.0, 1.2)) < math.inf


def test_holder_exponents(intro, nvw_cusp):
    # the profile behaves like |xi - xi*|^(2/3) next to a root of c^2 = s^2
    for p in (intro, nvw_cusp):
        for g in p.breakpoints:
            assert holder_exponent(p, g.xi_star) == pytest.approx(2 / 3, abs=0.02)
    assert holder_exponent(intro, XI_BAR) == pytest.approx(1.0, abs=0.02)


@given(st.floats(0.1, 20.0))
def test_first_integral_any_k(k):
    spec = CoefficientSpec.sqrt_sin(4.0)
    seg = segment_between(spec, 2.0, k, 0.0, -PI)
    assert seg.const["k"] == pytest.approx(k)   # s^2 - c^2 > 0 on (-pi, 0)
    assert first_integral_residual(seg, 2.0, spec, n=200) <= 1e-6
    assert seg.xi_range[1] * math.sqrt(k) == pytest.approx(2 * XI_BAR, abs=1e-9)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from travwave import assemble_ch, assemble_nvw, residual_ch, residual_nvw, residual_suite
from travwave.ch import ChPlan, ConstPiece as ChConst, ExpPeakPiece
from travwave.config import DEFAULT_TOL
from travwave.errors import UnsupportedOverlap
from travwave.nvw import ConstPiece, MonoPiece, NvwPlan
from travwave.segment import constant_segment
from travwave.serialize import dumps
from travwave.weak import (BumpTestFunction, classical_residual, jump_report, normalization, space_factor,
                           time_integral)

from conftest import PI

S_GAP = math.sqrt(0.8)


@pytest.fixture(scope="module")
def k_mismatch(sqrt_sin):
    plan = NvwPlan((ConstPiece(PI), MonoPiece(1.0, "dec", PI, PI / 2), MonoPiece(4.0, "dec", PI / 2, 0.0),
                    ConstPiece(0.0)))
    return assemble_nvw(sqrt_sin, 2.0, plan, strict=False)


@pytest.fixture(scope="module")
def a_mismatch():
    plan = ChPlan((ExpPeakPiece(1.0, 0.0, -1.0, 0.0), ExpPeakPiece((1 - S_GAP) / 2, (1 + S_GAP) / 2, 0.0, 1.0)))
    return assemble_ch(1.0, 0.0, plan, strict=False)


def test_constant_profiles_have_no_residual(sqrt_sin):
    flat_ch = assemble_ch(1.0, 0.5, ChPlan((ChConst(1.0),)))
    flat_nvw = assemble_nvw(sqrt_sin, 2.0, NvwPlan((ConstPiece(0.0),)))
    for gamma0, d in ((0.0, 0.5), (2.0, 1.3)):
        b = BumpTestFunction(gamma0, 1.0, d, -0.5, 0.7)
        assert abs(residual_ch(flat_ch, 1.0, b)) <= 1e-12 * normalization(b, "ch")
        b = BumpTestFunction(gamma0, 2.0, d, -0.5, 0.7)
        assert abs(residual_nvw(flat_nvw, sqrt_sin, 2.0, b)) <= 1e-12 * normalization(b, "nvw")


def test_peakon_is_weak(peakon):
    for gamma0, d in ((0.0, 1.0), (0.3, 0.4), (-2.0, 0.9)):
        b = BumpTestFunction(gamma0, 1.0, d, 0.0, 1.0)
        info = residual_ch(peakon, 1.0, b, details=True)
        assert info["normalized"] <= 1e-6


def test_intro_is_weak(intro, sqrt_sin):
    for g in intro.breakpoints:
        b = BumpTestFunction(g.xi_star, 2.0, 0.8, -0.3, 0.9)
        assert residual_nvw(intro, sqrt_sin, 2.0, b, details=True)["normalized"] <= 1e-6


def test_k_mismatch_matches_closed_form(k_mismatch, sqrt_sin):
    # R = (c^2 - s^2) (w_xi^- - w_xi^+) A(gamma) int B, with c^2 - s^2 = 1, slopes -1 and -2
    g = k_mismatch.breakpoints[1]
    b = BumpTestFunction(g.xi_star, 2.0, 0.7, 0.0, 1.5)
    expected = 1.0 * (-1.0 + 2.0) * space_factor(b, g.xi_star)[0][0] * time_integral(b)
    assert residual_nvw(k_mismatch, sqrt_sin, 2.0, b) == pytest.approx(expected, rel=1e-8)


def test_a_mismatch_matches_closed_form(a_mismatch):
    b = BumpTestFunction(0.0, 1.0, 0.9, 0.0, 1.5)
    expected = 0.1 * space_factor(b, 0.0)[0][0] * time_integral(b)
    assert abs(residual_ch(a_mismatch, 1.0, b)) == pytest.approx(expected, rel=1e-8)


@given(st.floats(-10.0, 10.0))
@settings(max_examples=10)
def test_linearity(a_mismatch, alpha):
    b = BumpTestFunction(0.1, 1.0, 0.7, 0.0, 1.0)
    r1 = residual_ch(a_mismatch, 1.0, b)
    r2 = residual_ch(a_mismatch, 1.0, BumpTestFunction(0.1, 1.0, 0.7, 0.0, 1.0, amplitude=alpha))
    assert abs(r2 - alpha * r1) <= 1e-12 * abs(alpha * r1)


def test_halving_tolerance(cuspon, intro, sqrt_sin):
    b = BumpTestFunction(0.1, 1.0, 0.9, 0.0, 1.0)
    coarse = residual_ch(cuspon, 1.0, b, details=True)
    fine = residual_ch(cuspon, 1.0, b, DEFAULT_TOL.with_overrides(quad_abs_tol=5e-11), details=True)
    assert abs(fine["raw"]) <= abs(coarse["raw"]) + coarse["error"]
    b = BumpTestFunction(0.0, 2.0, 0.9, 0.0, 1.0)
    coarse = residual_nvw(intro, sqrt_sin, 2.0, b, details=True)
    fine = residual_nvw(intro, sqrt_sin, 2.0, b, DEFAULT_TOL.with_overrides(quad_abs_tol=5e-11), details=True)
    assert abs(fine["raw"]) <= abs(coarse["raw"]) + coarse["error"]


def test_overlap_rejected(periodic_peakon):
    lo, hi = periodic_peakon.domain
    with pytest.raises(UnsupportedOverlap):
        residual_ch(periodic_peakon, 2.0, BumpTestFunction(hi - 0.1, 2.0, 0.5, 0.0, 1.0))


@pytest.mark.parametrize("name", ["peakon", "cuspon", "periodic_peakon", "periodic_cuspon", "stumpon"])
def test_suite_admissible_profiles(name, request):
    p = request.getfixturevalue(name)
    report = residual_suite(p, n_bumps=8, seed=3)
    assert report.max_normalized <= 1e-5 and report.passes()
    assert report.cells > 0 and report.error_estimate < 1e-9


def test_suite_intro(intro, sqrt_sin):
    report = residual_suite(intro, sqrt_sin, n_bumps=8, seed=1)
    assert report.passes()


def test_suite_flags_violations(k_mismatch, a_mismatch, sqrt_sin):
    r = residual_suite(k_mismatch, sqrt_sin, n_bumps=8)
    assert not r.passes() and not r.junctions_admissible and r.max_normalized >= 1e-2
    r = residual_suite(a_mismatch, n_bumps=8)
    assert not r.passes() and r.max_normalized >= 1e3 * 1e-14
    assert r.jumps[0]["checker"]["reason"] == "AMismatch"


def test_suite_deterministic(cuspon):
    one = dumps(residual_suite(cuspon, n_bumps=6, seed=11).to_dict())
    two = dumps(residual_suite(cuspon, n_bumps=6, seed=11).to_dict())
    assert one == two
    assert one != dumps(residual_suite(cuspon, n_bumps=6, seed=12).to_dict())


def test_jump_report_agrees_with_checker(intro, nvw_cusp, k_mismatch, a_mismatch, peakon, cuspon, stumpon,
                                         periodic_peakon, periodic_cuspon, sqrt_sin):
    for p in (intro, nvw_cusp, k_mismatch):
        for i, g in enumerate(p.breakpoints):
            assert jump_report(p, i, sqrt_sin, p.s)["admissible"] == g.verdict.admissible
    for p in (a_mismatch, peakon, cuspon, stumpon, periodic_peakon, periodic_cuspon):
        for i, g in enumerate(p.breakpoints):
            assert jump_report(p, i)["admissible"] == g.verdict.admissible


def test_jump_report_values(nvw_cusp, periodic_peakon, periodic_cuspon, sqrt_sin):
    rep = jump_report(nvw_cusp, 0, sqrt_sin, 2.0)
    assert rep["sqrt_abs_c2_minus_s2"] <= 1e-8
    peak = next(i for i, g in enumerate(periodic_peakon.breakpoints) if g.kind == "Peak")
    rep = jump_report(periodic_peakon, peak)
    assert abs(rep["left_slope"] + rep["right_slope"]) <= 1e-9
    assert abs(rep["two_a_s_plus_b_left"]) <= 1e-9
    smooth = next(i for i, g in enumerate(periodic_cuspon.breakpoints) if g.kind == "SmoothC1")
    rep = jump_report(periodic_cuspon, smooth)
    assert abs(rep["left_slope"] - rep["right_slope"]) <= 1e-9


def test_stumpon_perturbation_flips_jump(stumpon):
    segs = list(stumpon.segments)
    up, flat, down = segs
    bad = constant_segment("ch", (("a", 0.5), ("b", -1.0 + 1e-3)), 1.0, *flat.xi_range)
    from travwave.ch import check_glue_ch
    assert check_glue_ch(up, flat, 1.0).admissible
    assert not check_glue_ch(up, bad, 1.0).admissible


def test_classical_residuals(intro, sqrt_sin, peakon):
    assert classical_residual(intro.segments[1], 2.0, sqrt_sin) <= 1e-6
    flat = constant_segment("ch", (("a", 0.3), ("b", 0.0)), 0.7)
    assert classical_residual(flat, 1.0) == pytest.approx(abs(0.3 - 1.5 * 0.49 + 0.7), abs=1e-15)
    for seg in peakon.segments:
        assert classical_residual(seg, 1.0) <= 1e-6

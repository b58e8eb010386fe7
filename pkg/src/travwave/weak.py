"""Weak-form verification of glued traveling waves.

Test functions are products ``phi(t, x) = A(x - gamma(t)) B(t)`` with
``gamma(t) = gamma0 + s t`` and smooth bumps ``A``, ``B``.  In the moving
coordinate ``xi = x - s t`` the profile does not depend on ``t``, so every
term carrying ``B'`` integrates to zero and the double integral factorises
into ``int B dt`` times a one-dimensional integral in ``xi``.  Inside a
monotone piece the xi-integral is taken in the table parameter, where the
slope singularities have been removed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import c_squared_minus, eval_coefficient
from .config import DEFAULT_TOL
from .errors import UnsupportedOverlap
from .jets import Jet
from .profile import jnum
from .quadrature import gauss_kronrod, gauss_legendre

_EXP_FLOOR = -700.0

ORDERS = {
    "phi": (0, 0),
    "t": (1, 0),
    "x": (0, 1),
    "xx": (0, 2),
    "tx": (1, 1),
    "txx": (1, 2),
}
NORM_ORDERS = {"nvw": ("phi", "t", "x"), "ch": ("t", "txx", "x", "xx")}


@dataclass(frozen=True)
class BumpTestFunction:
    gamma0: float
    s: float
    d_x: float
    t_lo: float
    t_hi: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.d_x > 0:
            raise ValueError("d_x must be positive")
        if not self.t_hi > self.t_lo:
            raise ValueError("t_lo must be below t_hi")

    @property
    def support(self):
        return self.gamma0 - self.d_x, self.gamma0 + self.d_x

    def to_dict(self):
        return {"gamma0": self.gamma0, "s": self.s, "d_x": self.d_x,
                "t_lo": self.t_lo, "t_hi": self.t_hi, "amplitude": self.amplitude}


def _bump_jet(b, t, x):
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    t = t.astype(float).copy()
    x = x.astype(float).copy()
    mid = 0.5 * (b.t_lo + b.t_hi)
    half = 0.5 * (b.t_hi - b.t_lo)
    z0 = x - b.gamma0 - b.s * t
    q1 = b.d_x ** 2 - z0 ** 2
    q2 = half ** 2 - (t - mid) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        expo = -1.0 / q1 - 1.0 / q2
    live = (q1 > 0) & (q2 > 0) & (expo >= _EXP_FLOOR)
    # park dead points at the centre so the jet algebra stays finite
    t[~live] = mid
    x[~live] = b.gamma0 + b.s * mid
    jt = Jet.variable(t, 0, 2, 3)
    jx = Jet.variable(x, 1, 2, 3)
    z = jx - jt * b.s - b.gamma0
    e = -1.0 / (b.d_x ** 2 - z * z) - 1.0 / (half ** 2 - (jt - mid) * (jt - mid))
    return e.exp() * b.amplitude, live


def bump_eval(b, t, x, order="phi"):
    """Value of the requested partial of the bump at ``(t, x)`` (arrays broadcast)."""
    if order not in ORDERS:
        raise ValueError(f"order must be one of {sorted(ORDERS)}")
    jet, live = _bump_jet(b, t, x)
    out = np.where(live, jet.partial(ORDERS[order]), 0.0)
    return float(out) if out.ndim == 0 else out


def space_factor(b, xi):
    """``A, A', A'', A'''`` at ``xi`` (profile coordinate), amplitude included."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    z0 = xi - b.gamma0
    q = b.d_x ** 2 - z0 ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        live = (q > 0) & (-1.0 / q >= _EXP_FLOOR)
    z0 = np.where(live, z0, 0.0)
    jz = Jet.variable(z0, 0, 1, 3)
    jet = (-1.0 / (b.d_x ** 2 - jz * jz)).exp() * b.amplitude
    return tuple(np.where(live, jet.partial((k,)), 0.0) for k in range(4))


def time_factor(b, t):
    t = np.asarray(t, dtype=float)
    mid = 0.5 * (b.t_lo + b.t_hi)
    q = (0.5 * (b.t_hi - b.t_lo)) ** 2 - (t - mid) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.where(q > 0, -1.0 / q, -np.inf)
    return np.where(e >= _EXP_FLOOR, np.exp(np.maximum(e, _EXP_FLOOR)), 0.0)


def time_integral(b):
    return gauss_kronrod(lambda t: time_factor(b, t), b.t_lo, b.t_hi, epsabs=1e-15, epsrel=1e-14).value


def normalization(b, equation, cells=20):
    """Sum of L^1 norms of the partials used by the weak form (tensor Gauss-Legendre)."""
    x, w = gauss_legendre(10)
    t_edges = np.linspace(b.t_lo, b.t_hi, cells + 1)
    z_edges = np.linspace(-b.d_x, b.d_x, cells + 1)

    def nodes(edges):
        lo, hi = edges[:-1], edges[1:]
        half = 0.5 * (hi - lo)
        pts = (0.5 * (lo + hi))[:, None] + half[:, None] * x[None, :]
        wts = half[:, None] * w[None, :]
        return pts.ravel(), wts.ravel()

    tp, tw = nodes(t_edges)
    zp, zw = nodes(z_edges)
    T, Z = np.meshgrid(tp, zp, indexing="ij")
    W = np.outer(tw, zw)
    jet, live = _bump_jet(b, T, Z + b.gamma0 + b.s * T)
    total = 0.0
    for name in NORM_ORDERS[equation]:
        vals = np.where(live, jet.partial(ORDERS[name]), 0.0)
        total += float(np.sum(np.abs(vals) * W))
    return total


# -- residual integrands ----------------------------------------------------------

@dataclass
class _Tally:
    value: float = 0.0
    error: float = 0.0
    cells: int = 0

    def add(self, res):
        self.value += res.value
        self.error += res.error
        self.cells += res.cells


def _ch_xi_integrand(b, s, w_fn, slope_fn):
    def f(xi):
        A0, A1, A2, A3 = space_factor(b, xi)
        w, wx = w_fn(xi), slope_fn(xi)
        return (-s * w + 1.5 * w * w + 0.5 * wx * wx) * A1 + s * w * A3 + w * wx * A2
    return f


def _nvw_xi_integrand(b, s, spec, w_fn, slope_fn):
    def f(xi):
        A0, A1, _, _ = space_factor(b, xi)
        w, wx = w_fn(xi), slope_fn(xi)
        c, cp, _ = eval_coefficient(spec, w)
        return c_squared_minus(spec, s, w) * wx * A1 + c * cp * wx * wx * A0
    return f


def _theta_integrand(b, s, seg, equation, spec):
    param = seg.param

    def f(theta):
        xi = param.xi_of_theta(theta)
        w = param.w_of_theta(theta)
        wt = param.dw_dtheta(theta)
        if getattr(param.density, "uses_offsets", False):
            rho = param.density(w, param.offsets(theta))
        else:
            rho = param.density(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            dxi = rho * np.abs(wt)                       # dxi/dtheta
            sq = np.where(rho > 0, np.abs(wt) / rho, 0.0)  # w_xi^2 dxi/dtheta
        A0, A1, A2, A3 = space_factor(b, xi)
        if equation == "ch":
            return ((-s * w + 1.5 * w * w) * A1 + s * w * A3) * dxi + w * A2 * wt + 0.5 * A1 * sq
        c, cp, _ = eval_coefficient(spec, w)
        return c_squared_minus(spec, s, w) * A1 * wt + c * cp * A0 * sq
    return f


def _segment_contribution(b, s, seg, lo, hi, equation, spec, epsabs, tally):
    if seg.kind == "constant":
        # the integrand is an exact derivative on a plateau
        if equation == "ch":
            wb = seg.wbar
            A0, _, A2, _ = space_factor(b, [lo, hi])
            tally.value += (-s * wb + 1.5 * wb * wb) * (A0[1] - A0[0]) + s * wb * (A2[1] - A2[0])
        return
    if seg.closed_form is not None:
        form = seg.closed_form
        f = (_ch_xi_integrand(b, s, form.w, form.slope) if equation == "ch"
             else _nvw_xi_integrand(b, s, spec, form.w, form.slope))
        tally.add(gauss_kronrod(f, lo, hi, epsabs=epsabs, epsrel=0.0, max_cells=4000))
        return
    table_lo, table_hi = seg.param.xi_nodes[0], seg.param.xi_nodes[-1]
    if seg.tail is not None:
        tail = seg.tail
        t_lo, t_hi = (lo, min(hi, table_lo)) if tail.side == "left" else (max(lo, table_hi), hi)
        if t_hi > t_lo:
            f = (_ch_xi_integrand(b, s, tail.w, tail.slope) if equation == "ch"
                 else _nvw_xi_integrand(b, s, spec, tail.w, tail.slope))
            tally.add(gauss_kronrod(f, t_lo, t_hi, epsabs=epsabs, epsrel=0.0, max_cells=4000))
    a, c = max(lo, table_lo), min(hi, table_hi)
    if c > a:
        th = seg.param.theta_of_xi([a, c])
        f = _theta_integrand(b, s, seg, equation, spec)
        tally.add(gauss_kronrod(f, float(th[0]), float(th[1]), epsabs=epsabs, epsrel=0.0, max_cells=4000))


def _residual(p, b, equation, spec, tol, with_details=False):
    lo, hi = b.support
    d_lo, d_hi = p.domain
    if lo < d_lo or hi > d_hi:
        raise UnsupportedOverlap(f"bump support [{lo}, {hi}] leaves the profile domain [{d_lo}, {d_hi}]")
    norm = normalization(b, equation)
    ib = time_integral(b)
    parts = [(seg, max(lo, seg.xi_range[0]), min(hi, seg.xi_range[1])) for seg in p.segments]
    parts = [(seg, a, c) for seg, a, c in parts if c > a]
    epsabs = tol.quad_abs_tol * norm / 10 / max(ib, 1e-300) / max(1, 2 * len(parts))
    tally = _Tally()
    for seg, a, c in parts:
        _segment_contribution(b, p.s, seg, a, c, equation, spec, epsabs, tally)
    raw = ib * tally.value
    if with_details:
        return {"raw": raw, "norm": norm, "normalized": abs(raw) / norm,
                "cells": tally.cells, "error": ib * tally.error}
    return raw


def residual_nvw(p, spec, s, b, tol=DEFAULT_TOL, details=False):
    """Weak-form residual of an NVW profile against the bump ``b``."""
    if abs(s - p.s) > 0 or abs(b.s - s) > 0:
        raise ValueError("bump, profile and call must share the wave speed")
    return _residual(p, b, "nvw", spec, tol, details)


def residual_ch(p, s, b, tol=DEFAULT_TOL, details=False):
    """Weak-form residual of a CH profile against the bump ``b``."""
    if abs(s - p.s) > 0 or abs(b.s - s) > 0:
        raise ValueError("bump, profile and call must share the wave speed")
    return _residual(p, b, "ch", None, tol, details)


# -- jump conditions ---------------------------------------------------------------

def _nvw_flux(seg, side, spec, s, w_star):
    # (c^2 - s^2) w_xi at the junction, finite even where w_xi is not
    if seg.kind == "constant":
        return 0.0
    f = c_squared_minus(spec, s, w_star)
    k = abs(seg.const["k"])
    return seg.direction * math.copysign(1.0, f) * math.sqrt(k) * math.sqrt(abs(f)) if f != 0 else 0.0


def jump_report(p, glue_index, spec=None, s=None, tol=DEFAULT_TOL):
    """Evaluate the jump brackets at one glue point and re-derive admissibility from them."""
    s = p.s if s is None else s
    g = p.breakpoints[glue_index]
    left, right = p.segments[glue_index], p.segments[glue_index + 1]
    w_star = g.w_star
    out = {"index": glue_index, "xi_star": g.xi_star, "w_star": w_star,
           "left_slope": jnum(g.left_slope_limit), "right_slope": jnum(g.right_slope_limit),
           "checker": None if g.verdict is None else g.verdict.to_dict()}
    if p.equation == "nvw":
        f = c_squared_minus(spec, s, w_star)
        cp = eval_coefficient(spec, w_star)[1]
        fl, fr = _nvw_flux(left, "right", spec, s, w_star), _nvw_flux(right, "left", spec, s, w_star)
        out.update({"sqrt_abs_c2_minus_s2": math.sqrt(abs(f)), "cprime": cp,
                    "flux_left": fl, "flux_right": fr, "flux_jump": fl - fr})
        at_root = abs(f) <= 1e3 * tol.root_tol * (1 + s * s)
        both_const = left.kind == "constant" and right.kind == "constant"
        # a root is only known to within root_scale, so the flux there is only known to sqrt of it
        k_sum = sum(math.sqrt(abs(seg.const.get("k", 0.0))) for seg in (left, right))
        scale = 1e-9 * (1 + max(abs(fl), abs(fr))) + k_sum * math.sqrt(1e3 * tol.root_tol * (1 + s * s))
        ok = both_const or (abs(fl - fr) <= scale and (not at_root or abs(cp) >= tol.degenerate_cprime_tol))
        # equal fluxes away from a root still need matching slopes, i.e. same direction
        if ok and not both_const and not at_root:
            ok = left.kind != "constant" and right.kind != "constant" and left.direction == right.direction
    else:
        from .ch import classical_constants
        a1, b1 = left.const["a"], left.const["b"]
        a2, b2 = right.const["a"], right.const["b"]
        defects = []
        for seg in (left, right):
            if seg.kind == "constant":
                a_cl, b_cl = classical_constants(s, seg.wbar, seg.const["a"])
                defects += [seg.const["a"] - a_cl, seg.const["b"] - b_cl]
        sl, sr = g.left_slope_limit, g.right_slope_limit
        # (w - s) w_xi tends to zero at a cusp on w = s
        if math.isinf(sl) or math.isinf(sr):
            bracket = 0.0 if abs(w_star - s) <= 1e-9 * (1 + abs(s)) else math.inf
        else:
            bracket = (w_star - s) * (sl - sr)
        out.update({"a_left": a1, "a_right": a2, "a_jump": a1 - a2, "b_left": b1, "b_right": b2,
                    "constant_defects": defects, "w_minus_s_slope_jump": jnum(bracket),
                    "two_a_s_plus_b_left": 2 * a1 * s + b1, "two_a_s_plus_b_right": 2 * a2 * s + b2})
        ok = (abs(a1 - a2) <= 1e-9 and all(abs(d) <= 1e-9 * (1 + abs(b1) + abs(a1)) for d in defects)
              and abs(bracket) <= 1e-9 * (1 + abs(s)))
        if ok and math.isfinite(sl) and math.isfinite(sr) and abs(sl - sr) > 1e-9 * (1 + abs(sl)):
            ok = abs(sl + sr) <= 1e-9 * (1 + abs(sl)) and abs(2 * a1 * s + b1) <= 1e-9 * (1 + abs(b1))
    out["admissible"] = bool(ok)
    return out


# -- classical checks ------------------------------------------------------------

def _interior_w(seg, n, margin=1e-3):
    lo, hi = seg.param.w_from, seg.param.w_to
    span = hi - lo
    return lo + span * np.linspace(margin, 1 - margin, n)


def _fd_derivative(fn, w, h):
    # fourth-order central difference
    return (fn(w - 2 * h) - 8 * fn(w - h) + 8 * fn(w + h) - fn(w + 2 * h)) / (12 * h)


def _step(seg, w):
    lo, hi = sorted((seg.param.w_from, seg.param.w_to))
    return 0.01 * np.minimum(w - lo, hi - w)


def first_integral_residual(seg, s, spec=None, n=1000):
    """Relative defect of the first integral, with dxi/dw taken from the stored table."""
    if seg.kind == "constant" or seg.param is None:
        return 0.0
    w = _interior_w(seg, n)
    xi_w = _fd_derivative(lambda v: seg.param.xi_of_w(v), w, _step(seg, w))
    if seg.equation == "nvw":
        k = seg.const["k"]
        val = -c_squared_minus(spec, s, w) / xi_w ** 2
        return float(np.max(np.abs(val - k)) / (1 + abs(k)))
    a, b = seg.const["a"], seg.const["b"]
    val = -s * w * w + w ** 3 + (s - w) / xi_w ** 2 - 2 * a * w
    return float(np.max(np.abs(val - b)) / (1 + abs(b)))


def classical_residual(seg, s, spec=None, n_points=200):
    """Max defect of the second-order traveling-wave ODE on interior points.

    NVW: ``(s^2 - c^2) w'' - c c' w'^2`` (it vanishes for classical pieces).
    CH: the once-integrated form ``-s w + s w'' + 3/2 w^2 - 1/2 w'^2 - w w'' - a``.
    Tabulated pieces report the defect relative to ``1 + sum |terms|``; constant and
    closed-form pieces report it absolutely.
    """
    if seg.equation == "ch":
        a = seg.const["a"]
        if seg.kind == "constant":
            wb = seg.wbar
            return abs(a - 1.5 * wb * wb + s * wb)
        if seg.closed_form is not None:
            lo, hi = seg.xi_range
            lo = lo if math.isfinite(lo) else hi - 5.0
            hi = hi if math.isfinite(hi) else lo + 5.0
            xi = np.linspace(lo, hi, n_points)
            w, wx, wxx = seg.closed_form.w(xi), seg.closed_form.slope(xi), seg.closed_form.second(xi)
            return float(np.max(np.abs(-s * w + s * wxx + 1.5 * w * w - 0.5 * wx * wx - w * wxx - a)))
    elif seg.kind == "constant":
        return 0.0
    w = _interior_w(seg, n_points)
    h = _step(seg, w)
    sign = seg.direction
    xi_w = sign * seg.param.density(w)
    xi_ww = sign * _fd_derivative(seg.param.density, w, h)
    wx = 1.0 / xi_w
    wxx = -xi_ww / xi_w ** 3
    # each point is scaled by the size of its terms: near a singular end they grow without bound
    if seg.equation == "nvw":
        c, cp, _ = eval_coefficient(spec, w)
        terms = (-c_squared_minus(spec, s, w) * wxx, -c * cp * wx * wx)
    else:
        terms = (-s * w, (s - w) * wxx, 1.5 * w * w, -0.5 * wx * wx, -a * np.ones_like(w))
    res = sum(terms)
    return float(np.max(np.abs(res) / (1 + sum(np.abs(x) for x in terms))))


# -- suites ------------------------------------------------------------------------

@dataclass
class ResidualReport:
    entries: list
    jumps: list
    seed: int
    tolerances: dict = field(default_factory=dict)

    @property
    def max_normalized(self):
        return max((e["normalized"] for e in self.entries), default=0.0)

    @property
    def median_normalized(self):
        return float(np.median([e["normalized"] for e in self.entries])) if self.entries else 0.0

    @property
    def cells(self):
        return sum(e["cells"] for e in self.entries)

    @property
    def error_estimate(self):
        return max((e["error"] for e in self.entries), default=0.0)

    @property
    def junctions_admissible(self):
        return all(j["admissible"] for j in self.jumps)

    def passes(self, threshold=1e-5):
        return self.max_normalized <= threshold and self.junctions_admissible

    def to_dict(self, threshold=1e-5):
        return {
            "seed": self.seed,
            "max_normalized": self.max_normalized,
            "median_normalized": self.median_normalized,
            "quadrature_cells": self.cells,
            "max_error_estimate": self.error_estimate,
            "threshold": threshold,
            "junctions_admissible": self.junctions_admissible,
            "verdict": "pass" if self.passes(threshold) else "fail",
            "bumps": self.entries,
            "jumps": self.jumps,
            "tolerances": self.tolerances,
        }


def _bump_plan(p, n_bumps, rng):
    d_lo, d_hi = p.domain
    glue = [g.xi_star for g in p.breakpoints]
    ref_lo, ref_hi = (min(glue), max(glue)) if glue else (0.0, 0.0)
    c_lo = max(d_lo + 1.0, ref_lo - 3.0) if math.isfinite(d_lo) else ref_lo - 3.0
    c_hi = min(d_hi - 1.0, ref_hi + 3.0) if math.isfinite(d_hi) else ref_hi + 3.0
    if c_hi < c_lo:
        c_lo = c_hi = 0.5 * (d_lo + d_hi)
    n_glue = n_bumps // 2 if glue else 0
    bumps = []
    for i in range(n_bumps):
        centre = glue[i % len(glue)] if i < n_glue else float(rng.uniform(c_lo, c_hi))
        d = float(rng.uniform(0.25, 1.0))
        room = min(centre - d_lo, d_hi - centre)
        d = min(d, 0.999 * room)
        t_lo = float(rng.uniform(-1.0, 0.0))
        t_hi = t_lo + float(rng.uniform(0.5, 2.0))
        bumps.append(BumpTestFunction(centre, p.s, d, t_lo, t_hi))
    return bumps


def residual_suite(p, spec=None, n_bumps=16, seed=0, tol=DEFAULT_TOL):
    """Residuals for ``n_bumps`` bumps (half on glue points) plus every jump report."""
    rng = np.random.default_rng(seed)
    entries = []
    for b in _bump_plan(p, n_bumps, rng):
        if p.equation == "nvw":
            info = residual_nvw(p, spec, p.s, b, tol, details=True)
        else:
            info = residual_ch(p, p.s, b, tol, details=True)
        entries.append({**b.to_dict(), **info})
    jumps = [jump_report(p, i, spec, p.s, tol) for i in range(len(p.breakpoints))]
    return ResidualReport(entries, jumps, seed, tol.to_dict())

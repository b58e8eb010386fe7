"""Traveling waves of the variational wave equation u_tt - c(u) (c(u) u_x)_x = 0.

A classical piece satisfies ``w_xi^2 (s^2 - c(w)^2) = k``.  Pieces can be glued
wherever ``c(w) = |s|`` and ``c'(w) != 0``; elsewhere slopes must match.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .coefficients import CoefficientSpec, c_squared_minus, eval_coefficient
from .config import DEFAULT_TOL
from .errors import (
    DegenerateEndpoint,
    DegenerateEverywhere,
    DivergentIntegral,
    InadmissiblePlan,
    NoCandidates,
    SignViolation,
    SpeedRegimeError,
    ValueMismatch,
)
from .profile import GluePoint, GlueVerdict, Profile
from .quadrature import gauss_kronrod
from .segment import REGULAR, SINGULAR, constant_segment, layout_segments, monotone_segment

# |c^2 - s^2| below ROOT_SLACK * root_tol * (1 + s^2) marks a junction value as a root
ROOT_SLACK = 1e3
_SIGN_SAMPLES = 2001
_K_REL = 1e-9


@dataclass(frozen=True)
class SpeedRegime:
    kind: str            # "OutsideBand" | "InteriorBand" | "BoundaryBand"
    s: float
    alpha: float
    beta: float

    def to_dict(self):
        return {"kind": self.kind, "s": self.s, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class GlueCandidate:
    u_star: float
    cprime: float
    degenerate: bool

    def to_dict(self):
        return {"u_star": self.u_star, "cprime": self.cprime, "degenerate": self.degenerate}


def speed_regime(spec, s, tol=DEFAULT_TOL):
    a = abs(s)
    slack = tol.root_tol * (1 + a)
    if abs(a - spec.alpha) <= slack or abs(a - spec.beta) <= slack:
        kind = "BoundaryBand"
    elif a < spec.alpha or a > spec.beta:
        kind = "OutsideBand"
    else:
        kind = "InteriorBand"
    return SpeedRegime(kind, float(s), spec.alpha, spec.beta)


def _root_scale(s, tol):
    return ROOT_SLACK * tol.root_tol * (1 + s * s)


def glue_candidates(spec, s, u_range, scan_points=10_000, tol=DEFAULT_TOL):
    """All solutions of ``c(u)^2 = s^2`` in ``u_range`` found on a scan grid."""
    lo, hi = map(float, u_range)
    if not hi > lo:
        raise ValueError(f"empty u_range {u_range}")
    u = np.linspace(lo, hi, int(scan_points))
    f = c_squared_minus(spec, s, u)
    exact = tol.root_tol * (1 + s * s)
    if np.all(np.abs(f) <= exact):
        raise DegenerateEverywhere(f"c(u) = |s| at every scan point of [{lo}, {hi}]")

    def fun(x):
        return c_squared_minus(spec, s, x)

    roots = []
    for i in np.nonzero(f == 0.0)[0]:
        roots.append(float(u[i]))
    # range ends that sit on a root up to rounding (sin(2 pi) is not 0 in floating point)
    for i in (0, len(u) - 1):
        if f[i] != 0.0 and abs(f[i]) <= exact:
            roots.append(float(u[i]))
    for i in np.nonzero(f[:-1] * f[1:] < 0)[0]:
        roots.append(bisect(fun, u[i], u[i + 1], xtol=tol.root_tol, rtol=4 * np.finfo(float).eps, maxiter=500))
    # tangential touches show up as local minima of |f| without a sign change
    af = np.abs(f)
    touch = np.nonzero((af[1:-1] <= af[:-2]) & (af[1:-1] <= af[2:]) & (f[:-2] * f[2:] > 0))[0] + 1
    for i in touch:
        res = minimize_scalar(lambda x: abs(fun(x)), bounds=(u[i - 1], u[i + 1]), method="bounded",
                              options={"xatol": tol.root_tol})
        if abs(fun(res.x)) <= exact:
            roots.append(float(res.x))
    roots.sort()
    unique = []
    for r in roots:
        if not unique or r - unique[-1] > 1e3 * tol.root_tol:
            unique.append(r)
    if not unique:
        raise NoCandidates(f"c(u)^2 = s^2 has no root in [{lo}, {hi}]; only unbounded waves exist there")
    out = []
    for r in unique:
        cp = eval_coefficient(spec, r)[1]
        out.append(GlueCandidate(r, cp, abs(cp) < tol.degenerate_cprime_tol))
    return out


def _density(spec, s, k):
    rk = math.sqrt(abs(k))

    def rho(w):
        return np.sqrt(np.abs(c_squared_minus(spec, s, w))) / rk

    return rho


def _is_root(spec, s, w, tol):
    return abs(c_squared_minus(spec, s, w)) <= _root_scale(s, tol)


def segment_between(spec, s, k, w_a, w_b, orientation=None, tol=DEFAULT_TOL, source=None):
    """Classical monotone piece from ``w_a`` to ``w_b`` (in increasing xi)."""
    k = float(k)
    if k == 0 or not math.isfinite(k):
        raise ValueError("a monotone piece needs a finite k != 0")
    w_a, w_b = float(w_a), float(w_b)
    if w_a == w_b:
        raise ValueError("a monotone piece needs distinct end values")
    direction = 1 if w_b > w_a else -1
    if orientation is not None and orientation != direction:
        raise ValueError("orientation disagrees with the order of the end values")
    lo, hi = min(w_a, w_b), max(w_a, w_b)
    interior = np.linspace(lo, hi, _SIGN_SAMPLES)[1:-1]
    f = c_squared_minus(spec, s, interior)
    scale = _root_scale(s, tol)
    if np.any(f > scale) and np.any(f < -scale):
        raise SignViolation(f"c^2 - s^2 changes sign inside [{lo}, {hi}]; split the piece at the root")
    if np.any(np.abs(f) <= tol.root_tol * (1 + s * s)):
        raise SignViolation(f"c^2 = s^2 inside ({lo}, {hi}); split the piece at the root")
    sign = -1.0 if np.median(f) > 0 else 1.0   # sign of s^2 - c^2
    ends = []
    for w in (w_a, w_b):
        if _is_root(spec, s, w, tol):
            if abs(eval_coefficient(spec, w)[1]) < tol.degenerate_cprime_tol:
                raise DegenerateEndpoint(f"c'(w) = 0 at the end value {w}")
            ends.append(SINGULAR)
        else:
            ends.append(REGULAR)
    return monotone_segment(
        "nvw", (("k", sign * abs(k)),), _density(spec, s, k), w_a, w_b, ends[0], ends[1], source=source
    )


def _slopes_kind(left, right):
    if left.kind == "constant" and right.kind == "constant":
        return "SmoothC1"
    if left.kind == "constant" or right.kind == "constant":
        return "ConstantJunction"
    return "Cusp" if left.direction != right.direction else "InflectionSingular"


def check_glue_nvw(left, right, w_star, spec, s, tol=DEFAULT_TOL):
    """Admissibility of gluing ``left`` to ``right`` at the common value ``w_star``."""
    w_l, w_r = left.w_ends[1], right.w_ends[0]
    if abs(w_l - w_r) > tol.glue_value_tol or abs(w_l - w_star) > tol.glue_value_tol:
        raise ValueMismatch(f"junction values differ: left {w_l}, right {w_r}, expected {w_star}")
    f = c_squared_minus(spec, s, w_star)
    cp = eval_coefficient(spec, w_star)[1]
    k1 = left.const.get("k", 0.0) if left.kind == "monotone" else 0.0
    k2 = right.const.get("k", 0.0) if right.kind == "monotone" else 0.0
    details = {"c2_minus_s2": f, "cprime": cp, "k_left": k1, "k_right": k2,
               "left_slope": left.end_slope("right"), "right_slope": right.end_slope("left")}
    if left.kind == "constant" and right.kind == "constant":
        return GlueVerdict(True, "SmoothC1", None, details)
    if abs(f) <= _root_scale(s, tol):
        if abs(cp) < tol.degenerate_cprime_tol:
            return GlueVerdict(False, None, "degenerate root: c'(w*) = 0, only constant waves pass", details)
        return GlueVerdict(True, _slopes_kind(left, right), None, details)
    if left.kind == "constant" or right.kind == "constant":
        return GlueVerdict(False, None, "slope jumps between a constant and a monotone piece away from c = |s|", details)
    if left.direction != right.direction:
        return GlueVerdict(False, None, "slopes of opposite sign away from c = |s|", details)
    if abs(abs(k1) - abs(k2)) > _K_REL * max(abs(k1), abs(k2)):
        return GlueVerdict(False, None, "|k1| != |k2| away from c = |s|", details)
    return GlueVerdict(True, "SmoothC1", None, details)


# -- plans -------------------------------------------------------------------

@dataclass(frozen=True)
class ConstPiece:
    w: float
    length: float | None = None

    def to_dict(self):
        out = {"type": "const", "w": self.w}
        if self.length is not None:
            out["length"] = self.length
        return out


@dataclass(frozen=True)
class MonoPiece:
    k: float
    direction: str        # "inc" | "dec"
    w_from: float
    w_to: float

    def to_dict(self):
        return {"type": "mono", "k": self.k, "dir": self.direction, "from": self.w_from, "to": self.w_to}


@dataclass(frozen=True)
class NvwPlan:
    pieces: tuple
    origin: float = 0.0

    def to_dict(self):
        return {"pieces": [p.to_dict() for p in self.pieces], "origin": self.origin}

    @classmethod
    def from_dict(cls, data):
        pieces = []
        for item in data["pieces"]:
            if item["type"] == "const":
                pieces.append(ConstPiece(float(item["w"]), item.get("length")))
            elif item["type"] == "mono":
                if item["dir"] not in ("inc", "dec"):
                    raise ValueError(f"dir must be 'inc' or 'dec', got {item['dir']!r}")
                pieces.append(MonoPiece(float(item["k"]), item["dir"], float(item["from"]), float(item["to"])))
            else:
                raise ValueError(f"unknown piece type {item['type']!r}")
        return cls(tuple(pieces), float(data.get("origin", 0.0)))


def _piece_end_values(piece):
    if isinstance(piece, ConstPiece):
        return piece.w, piece.w
    return piece.w_from, piece.w_to


def assemble_nvw(spec, s, plan, tol=DEFAULT_TOL, strict=True):
    """Build the profile described by ``plan``; every junction is checked."""
    if not plan.pieces:
        raise ValueError("empty plan")
    regime = speed_regime(spec, s, tol)
    if regime.kind == "BoundaryBand":
        raise SpeedRegimeError(f"|s| = {abs(s)} sits on the band edge; w_xi is not locally square integrable")
    for i in range(len(plan.pieces) - 1):
        end = _piece_end_values(plan.pieces[i])[1]
        start = _piece_end_values(plan.pieces[i + 1])[0]
        if abs(end - start) > tol.glue_value_tol:
            raise ValueMismatch(f"junction {i}: pieces end at {end} and start at {start}")
    raw, lengths = [], []
    for i, piece in enumerate(plan.pieces):
        if isinstance(piece, ConstPiece):
            raw.append(constant_segment("nvw", (("k", 0.0),), piece.w, source=piece.to_dict()))
            lengths.append(piece.length)
        else:
            want = 1 if piece.direction == "inc" else -1
            raw.append(segment_between(spec, s, piece.k, piece.w_from, piece.w_to, want, tol, source=piece.to_dict()))
            lengths.append(None)
    segments = layout_segments(raw, plan.origin, lengths)
    glue = []
    for i in range(len(segments) - 1):
        left, right = segments[i], segments[i + 1]
        w_star = left.w_ends[1]
        verdict = check_glue_nvw(left, right, w_star, spec, s, tol)
        if strict and not verdict.admissible:
            raise InadmissiblePlan(f"junction {i}: {verdict.reason}", junction=i, reason=verdict.reason)
        glue.append(GluePoint(
            xi_star=left.xi_range[1],
            kind=verdict.kind,
            w_star=w_star,
            left_slope_limit=left.end_slope("right"),
            right_slope_limit=right.end_slope("left"),
            left_constants=left.const,
            right_constants=right.const,
            verdict=verdict,
        ))
    meta = {
        "builder": "assemble_nvw",
        "coefficient": spec.to_dict(),
        "plan": plan.to_dict(),
        "tolerances": tol.to_dict(),
        "strict": strict,
        "regime": regime.kind,
    }
    return Profile(float(s), "nvw", tuple(segments), tuple(glue), meta)


# -- diagnostics ---------------------------------------------------------------

def _inverse_sqrt_piece(spec, s, lo, hi, tol):
    """``int_lo^hi dw / sqrt|c^2 - s^2|`` with both ends substituted as ``w = end +- t^2``."""
    mid = 0.5 * (lo + hi)
    half = math.sqrt(mid - lo)

    def left(t):
        return 2 * t / np.sqrt(np.abs(c_squared_minus(spec, s, lo + t * t)))

    def right(t):
        return 2 * t / np.sqrt(np.abs(c_squared_minus(spec, s, hi - t * t)))

    total = 0.0
    for fn in (left, right):
        with np.errstate(divide="ignore", invalid="ignore"):
            total += gauss_kronrod(fn, 0.0, half, epsabs=tol.quad_abs_tol / 2, epsrel=1e-13).value
    return total


def wxi_l2(seg, spec, s, sub_w_range=None, tol=DEFAULT_TOL):
    """``int w_xi^2 dxi`` over the part of ``seg`` with w in ``sub_w_range``."""
    if seg.kind == "constant":
        return 0.0
    lo, hi = seg.w_range if sub_w_range is None else sorted(map(float, sub_w_range))
    lo, hi = max(lo, seg.w_range[0]), min(hi, seg.w_range[1])
    if hi <= lo:
        return 0.0
    # interior roots of c^2 = s^2 are integrable only when c' != 0 there
    try:
        cands = glue_candidates(spec, s, (lo, hi), 2001, tol)
    except NoCandidates:
        cands = []
    cuts = [lo]
    for cand in cands:
        if cand.degenerate:
            raise DivergentIntegral(f"c'(w) = 0 at the root {cand.u_star}: w_xi is not square integrable")
        if lo < cand.u_star < hi:
            cuts.append(cand.u_star)
    cuts.append(hi)
    k = abs(seg.const["k"])
    total = sum(_inverse_sqrt_piece(spec, s, a, b, tol) for a, b in zip(cuts[:-1], cuts[1:]))
    return math.sqrt(k) * total


def wxi_l2_profile(p, spec, xi_window=None, tol=DEFAULT_TOL):
    """``int w_xi^2 dxi`` over the whole profile or over ``xi_window``."""
    total = 0.0
    for seg in p.segments:
        if seg.kind == "constant":
            continue
        s_lo, s_hi = seg.xi_range
        if xi_window is None:
            total += wxi_l2(seg, spec, p.s, None, tol)
            continue
        a, b = max(s_lo, xi_window[0]), min(s_hi, xi_window[1])
        if b <= a:
            continue
        w_a, w_b = seg.w_at([a, b])
        total += wxi_l2(seg, spec, p.s, (w_a, w_b), tol)
    return total


def holder_exponent(p, xi_star, h_grid=None):
    """Least-squares slope of ``log|w(xi*+-h) - w(xi*)|`` against ``log h``."""
    from .profile import profile_eval

    h = np.asarray(h_grid if h_grid is not None else 2.0 ** -np.arange(5, 16), dtype=float)
    w0 = profile_eval(p, xi_star)[0]
    lo, hi = p.domain
    xs, ys = [], []
    for side in (-1.0, 1.0):
        pts = xi_star + side * h
        if np.any(pts < lo) or np.any(pts > hi):
            continue
        dw = np.abs(np.array([profile_eval(p, x)[0] for x in pts]) - w0)
        if np.all(dw == 0):
            continue
        if np.any(dw == 0):
            raise ValueError("profile is flat on part of the h grid; exponent undefined")
        xs.append(np.log(h))
        ys.append(np.log(dw))
    if not xs:
        return math.nan
    # fit each side on its own: the prefactors may differ across the point
    return float(np.mean([np.polyfit(x, y, 1)[0] for x, y in zip(xs, ys)]))

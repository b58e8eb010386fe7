"""Wave-speed functions c(u) for the variational wave equation.

Four families are supported.  Each spec carries certified global bounds
``alpha <= c(u) <= beta`` together with the derivative bounds ``k1_bound``
(max |c'|) and ``k2_bound`` (max |c''|).  The derivative bounds are kept as
metadata; nothing downstream consumes them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

FAMILIES = ("SqrtSin", "ArctanLinear", "LcDirector", "TabulatedSpline")

_SCAN_POINTS = 10_000
_BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class CoefficientSpec:
    family: str
    params: tuple
    alpha: float
    beta: float
    k1_bound: float
    k2_bound: float

    def param(self, name):
        return dict(self.params)[name]

    # -- constructors -------------------------------------------------------

    @classmethod
    def sqrt_sin(cls, q):
        q = float(q)
        if not q > 1:
            raise ValueError(f"SqrtSin needs q > 1, got {q}")
        params = (("q", q),)
        k1, k2 = _scan_derivative_bounds("SqrtSin", params, (0.0, 2 * math.pi))
        return cls._checked("SqrtSin", params, math.sqrt(q - 1), math.sqrt(q + 1), k1, k2)

    @classmethod
    def arctan_linear(cls, alpha, beta):
        alpha, beta = float(alpha), float(beta)
        if not 0 < alpha < beta:
            raise ValueError(f"ArctanLinear needs 0 < alpha < beta, got {alpha}, {beta}")
        amp = (beta - alpha) / math.pi
        # max |c''| = A * max 2|u|/(1+u^2)^2, attained at u = 1/sqrt(3)
        k2 = amp * 3 * math.sqrt(3) / 8
        params = (("alpha", alpha), ("beta", beta))
        return cls._checked("ArctanLinear", params, alpha, beta, amp, k2)

    @classmethod
    def lc_director(cls, lambda1, lambda2):
        lambda1, lambda2 = float(lambda1), float(lambda2)
        if not (lambda1 > 0 and lambda2 > 0):
            raise ValueError("LcDirector needs lambda1, lambda2 > 0")
        params = (("lambda1", lambda1), ("lambda2", lambda2))
        k1, k2 = _scan_derivative_bounds("LcDirector", params, (0.0, math.pi))
        lo, hi = sorted((lambda1, lambda2))
        return cls._checked("LcDirector", params, math.sqrt(lo), math.sqrt(hi), k1, k2)

    @classmethod
    def tabulated_spline(cls, nodes):
        pts = sorted((float(u), float(c)) for u, c in nodes)
        if len(pts) < 2:
            raise ValueError("TabulatedSpline needs at least two nodes")
        us = [u for u, _ in pts]
        if len(set(us)) != len(us):
            raise ValueError("TabulatedSpline nodes must have distinct u")
        params = (("nodes", tuple(pts)),)
        lo_u, hi_u = us[0], us[-1]
        alpha, beta = _certify_spline_bounds(params, lo_u, hi_u)
        if not alpha > 0:
            raise ValueError(f"TabulatedSpline must stay positive, min c = {alpha}")
        k1, k2 = _scan_derivative_bounds("TabulatedSpline", params, (lo_u, hi_u))
        return cls._checked("TabulatedSpline", params, alpha, beta, k1, k2)

    @classmethod
    def _checked(cls, family, params, alpha, beta, k1, k2):
        spec = cls(family, params, alpha, beta, k1, k2)
        u = _check_grid(spec)
        c = _evaluate(family, params, u)[0]
        slack = _BOUND_SLACK * (1 + beta)
        if not (alpha > 0 and np.all(c >= alpha - slack) and np.all(c <= beta + slack)):
            raise ValueError(f"{family} violates 0 < alpha <= c <= beta on the check grid")
        return spec

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        out = {"family": self.family}
        for name, value in self.params:
            out[name] = [list(p) for p in value] if name == "nodes" else value
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        family = data.pop("family", None)
        expected = {
            "SqrtSin": {"q"},
            "ArctanLinear": {"alpha", "beta"},
            "LcDirector": {"lambda1", "lambda2"},
            "TabulatedSpline": {"nodes"},
        }
        if family not in expected:
            raise ValueError(f"unknown coefficient family {family!r}")
        if set(data) != expected[family]:
            raise ValueError(f"{family} expects keys {sorted(expected[family])}, got {sorted(data)}")
        if family == "SqrtSin":
            return cls.sqrt_sin(data["q"])
        if family == "ArctanLinear":
            return cls.arctan_linear(data["alpha"], data["beta"])
        if family == "LcDirector":
            return cls.lc_director(data["lambda1"], data["lambda2"])
        return cls.tabulated_spline(data["nodes"])


def eval_coefficient(spec, u):
    """Return ``(c, c', c'')`` at ``u`` (scalar or array)."""
    c, cp, cpp = _evaluate(spec.family, spec.params, np.asarray(u, dtype=float))
    if np.ndim(u) == 0:
        return float(c), float(cp), float(cpp)
    return c, cp, cpp


def c_squared_minus(spec, s, u):
    """``c(u)^2 - s^2`` evaluated without forming c for the closed-form families."""
    u = np.asarray(u, dtype=float)
    if spec.family == "SqrtSin":
        out = np.sin(u) + (spec.param("q") - s * s)
    elif spec.family == "LcDirector":
        l1, l2 = spec.param("lambda1"), spec.param("lambda2")
        out = l1 * np.sin(u) ** 2 + l2 * np.cos(u) ** 2 - s * s
    else:
        c = _evaluate(spec.family, spec.params, u)[0]
        out = (c - abs(s)) * (c + abs(s))
    return float(out) if out.ndim == 0 else out


def _evaluate(family, params, u):
    p = dict(params)
    if family == "SqrtSin":
        c = np.sqrt(np.sin(u) + p["q"])
        cp = np.cos(u) / (2 * c)
        cpp = (-np.sin(u) * c - np.cos(u) * cp) / (2 * c * c)
    elif family == "ArctanLinear":
        amp = (p["beta"] - p["alpha"]) / math.pi
        c = amp * np.arctan(u) + (p["alpha"] + p["beta"]) / 2
        cp = amp / (1 + u * u)
        cpp = -2 * amp * u / (1 + u * u) ** 2
    elif family == "LcDirector":
        dl = p["lambda1"] - p["lambda2"]
        c = np.sqrt(p["lambda1"] * np.sin(u) ** 2 + p["lambda2"] * np.cos(u) ** 2)
        cp = dl * np.sin(2 * u) / (2 * c)
        cpp = (dl * np.cos(2 * u) - cp * cp) / c
    elif family == "TabulatedSpline":
        spline = _spline(p["nodes"])
        lo, hi = spline.x[0], spline.x[-1]
        uc = np.clip(u, lo, hi)
        inside = (u >= lo) & (u <= hi)
        c = spline(uc)
        cp = np.where(inside, spline(uc, 1), 0.0)
        cpp = np.where(inside, spline(uc, 2), 0.0)
    else:
        raise ValueError(f"unknown coefficient family {family!r}")
    return c, cp, cpp


@lru_cache(maxsize=64)
def _spline(nodes):
    u = np.array([n[0] for n in nodes])
    c = np.array([n[1] for n in nodes])
    # zero end slopes keep the constant extrapolation C^1
    return CubicSpline(u, c, bc_type="clamped")


def _check_grid(spec):
    if spec.family == "TabulatedSpline":
        nodes = spec.param("nodes")
        lo, hi = nodes[0][0], nodes[-1][0]
        pad = 0.1 * (hi - lo)
        return np.linspace(lo - pad, hi + pad, 4001)
    if spec.family == "ArctanLinear":
        return np.linspace(-1e3, 1e3, 20001)
    return np.linspace(-2 * math.pi, 2 * math.pi, 4001)


def _scan_derivative_bounds(family, params, period):
    u = np.linspace(period[0], period[1], _SCAN_POINTS)
    _, cp, cpp = _evaluate(family, params, u)
    return float(np.max(np.abs(cp))), float(np.max(np.abs(cpp)))


def _certify_spline_bounds(params, lo, hi):
    u = np.linspace(lo, hi, _SCAN_POINTS)
    c = _evaluate("TabulatedSpline", params, u)[0]
    step = u[1] - u[0]

    def refine(idx, sign):
        a, b = max(lo, u[idx] - step), min(hi, u[idx] + step)
        if b <= a:
            return float(c[idx])
        res = minimize_scalar(
            lambda x: sign * float(_evaluate("TabulatedSpline", params, np.asarray(x))[0]),
            bounds=(a, b),
            method="bounded",
            options={"xatol": 1e-13},
        )
        # sign * c is minimised: the refined extremum can only improve on the grid value
        return sign * min(float(res.fun), sign * float(c[idx]))

    alpha = refine(int(np.argmin(c)), 1.0)
    beta = refine(int(np.argmax(c)), -1.0)
    return alpha, beta

"""Traveling waves of the Camassa-Holm equation.

With ``xi = x - s t`` a classical piece has two first integrals,

    -s w + s w'' + 3/2 w^2 - 1/2 w'^2 - w w'' = a
    w'^2 (s - w) = g(w),    g(w) = -w^3 + s w^2 + 2 a w + b,

so ``dxi/dw = sqrt((s - w) / g(w))``.  The zero structure of ``g`` relative to
``s`` decides which bounded waves exist.  Negative speeds are reduced to
positive ones through ``(w, s, b) -> (-w, -s, -b)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .config import DEFAULT_TOL
from .errors import ComplexSlope, InadmissiblePlan, NotConstructible, SignViolation, ValueMismatch
from .profile import GluePoint, GlueVerdict, Profile
from .segment import (
    REGULAR,
    SINGULAR,
    Endpoint,
    ExpForm,
    Segment,
    constant_segment,
    layout_segments,
    monotone_segment,
)

KINDS = (
    "NoBoundedWave",
    "CusponWithDecay",
    "PeakonWithDecay",
    "PeriodicCuspon",
    "PeriodicPeakon",
    "StumponCompatible",
    "MirrorCase",
    "UnclassifiedBoundedDerivative",
)
CONSTRUCTIBLE = ("CusponWithDecay", "PeakonWithDecay", "PeriodicCuspon", "PeriodicPeakon",
                 "StumponCompatible", "MirrorCase")

DISC_REL = 1e-10          # |discriminant| <= DISC_REL * scale^6 -> multiple zero
ZERO_REL = 1e-9           # |g(z)| <= ZERO_REL * (1 + |b|) for an accepted zero
S_MATCH = 1e-8            # s equal to a zero
A_MATCH = 1e-9
STUMPON_REL = 1e-10


def g_poly(s, a, b, w):
    w = np.asarray(w, dtype=float)
    return ((-w + s) * w + 2 * a) * w + b


def g_prime(s, a, w):
    return -3 * w * w + 2 * s * w + 2 * a


# -- cubic analysis ------------------------------------------------------------

@dataclass(frozen=True)
class CubicAnalysis:
    s: float
    a: float
    b: float
    f_coeffs: tuple
    g_coeffs: tuple
    crit_exists: bool
    w_min: float | None
    w_max: float | None
    zeros: tuple          # ((value, multiplicity), ...) sorted by value
    discriminant: float

    @property
    def real_count(self):
        return sum(m for _, m in self.zeros)

    def to_dict(self):
        return {
            "s": self.s, "a": self.a, "b": self.b,
            "f_coeffs": list(self.f_coeffs), "g_coeffs": list(self.g_coeffs),
            "crit_exists": self.crit_exists, "w_min": self.w_min, "w_max": self.w_max,
            "zeros": [{"value": v, "multiplicity": m} for v, m in self.zeros],
            "discriminant": self.discriminant,
        }


def _polish(s, a, b, x):
    # Newton on g, kept only while it reduces |g|
    for _ in range(4):
        gx = float(g_poly(s, a, b, x))
        dg = float(g_prime(s, a, x))
        if dg == 0 or gx == 0:
            break
        nx = x - gx / dg
        if abs(float(g_poly(s, a, b, nx))) >= abs(gx):
            break
        x = nx
    return x


def _simple_zeros(s, a, b, disc):
    # monic x^3 + B x^2 + C x + D with B = -s, C = -2a, D = -b; x = y + s/3
    B, C, D = -s, -2.0 * a, -float(b)
    p = C - B * B / 3
    q = 2 * B ** 3 / 27 - B * C / 3 + D
    shift = s / 3
    if disc > 0 and p < 0:
        m = 2 * math.sqrt(-p / 3)
        arg = max(-1.0, min(1.0, 3 * q / (p * m)))
        theta = math.acos(arg) / 3
        ys = [m * math.cos(theta - 2 * math.pi * k / 3) for k in range(3)]
        roots = sorted(_polish(s, a, b, y + shift) for y in ys)
        return [(r, 1) for r in roots]
    half = q / 2
    rad = math.sqrt(max(half * half + p ** 3 / 27, 0.0))
    u = np.cbrt(-half - math.copysign(rad, half) if half != 0 else rad)
    y = float(u - p / (3 * u)) if u != 0 else 0.0
    return [(_polish(s, a, b, y + shift), 1)]


def analyze_g(s, a, b):
    """Real zeros of ``g`` with multiplicities, plus the critical points of ``f = g - b``."""
    s, a, b = float(s), float(a), float(b)
    B, C, D = -s, -2.0 * a, -b
    disc = 18 * B * C * D - 4 * B ** 3 * D + B * B * C * C - 4 * C ** 3 - 27 * D * D
    scale = 1 + abs(s) + abs(a) + abs(b)
    crit = s * s + 6 * a
    crit_exists = crit > 0
    w_min = w_max = None
    if crit_exists:
        r = math.sqrt(crit)
        w_min, w_max = (s - r) / 3, (s + r) / 3
    zeros = None
    gtol = ZERO_REL * (1 + abs(b))
    if abs(disc) <= DISC_REL * scale ** 6:
        if abs(crit) <= 1e-8 * scale * scale:
            z = s / 3
            if abs(float(g_poly(s, a, b, z))) <= gtol:
                zeros = [(z, 3)]
        elif crit_exists:
            z = min((w_min, w_max), key=lambda w: abs(float(g_poly(s, a, b, w))))
            if abs(float(g_poly(s, a, b, z))) <= gtol:
                eta = _polish(s, a, b, s - 2 * z)
                zeros = sorted([(z, 2), (eta, 1)])
    if zeros is None:
        zeros = _simple_zeros(s, a, b, disc)
    return CubicAnalysis(
        s=s, a=a, b=b,
        f_coeffs=(-1.0, s, 2 * a, 0.0),
        g_coeffs=(-1.0, s, 2 * a, b),
        crit_exists=crit_exists,
        w_min=w_min, w_max=w_max,
        zeros=tuple((float(v), int(m)) for v, m in zeros),
        discriminant=float(disc),
    )


def _expanded(zeros):
    return [v for v, m in zeros for _ in range(m)]


def vieta_residuals(analysis):
    """Residuals of the three symmetric-function identities (all real zeros only)."""
    if analysis.real_count != 3:
        return None
    z = _expanded(analysis.zeros)
    s, a, b = analysis.s, analysis.a, analysis.b
    return {
        "vieta_sum": abs(z[0] + z[1] + z[2] - s),
        "vieta_pair": abs(z[0] * z[1] + z[0] * z[2] + z[1] * z[2] + 2 * a),
        "vieta_product": abs(z[0] * z[1] * z[2] - b),
    }


# -- taxonomy ------------------------------------------------------------------

@dataclass(frozen=True)
class ChTaxonomy:
    analysis: CubicAnalysis
    kind: str
    params: dict = field(default_factory=dict)        # in the s >= 0 frame
    certificates: dict = field(default_factory=dict)
    stumpon: bool = False
    inner_kind: str | None = None
    mirrored: bool = False

    @property
    def wave_kind(self):
        """The kind that decides construction (the inner kind for stumpon triples)."""
        return self.inner_kind if self.kind == "StumponCompatible" else self.kind

    @property
    def zeros(self):
        return self.analysis.zeros

    def to_dict(self):
        return {
            "kind": self.kind,
            "inner_kind": self.inner_kind,
            "mirrored": self.mirrored,
            "s": self.analysis.s, "a": self.analysis.a, "b": self.analysis.b,
            "zeros": [{"value": v, "multiplicity": m} for v, m in self.analysis.zeros],
            "params": dict(self.params),
            "certificates": dict(self.certificates),
            "crit_exists": self.analysis.crit_exists,
            "w_min": self.analysis.w_min,
            "w_max": self.analysis.w_max,
        }


def _near(x, y, rel=S_MATCH):
    return abs(x - y) <= rel * (1 + abs(y))


def kind_from_zeros(s, crit_exists, zeros):
    """Bracket rules for ``s >= 0``; returns ``(kind, params)``."""
    if not crit_exists:
        return "NoBoundedWave", {}
    simple = [v for v, m in zeros if m == 1]
    double = [v for v, m in zeros if m == 2]
    if sum(m for _, m in zeros) < 3 or any(m == 3 for _, m in zeros):
        return "NoBoundedWave", {}
    if double:
        z, eta = double[0], simple[0]
        if z < eta:
            if _near(s, eta):
                return "PeakonWithDecay", {"w_min": z, "eta": eta}
            if z < s < eta:
                return "CusponWithDecay", {"w_min": z, "eta": eta}
            if s > eta:
                return "UnclassifiedBoundedDerivative", {"w_min": z, "eta": eta}
            return "NoBoundedWave", {"w_min": z, "eta": eta}
        if _near(s, eta) or eta <= s < z:
            return "MirrorCase", {"w_max": z, "eta": eta}
        if s < eta:
            return "UnclassifiedBoundedDerivative", {"w_max": z, "eta": eta}
        return "NoBoundedWave", {"w_max": z, "eta": eta}
    e1, e2, e3 = simple
    params = {"eta1": e1, "eta2": e2, "eta3": e3}
    if _near(s, e3):
        return "PeriodicPeakon", params
    if _near(s, e2):
        return "NoBoundedWave", params
    if e2 < s < e3:
        return "PeriodicCuspon", params
    # bounded waves without a crest at w = s exist here but are not analysed
    return "UnclassifiedBoundedDerivative", params


def classify_ch(s, a, b):
    s, a, b = float(s), float(a), float(b)
    analysis = analyze_g(s, a, b)
    mirrored = s < 0
    if mirrored:
        frame_s, frame_b = -s, -b
        frame_zeros = tuple(sorted((-v, m) for v, m in analysis.zeros))
    else:
        frame_s, frame_b = s, b
        frame_zeros = analysis.zeros
    kind, params = kind_from_zeros(frame_s, analysis.crit_exists, frame_zeros)
    certs = {}
    vieta = vieta_residuals(analysis)
    if vieta:
        certs.update(vieta)
    if analysis.zeros:
        certs["max_abs_g_at_zeros"] = max(abs(float(g_poly(s, a, b, v))) for v, _ in analysis.zeros)
    doubles = [v for v, m in analysis.zeros if m >= 2]
    if doubles:
        certs["abs_gprime_at_double"] = abs(float(g_prime(s, a, doubles[0])))
    if kind in ("CusponWithDecay", "PeakonWithDecay"):
        wm, eta = params["w_min"], params["eta"]
        certs["eta_plus_2wmin_minus_s"] = abs(eta + 2 * wm - frame_s)
        certs["pair_relation"] = abs(-2 * eta * wm - wm * wm - 2 * a)
        certs["product_relation"] = abs(eta * wm * wm - frame_b)
    stumpon = abs(2 * a - s * s) <= STUMPON_REL * (1 + s * s) and abs(b + s ** 3) <= STUMPON_REL * (1 + abs(s) ** 3)
    if stumpon:
        certs["two_a_minus_s2"] = abs(2 * a - s * s)
        certs["b_plus_s3"] = abs(b + s ** 3)
        return ChTaxonomy(analysis, "StumponCompatible", params, certs, True, kind, mirrored)
    return ChTaxonomy(analysis, kind, params, certs, False, None, mirrored)


# -- classical pieces ------------------------------------------------------------

def ch_ratio(s, a, b, zeros=None):
    """Signed ``(s - w) / g(w)`` in factored form; a zero at ``w = s`` is cancelled.

    The returned callable takes an optional ``offsets`` map ``{point: w - point}``
    so factors vanishing at a piece end are formed without cancellation.
    """
    if zeros is None:
        zeros = analyze_g(s, a, b).zeros
    roots = _expanded(zeros)
    quad = None
    if len(roots) == 1:
        r = roots[0]
        quad = (r - s, -2 * a - r * (s - r))   # w^2 + p w + q
    cancel = None
    for i, r in enumerate(roots):
        if _near(r, s):
            cancel = i
            break

    def ratio(w, offsets=None):
        w = np.asarray(w, dtype=float)
        offsets = offsets or {}

        def diff(r):
            return offsets[r] if r in offsets else w - r

        out = np.ones_like(w)
        for i, r in enumerate(roots):
            if i != cancel:
                out = out * diff(r)
        if quad is not None:
            out = out * ((w + quad[0]) * w + quad[1])
        with np.errstate(divide="ignore", invalid="ignore"):
            if cancel is not None:
                return 1.0 / out
            return -diff(s) / -out

    return ratio


def ch_density(s, a, b, zeros=None):
    ratio = ch_ratio(s, a, b, zeros)

    def rho(w, offsets=None):
        return np.sqrt(np.abs(ratio(w, offsets)))

    rho.uses_offsets = True
    return rho


def _snap(w, targets):
    for t in targets:
        if abs(w - t) <= 1e-9 * (1 + abs(t)):
            return t, True
    return w, False


def ch_segment(s, a, b, w_from, w_to, tol=DEFAULT_TOL, source=None):
    """Monotone classical CH piece from ``w_from`` to ``w_to`` in increasing xi."""
    s, a, b = float(s), float(a), float(b)
    analysis = analyze_g(s, a, b)
    zeros = analysis.zeros
    ratio = ch_ratio(s, a, b, zeros)
    ends = []
    values = []
    s_is_zero = any(_near(v, s) for v, _ in zeros)
    for w in (float(w_from), float(w_to)):
        w_s, at_s = _snap(w, [s])
        if at_s and not s_is_zero:
            ends.append(SINGULAR)
            values.append(s)
            continue
        match = [(v, m) for v, m in zeros if abs(w - v) <= 1e-9 * (1 + abs(v))]
        if match:
            v, m = match[0]
            values.append(v)
            if m >= 2 and not _near(v, s):
                eta = [x for x, mm in zeros if mm == 1]
                if not eta:
                    raise SignViolation("triple zero of g: no decaying piece")
                rate = math.sqrt(abs((eta[0] - v) / (s - v)))
                ends.append(Endpoint("tail", rate))
            else:
                ends.append(REGULAR)
            continue
        values.append(w)
        ends.append(REGULAR)
    lo, hi = sorted(values)
    if hi <= lo:
        raise ValueError("a monotone piece needs distinct end values")
    if lo < s < hi:
        raise SignViolation(f"s - w changes sign inside ({lo}, {hi}); split the piece at w = s")
    interior = np.linspace(lo, hi, 2001)[1:-1]
    r = ratio(interior)
    if not np.all(r > 0) or not np.all(np.isfinite(r)):
        raise SignViolation(f"(s - w)/g(w) is not positive on ({lo}, {hi}) for (s, a, b) = ({s}, {a}, {b})")
    return monotone_segment(
        "ch", (("a", a), ("b", b)), ch_density(s, a, b, zeros), values[0], values[1], ends[0], ends[1],
        tail_eps=tol.tail_cutoff_epsilon, source=source,
    )


def classical_constants(s, wbar, a=None):
    """``(a, b)`` of the constant solution ``w = wbar`` (``a`` may be imposed)."""
    a_cl = 1.5 * wbar * wbar - s * wbar
    a_use = a_cl if a is None else a
    return a_cl, -s * wbar * wbar + wbar ** 3 - 2 * a_use * wbar


def _exp_segment(c1, c2, xi_lo, xi_hi, s, source=None):
    """Closed-form piece ``c1 e^xi + c2 e^-xi`` on ``[xi_lo, xi_hi]``."""
    c1, c2, xi_lo, xi_hi = float(c1), float(c2), float(xi_lo), float(xi_hi)
    if not xi_hi > xi_lo:
        raise ValueError("exponential piece needs xi_lo < xi_hi")
    if (math.isinf(xi_lo) and c2 != 0) or (math.isinf(xi_hi) and c1 != 0):
        raise ValueError("exponential piece is unbounded on an infinite interval")
    form = ExpForm(c1, c2, 0.0)
    # the slope vanishes only at xi = log(c2/c1)/2 when c1 c2 > 0
    if c1 * c2 > 0:
        turn = 0.5 * math.log(c2 / c1)
        if xi_lo < turn < xi_hi:
            raise ValueError("exponential piece is not monotone on its interval")
    lo_f = max(xi_lo, -700.0) if math.isinf(xi_lo) else xi_lo
    hi_f = min(xi_hi, 700.0) if math.isinf(xi_hi) else xi_hi
    mid = 0.5 * (lo_f + hi_f) if math.isfinite(xi_lo) and math.isfinite(xi_hi) else (
        hi_f - 1.0 if math.isinf(xi_lo) else lo_f + 1.0)
    slope_mid = float(form.slope(mid))
    direction = 0 if slope_mid == 0 else (1 if slope_mid > 0 else -1)
    if direction == 0:
        raise ValueError("exponential piece is constant")
    w_lo = 0.0 if math.isinf(xi_lo) else float(form.w(xi_lo))
    w_hi = 0.0 if math.isinf(xi_hi) else float(form.w(xi_hi))
    a = 2 * c1 * c2
    return Segment(
        equation="ch",
        constants=(("a", a), ("b", -2 * a * s)),
        kind="monotone",
        xi_range=(xi_lo, xi_hi),
        w_ends=(w_lo, w_hi),
        direction=direction,
        closed_form=form,
        source=source,
    )


def build_exp_peak(s, a, gamma0=0.0, xi_interval=(-1.0, 1.0)):
    """Peak at ``w = s`` from two solutions of ``w'' = w``: increasing left, mirrored right."""
    s, a = float(s), float(a)
    if s * s < 2 * a:
        raise ComplexSlope(f"s^2 = {s * s} < 2a = {2 * a}: the crest slope is not real")
    lo, hi = map(float, xi_interval)
    if not lo < gamma0 < hi:
        raise ValueError("xi_interval must contain gamma0 in its interior")
    root = math.sqrt(s * s - 2 * a)
    sign = 1.0 if s >= 0 else -1.0
    c1 = sign * (abs(s) + root) / 2
    c2 = sign * (abs(s) - root) / 2
    left = _exp_segment(c1, c2, lo - gamma0, 0.0, s).shifted(gamma0)
    right = _exp_segment(c2, c1, 0.0, hi - gamma0, s).shifted(gamma0)
    left = replace(left, source={"type": "exp", "c1": c1, "c2": c2, "xi_lo": lo - gamma0, "xi_hi": 0.0})
    right = replace(right, source={"type": "exp", "c1": c2, "c2": c1, "xi_lo": 0.0, "xi_hi": hi - gamma0})
    return left, right


# -- glue ------------------------------------------------------------------------

def _constants_of(seg, s):
    c = seg.const
    return c.get("a"), c.get("b")


def _constant_is_classical(seg, s):
    a, b = _constants_of(seg, s)
    wbar = seg.wbar
    a_cl, b_cl = classical_constants(s, wbar, a)
    ok_a = abs(a - a_cl) <= A_MATCH * (1 + abs(a_cl))
    ok_b = abs(b - b_cl) <= A_MATCH * (1 + abs(b_cl))
    return ok_a and ok_b, a - a_cl, b - b_cl


def check_glue_ch(left, right, s, tol=DEFAULT_TOL):
    """Admissibility of the junction between two CH pieces."""
    w_l, w_r = left.w_ends[1], right.w_ends[0]
    if abs(w_l - w_r) > tol.glue_value_tol:
        raise ValueMismatch(f"junction values differ: left {w_l}, right {w_r}")
    w_star = w_l
    a1, b1 = _constants_of(left, s)
    a2, b2 = _constants_of(right, s)
    sl, sr = left.end_slope("right"), right.end_slope("left")
    details = {"a_left": a1, "a_right": a2, "b_left": b1, "b_right": b2,
               "left_slope": sl, "right_slope": sr, "w_star_minus_s": w_star - s}
    if abs(a1 - a2) > A_MATCH:
        return GlueVerdict(False, None, "AMismatch", details)
    for side, seg in (("left", left), ("right", right)):
        if seg.kind == "constant":
            ok, da, db = _constant_is_classical(seg, s)
            details[f"{side}_constant_a_defect"] = da
            details[f"{side}_constant_b_defect"] = db
            if not ok:
                reason = "constant at w = s needs 2a = s^2 and b = -s^3" if _near(seg.wbar, s, 1e-9) \
                    else "constant piece is not a classical solution for its (a, b)"
                return GlueVerdict(False, None, reason, details)
    at_s = abs(w_star - s) <= 1e-9 * (1 + abs(s))
    same_b = abs(b1 - b2) <= A_MATCH * (1 + abs(b1))
    if math.isinf(sl) or math.isinf(sr):
        if not at_s:
            return GlueVerdict(False, None, "unbounded slope away from w = s", details)
        if left.kind == "constant" or right.kind == "constant":
            return GlueVerdict(True, "ConstantJunction", None, details)
        kind = "Cusp" if left.direction != right.direction else "InflectionSingular"
        return GlueVerdict(True, kind, None, details)
    scale = 1e-9 * (1 + max(abs(sl), abs(sr)))
    if abs(sl - sr) <= scale:
        if not same_b:
            return GlueVerdict(False, None, "b1 != b2 with matching slopes", details)
        return GlueVerdict(True, "SmoothC1", None, details)
    if not at_s:
        return GlueVerdict(False, None, "slope jump away from w = s", details)
    if abs(sl + sr) <= scale:
        details["two_a_s_plus_b"] = 2 * a1 * s + b1
        if not same_b or abs(2 * a1 * s + b1) > A_MATCH * (1 + abs(b1)):
            return GlueVerdict(False, None, "peak needs b1 = b2 and 2as + b = 0", details)
        return GlueVerdict(True, "Peak", None, details)
    return GlueVerdict(False, None, "bounded slopes at w = s are neither equal nor opposite", details)


# -- plans ---------------------------------------------------------------------

@dataclass(frozen=True)
class ConstPiece:
    w: float
    length: float | None = None
    b: float | None = None

    def to_dict(self):
        out = {"type": "const", "w": self.w}
        if self.length is not None:
            out["length"] = self.length
        if self.b is not None:
            out["b"] = self.b
        return out


@dataclass(frozen=True)
class MonoPiece:
    b: float
    direction: str
    w_from: float
    w_to: float
    a: float | None = None     # overrides the plan's a; only used to build deliberate violations

    def to_dict(self):
        out = {"type": "mono", "b": self.b, "dir": self.direction, "from": self.w_from, "to": self.w_to}
        if self.a is not None:
            out["a"] = self.a
        return out


@dataclass(frozen=True)
class ExpPeakPiece:
    c1: float
    c2: float
    xi_lo: float
    xi_hi: float

    def to_dict(self):
        from .profile import jnum
        return {"type": "exp", "c1": self.c1, "c2": self.c2, "xi_lo": jnum(self.xi_lo), "xi_hi": jnum(self.xi_hi)}


@dataclass(frozen=True)
class ChPlan:
    pieces: tuple
    origin: float = 0.0

    def to_dict(self):
        return {"pieces": [p.to_dict() for p in self.pieces], "origin": self.origin}

    @classmethod
    def from_dict(cls, data):
        pieces = []
        for item in data["pieces"]:
            kind = item["type"]
            if kind == "const":
                pieces.append(ConstPiece(float(item["w"]), item.get("length"), item.get("b")))
            elif kind == "mono":
                if item["dir"] not in ("inc", "dec"):
                    raise ValueError(f"dir must be 'inc' or 'dec', got {item['dir']!r}")
                pieces.append(MonoPiece(float(item["b"]), item["dir"], float(item["from"]), float(item["to"]),
                                        item.get("a")))
            elif kind == "exp":
                pieces.append(ExpPeakPiece(float(item["c1"]), float(item["c2"]),
                                           float(item["xi_lo"]), float(item["xi_hi"])))
            else:
                raise ValueError(f"unknown piece type {kind!r}")
        return cls(tuple(pieces), float(data.get("origin", 0.0)))


def _piece_segment(piece, s, a, tol):
    if isinstance(piece, ConstPiece):
        a_cl, b_cl = classical_constants(s, piece.w, a)
        b = b_cl if piece.b is None else float(piece.b)
        return constant_segment("ch", (("a", a), ("b", b)), piece.w, source=piece.to_dict()), piece.length
    if isinstance(piece, MonoPiece):
        a_use = a if piece.a is None else float(piece.a)
        seg = ch_segment(s, a_use, piece.b, piece.w_from, piece.w_to, tol, source=piece.to_dict())
        want = 1 if piece.direction == "inc" else -1
        if seg.direction != want:
            raise ValueError("orientation disagrees with the order of the end values")
        return seg, None
    return _exp_segment(piece.c1, piece.c2, piece.xi_lo, piece.xi_hi, s, source=piece.to_dict()), None


def _glue_all(segments, s, tol, strict):
    glue = []
    for i in range(len(segments) - 1):
        left, right = segments[i], segments[i + 1]
        verdict = check_glue_ch(left, right, s, tol)
        if strict and not verdict.admissible:
            raise InadmissiblePlan(f"junction {i}: {verdict.reason}", junction=i, reason=verdict.reason)
        glue.append(GluePoint(
            xi_star=left.xi_range[1],
            kind=verdict.kind,
            w_star=left.w_ends[1],
            left_slope_limit=left.end_slope("right"),
            right_slope_limit=right.end_slope("left"),
            left_constants=left.const,
            right_constants=right.const,
            verdict=verdict,
        ))
    return tuple(glue)


def assemble_ch(s, a, plan, tol=DEFAULT_TOL, strict=True):
    if not plan.pieces:
        raise ValueError("empty plan")
    raw, lengths = [], []
    for piece in plan.pieces:
        seg, length = _piece_segment(piece, float(s), float(a), tol)
        raw.append(seg)
        lengths.append(length)
    for i in range(len(raw) - 1):
        if abs(raw[i].w_ends[1] - raw[i + 1].w_ends[0]) > tol.glue_value_tol:
            raise ValueMismatch(f"junction {i}: pieces end at {raw[i].w_ends[1]} and start at {raw[i + 1].w_ends[0]}")
    segments = layout_segments(raw, plan.origin, lengths)
    glue = _glue_all(segments, float(s), tol, strict)
    meta = {"builder": "assemble_ch", "a": float(a), "plan": plan.to_dict(),
            "tolerances": tol.to_dict(), "strict": strict}
    return Profile(float(s), "ch", tuple(segments), glue, meta)


# -- kind-driven construction -----------------------------------------------------

def _decay_pair(s, a, b, z, tol, sources=None):
    """Two tabulated halves meeting at the crest ``w = s`` with tails to ``z``."""
    first = ch_segment(s, a, b, z, s, tol, source={"type": "mono", "b": b, "dir": "inc" if z < s else "dec",
                                                    "from": z, "to": s})
    second = ch_segment(s, a, b, s, z, tol, source={"type": "mono", "b": b, "dir": "dec" if z < s else "inc",
                                                     "from": s, "to": z})
    return first, second


def build_ch_profile(s, a, b, kind=None, window=(-10.0, 10.0), tol=DEFAULT_TOL, plateau=1.0):
    """Construct the wave selected by ``classify_ch(s, a, b)``."""
    s, a, b = float(s), float(a), float(b)
    tax = classify_ch(s, a, b)
    if kind is not None and kind not in (tax.kind, tax.inner_kind):
        raise NotConstructible(f"(s, a, b) = ({s}, {a}, {b}) classifies as {tax.kind}, not {kind}")
    chosen = tax.kind if kind is None else kind
    if chosen not in CONSTRUCTIBLE:
        raise NotConstructible(f"{chosen} waves are not constructed")
    sigma = -1.0 if tax.mirrored else 1.0
    lo, hi = map(float, window)
    if chosen == "StumponCompatible":
        crit = math.sqrt(s * s + 6 * a)
        z = (s - crit) / 3 if s >= 0 else (s + crit) / 3
        b_cusp = -float(g_poly(s, a, 0.0, z))
        up, down = _decay_pair(s, a, b_cusp, z, tol)
        flat = constant_segment("ch", (("a", a), ("b", b)), s)
        segments = layout_segments([up, flat, down], -0.5 * plateau, [None, plateau, None])
    elif chosen in ("CusponWithDecay", "PeakonWithDecay", "MirrorCase"):
        key = "w_max" if chosen == "MirrorCase" else "w_min"
        z = sigma * tax.params[key]
        first, second = _decay_pair(s, a, b, z, tol)
        segments = layout_segments([first, second], 0.0, [None, None])
    else:
        turn = sigma * tax.params["eta2"]
        up = ch_segment(s, a, b, turn, s, tol)
        down = ch_segment(s, a, b, s, turn, tol)
        if turn > s:
            up, down = down, up      # mirrored arcs descend first
        half = up.xi_range[1] - up.xi_range[0]
        period = 2 * half
        origin = period * math.floor((lo + half) / period)
        start = origin - half
        count = max(2, int(math.ceil((hi - start) / half)))
        segments = []
        cursor = start
        for i in range(count):
            seg = up if i % 2 == 0 else down
            seg = seg.shifted(cursor - seg.xi_range[0])
            # pin the edges so neighbouring pieces share them bit for bit
            cursor_next = start + (i + 1) * half
            segments.append(replace(seg, xi_range=(cursor, cursor_next)))
            cursor = cursor_next
    glue = _glue_all(segments, s, tol, strict=True)
    meta = {"builder": "build_ch_profile", "a": a, "b": b, "kind": chosen, "window": [lo, hi],
            "tolerances": tol.to_dict(), "plateau": plateau, "taxonomy": tax.to_dict()}
    return Profile(s, "ch", tuple(segments), glue, meta)

"""Classical pieces of a traveling-wave profile, stored as xi(w).

A monotone piece is described by its density ``rho(w) = |dxi/dw|``.  At a
point where the slope blows up, ``rho`` vanishes like a square root; at a
turning point it blows up like an inverse square root; at a double zero of
the first integral it blows up like ``1/|w - w_lim|`` and the piece has
infinite xi-extent.  All three are handled by one reparametrisation:

    w = W(u),  u = u_from + (u_to - u_from) * m(theta),  m(theta) = 3 theta^2 - 2 theta^3

where ``W`` is the identity, or ``w_lim + sign * exp(u)`` near a decay tail.
Since ``m`` is quadratic at both ends, ``rho(w(theta)) * |w'(theta)|`` is
smooth on ``[0, 1]`` and composite Gauss-Legendre integrates it to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import OutOfDomain
from .quadrature import composite_gauss_legendre, gauss_legendre

DEFAULT_CELLS = 1024
_GL_POINTS = 10


def smoothstep(t):
    return t * t * (3.0 - 2.0 * t)


def smoothstep_inverse(r, rc=None):
    """Solve ``smoothstep(theta) = r``; ``rc = 1 - r`` may be passed for accuracy near 1."""
    r = np.asarray(r, dtype=float)
    rc = 1.0 - r if rc is None else np.asarray(rc, dtype=float)
    small = np.minimum(r, rc)
    small = np.clip(small, 0.0, 0.5)
    guess = np.where(
        small < 1e-6,
        np.sqrt(small / 3.0),
        0.5 - np.sin(np.arcsin(np.clip(1.0 - 2.0 * small, -1.0, 1.0)) / 3.0),
    )
    t = guess
    for _ in range(3):
        dm = 6.0 * t * (1.0 - t)
        step = np.where(dm > 0, (smoothstep(t) - small) / np.where(dm > 0, dm, 1.0), 0.0)
        t = np.clip(t - step, 0.0, 0.5)
    return np.where(r <= rc, t, 1.0 - t)


@dataclass(frozen=True)
class Endpoint:
    kind: str = "regular"        # "regular" | "singular" | "tail"
    rate: float | None = None

    def to_dict(self):
        out = {"kind": self.kind}
        if self.rate is not None:
            out["rate"] = self.rate
        return out


REGULAR = Endpoint("regular")
SINGULAR = Endpoint("singular")


class Parametrization:
    """Tabulated xi(theta) for one monotone piece.

    ``tail_anchor`` switches the coordinate to ``log|w - tail_anchor|``.
    """

    def __init__(self, density, w_from, w_to, tail_anchor=None, cells=DEFAULT_CELLS, offset=0.0):
        self.density = density
        self.w_from = float(w_from)
        self.w_to = float(w_to)
        self.tail_anchor = tail_anchor
        self.offset = float(offset)
        if tail_anchor is None:
            self._sigma = 1.0
            self.u_from, self.u_to = self.w_from, self.w_to
        else:
            self._sigma = math.copysign(1.0, self.w_from - tail_anchor)
            self.u_from = math.log(abs(self.w_from - tail_anchor))
            self.u_to = math.log(abs(self.w_to - tail_anchor))
        self.theta = np.linspace(0.0, 1.0, cells + 1)
        pieces = composite_gauss_legendre(self.dxi_dtheta, self.theta, _GL_POINTS)
        self._xi0 = np.concatenate([[0.0], np.cumsum(pieces)])

    def shifted(self, delta):
        other = object.__new__(Parametrization)
        other.__dict__.update(self.__dict__)
        other.offset = self.offset + delta
        return other

    # -- maps -----------------------------------------------------------------

    def _u(self, theta):
        theta = np.asarray(theta, dtype=float)
        du = self.u_to - self.u_from
        return np.where(
            theta <= 0.5,
            self.u_from + du * smoothstep(theta),
            self.u_to - du * smoothstep(1.0 - theta),
        )

    def w_of_theta(self, theta):
        u = self._u(theta)
        if self.tail_anchor is None:
            return u
        return self.tail_anchor + self._sigma * np.exp(u)

    def dw_dtheta(self, theta):
        theta = np.asarray(theta, dtype=float)
        du = (self.u_to - self.u_from) * 6.0 * theta * (1.0 - theta)
        if self.tail_anchor is None:
            return du
        return du * self._sigma * np.exp(self._u(theta))

    def offsets(self, theta):
        """Exact ``w - w_end`` for both ends, free of the cancellation in ``w - w_end``."""
        theta = np.asarray(theta, dtype=float)
        if self.tail_anchor is None:
            du = self.u_to - self.u_from
            return {self.w_from: du * smoothstep(theta), self.w_to: -du * smoothstep(1.0 - theta)}
        return {self.tail_anchor: self._sigma * np.exp(self._u(theta))}

    def dxi_dtheta(self, theta):
        w = self.w_of_theta(theta)
        with np.errstate(invalid="ignore", divide="ignore"):
            if getattr(self.density, "uses_offsets", False):
                rho = self.density(w, self.offsets(theta))
            else:
                rho = self.density(w)
            return rho * np.abs(self.dw_dtheta(theta))

    def theta_of_w(self, w):
        w = np.asarray(w, dtype=float)
        if self.tail_anchor is None:
            u = w
        else:
            u = np.log(np.abs(w - self.tail_anchor))
        span = self.u_to - self.u_from
        return smoothstep_inverse((u - self.u_from) / span, (self.u_to - u) / span)

    # -- xi evaluation ----------------------------------------------------------

    @property
    def xi_nodes(self):
        return self._xi0 + self.offset

    @property
    def w_nodes(self):
        return self.w_of_theta(self.theta)

    @property
    def length(self):
        return float(self._xi0[-1])

    def xi_of_theta(self, theta):
        theta = np.clip(np.atleast_1d(np.asarray(theta, dtype=float)), 0.0, 1.0)
        cells = len(self.theta) - 1
        idx = np.clip(np.floor(theta * cells).astype(int), 0, cells - 1)
        return self._xi_in_cell(idx, theta)

    def _xi_in_cell(self, idx, theta):
        x, wts = gauss_legendre(_GL_POINTS)
        lo = self.theta[idx]
        half = 0.5 * (theta - lo)
        pts = (lo + half)[:, None] + half[:, None] * x[None, :]
        vals = self.dxi_dtheta(pts.ravel()).reshape(pts.shape)
        return self._xi0[idx] + half * (vals @ wts) + self.offset

    def xi_of_w(self, w):
        return self.xi_of_theta(self.theta_of_w(w))

    def theta_of_xi(self, xi):
        """Invert xi(theta) by safeguarded Newton iteration inside the owning cell."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        nodes = self.xi_nodes
        cells = len(self.theta) - 1
        idx = np.clip(np.searchsorted(nodes, xi, side="right") - 1, 0, cells - 1)
        lo = self.theta[idx].copy()
        hi = self.theta[idx + 1].copy()
        f_lo = nodes[idx] - xi
        f_hi = nodes[idx + 1] - xi
        denom = f_hi - f_lo
        t = np.where(denom > 0, lo - f_lo * (hi - lo) / np.where(denom > 0, denom, 1.0), lo)
        t = np.clip(t, lo, hi)
        exact_lo = f_lo == 0
        exact_hi = f_hi == 0
        for _ in range(80):
            f = self._xi_in_cell(idx, t) - xi
            lo = np.where(f <= 0, t, lo)
            hi = np.where(f > 0, t, hi)
            with np.errstate(invalid="ignore", divide="ignore"):
                slope = self.dxi_dtheta(t)
                newton = t - f / slope
            ok = np.isfinite(newton) & (newton > lo) & (newton < hi)
            t_new = np.where(ok, newton, 0.5 * (lo + hi))
            done = np.abs(t_new - t) <= 1e-16 + 1e-15 * t
            t = t_new
            if np.all(done | (hi - lo <= 1e-16)):
                break
        t = np.where(exact_lo, self.theta[idx], t)
        t = np.where(exact_hi, self.theta[idx + 1], t)
        return t

    def w_of_xi(self, xi):
        return self.w_of_theta(self.theta_of_xi(xi))

    def table_interpolant(self):
        """Monotone C^1 interpolant xi(w) through the stored nodes."""
        w = self.w_nodes
        xi = self.xi_nodes
        order = np.argsort(w)
        return PchipInterpolator(w[order], xi[order])


@dataclass(frozen=True)
class TailExtension:
    """Exponential continuation ``w_lim + sigma*eps*exp(-rate*|xi - xi_cut|)`` past the table."""

    side: str          # "left" | "right"
    xi_cut: float
    w_lim: float
    sigma: float
    eps: float
    rate: float

    def contains(self, xi):
        return xi < self.xi_cut if self.side == "left" else xi > self.xi_cut

    def w(self, xi):
        return self.w_lim + self.sigma * self.eps * np.exp(-self.rate * np.abs(xi - self.xi_cut))

    def slope(self, xi):
        d = self.w(xi) - self.w_lim
        return self.rate * d if self.side == "left" else -self.rate * d


@dataclass(frozen=True)
class ExpForm:
    """``w = c1 exp(xi - xi0) + c2 exp(-(xi - xi0))``."""

    c1: float
    c2: float
    xi0: float

    def w(self, xi):
        z = np.asarray(xi, dtype=float) - self.xi0
        return self.c1 * np.exp(z) + self.c2 * np.exp(-z)

    def slope(self, xi):
        z = np.asarray(xi, dtype=float) - self.xi0
        return self.c1 * np.exp(z) - self.c2 * np.exp(-z)

    def second(self, xi):
        return self.w(xi)


@dataclass(frozen=True)
class Segment:
    equation: str                 # "nvw" | "ch"
    constants: tuple              # (("k", k),) or (("a", a), ("b", b))
    kind: str                     # "constant" | "monotone"
    xi_range: tuple
    w_ends: tuple                 # w at the left and right xi-ends (limits for tails)
    direction: int = 0            # +1 increasing, -1 decreasing, 0 constant
    ends: tuple = (REGULAR, REGULAR)
    param: Parametrization | None = None
    tail: TailExtension | None = None
    closed_form: ExpForm | None = None
    source: dict | None = None    # construction data, used for serialisation

    @property
    def const(self):
        return dict(self.constants)

    @property
    def wbar(self):
        return self.w_ends[0] if self.kind == "constant" else None

    @property
    def w_range(self):
        return (min(self.w_ends), max(self.w_ends))

    @property
    def orientation(self):
        return {1: "increasing", -1: "decreasing", 0: None}[self.direction]

    def contains(self, xi):
        lo, hi = self.xi_range
        return lo <= xi <= hi

    def shifted(self, delta):
        lo, hi = self.xi_range
        return replace(
            self,
            xi_range=(lo + delta, hi + delta),
            param=None if self.param is None else self.param.shifted(delta),
            tail=None if self.tail is None else replace(self.tail, xi_cut=self.tail.xi_cut + delta),
            closed_form=None
            if self.closed_form is None
            else replace(self.closed_form, xi0=self.closed_form.xi0 + delta),
        )

    def in_tail(self, xi):
        return self.tail is not None and self.tail.contains(xi)

    def w_at(self, xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        lo, hi = self.xi_range
        if np.any((xi < lo) | (xi > hi)):
            raise OutOfDomain(f"xi outside segment range {self.xi_range}")
        if self.kind == "constant":
            return np.full_like(xi, self.w_ends[0])
        if self.closed_form is not None:
            return self.closed_form.w(xi)
        out = np.empty_like(xi)
        in_tail = np.zeros(xi.shape, dtype=bool)
        if self.tail is not None:
            in_tail = self.tail.contains(xi)
            out[in_tail] = self.tail.w(xi[in_tail])
        if np.any(~in_tail):
            out[~in_tail] = self.param.w_of_xi(xi[~in_tail])
        return out

    def slope_at_w(self, w):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.direction / self.param.density(np.asarray(w, dtype=float))

    def slope_at(self, xi):
        """Finite slope at interior points of the segment."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.kind == "constant":
            return np.zeros_like(xi)
        if self.closed_form is not None:
            return self.closed_form.slope(xi)
        out = np.empty_like(xi)
        in_tail = np.zeros(xi.shape, dtype=bool)
        if self.tail is not None:
            in_tail = self.tail.contains(xi)
            out[in_tail] = self.tail.slope(xi[in_tail])
        if np.any(~in_tail):
            out[~in_tail] = self.slope_at_w(self.param.w_of_xi(xi[~in_tail]))
        return out

    def end_slope(self, side):
        """One-sided slope at the ``"left"`` or ``"right"`` xi-end, as an extended real."""
        if self.kind == "constant":
            return 0.0
        end = self.ends[0 if side == "left" else 1]
        xi_end = self.xi_range[0 if side == "left" else 1]
        if self.closed_form is not None:
            return float(self.closed_form.slope(xi_end))
        if end.kind == "singular":
            return math.copysign(math.inf, self.direction)
        if end.kind == "tail":
            return 0.0
        w_end = self.w_ends[0 if side == "left" else 1]
        value = float(self.slope_at_w(w_end))
        if math.isnan(value):
            value = 0.0
        return value

    def xi_of_w(self, w):
        if self.param is None:
            raise ValueError("xi(w) is only tabulated for monotone pieces")
        return self.param.xi_of_w(w)

    def table(self):
        """The stored (w, xi) nodes."""
        if self.param is None:
            return np.empty(0), np.empty(0)
        return self.param.w_nodes, self.param.xi_nodes

    def to_dict(self):
        lo, hi = self.xi_range
        out = {
            "equation": self.equation,
            "constants": dict(self.constants),
            "kind": self.kind,
            "xi_range": [_jnum(lo), _jnum(hi)],
            "w_ends": [float(self.w_ends[0]), float(self.w_ends[1])],
            "orientation": self.orientation,
            "endpoint_flags": [e.to_dict() for e in self.ends],
        }
        if self.param is not None:
            w, xi = self.table()
            stride = max(1, (len(w) - 1) // 64)
            out["param_table"] = {"w": w[::stride].tolist(), "xi": xi[::stride].tolist()}
        if self.closed_form is not None:
            out["closed_form"] = {"c1": self.closed_form.c1, "c2": self.closed_form.c2, "xi0": self.closed_form.xi0}
        return out


def _jnum(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def constant_segment(equation, constants, wbar, xi_lo=-math.inf, xi_hi=math.inf, source=None):
    return Segment(
        equation=equation,
        constants=tuple(constants),
        kind="constant",
        xi_range=(xi_lo, xi_hi),
        w_ends=(float(wbar), float(wbar)),
        source=source,
    )


def monotone_segment(equation, constants, density, w_from, w_to, start_end, finish_end,
                     tail_eps=1e-8, cells=DEFAULT_CELLS, source=None):
    """Tabulate the piece running from ``w_from`` to ``w_to`` with xi increasing.

    ``start_end``/``finish_end`` are the :class:`Endpoint` flags at ``w_from``/``w_to``.
    A ``"tail"`` flag means the given w value is the limit; the table stops
    ``tail_eps`` short of it and an exponential extension covers the rest.
    The returned segment starts at xi = 0 (or ends at xi = 0 with a left tail).
    """
    if start_end.kind == "tail" and finish_end.kind == "tail":
        raise ValueError("a piece with decay tails at both ends is not supported")
    direction = 1 if w_to > w_from else -1
    anchor = None
    lo_w, hi_w = w_from, w_to
    if start_end.kind == "tail":
        anchor = w_from
        lo_w = w_from + direction * tail_eps
    if finish_end.kind == "tail":
        anchor = w_to
        hi_w = w_to - direction * tail_eps
    param = Parametrization(density, lo_w, hi_w, tail_anchor=anchor, cells=cells)
    length = param.length
    tail = None
    if start_end.kind == "tail":
        sigma = math.copysign(1.0, lo_w - w_from)
        tail = TailExtension("left", 0.0, w_from, sigma, tail_eps, start_end.rate)
        xi_range = (-math.inf, length)
    elif finish_end.kind == "tail":
        sigma = math.copysign(1.0, hi_w - w_to)
        tail = TailExtension("right", length, w_to, sigma, tail_eps, finish_end.rate)
        xi_range = (0.0, math.inf)
    else:
        xi_range = (0.0, length)
    seg = Segment(
        equation=equation,
        constants=tuple(constants),
        kind="monotone",
        xi_range=xi_range,
        w_ends=(float(w_from), float(w_to)),
        direction=direction,
        ends=(start_end, finish_end),
        param=param,
        tail=tail,
        source=source,
    )
    if start_end.kind == "tail":
        seg = seg.shifted(-length)
    return seg


def layout_segments(raw, origin, lengths):
    """Place pieces end to end so that the first one ends at ``origin``.

    ``raw`` holds unplaced constant segments and monotone segments at any
    offset; ``lengths`` gives the requested extent of each constant piece
    (None means semi-infinite, allowed only at either end of the list).
    """
    n = len(raw)
    placed = []
    cursor = None
    for i, (seg, length) in enumerate(zip(raw, lengths)):
        last = i == n - 1
        if seg.kind == "constant":
            if i == 0:
                hi = origin if n > 1 or length is not None else math.inf
                lo = -math.inf if length is None else origin - length
                placed.append(replace(seg, xi_range=(lo, hi)))
                cursor = hi
            elif last and length is None:
                placed.append(replace(seg, xi_range=(cursor, math.inf)))
                cursor = math.inf
            else:
                if length is None:
                    raise ValueError(f"interior constant piece {i} needs a length")
                placed.append(replace(seg, xi_range=(cursor, cursor + length)))
                cursor += length
            continue
        lo, hi = seg.xi_range
        if i == 0:
            if math.isfinite(hi):
                shift = origin - hi
            elif math.isfinite(lo):
                shift = origin - lo
            else:
                shift = 0.0
        else:
            if not math.isfinite(lo):
                raise ValueError(f"piece {i} extends to -inf but is not first")
            shift = cursor - lo
        moved = seg.shifted(shift)
        if not last and not math.isfinite(moved.xi_range[1]):
            raise ValueError(f"piece {i} extends to +inf but is not last")
        placed.append(moved)
        cursor = moved.xi_range[1]
    return placed

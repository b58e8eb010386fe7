"""Piecewise traveling-wave profiles: evaluation, sampling and export."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfDomain

GLUE_KINDS = ("Cusp", "InflectionSingular", "ConstantJunction", "Peak", "SmoothC1")


def jnum(x):
    """JSON-safe float: infinities become strings."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def from_jnum(x):
    if isinstance(x, str):
        return float(x)
    return float(x)


@dataclass(frozen=True)
class GlueVerdict:
    admissible: bool
    kind: str | None = None
    reason: str | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "admissible": self.admissible,
            "kind": self.kind,
            "reason": self.reason,
            "details": {k: jnum(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v
                        for k, v in self.details.items()},
        }


@dataclass(frozen=True)
class GluePoint:
    xi_star: float
    kind: str | None
    w_star: float
    left_slope_limit: float
    right_slope_limit: float
    left_constants: dict
    right_constants: dict
    verdict: GlueVerdict | None = None

    def to_dict(self):
        return {
            "xi_star": float(self.xi_star),
            "kind": self.kind,
            "w_star": float(self.w_star),
            "left_slope_limit": jnum(self.left_slope_limit),
            "right_slope_limit": jnum(self.right_slope_limit),
            "left_constants": dict(self.left_constants),
            "right_constants": dict(self.right_constants),
            "verdict": None if self.verdict is None else self.verdict.to_dict(),
        }


@dataclass(frozen=True)
class Profile:
    s: float
    equation: str                  # "nvw" | "ch"
    segments: tuple
    breakpoints: tuple
    metadata: dict = field(default_factory=dict)

    @property
    def domain(self):
        return self.segments[0].xi_range[0], self.segments[-1].xi_range[1]

    @property
    def admissible(self):
        return all(g.verdict is None or g.verdict.admissible for g in self.breakpoints)

    def segment_index(self, xi):
        """Index of the segment owning ``xi`` (the left one at a glue point)."""
        lo, hi = self.domain
        if not lo <= xi <= hi or math.isnan(xi):
            raise OutOfDomain(f"xi={xi} outside profile domain [{lo}, {hi}]")
        for i, seg in enumerate(self.segments):
            if xi <= seg.xi_range[1]:
                return i
        return len(self.segments) - 1

    def to_dict(self):
        return {
            "equation": self.equation,
            "s": float(self.s),
            "domain": [jnum(v) for v in self.domain],
            "segments": [seg.to_dict() for seg in self.segments],
            "breakpoints": [g.to_dict() for g in self.breakpoints],
            "metadata": self.metadata,
        }


def profile_from_dict(data):
    """Rebuild a profile from its JSON form by replaying the stored construction."""
    meta = data.get("metadata", {})
    builder = meta.get("builder")
    if builder == "assemble_nvw":
        from .coefficients import CoefficientSpec
        from .config import ToleranceConfig
        from .nvw import NvwPlan, assemble_nvw
        return assemble_nvw(
            CoefficientSpec.from_dict(meta["coefficient"]),
            data["s"],
            NvwPlan.from_dict(meta["plan"]),
            ToleranceConfig(**meta["tolerances"]),
            strict=meta.get("strict", True),
        )
    if builder == "assemble_ch":
        from .ch import ChPlan, assemble_ch
        from .config import ToleranceConfig
        return assemble_ch(
            data["s"], meta["a"], ChPlan.from_dict(meta["plan"]),
            ToleranceConfig(**meta["tolerances"]), strict=meta.get("strict", True),
        )
    if builder == "build_ch_profile":
        from .ch import build_ch_profile
        from .config import ToleranceConfig
        return build_ch_profile(
            data["s"], meta["a"], meta["b"], meta["kind"], window=tuple(meta["window"]),
            tol=ToleranceConfig(**meta["tolerances"]), plateau=meta.get("plateau", 1.0),
        )
    raise ValueError(f"profile JSON carries no known builder ({builder!r})")


def profile_eval(p, xi):
    """``(w, left_slope, right_slope)`` at ``xi``; slopes are extended reals."""
    xi = float(xi)
    i = p.segment_index(xi)
    seg = p.segments[i]
    lo, hi = seg.xi_range
    w = float(seg.w_at(xi)[0])
    if xi == hi and i + 1 < len(p.segments):
        nxt = p.segments[i + 1]
        return w, seg.end_slope("right"), nxt.end_slope("left")
    if xi == hi:
        slope = seg.end_slope("right")
        return w, slope, slope
    if xi == lo:
        slope = seg.end_slope("left")
        return w, slope, slope
    if seg.param is not None and seg.closed_form is None and not seg.in_tail(xi):
        slope = float(seg.slope_at_w(w))
    else:
        slope = float(seg.slope_at(xi)[0])
    return w, slope, slope


def profile_sample(p, xi_grid):
    """Rows ``(xi, w, slope, flag)``; ``slope`` is None where the one-sided slopes differ."""
    xi_grid = np.asarray(xi_grid, dtype=float)
    lo, hi = p.domain
    if xi_grid.size and (np.any(xi_grid < lo) or np.any(xi_grid > hi) or np.any(np.isnan(xi_grid))):
        raise OutOfDomain(f"sample grid leaves the profile domain [{lo}, {hi}]")
    ends = np.array([seg.xi_range[1] for seg in p.segments])
    owner = np.minimum(np.searchsorted(ends, xi_grid, side="left"), len(p.segments) - 1)
    w = np.empty_like(xi_grid)
    slope = np.empty_like(xi_grid)
    flags = np.array(["ok"] * xi_grid.size, dtype=object)
    for i, seg in enumerate(p.segments):
        mask = owner == i
        if not np.any(mask):
            continue
        pts = xi_grid[mask]
        s_lo, s_hi = seg.xi_range
        interior = (pts > s_lo) & (pts < s_hi)
        vals = seg.w_at(pts)
        sl = np.full(pts.shape, np.nan)
        if np.any(interior):
            sl[interior] = seg.slope_at(pts[interior])
        w[mask] = vals
        slope[mask] = sl
        if seg.tail is not None:
            tail_mask = seg.tail.contains(pts)
            sub = flags[mask]
            sub[tail_mask] = "tail"
            flags[mask] = sub
    rows = []
    for j, x in enumerate(xi_grid):
        if np.isnan(slope[j]):
            wv, left, right = profile_eval(p, x)
            if left == right and math.isfinite(left):
                rows.append((float(x), float(w[j]), float(left), flags[j]))
            else:
                rows.append((float(x), float(w[j]), None, "singular"))
        else:
            rows.append((float(x), float(w[j]), float(slope[j]), flags[j]))
    return rows


def profile_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["xi", "w", "slope", "flag"])
    for xi, w, slope, flag in rows:
        writer.writerow([format(xi, ".17g"), format(w, ".17g"), "" if slope is None else format(slope, ".17g"), flag])
    return buf.getvalue()

"""wavectl: classify, build, verify and sweep traveling waves from a JSON job file.

Exit codes: 0 success, 1 inadmissible or failed verification, 2 input error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import errors
from .ch import ChPlan, assemble_ch, build_ch_profile, classify_ch
from .coefficients import CoefficientSpec
from .config import ToleranceConfig
from .nvw import NvwPlan, assemble_nvw, glue_candidates, speed_regime
from .profile import profile_csv, profile_from_dict, profile_sample
from .serialize import dumps
from .weak import residual_suite

log = logging.getLogger("wavectl")

_NUM = {"type": "number"}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_PIECE = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["const", "mono", "exp"]},
        "w": _NUM, "length": _NUM, "k": _NUM, "a": _NUM, "b": _NUM,
        "dir": {"enum": ["inc", "dec"]}, "from": _NUM, "to": _NUM,
        "c1": _NUM, "c2": _NUM,
        "xi_lo": {"type": ["number", "string"]}, "xi_hi": {"type": ["number", "string"]},
    },
    "additionalProperties": False,
}
JOB_SCHEMA = {
    "type": "object",
    "required": ["equation"],
    "additionalProperties": False,
    "properties": {
        "equation": {"enum": ["nvw", "ch"]},
        "coefficient": {"type": "object", "required": ["family"]},
        "s": _NUM,
        "a": _NUM,
        "b": _NUM,
        "kind": {"type": "string"},
        "window": _PAIR,
        "plateau": _NUM,
        "strict": {"type": "boolean"},
        "plan": {
            "oneOf": [
                {"const": "auto"},
                {
                    "type": "object",
                    "required": ["pieces"],
                    "additionalProperties": False,
                    "properties": {"pieces": {"type": "array", "items": _PIECE}, "origin": _NUM},
                },
            ]
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {name: _NUM for name in ToleranceConfig().to_dict()},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"enum": ["csv", "json"]},
                "path": {"type": "string"},
                "grid": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["xi_lo", "xi_hi", "n"],
                    "properties": {"xi_lo": _NUM, "xi_hi": _NUM, "n": {"type": "integer", "minimum": 1}},
                },
            },
        },
        "u_range": _PAIR,
        "scan_points": {"type": "integer", "minimum": 2},
        "verify": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"threshold": _NUM, "bumps": {"type": "integer", "minimum": 1}},
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "s": {"type": "array", "items": _NUM},
                "a": {"type": "array", "items": _NUM},
                "b": {"type": "array", "items": _NUM},
                "coefficient": {"type": "object"},
                "random": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["n"],
                    "properties": {"n": {"type": "integer", "minimum": 0},
                                   "s": _PAIR, "a": _PAIR, "b": _PAIR},
                },
            },
        },
    },
}


class InputError(Exception):
    pass


_INPUT_ERRORS = (
    InputError, ValueError, KeyError, TypeError,
    errors.ValueMismatch, errors.SignViolation, errors.DegenerateEndpoint, errors.SpeedRegimeError,
    errors.NotConstructible, errors.ComplexSlope, errors.OutOfDomain, errors.UnsupportedOverlap,
    errors.NoCandidates, errors.DegenerateEverywhere,
)
_NUMERICAL_ERRORS = (errors.QuadratureFailure, errors.DivergentIntegral, FloatingPointError)


def load_job(path):
    try:
        job = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read job file {path}: {exc}") from exc
    try:
        jsonschema.validate(job, JOB_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InputError(f"job file rejected: {exc.message}") from exc
    return job


def tolerances(job, overrides):
    tol = ToleranceConfig(**job.get("tolerances", {}))
    extra = {}
    for item in overrides or []:
        if "=" not in item:
            raise InputError(f"--tol expects KEY=VAL, got {item!r}")
        key, val = item.split("=", 1)
        try:
            extra[key.strip()] = float(val)
        except ValueError as exc:
            raise InputError(f"--tol {key}: {val!r} is not a number") from exc
    return tol.with_overrides(**extra) if extra else tol


def _need(job, *keys):
    for key in keys:
        if key not in job:
            raise InputError(f"job file needs {key!r}")


# -- library calls the commands wrap -------------------------------------------------

def classify_job(job, tol):
    if job["equation"] == "ch":
        _need(job, "s", "a", "b")
        return classify_ch(job["s"], job["a"], job["b"]).to_dict()
    _need(job, "s", "coefficient")
    spec = CoefficientSpec.from_dict(job["coefficient"])
    s = job["s"]
    regime = speed_regime(spec, s, tol)
    out = {"regime": regime.to_dict(), "coefficient": spec.to_dict(),
           "k1_bound": spec.k1_bound, "k2_bound": spec.k2_bound}
    u_range = job.get("u_range", [0.0, 2 * np.pi])
    try:
        cands = glue_candidates(spec, s, u_range, job.get("scan_points", 10_000), tol)
        out["candidates"] = [c.to_dict() for c in cands]
    except errors.NoCandidates as exc:
        out["candidates"] = []
        out["note"] = str(exc)
    except errors.DegenerateEverywhere as exc:
        out["candidates"] = []
        out["note"] = str(exc)
        out["degenerate_everywhere"] = True
    return out


def build_job(job, tol, strict=None):
    strict = job.get("strict", True) if strict is None else strict
    _need(job, "s")
    plan = job.get("plan")
    if job["equation"] == "nvw":
        _need(job, "coefficient")
        if not isinstance(plan, dict):
            raise InputError("an nvw build needs a plan")
        spec = CoefficientSpec.from_dict(job["coefficient"])
        return assemble_nvw(spec, job["s"], NvwPlan.from_dict(plan), tol, strict=strict), spec
    _need(job, "a")
    if plan is None or plan == "auto":
        _need(job, "b")
        window = tuple(job.get("window", (-10.0, 10.0)))
        return build_ch_profile(job["s"], job["a"], job["b"], job.get("kind"), window, tol,
                                job.get("plateau", 1.0)), None
    return assemble_ch(job["s"], job["a"], ChPlan.from_dict(plan), tol, strict=strict), None


def default_grid(p, job):
    grid = job.get("output", {}).get("grid")
    if grid:
        return np.linspace(grid["xi_lo"], grid["xi_hi"], grid["n"])
    lo, hi = p.domain
    return np.linspace(max(lo, -10.0), min(hi, 10.0), 401)


def sweep_rows(job, seed):
    sweep = job.get("sweep", {})
    if job["equation"] == "ch":
        if "random" in sweep:
            spec = sweep["random"]
            rng = np.random.default_rng(seed)
            n = spec["n"]
            cols = [rng.uniform(*spec.get(k, (-5.0, 5.0)), size=n) for k in ("s", "a", "b")]
            return [{"s": float(s), "a": float(a), "b": float(b)} for s, a, b in zip(*cols)]
        return [{"s": s, "a": a, "b": b}
                for s, a, b in itertools.product(sweep.get("s", []), sweep.get("a", []), sweep.get("b", []))]
    coeff = dict(sweep.get("coefficient", job.get("coefficient", {})))
    family = coeff.pop("family", None)
    names = sorted(coeff)
    values = [coeff[n] if isinstance(coeff[n], list) else [coeff[n]] for n in names]
    rows = []
    for s in sweep.get("s", []):
        for combo in itertools.product(*values):
            rows.append({"s": s, "coefficient": {"family": family, **dict(zip(names, combo))}})
    return rows


def _sweep_row(args):
    equation, row, tol_dict, u_range, scan = args
    tol = ToleranceConfig(**tol_dict)
    try:
        if equation == "ch":
            tax = classify_ch(row["s"], row["a"], row["b"])
            return {**row, "kind": tax.kind, "inner_kind": tax.inner_kind,
                    "zeros": [[v, m] for v, m in tax.zeros]}
        job = {"equation": "nvw", "s": row["s"], "coefficient": row["coefficient"],
               "u_range": u_range, "scan_points": scan}
        out = classify_job(job, tol)
        return {**row, "regime": out["regime"]["kind"], "candidates": len(out["candidates"])}
    except Exception as exc:  # recorded per row, the sweep continues
        return {**row, "error": f"{type(exc).__name__}: {exc}"}


def sweep_job(job, tol, seed=0, jobs=1):
    rows = sweep_rows(job, seed)
    args = [(job["equation"], row, tol.to_dict(), job.get("u_range", [0.0, 2 * np.pi]),
             job.get("scan_points", 10_000)) for row in rows]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_row, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        results = [_sweep_row(a) for a in args]
    return {"equation": job["equation"], "rows": results}


# -- commands --------------------------------------------------------------------------

def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    log.info("wrote %s", path)


def cmd_classify(args, job, tol):
    sys.stdout.write(dumps(classify_job(job, tol)))
    return 0


def cmd_build(args, job, tol):
    try:
        p, _ = build_job(job, tol)
    except errors.InadmissiblePlan as exc:
        sys.stdout.write(dumps({"status": "inadmissible", "junction": exc.junction, "reason": exc.reason}))
        return 1
    out_dir = Path(args.out)
    output = job.get("output", {})
    fmt = output.get("format", "csv")
    rows = profile_sample(p, default_grid(p, job))
    sample_path = out_dir / output.get("path", f"profile.{fmt}")
    if fmt == "csv":
        _write(sample_path, profile_csv(rows))
    else:
        _write(sample_path, dumps([{"xi": x, "w": w, "slope": sl, "flag": fl} for x, w, sl, fl in rows]))
    profile_path = out_dir / "profile.json"
    if profile_path != sample_path:
        _write(profile_path, dumps(p.to_dict()))
    summary = {
        "status": "ok",
        "equation": p.equation,
        "s": p.s,
        "segments": len(p.segments),
        "breakpoints": [g.kind for g in p.breakpoints],
        "domain": list(p.domain),
        "files": sorted({str(sample_path), str(profile_path)}),
    }
    sys.stdout.write(dumps(summary))
    return 0


def cmd_verify(args, job, tol):
    spec = CoefficientSpec.from_dict(job["coefficient"]) if job["equation"] == "nvw" else None
    if args.profile:
        try:
            data = json.loads(Path(args.profile).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read profile {args.profile}: {exc}") from exc
        p = profile_from_dict(data)
    else:
        p, _ = build_job(job, tol, strict=False)
    settings = job.get("verify", {})
    threshold = settings.get("threshold", 1e-5)
    bumps = args.bumps if args.bumps is not None else settings.get("bumps", 16)
    report = residual_suite(p, spec, bumps, args.seed, tol)
    text = dumps(report.to_dict(threshold))
    _write(Path(args.out) / "report.json", text)
    sys.stdout.write(text)
    return 0 if report.passes(threshold) else 1


def cmd_sweep(args, job, tol):
    result = sweep_job(job, tol, args.seed, args.jobs)
    output = job.get("output", {})
    if output.get("format") == "csv":
        keys = sorted({k for row in result["rows"] for k in row if not isinstance(row[k], (dict, list))})
        lines = [",".join(keys)]
        for row in result["rows"]:
            lines.append(",".join("" if row.get(k) is None else str(row.get(k)) for k in keys))
        _write(Path(args.out) / output.get("path", "sweep.csv"), "\n".join(lines) + "\n")
    sys.stdout.write(dumps(result))
    return 0


COMMANDS = {"classify": cmd_classify, "build": cmd_build, "verify": cmd_verify, "sweep": cmd_sweep}


def parser():
    ap = argparse.ArgumentParser(prog="wavectl", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--spec", required=True, help="JSON job file")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--bumps", type=int, default=None, help="number of test functions for verify")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweep")
    ap.add_argument("--tol", action="append", default=[], metavar="KEY=VAL")
    ap.add_argument("--profile", default=None, help="profile JSON to verify instead of building")
    return ap


def main(argv=None):
    level = os.environ.get("WAVECTL_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        job = load_job(args.spec)
        tol = tolerances(job, args.tol)
        if args.jobs < 1:
            raise InputError("--jobs must be at least 1")
        log.info("running %s on %s", args.command, args.spec)
        return COMMANDS[args.command](args, job, tol)
    except errors.InadmissiblePlan as exc:
        sys.stderr.write(f"inadmissible: {exc}\n")
        return 1
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

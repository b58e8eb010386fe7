"""Build the SqrtSin(4) wave at s = 2, k = 1 and print its layout, half-length and integral of w_xi^2."""
import argparse
import math

import numpy as np

from travwave import CoefficientSpec, assemble_nvw, profile_sample, wxi_l2
from travwave.nvw import ConstPiece, MonoPiece, NvwPlan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--csv", help="write (xi, w) samples here")
    args = ap.parse_args()
    spec = CoefficientSpec.sqrt_sin(4.0)
    plan = NvwPlan((ConstPiece(math.pi), MonoPiece(args.k, "dec", math.pi, 0.0), ConstPiece(0.0)))
    p = assemble_nvw(spec, 2.0, plan)
    mono = p.segments[1]
    print(f"segments: {[seg.kind for seg in p.segments]}")
    print(f"monotone piece xi-range: {mono.xi_range}")
    print(f"half-length: {0.5 * (mono.xi_range[1] - mono.xi_range[0]):.15f}")
    print(f"int w_xi^2 dxi: {wxi_l2(mono, spec, 2.0):.12f}")
    if args.csv:
        xi = np.linspace(mono.xi_range[0] - 1, mono.xi_range[1] + 1, 401)
        rows = profile_sample(p, xi)
        np.savetxt(args.csv, [(r[0], r[1]) for r in rows], delimiter=",", header="xi,w", comments="")


if __name__ == "__main__":
    main()

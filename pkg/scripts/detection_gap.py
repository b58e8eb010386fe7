"""Compare weak-residual suite values on admissible profiles and on deliberately broken ones."""
import argparse
import math

from travwave import CoefficientSpec, assemble_ch, assemble_nvw, build_ch_profile, residual_suite
from travwave.ch import ChPlan, ConstPiece as ChConst, ExpPeakPiece, MonoPiece as ChMono
from travwave.nvw import ConstPiece, MonoPiece, NvwPlan


def cases():
    spec = CoefficientSpec.sqrt_sin(4.0)
    gap = math.sqrt(0.8)
    yield "peakon", build_ch_profile(1.0, 0.0, 0.0), None
    yield "cuspon", build_ch_profile(1.0, 0.875, 0.5), None
    yield "stumpon", build_ch_profile(1.0, 0.5, -1.0), None
    yield "nvw intro", assemble_nvw(spec, 2.0, NvwPlan((ConstPiece(math.pi), MonoPiece(1.0, "dec", math.pi, 0.0),
                                                        ConstPiece(0.0)))), spec
    a_plan = ChPlan((ExpPeakPiece(1.0, 0.0, -1.0, 0.0), ExpPeakPiece((1 - gap) / 2, (1 + gap) / 2, 0.0, 1.0)))
    yield "CH a-mismatch 0.1", assemble_ch(1.0, 0.0, a_plan, strict=False), None
    k_plan = NvwPlan((ConstPiece(math.pi), MonoPiece(1.0, "dec", math.pi, math.pi / 2),
                      MonoPiece(4.0, "dec", math.pi / 2, 0.0), ConstPiece(0.0)))
    yield "NVW k 1 vs 4", assemble_nvw(spec, 2.0, k_plan, strict=False), spec
    # cuspon halves (double zero w_min) around a plateau at w = s that breaks 2a = s^2, b = -s^3
    for s, a, b, w_min in ((1.0, 0.875, 0.5, -0.5), (1.0, 8.0, 20.0, -2.0)):
        plan = ChPlan((ChMono(b, "inc", w_min, s), ChConst(s, 1.0), ChMono(b, "dec", s, w_min)))
        yield f"plateau on cuspon {(s, a, b)}", assemble_ch(s, a, plan, strict=False), None


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bumps", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name, p, spec in cases():
        r = residual_suite(p, spec, args.bumps, args.seed)
        print(f"{name:36s} {r.max_normalized:.3e}")


if __name__ == "__main__":
    main()

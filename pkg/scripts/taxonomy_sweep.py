"""Classify random (s, a, b) triples and print how often each wave kind occurs."""
import argparse
from collections import Counter

import numpy as np

from travwave import classify_ch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--bound", type=float, default=5.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    counts = Counter(classify_ch(*t).kind for t in rng.uniform(-args.bound, args.bound, size=(args.n, 3)))
    for kind, n in counts.most_common():
        print(f"{kind:24s} {n:6d}  {n / args.n:6.1%}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Avalanche experiment: distribution of tag Hamming distances under
single-bit message flips, for both walk variants at the default profile.

A well-mixing keyed hash should flip each of the h output bits
independently with probability 1/2, i.e. Binomial(h, 1/2): mean h/2,
standard deviation sqrt(h)/2.
"""

import argparse
import math
import random

from dmac import analysis
from dmac.mac import Variant, default_profile, keygen


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--message-bits", type=int, default=512)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    for variant in Variant:
        params = default_profile().with_overrides(variant=variant)
        rng = random.Random(args.seed)
        key = keygen(params, 10, entropy=rng.randbytes)
        report = analysis.avalanche(
            params, key, args.trials, message_bits=args.message_bits, rng=rng
        )
        h = params.tag_bits
        print(
            f"{variant.value}: mean {report.mean_hamming:7.3f}  "
            f"std {report.std_hamming:6.3f}   "
            f"(binomial null: mean {h / 2:.1f}, std {math.sqrt(h) / 2:.3f})  "
            f"{'in band' if report.within_binomial_band() else 'OUT OF BAND'}"
        )


if __name__ == "__main__":
    main()

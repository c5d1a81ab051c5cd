"""Scan random instances for profitable unilateral deviations.

Samples seeded instances and truthful profiles, runs the exhaustive
per-voter deviation search, and reports every profitable deviation it
finds.  Structured profiles (with the all-or-nothing bit disabled)
should produce zero findings; general profiles usually yield some.

Usage: python scripts/manipulation_scan.py [--kind structured] [--samples 50]
       [--seed 0] [--include-complements]
"""

import argparse
import sys
import time

from pbtally import gen, strategy
from pbtally.errors import PBError


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", default="structured")
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--include-complements", action="store_true",
                    help="let deviations set the all-or-nothing bit")
    ap.add_argument("--projects", type=int, nargs=2, default=(3, 7), metavar=("LO", "HI"))
    ap.add_argument("--budget", type=int, nargs=2, default=(2, 4), metavar=("LO", "HI"))
    args = ap.parse_args(argv)

    kind = gen.normalize_kind(args.kind)
    found = 0
    skipped = 0
    t0 = time.time()
    for i in range(args.samples):
        params = gen.GenParams(
            seed=args.seed + i, kind=kind,
            projects=tuple(args.projects), budget=tuple(args.budget),
        )
        try:
            instance = gen.gen_instance(params)
            votes = gen.gen_profile(instance, params)
            results = strategy.nash_check(
                instance, votes, include_complements=args.include_complements,
            )
        except PBError as exc:
            skipped += 1
            print(f"seed {params.seed}: skipped ({exc})")
            continue
        for r in results:
            found += 1
            print(
                f"seed {params.seed}: voter {r.voter_id} gains "
                f"{r.delta} ({sorted(r.truthful_outcome)} -> {sorted(r.deviated_outcome)})"
            )
    dt = time.time() - t0
    print(
        f"{args.samples} samples, kind={kind}: {found} profitable deviations, "
        f"{skipped} skipped, {dt:.1f}s"
    )
    return 1 if (found and kind != gen.KIND_GENERAL) else 0


if __name__ == "__main__":
    sys.exit(main())

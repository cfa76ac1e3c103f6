#!/usr/bin/env python3
"""Render side-by-side ship and reflector-array range-velocity maps.

Writes one PNG (and .npz) per class for a chosen sea state and azimuth,
plus the extracted feature values, so the class contrast is visible at
a glance: the ship's points fall on a line (tiny MWR), the array's
points scatter in velocity.
"""
import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from agilerv.cli import main

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--hs", type=float, default=1.0)
    parser.add_argument("--theta", type=float, default=45.0)
    parser.add_argument("--trial", type=int, default=0)
    parser.add_argument("--out-dir", default="out/maps")
    args = parser.parse_args()

    for kind in ("ship", "array"):
        rc = main([
            "simulate", "--kind", kind, "--hs", str(args.hs),
            "--theta", str(args.theta), "--trial", str(args.trial),
            "--out-dir", args.out_dir,
        ])
        if rc != 0:
            raise SystemExit(rc)
    print(json.dumps({"out_dir": args.out_dir}, indent=2))

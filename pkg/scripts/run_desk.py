#!/usr/bin/env python3
"""Run the desk-scale experiment end to end and print the report.

Equivalent to `agilerv report --config configs/desk.json`; pass
--paper-scale (and expect a couple of hours) for the full-size dataset.
"""
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from agilerv.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--config" not in args:
        args = ["--config",
                os.path.join(os.path.dirname(__file__), "..", "configs",
                             "desk.json")] + args
    raise SystemExit(main(["report", *args]))

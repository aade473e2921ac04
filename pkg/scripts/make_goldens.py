#!/usr/bin/env python3
"""Regenerate the golden CLI reports under tests/golden/.

Run after any intentional change to report contents:

    python3 scripts/make_goldens.py
"""

from __future__ import annotations

import contextlib
import io
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from degenkit.cli import main  # noqa: E402

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"

CASES = {
    "analyze_example_3_4": ["analyze", "example_3_4", "--json"],
    "analyze_tate_u1u2": ["analyze", "tate_u1u2", "--json"],
    "analyze_product_tate": ["analyze", "product_tate", "--json"],
    "analyze_generated_ta_seed7": ["analyze", "generated_ta_seed7", "--json"],
    "analyze_generated_nonta_seed11": ["analyze", "generated_nonta_seed11", "--json"],
    "trait_example_3_4_11": ["trait", "example_3_4", "--profile", "1,1", "--json"],
    "trait_example_3_4_23_l2": ["trait", "example_3_4", "--profile", "2,3", "--l", "2", "--json"],
    "oracle_example_3_4_l2": ["oracle", "example_3_4", "--l", "2", "--r", "4",
                              "--profile", "1,1", "--json"],
    "oracle_example_3_4_l3": ["oracle", "example_3_4", "--l", "3", "--json"],
    "converse_example_3_4": ["converse", "example_3_4", "--json"],
    "converse_generated_ta_seed7": ["converse", "generated_ta_seed7", "--json"],
    "psi_example_3_4_kummer23": ["psi", "example_3_4", "--kummer", "2,3", "--json"],
    "curve_genus2_graph": ["curve", "genus2_graph", "--json"],
}


def run() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, argv in CASES.items():
        buffer = io.StringIO()
        with contextlib.redirect_stdout(buffer):
            code = main(argv)
        if code != 0:
            print(f"refusing to record {name}: exit code {code}", file=sys.stderr)
            return 1
        path = GOLDEN / f"{name}.json"
        path.write_text(buffer.getvalue())
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(run())

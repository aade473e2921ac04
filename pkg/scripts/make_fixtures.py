#!/usr/bin/env python3
"""Regenerate the generated part of the fixture corpus from recorded seeds.

The handwritten fixtures (example_3_4, tate_u1u2, product_tate, genus2_graph)
are authored directly; this script rebuilds the randomized ones so their
provenance stays reproducible.  Run from the repository root:

    python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from random import Random

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from degenkit.degeneration import analyze  # noqa: E402
from degenkit.generators import random_datum, random_ta_datum  # noqa: E402
from degenkit.schema import datum_to_dict  # noqa: E402

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "degenkit" / "fixtures"

TA_SEED = 7
NON_TA_SEED = 11


def main() -> int:
    ta = random_ta_datum(Random(TA_SEED), max_mu=4, max_n=3, min_n=2)
    assert analyze(ta).toric_additive
    ta_doc = datum_to_dict(ta)
    ta_doc["name"] = f"generated_ta_seed{TA_SEED}"

    rng = Random(NON_TA_SEED)
    while True:
        datum = random_datum(rng, max_mu=4, max_n=3, min_n=2)
        verdict = analyze(datum)
        if not verdict.toric_additive and verdict.weakly_toric_additive:
            break
    non_ta_doc = datum_to_dict(datum)
    non_ta_doc["name"] = f"generated_nonta_seed{NON_TA_SEED}"

    for doc in (ta_doc, non_ta_doc):
        path = FIXTURES / f"{doc['name']}.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

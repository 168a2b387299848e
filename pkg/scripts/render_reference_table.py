#!/usr/bin/env python3
"""Render the table of bias elements for the bundled reference sample.

Writes the SVG plus the aligned text table and CSV next to it, so the
published layout can be eyeballed without setting up a corpus first.

Usage: python scripts/render_reference_table.py [output-dir]
"""

import sys
from pathlib import Path

from biaselements.fixtures import SAMPLE_TOTAL, load_bundled_fixture
from biaselements.layout import build_layout, render_svg
from biaselements.prevalence import compute_prevalence, render_table
from biaselements.taxonomy import bundled_taxonomy


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("reference-table")
    out_dir.mkdir(parents=True, exist_ok=True)

    taxonomy = bundled_taxonomy()
    _, store = load_bundled_fixture(taxonomy)
    report = compute_prevalence(store.consensus_labels("union"), taxonomy, SAMPLE_TOTAL)

    grid = build_layout(report, taxonomy)
    (out_dir / "bias-elements.svg").write_bytes(render_svg(grid, taxonomy, report))
    (out_dir / "prevalence.txt").write_text(render_table(report, taxonomy), encoding="utf-8")
    (out_dir / "prevalence.csv").write_text(render_table(report, taxonomy, fmt="csv"), encoding="utf-8")
    for name in ("bias-elements.svg", "prevalence.txt", "prevalence.csv"):
        print(f"wrote {out_dir / name}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

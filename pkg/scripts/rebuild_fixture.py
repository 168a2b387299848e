#!/usr/bin/env python3
"""Regenerate the bundled 155-unit reference fixture in place.

The generator is deterministic; running this should be a no-op unless the
taxonomy data or the assignment scheme changed. The test suite asserts the
bundled bytes match a fresh generation, so rerun it after either change.
"""

import sys
from pathlib import Path

from biaselements.fixtures import feasibility, write_bundled_fixture

TARGET = Path(__file__).resolve().parent.parent / "src" / "biaselements" / "data" / "fixtures"


def main() -> int:
    report = feasibility()
    infeasible = {g: row for g, row in report.items() if not row["feasible"]}
    if infeasible:
        print(f"union constraints violated, refusing to write: {infeasible}", file=sys.stderr)
        return 1
    corpus_path, ann_path = write_bundled_fixture(TARGET)
    print(f"wrote {corpus_path}")
    print(f"wrote {ann_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""Generate the six-batch gold annotation fixture used by the stats tests.

Writes one adjudicated record per candidate; counts per batch follow the
published preliminary numbers the toolkit has to reproduce exactly.
Deterministic: rerunning produces identical bytes.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "table1" / "annotations.jsonl"

# batch_id -> (Motific, Referential, Eponymic, Unrelated)
BATCHES = {
    "irish-1": (11, 292, 353, 207),
    "irish-2": (46, 355, 323, 254),
    "jewish-1": (56, 232, 246, 18),
    "jewish-2": (133, 374, 348, 56),
    "puerto-rican-1": (66, 427, 237, 134),
    "puerto-rican-2": (19, 433, 212, 174),
}

LABELS = ("Motific", "Referential", "Eponymic", "Unrelated")


def main():
    OUT.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for batch_id, counts in BATCHES.items():
        ordinal = 0
        for label, count in zip(LABELS, counts):
            for _ in range(count):
                ordinal += 1
                lines.append(
                    json.dumps(
                        {
                            "candidate_id": f"{batch_id}#{ordinal}",
                            "annotator_id": "adjudicated",
                            "label": label,
                            "batch_id": batch_id,
                        },
                        separators=(",", ":"),
                    )
                )
    OUT.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    print(f"wrote {OUT} ({len(lines)} records)")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerate the committed corpus fixture (deterministic)."""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from cyclepair.corpus import enumerate_corpus  # noqa: E402


def main():
    graphs = enumerate_corpus(5)
    out = {"max_edges": 5,
           "graphs": [g.to_json() for g in graphs]}
    dest = pathlib.Path(__file__).resolve().parents[1] / "src/cyclepair/data/corpus_5.json"
    dest.parent.mkdir(exist_ok=True)
    dest.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    print(f"wrote {len(graphs)} graphs to {dest}")


if __name__ == "__main__":
    main()

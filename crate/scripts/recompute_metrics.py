"""Recompute NDCG and mAP from the rankings_<method>.json files an experiment
wrote. Prints {"<method>": {"ndcg": .., "map": ..}} as JSON.

Usage: python3 scripts/recompute_metrics.py EXPERIMENT_DIR
"""

import json
import math
import pathlib
import sys


def dcg(grades, depth):
    return sum((2 ** g - 1) / math.log2(rank + 1) for rank, g in enumerate(grades[:depth], start=1))


def average_precision(relevant):
    m = sum(relevant)
    if m == 0:
        return None
    hits, total = 0, 0.0
    for rank, rel in enumerate(relevant, start=1):
        if rel:
            hits += 1
            total += hits / rank
    return total / m


def main(directory):
    root = pathlib.Path(directory)
    report = json.loads((root / "report.json").read_text())
    depth = report["ndcg_depth"]
    out = {}
    for method in report["methods"]:
        rankings = json.loads((root / f"rankings_{method}.json").read_text())
        ndcgs, aps = [], []
        for q in rankings:
            grades = q["grades"]
            idcg = dcg(sorted(grades, reverse=True), depth)
            ndcgs.append(dcg(grades, depth) / idcg if idcg > 0 else 0.0)
            ap = average_precision([g >= 1 for g in grades])
            if ap is not None:
                aps.append(ap)
        out[method] = {"ndcg": sum(ndcgs) / len(ndcgs), "map": sum(aps) / len(aps)}
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    print()


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    main(sys.argv[1])

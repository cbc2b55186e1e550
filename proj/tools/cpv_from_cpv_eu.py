#!/usr/bin/env python3
"""Convert the cpv-eu npm package data (data/cpv.json) into code,description CSV.

Usage: cpv_from_cpv_eu.py <cpv.json> <out.csv> [lang]
"""
import csv
import json
import sys


def main() -> int:
    if len(sys.argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    lang = sys.argv[3] if len(sys.argv) > 3 else "en"
    with open(sys.argv[1], encoding="utf-8") as f:
        entries = json.load(f)
    rows = sorted((e["code"], e["labels"][lang]) for e in entries)
    with open(sys.argv[2], "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["code", "description"])
        w.writerows(rows)
    print(f"wrote {len(rows)} entries", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())

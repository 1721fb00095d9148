#!/usr/bin/env python3
"""Fetch or convert the ACTG 175 dataset into the analyzer's CSV schema.

The trial data ship with the R package speff2trial as the data frame
ACTG175. This script either downloads the Rdatasets CSV export of that data
frame or converts a local export produced with

    R -e 'library(speff2trial); write.csv(ACTG175, "actg175_raw.csv", row.names=FALSE)'

and writes the two-arm analysis file used by the acceptance tests.

Conventions (kept as raw as possible; see README):
  - arms: keeps treatment arms 0 (ZDV monotherapy) and 3 (ddI monotherapy)
    only, 1093 patients; output arm = 1 for ddI, 0 for ZDV.
  - time: 'days' column unchanged (days to the composite endpoint).
  - event: 'cens' column unchanged (1 = endpoint observed).
  - stratum: 'strat' column unchanged (1 = antiretroviral naive,
    2 = > 1 but <= 52 weeks of prior therapy, 3 = > 52 weeks).
  - covariates: baseline CD4 count 'cd40' and days of prior antiretroviral
    therapy 'preanti', both unchanged.

Usage:
  python3 tools/fetch_actg175.py [--input actg175_raw.csv] [--out data/actg175.csv]
"""

import argparse
import csv
import io
import sys
import urllib.request

URLS = [
    "https://vincentarelbundock.github.io/Rdatasets/csv/speff2trial/ACTG175.csv",
    "https://raw.githubusercontent.com/vincentarelbundock/Rdatasets/master/csv/speff2trial/ACTG175.csv",
]

OUTPUT_COLUMNS = ["time", "event", "arm", "stratum", "cd40", "preanti"]


def download() -> str:
    last_error = None
    for url in URLS:
        try:
            with urllib.request.urlopen(url, timeout=30) as response:
                return response.read().decode("utf-8")
        except Exception as exc:  # noqa: BLE001 - report and try the next URL
            last_error = exc
            print(f"failed {url}: {exc}", file=sys.stderr)
    raise SystemExit(
        "could not download the dataset; pass --input with a local export "
        f"(last error: {last_error})"
    )


def convert(text: str):
    reader = csv.DictReader(io.StringIO(text))
    required = {"arms", "days", "cens", "strat", "cd40", "preanti"}
    fields = set(reader.fieldnames or [])
    missing = required - fields
    if missing:
        raise SystemExit(f"input is missing columns: {sorted(missing)}")
    rows = []
    for record in reader:
        arms = int(record["arms"])
        if arms not in (0, 3):
            continue
        rows.append(
            {
                "time": record["days"],
                "event": record["cens"],
                "arm": 1 if arms == 3 else 0,
                "stratum": record["strat"],
                "cd40": record["cd40"],
                "preanti": record["preanti"],
            }
        )
    if len(rows) != 1093:
        print(
            f"warning: expected 1093 patients in arms 0/3, got {len(rows)}",
            file=sys.stderr,
        )
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--input", help="local CSV export of the ACTG175 data frame")
    parser.add_argument("--out", default="data/actg175.csv", help="output path")
    args = parser.parse_args()

    if args.input:
        with open(args.input, "r", encoding="utf-8") as handle:
            text = handle.read()
    else:
        text = download()

    rows = convert(text)
    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=OUTPUT_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.out} ({len(rows)} rows)")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Build the bundled CSV + schema files under data/.

The UCI files are taken from PyPI wheels that redistribute them, so the
script only needs a package index:

  adult  : responsibly (adult.data + adult.test, 48,842 rows)
  credit : keel-ds     (german.dat, UCI Statlog German credit, 1,000 rows)
  sonar  : keel-ds     (sonar.dat, 208 rows)

Usage: python3 tools/prepare_datasets.py [--out data] [--wheels DIR]

--wheels points at a directory that already holds the two wheels; pip is
only invoked for the ones that are missing.
"""

import argparse
import csv
import pathlib
import subprocess
import sys
import tempfile
import zipfile

ADULT_COLUMNS = [
    ("age", "numeric"),
    ("workclass", "categorical"),
    ("fnlwgt", "numeric"),
    ("education", "categorical"),
    ("education-num", "numeric"),
    ("marital-status", "categorical"),
    ("occupation", "categorical"),
    ("relationship", "categorical"),
    ("race", "categorical"),
    ("sex", "categorical"),
    ("capital-gain", "numeric"),
    ("capital-loss", "numeric"),
    ("hours-per-week", "numeric"),
    ("native-country", "categorical"),
    ("class", "class"),
]

CREDIT_COLUMNS = [
    ("checking_status", "categorical"),
    ("duration", "numeric"),
    ("credit_history", "categorical"),
    ("purpose", "categorical"),
    ("credit_amount", "numeric"),
    ("savings_status", "categorical"),
    ("employment", "categorical"),
    ("installment_commitment", "numeric"),
    ("personal_status", "categorical"),
    ("other_parties", "categorical"),
    ("residence_since", "numeric"),
    ("property_magnitude", "categorical"),
    ("age", "numeric"),
    ("other_payment_plans", "categorical"),
    ("housing", "categorical"),
    ("existing_credits", "numeric"),
    ("job", "categorical"),
    ("num_dependents", "numeric"),
    ("own_telephone", "categorical"),
    ("foreign_worker", "categorical"),
    ("class", "class"),
]

SONAR_COLUMNS = [(f"band_{i:02d}", "numeric") for i in range(1, 61)] + [("class", "class")]


def fetch_wheel(package, dest, cache=None):
    pattern = package.replace("-", "_") + "-*.whl"
    if cache is not None:
        cached = sorted(cache.glob(pattern))
        if cached:
            return zipfile.ZipFile(cached[-1])
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", package, "-d", str(dest)],
        check=True,
    )
    wheels = sorted(dest.glob(pattern))
    if not wheels:
        raise SystemExit(f"no wheel downloaded for {package}")
    return zipfile.ZipFile(wheels[-1])


def split_line(line):
    return [cell.strip() for cell in line.split(",")]


def write_dataset(out, name, columns, rows):
    with open(out / f"{name}.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([c for c, _ in columns])
        w.writerows(rows)
    with open(out / f"{name}.schema", "w") as f:
        f.write(f"# {name}: {len(rows)} rows\n")
        for c, kind in columns:
            f.write(f"{c}: {kind}\n")
    print(f"{name}: {len(rows)} rows")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data")
    ap.add_argument("--wheels", default=None)
    args = ap.parse_args()
    cache = pathlib.Path(args.wheels) if args.wheels else None
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)

        z = fetch_wheel("responsibly", tmp, cache)
        rows = []
        for member in ("adult.data", "adult.test"):
            for line in z.read(f"responsibly/dataset/adult/{member}").decode().splitlines():
                if not line.strip() or line.startswith("|"):
                    continue
                cells = split_line(line)
                cells[-1] = cells[-1].rstrip(".")
                rows.append(cells)
        write_dataset(out, "adult", ADULT_COLUMNS, rows)

        z = fetch_wheel("keel-ds", tmp, cache)
        rows = []
        for line in z.read("keel_ds/data/balanced/raw/german.dat").decode().splitlines():
            if not line.strip():
                continue
            cells = split_line(line)
            cells[-1] = {"1": "good", "2": "bad"}[cells[-1]]
            rows.append(cells)
        write_dataset(out, "credit", CREDIT_COLUMNS, rows)

        rows = []
        for line in z.read("keel_ds/data/balanced/raw/sonar.dat").decode().splitlines():
            if not line.strip() or line.startswith("@"):
                continue
            rows.append(split_line(line))
        write_dataset(out, "sonar", SONAR_COLUMNS, rows)


if __name__ == "__main__":
    main()

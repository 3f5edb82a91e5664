#!/usr/bin/env python3
"""Writes data/cpi_calibration.csv, a synthetic price-observation corpus.

Each (store type, year) group holds 1000 prices below NIS 20 and 1000 prices
from NIS 20 up. Endings are chosen so that the group reproduces the published
aggregates exactly: the 9-ending share (2012, 2013) or the 90-ending share
(2021), the average agorot per price below NIS 20 and, where published, the
average over all prices. Everything else about the prices is arbitrary.
"""
import argparse
import math
import pathlib

N = 1000  # prices per half

# store: (share of 9-endings before 2014, share of 90-endings in 2021)
SHARES = {
    "supermarkets": (0.632, 0.718),
    "small_groceries": (0.199, 0.570),
    "convenience": (0.419, 0.420),
}
# (store, year): (mean agorot below NIS 20, mean agorot over all prices or None)
MEANS = {
    ("supermarkets", 2012): (74.8, None),
    ("small_groceries", 2012): (56.2, None),
    ("convenience", 2012): (56.0, None),
    ("supermarkets", 2013): (69.3, 63.0),
    ("small_groceries", 2013): (55.5, 55.6),
    ("convenience", 2013): (46.2, 48.6),
    ("supermarkets", 2021): (77.9, 73.5),
    ("small_groceries", 2021): (59.8, 58.3),
    ("convenience", 2021): (49.5, 52.4),
}


def reachable(k, allowed, value):
    """Whether k endings from `allowed` can sum to `value` (allowed has no gaps wider than its step)."""
    if k == 0:
        return value == 0
    if k == 1:
        return value in allowed
    lo, hi = allowed[0], allowed[-1]
    step = math.gcd(*[a - lo for a in allowed]) or 1
    return k * lo <= value <= k * hi and (value - k * lo) % step == 0


def fill(n, allowed, total):
    """n endings from `allowed` summing exactly to `total`, as even as possible."""
    allowed = sorted(allowed)
    out = []
    for i in range(n):
        left = n - i - 1
        candidates = [a for a in allowed if reachable(left, allowed, total - a)]
        if not candidates:
            raise ValueError(f"cannot reach {total} with {n - i} endings")
        best = min(candidates, key=lambda a: abs(a * (n - i) - total))
        out.append(best)
        total -= best
    return out


def group_endings(store, year, half_total):
    pre = year < 2014
    share = SHARES[store][0 if pre else 1]
    special = round(share * N)
    if pre:
        marked_allowed = list(range(9, 100, 10))
        rest_allowed = [r for r in range(100) if r % 10 != 9]
    else:
        marked_allowed = [90]
        rest_allowed = [r for r in range(0, 100, 10) if r != 90]
    rest_n = N - special
    # keep the marked endings as high as the remaining prices allow
    for marked_total in range(special * marked_allowed[-1], special * marked_allowed[0] - 1, -10):
        rest_total = half_total - marked_total
        if rest_n * rest_allowed[0] <= rest_total <= rest_n * rest_allowed[-1]:
            return fill(special, marked_allowed, marked_total) + fill(rest_n, rest_allowed, rest_total)
    raise ValueError(f"no endings for {store} {year}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default=pathlib.Path(__file__).resolve().parent.parent / "data" / "cpi_calibration.csv")
    args = parser.parse_args()
    lines = [
        "# Synthetic price observations matching published CPI-sample aggregates.",
        "# Generated by tools/make_cpi_calibration.py; see that script for the construction.",
        "store_id,store_type,product_id,date,price_agorot",
    ]
    for (store, year), (capped, overall) in MEANS.items():
        capped_total = round(capped * N)
        overall_total = round(overall * 2 * N) if overall is not None else 2 * capped_total
        for half, total in (("low", capped_total), ("high", overall_total - capped_total)):
            for j, ending in enumerate(group_endings(store, year, total)):
                whole = 1 + j % 19 if half == "low" else 20 + j % 80
                month = 1 + j % 12
                lines.append(f"{store}-{j % 40:02d},{store},{half}{j:04d},{year}-{month:02d}-15,{whole * 100 + ending}")
    pathlib.Path(args.output).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()

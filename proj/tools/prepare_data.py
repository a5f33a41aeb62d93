#!/usr/bin/env python3
"""Rebuild the bundled CSVs under data/ from their upstream Python wheels.

  canadian_weather_monthly.csv  <- fdars (MIT) data/canadian_weather.csv,
                                   daily means averaged per calendar month
  canadian_weather_meta.csv     <- fdars data/canadian_weather_meta.csv
  world_tfr.csv, world_leb.csv  <- rdatasets dslabs/gapminder, 1960-2013

Usage: prepare_data.py <fdars wheel> <rdatasets wheel> <out dir>
"""
import csv
import io
import lzma
import pickle
import sys
import zipfile

MONTH_DAYS = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]


def canadian(wheel, out):
    z = zipfile.ZipFile(wheel)
    rows = list(csv.reader(io.TextIOWrapper(z.open("fdars/data/canadian_weather.csv"))))
    stations = rows[0][1:]
    daily = [[float(v) for v in r[1:]] for r in rows[1:]]
    assert len(daily) == 365
    with open(f"{out}/canadian_weather_monthly.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id"] + [f"{m + 0.5:g}" for m in range(12)])
        for s, name in enumerate(stations):
            vals, day = [], 0
            for n in MONTH_DAYS:
                vals.append(sum(daily[d][s] for d in range(day, day + n)) / n)
                day += n
            w.writerow([name] + [f"{v:.4f}" for v in vals])
    with open(f"{out}/canadian_weather_meta.csv", "wb") as f:
        f.write(z.read("fdars/data/canadian_weather_meta.csv"))


def world(wheel, out):
    z = zipfile.ZipFile(wheel)
    df = pickle.loads(lzma.decompress(z.read("rdatasets/_data/dslabs/gapminder.pkl.compress")))
    df = df[(df.year >= 1960) & (df.year <= 2013)]
    years = sorted(df.year.unique())
    for col, name in (("fertility", "tfr"), ("life_expectancy", "leb")):
        wide = df.pivot(index="country", columns="year", values=col)
        with open(f"{out}/world_{name}.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["id"] + [str(y) for y in years])
            for country, r in wide.iterrows():
                w.writerow([country] + ["" if r[y] != r[y] else f"{r[y]:g}" for y in years])


if __name__ == "__main__":
    canadian(sys.argv[1], sys.argv[3])
    world(sys.argv[2], sys.argv[3])

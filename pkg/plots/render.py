#!/usr/bin/env python3
"""Render excess-risk figures from a risk CSV.

One panel per (z, j) group: for every k a mean-excess line over n with a
shaded band between the per-n min and max across repeats, optionally overlaid
with a fitted c * k^q1 / n^q2 curve. Every panel is written as an SVG plus a
JSON sidecar carrying the exact plotted values, so correctness is testable
without image diffing.

Usage: render.py --csv risk.csv --out figures/ [--fit fit.json]
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "riskbench-plots"

import matplotlib.pyplot as plt  # noqa: E402

REQUIRED_COLUMNS = ("z", "j", "k", "n", "repeat", "excess")


class RenderError(RuntimeError):
    pass


def read_csv_rows(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise RenderError(f"missing required column: {column}")
        rows = []
        for rec in reader:
            rows.append({
                "z": int(rec["z"]), "j": int(rec["j"]), "k": int(rec["k"]),
                "n": int(rec["n"]), "repeat": int(rec["repeat"]),
                "excess": float(rec["excess"]),
            })
    if not rows:
        raise RenderError(f"no data rows in {path}")
    return rows


def aggregate(rows):
    """Panel key (z, j) -> k -> sorted n -> (mean, min, max) over repeats."""
    groups = defaultdict(lambda: defaultdict(lambda: defaultdict(list)))
    for r in rows:
        groups[(r["z"], r["j"])][r["k"]][r["n"]].append(r["excess"])
    panels = {}
    for key, by_k in groups.items():
        series = []
        for k in sorted(by_k):
            ns = sorted(by_k[k])
            vals = [by_k[k][n] for n in ns]
            series.append({
                "k": k,
                "n": ns,
                "mean": [math.fsum(v) / len(v) for v in vals],
                "min": [min(v) for v in vals],
                "max": [max(v) for v in vals],
            })
        panels[key] = series
    return panels


def load_fit(path):
    with open(path) as fh:
        fit = json.load(fh)
    for field in ("c", "q1", "q2"):
        if field not in fit:
            raise RenderError(f"fit JSON lacks field: {field}")
    return fit


def render_panel(z, j, series, fit, out_dir, logx=True, logy=True):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = f"risk_z{z}_j{j}"

    all_vals = [v for s in series for v in s["min"]]
    use_logy = logy and all(v > 0.0 for v in all_vals)

    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for s in series:
        ax.plot(s["n"], s["mean"], marker="o", markersize=3,
                label=f"k={s['k']}")
        ax.fill_between(s["n"], s["min"], s["max"], alpha=0.25, linewidth=0)
        if fit is not None:
            s["fit"] = [fit["c"] * s["k"] ** fit["q1"] / n ** fit["q2"]
                        for n in s["n"]]
            ax.plot(s["n"], s["fit"], linestyle="--", linewidth=1)
        else:
            s["fit"] = None
    if logx:
        ax.set_xscale("log", base=2)
    if use_logy:
        ax.set_yscale("log")
    ax.set_xlabel("sample size n")
    ax.set_ylabel("excess risk")
    ax.set_title(f"z={z}" + (f", j={j}" if j else ""))
    ax.legend(fontsize=8)
    fig.tight_layout()
    svg_path = out_dir / f"{name}.svg"
    fig.savefig(svg_path, format="svg", metadata={"Date": None})
    plt.close(fig)

    sidecar = {
        "panel": name, "z": z, "j": j, "logx": logx, "logy": use_logy,
        "fit": fit, "series": series,
    }
    json_path = out_dir / f"{name}.json"
    json_path.write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n")
    return svg_path, json_path


def render(csv_path, out_dir, fit_path=None, logx=True, logy=True):
    rows = read_csv_rows(csv_path)
    fit = load_fit(fit_path) if fit_path else None
    panels = aggregate(rows)
    outputs = []
    for (z, j) in sorted(panels):
        outputs.append(render_panel(z, j, panels[(z, j)], fit, out_dir,
                                    logx=logx, logy=logy))
    return outputs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--csv", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--fit")
    parser.add_argument("--no-logx", dest="logx", action="store_false")
    parser.add_argument("--no-logy", dest="logy", action="store_false")
    args = parser.parse_args(argv)
    try:
        outputs = render(args.csv, args.out, args.fit, args.logx, args.logy)
    except (RenderError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for svg, sidecar in outputs:
        print(f"wrote {svg} + {sidecar.name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Figures for search reports.  Uses the Agg backend, so it is safe headless."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_distance_vs_r(rows, path: Path, title: str | None = None) -> Path:
    """Lower bounds on d against r: for each bound, the best value over the
    grid's surfaces and the band between worst and best."""
    values = defaultdict(lambda: defaultdict(list))
    for row in rows:
        r = int(row["r"])
        values["general"][r].append(int(row["d_general"]))
        if row.get("d_simple") not in (None, ""):
            values[f"ell={row['ell']}"][r].append(int(row["d_simple"]))

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label in sorted(values, key=lambda s: (s != "general", s)):
        by_r = values[label]
        rs = sorted(by_r)
        lo = [min(by_r[r]) for r in rs]
        hi = [max(by_r[r]) for r in rs]
        (line,) = ax.plot(rs, hi, marker="o", label=f"{label} (best)")
        ax.fill_between(rs, lo, hi, color=line.get_color(), alpha=0.15)
    ax.axhline(0, color="k", lw=0.6)
    ax.set_xlabel("r")
    ax.set_ylabel("lower bound on d")
    ax.xaxis.get_major_locator().set_params(integer=True)
    if title:
        ax.set_title(title)
    if values:
        ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_ell_comparison(rows, path: Path) -> Path:
    """d_simple at ell = 2 against ell = 1 on the cells where both were computed."""
    by_key = defaultdict(dict)
    for row in rows:
        if row.get("d_simple") in (None, ""):
            continue
        key = (int(row["q"]), int(row["t1"]), int(row["t2"]), int(row["r"]))
        by_key[key][int(row["ell"])] = int(row["d_simple"])
    pairs = [(v[1], v[2]) for v in by_key.values() if 1 in v and 2 in v]

    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    if pairs:
        xs, ys = zip(*pairs)
        ax.scatter(xs, ys, s=12)
        lo, hi = min(xs + ys), max(xs + ys)
        ax.plot([lo, hi], [lo, hi], color="0.6", lw=0.8)
    else:
        ax.text(0.5, 0.5, "no cells with both ell = 1 and ell = 2", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("d lower bound, ell = 1")
    ax.set_ylabel("d lower bound, ell = 2")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_report_figures(rows, outdir: Path, stem: str = "search") -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        plot_distance_vs_r(rows, outdir / f"{stem}_d_vs_r.png"),
        plot_ell_comparison(rows, outdir / f"{stem}_ell_comparison.png"),
    ]

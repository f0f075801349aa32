"""Grid sweeps over isogeny classes, producing the versioned CSV table."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .bounds import BoundInput, bound_general, bound_haloui, bound_simple
from .errors import CapExceeded, InvalidInput
from .ff import prime_power
from .isogeny import (
    SurfaceWeilData,
    WeilRestrictionMeta,
    all_weil_surfaces,
    classify_no_low_genus,
    deuring_trace_exists,
    weil_restriction,
)

SCHEMA_LINE = "# abelos-schema v1"
COLUMNS = (
    "q", "t1", "t2", "h2", "r", "ell", "n", "k",
    "d_general", "d_simple", "d_haloui", "winner", "rule", "d_lab",
)
CELL_CAP = 10**6

ALL_TRACES = "all"
RESTRICTION_TRACES = "restriction"
EXPLICIT_TRACES = "explicit"


@dataclass
class SearchGrid:
    qs: list
    trace_source: str = RESTRICTION_TRACES
    explicit: list = field(default_factory=list)  # (t1, t2) pairs
    rs: list = field(default_factory=lambda: [3])
    ells: list = field(default_factory=lambda: [1, 2])
    h2: int = 2
    unsafe: bool = False

    def surfaces(self):
        """(SurfaceWeilData, WeilRestrictionMeta | None) for every class in the grid."""
        for q in sorted(set(self.qs)):
            p, _ = prime_power(q)
            if self.trace_source == ALL_TRACES:
                for W in all_weil_surfaces(q):
                    yield W, None
            elif self.trace_source == RESTRICTION_TRACES:
                for trE in range(-2 * q, 2 * q + 1):
                    if deuring_trace_exists(p, q * q, trE):
                        yield weil_restriction(q, trE), WeilRestrictionMeta(p, q, trE)
            elif self.trace_source == EXPLICIT_TRACES:
                for t1, t2 in self.explicit:
                    yield SurfaceWeilData(q, t1, t2), None
            else:
                raise InvalidInput(f"unknown trace source {self.trace_source!r}")

    def cells(self) -> list:
        out = []
        for W, meta in self.surfaces():
            out.append((W, meta))
            if len(out) * len(self.rs) * max(1, len(self.ells)) > CELL_CAP:
                raise CapExceeded(f"search grid exceeds {CELL_CAP} cells")
        return out


def _rows_for(args) -> list[dict]:
    W, meta, rs, ells, h2, unsafe = args
    W.require_valid()  # every cell re-validates before bounding
    cls = classify_no_low_genus(W, meta)
    rows = []
    for r in rs:
        base = BoundInput.from_weil(W, h2, r, license=cls)
        general = bound_general(base)
        for ell in ells:
            row = {
                "q": W.q, "t1": W.t1, "t2": W.t2, "h2": h2, "r": r, "ell": ell,
                "n": base.n, "k": base.k, "d_general": general.d_lower,
                "d_simple": "", "d_haloui": "", "winner": "general", "rule": cls.rule, "d_lab": "",
            }
            licensed = cls.grants(ell)
            if licensed or unsafe:
                inp = BoundInput.from_weil(W, h2, r, ell=ell, license=cls, unsafe=not licensed)
                res = bound_simple(inp)
                row["d_simple"] = res.d_lower
                row["winner"] = res.winner if licensed else f"{res.winner} [unsafe]"
                if h2 == 2 and ell == 1:
                    row["d_haloui"] = bound_haloui(inp).d_lower
            rows.append(row)
    return rows


def _sort_key(row):
    return (row["q"], row["t1"], row["t2"], row["r"], row["ell"])


def run_search(grid: SearchGrid, jobs: int = 1) -> list[dict]:
    tasks = [(W, meta, list(grid.rs), list(grid.ells), grid.h2, grid.unsafe) for W, meta in grid.cells()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_rows_for, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        chunks = [_rows_for(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=_sort_key)
    return rows


def best_by_nk(rows) -> list[tuple[int, int, int]]:
    """Best proven d lower bound for each (n, k)."""
    best: dict[tuple[int, int], int] = {}
    for row in rows:
        d = max(int(row["d_general"]), int(row["d_simple"]) if row["d_simple"] != "" else int(row["d_general"]))
        key = (int(row["n"]), int(row["k"]))
        if key not in best or d > best[key]:
            best[key] = d
    return [(n, k, d) for (n, k), d in sorted(best.items())]


def to_csv(rows, summary: bool = True) -> str:
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    if summary and rows:
        buf.write("# summary: best d lower bound per (n,k)\n")
        for n, k, d in best_by_nk(rows):
            buf.write(f"# n={n} k={k} d>={d}\n")
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))

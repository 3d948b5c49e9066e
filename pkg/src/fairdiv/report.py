"""Informational growth report for the orientation deciders.

Times the EF1 and EFX0 chores deciders on random graphs of growing size,
writes the raw timings as CSV, and renders a log-scale growth figure next to
it.  This is diagnostic output, not an acceptance gate: the deciders are
certified by the differential suites, and this report only visualizes how
their running time scales.
"""

from __future__ import annotations

import csv
import random
import time
from fractions import Fraction
from pathlib import Path

from .chores import ef1_orient_graph, efx_orient_chores
from .core import Edge, Multigraph


def random_chores_graph(rng: random.Random, vertices: int, edges: int) -> Multigraph:
    """Random multiplicity-1 chores graph with weights in {0, -1, -2};
    subjective edges (0 on one side only) are allowed."""
    slots = [(a, b) for a in range(vertices) for b in range(a, vertices)]
    rng.shuffle(slots)
    out = []
    for k, (a, b) in enumerate(slots[:edges]):
        wa = Fraction(rng.choice((0, -1, -2)))
        wb = wa if a == b else Fraction(rng.choice((0, -1, -2)))
        out.append(Edge(f"e{k + 1}", a, b, wa, wb))
    return Multigraph(vertices, tuple(out))


def run_growth_report(out_dir: str, sizes=(8, 16, 32, 64, 128, 256),
                      trials: int = 5, seed: int = 2024) -> dict:
    """Benchmark the deciders, write `timings.csv` and `growth.png`, and
    return a small summary dict."""
    rng = random.Random(seed)
    rows = []
    for edges in sizes:
        vertices = max(3, edges * 2 // 3)
        for trial in range(trials):
            g = random_chores_graph(rng, vertices, edges)
            start = time.perf_counter()
            ef1_orient_graph(g)
            t_ef1 = time.perf_counter() - start
            start = time.perf_counter()
            efx_orient_chores(g)
            t_efx = time.perf_counter() - start
            rows.append({"edges": edges, "vertices": vertices, "trial": trial,
                         "ef1_seconds": f"{t_ef1:.6f}",
                         "efx0_seconds": f"{t_efx:.6f}"})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "timings.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for column, label in (("ef1_seconds", "EF1 decider"),
                          ("efx0_seconds", "EFX0 decider")):
        means = []
        for edges in sizes:
            values = [float(r[column]) for r in rows if r["edges"] == edges]
            means.append(sum(values) / len(values))
        ax.plot(list(sizes), means, marker="o", label=label)
    ax.set_xlabel("edges")
    ax.set_ylabel("mean seconds")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_title("Orientation decider growth (informational)")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    png_path = out / "growth.png"
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return {"csv": str(csv_path), "figure": str(png_path), "rows": len(rows)}

"""Batch plotting scripts for the CSV outputs."""

from __future__ import annotations

import csv
from pathlib import Path

from .errors import DomainError

PLOT_KINDS = {
    "ratio_vs_q": ("q", "ratio", "log", "log", "sampled q", "|S_k| / rhs"),
    "rho_vs_n": ("n", "value", "linear", "linear", "n", "weighted representation count"),
    "series_convergence": ("q", "partial", "log", "linear", "truncation q", "partial sum"),
}

_TEMPLATE = '''"""Plot {kind} from {csv_name}. Generated by primesums report."""
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_PATH = {csv_path!r}
OUT_PATH = sys.argv[1] if len(sys.argv) > 1 else str(Path(__file__).with_suffix(".png"))

xs, ys = [], []
with open(CSV_PATH, newline="") as fh:
    lines = [ln for ln in fh if not ln.startswith("#")]
for row in csv.DictReader(lines):
    if {row_filter}:
        continue
    xs.append(float(row[{xcol!r}]))
    ys.append(float(row[{ycol!r}]))

fig, ax = plt.subplots(figsize=(7, 4.5))
ax.plot(xs, ys, {style!r}, ms=3)
ax.set_xscale({xscale!r})
ax.set_yscale({yscale!r})
ax.set_xlabel({xlabel!r})
ax.set_ylabel({ylabel!r})
ax.set_title({kind!r})
fig.tight_layout()
fig.savefig(OUT_PATH, dpi=150)
print(OUT_PATH)
'''


def _columns(csv_path: Path) -> list[str]:
    with open(csv_path, newline="") as fh:
        for line in fh:
            if not line.startswith("#"):
                return next(csv.reader([line]))
    return []


def emit_plot_script(csv_path, kind: str, out_path=None) -> Path:
    """Write a standalone matplotlib script that plots ``csv_path``.

    Raises DomainError listing missing columns if the CSV lacks the schema
    for ``kind``.
    """
    if kind not in PLOT_KINDS:
        raise DomainError(f"unknown plot kind {kind!r}; choose from {sorted(PLOT_KINDS)}")
    csv_path = Path(csv_path)
    xcol, ycol, xscale, yscale, xlabel, ylabel = PLOT_KINDS[kind]
    have = _columns(csv_path)
    need = [xcol, ycol] + (["row"] if kind == "series_convergence" else [])
    missing = [c for c in need if c not in have]
    if missing:
        raise DomainError(f"{csv_path} is missing columns for {kind}: {', '.join(missing)}")
    row_filter = "row['row'] != 'term'" if kind == "series_convergence" else "False"
    out = Path(out_path) if out_path else csv_path.with_name(f"{csv_path.stem}_{kind}.py")
    out.write_text(
        _TEMPLATE.format(
            kind=kind,
            csv_name=csv_path.name,
            csv_path=str(csv_path.resolve()),
            row_filter=row_filter,
            xcol=xcol,
            ycol=ycol,
            xscale=xscale,
            yscale=yscale,
            xlabel=xlabel,
            ylabel=ylabel,
            style="o" if kind == "ratio_vs_q" else "-",
        )
    )
    return out

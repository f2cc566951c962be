"""Turn the experiment CSVs into the three evaluation figures.

This package never recomputes a DSP quantity: it draws exactly what the
CSV files contain.  A figure is described by a small JSON spec:

    {
      "figure": "spectrum" | "sndr_branches" | "sndr_mults",
      "inputs": {"before": "...", "after": "..."}      # spectrum
                or {"sweep": "..."},                   # SNDR figures
      "output": "fig.png",
      "title":  "...",          # optional
      "xlim":   [lo, hi],       # optional
      "ylim":   [lo, hi]        # optional
    }

Relative input/output paths resolve against the spec file's directory.
SNDR figures draw one series per linearizer type and mark the 58 dB
quantization-limited ceiling; rows with non-finite statistics (designs
that could not be built) are skipped.  Saved images carry no timestamps,
so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

QUANT_FLOOR_DB = 58.0

SWEEP_COLUMNS = [
    "type", "branches", "mults", "adds",
    "mean_sndr_db", "std_sndr_db", "min_sndr_db",
]
SPECTRUM_COLUMNS = ["freq_rad", "mag_db"]

SERIES_STYLE = {
    "proposed-abs": {"color": "tab:blue", "marker": "o", "label": "proposed (|v|)"},
    "proposed-relu": {"color": "tab:cyan", "marker": "s", "label": "proposed (relu)"},
    "hammerstein": {"color": "tab:red", "marker": "^", "label": "Hammerstein"},
}


class FigureError(Exception):
    """Bad spec or CSV input; the message names the offending file/column."""


def _read_csv(path: Path, expected_columns: list[str]) -> list[dict]:
    if not path.exists():
        raise FigureError(f"{path}: input CSV does not exist")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise FigureError(f"{path}: empty file, expected header {expected_columns}")
        if list(reader.fieldnames) != expected_columns:
            missing = [c for c in expected_columns if c not in (reader.fieldnames or [])]
            raise FigureError(
                f"{path}: header {reader.fieldnames} does not match {expected_columns}"
                + (f" (missing column {missing[0]!r})" if missing else "")
            )
        rows = list(reader)
    if not rows:
        raise FigureError(f"{path}: no data rows under the header")
    return rows


def _float(row: dict, column: str, path: Path) -> float:
    try:
        return float(row[column])
    except ValueError as exc:
        raise FigureError(f"{path}: column {column!r} has non-numeric value {row[column]!r}") from exc


def load_spec(path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FigureError(f"{path}: cannot read figure spec ({exc})") from exc
    for key in ("figure", "inputs", "output"):
        if key not in doc:
            raise FigureError(f"{path}: spec is missing key {key!r}")
    if doc["figure"] not in ("spectrum", "sndr_branches", "sndr_mults"):
        raise FigureError(f"{path}: unknown figure id {doc['figure']!r}")
    doc["_base"] = path.parent
    return doc


def _resolve(base: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base / p


def _build_spectrum(ax, spec: dict) -> None:
    base = spec["_base"]
    for key, style in (("before", {"color": "0.65"}), ("after", {"color": "tab:blue"})):
        if key not in spec["inputs"]:
            raise FigureError(f"spectrum figure needs inputs.{key}")
        path = _resolve(base, spec["inputs"][key])
        rows = _read_csv(path, SPECTRUM_COLUMNS)
        freqs = [_float(r, "freq_rad", path) for r in rows]
        mags = [_float(r, "mag_db", path) for r in rows]
        ax.plot(freqs, mags, lw=0.7, label=f"{key} linearization", **style)
    ax.set_xlabel("normalized frequency (rad)")
    ax.set_ylabel("magnitude (dBFS)")
    ax.set_xlim(0, math.pi)
    ax.legend(loc="upper right")


def _build_sndr(ax, spec: dict, x_column: str, x_label: str) -> None:
    path = _resolve(spec["_base"], spec["inputs"].get("sweep", ""))
    if not spec["inputs"].get("sweep"):
        raise FigureError(f"{spec['figure']} figure needs inputs.sweep")
    rows = _read_csv(path, SWEEP_COLUMNS)
    series: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        x = _float(row, x_column, path)
        y = _float(row, "mean_sndr_db", path)
        if not math.isfinite(y):
            continue  # invalid design rows carry nan statistics
        series.setdefault(row["type"], []).append((x, y))
    if not series:
        raise FigureError(f"{path}: no finite mean_sndr_db rows to plot")
    for name in sorted(series):
        pts = sorted(series[name])
        style = SERIES_STYLE.get(name, {"marker": "x", "label": name})
        ax.plot(
            [p[0] for p in pts], [p[1] for p in pts],
            ms=4, lw=1.2, **style,
        )
    ax.axhline(
        QUANT_FLOOR_DB, color="0.3", ls="--", lw=1.0,
        label=f"{QUANT_FLOOR_DB:.0f} dB quantization limit",
    )
    ax.set_xlabel(x_label)
    ax.set_ylabel("SNDR (dB)")
    ax.legend(loc="lower right")


def build_figure(spec: dict):
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=150)
    if spec["figure"] == "spectrum":
        _build_spectrum(ax, spec)
    elif spec["figure"] == "sndr_branches":
        _build_sndr(ax, spec, "branches", "number of nonlinearity branches")
    else:
        _build_sndr(ax, spec, "mults", "multiplications per sample")
    if "title" in spec:
        ax.set_title(spec["title"])
    if "xlim" in spec:
        ax.set_xlim(*spec["xlim"])
    if "ylim" in spec:
        ax.set_ylim(*spec["ylim"])
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render(spec_path) -> Path:
    """Render one figure spec; returns the written image path."""
    spec = load_spec(spec_path)
    fig = build_figure(spec)
    out = _resolve(spec["_base"], spec["output"])
    out.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps the PNG byte-reproducible (no embedded timestamps)
    fig.savefig(out, metadata={"Software": "linfig"})
    plt.close(fig)
    return out


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if not args:
        print("usage: linfig SPEC.json [SPEC.json ...]", file=sys.stderr)
        return 2
    for spec_path in args:
        try:
            out = render(spec_path)
        except FigureError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

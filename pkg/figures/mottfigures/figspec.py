"""Figure specification and the shared CSV-to-panels renderer.

The input schema is the photonmott timeseries CSV: a `t` column in seconds
plus named observable columns.  A FigureSpec maps columns onto up to four
panels (a-d); referenced columns must exist in the loaded data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150
FIGSIZE = (9.0, 6.5)


class MissingColumnError(KeyError):
    """A panel references a column absent from the CSV data."""


@dataclass(frozen=True)
class CurveSpec:
    """One curve: CSV column, line style and legend label."""

    column: str
    style: str = "-"   # '-' solid (primary), '--' dashed (secondary)
    label: Optional[str] = None


@dataclass(frozen=True)
class PanelSpec:
    key: str                     # 'a'..'d'
    title: str
    curves: tuple
    ylabel: str = ""
    logy: bool = False


@dataclass(frozen=True)
class FigureSpec:
    """Input CSVs, panel layout and column-to-panel mapping."""

    csv_paths: tuple
    panels: tuple                # PanelSpec in layout order
    output_path: str

    def referenced_columns(self) -> list:
        return [c.column for p in self.panels for c in p.curves]


def read_csv(path: Path) -> Dict[str, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: row width does not match header")
    return {name: data[:, i] for i, name in enumerate(header)}


def load_columns(csv_paths: Sequence[Path]) -> Dict[str, np.ndarray]:
    """Merge columns from one or more CSVs sharing the same time grid."""
    merged: Dict[str, np.ndarray] = {}
    for path in csv_paths:
        cols = read_csv(Path(path))
        if "t" not in cols:
            raise ValueError(f"{path}: no 't' column")
        if "t" in merged and not np.array_equal(merged["t"], cols["t"]):
            raise ValueError(f"{path}: time grid differs from earlier input")
        merged.update(cols)
    return merged


def render(spec: FigureSpec, data: Dict[str, np.ndarray],
           annotations: Optional[Dict[str, list]] = None) -> None:
    """Draw the panels and write the image (Agg, fixed dpi)."""
    missing = [c for c in spec.referenced_columns() if c not in data]
    if missing:
        raise MissingColumnError(f"columns missing from CSV input: {missing}")

    t_us = data["t"] * 1e6
    n_panels = len(spec.panels)
    nrows = 2 if n_panels > 2 else 1
    ncols = 2 if n_panels > 1 else 1
    fig, axes = plt.subplots(nrows, ncols, figsize=FIGSIZE)
    axes = np.atleast_1d(axes).ravel()

    for ax, panel in zip(axes, spec.panels):
        for curve in panel.curves:
            ax.plot(t_us, data[curve.column], curve.style, linewidth=1.2,
                    label=curve.label or curve.column)
        if panel.logy:
            ax.set_yscale("log")
        ax.set_title(f"{panel.key}: {panel.title}", fontsize=10, loc="left")
        ax.set_xlabel(r"$t$ in $10^{-6}$ s")
        if panel.ylabel:
            ax.set_ylabel(panel.ylabel)
        if len(panel.curves) > 1:
            ax.legend(fontsize=8, frameon=False)
        for vline in (annotations or {}).get(panel.key, []):
            ax.axvline(vline * 1e6, color="gray", linewidth=0.8, linestyle=":")
    for ax in axes[n_panels:]:
        ax.set_visible(False)

    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=DPI)
    plt.close(fig)


def resolve_csv(path_arg: str) -> Path:
    """Accept either a timeseries CSV or the directory containing one."""
    path = Path(path_arg)
    if path.is_dir():
        candidate = path / "timeseries.csv"
        if not candidate.exists():
            raise FileNotFoundError(f"no timeseries.csv under {path}")
        return candidate
    if not path.exists():
        raise FileNotFoundError(str(path))
    return path

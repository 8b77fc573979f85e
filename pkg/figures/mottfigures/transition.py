"""Four-panel Mott-to-superfluid transition figure from a timeseries CSV.

a: on-site potential U(t) (solid) and hopping J (dashed), with the U = J
   crossing marked
b: n1, full model (solid) vs effective model (dashed)
c: F1, full model (solid) vs effective model (dashed)
d: effective-model master-equation n1 (solid) and F1 (dashed)
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .figspec import (
    CurveSpec,
    FigureSpec,
    MissingColumnError,
    PanelSpec,
    load_columns,
    render,
    resolve_csv,
)
from .mott import _effective_prefix


def crossing_time(t: np.ndarray, u: np.ndarray, j: np.ndarray):
    """First time |U(t)| crosses J, by linear interpolation; None if never."""
    gap = np.abs(u) - j
    sign_flip = np.flatnonzero(np.diff(np.sign(gap)) != 0)
    if len(sign_flip) == 0:
        return None
    i = int(sign_flip[0])
    frac = gap[i] / (gap[i] - gap[i + 1]) if gap[i] != gap[i + 1] else 0.0
    return float(t[i] + frac * (t[i + 1] - t[i]))


def plot_transition(csv_arg: str, out_path: str) -> dict:
    csv_path = resolve_csv(csv_arg)
    data = load_columns([csv_path])
    eff = _effective_prefix(data)

    panels = (
        PanelSpec("a", "on-site potential and hopping",
                  (CurveSpec("U", "-", r"$U$"), CurveSpec("J", "--", r"$J$")),
                  ylabel="rad/s", logy=True),
        PanelSpec("b", "photon number",
                  (CurveSpec("full_n1", "-", "full"),
                   CurveSpec(f"{eff}n1", "--", "effective")),
                  ylabel=r"$n_1$"),
        PanelSpec("c", "number fluctuation",
                  (CurveSpec("full_F1", "-", "full"),
                   CurveSpec(f"{eff}F1", "--", "effective")),
                  ylabel=r"$F_1$"),
        PanelSpec("d", "effective model (master equation)",
                  (CurveSpec(f"{eff}n1", "-", r"$n_1$"),
                   CurveSpec(f"{eff}F1", "--", r"$F_1$"))),
    )
    spec = FigureSpec(csv_paths=(str(csv_path),), panels=panels,
                      output_path=str(out_path))
    missing = [c for c in spec.referenced_columns() if c not in data]
    if missing:
        raise MissingColumnError(f"columns missing from CSV input: {missing}")

    t_cross = crossing_time(data["t"], data["U"], data["J"])
    annotations = {"a": [t_cross]} if t_cross is not None else {}
    render(spec, data, annotations=annotations)
    return {
        "output": str(out_path),
        "panels": [p.key for p in panels],
        "columns": spec.referenced_columns(),
        "U_equals_J_crossing_time": t_cross,
        "warnings": [],
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Transition panels from a photonmott timeseries CSV")
    parser.add_argument("csv", help="timeseries.csv or its directory")
    parser.add_argument("output", help="output image path (.png)")
    args = parser.parse_args(argv)
    try:
        meta = plot_transition(args.csv, args.output)
    except (MissingColumnError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(meta, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Four-panel Mott-scenario figure from a timeseries CSV.

a: photon number n1 (single-trajectory / ensemble mean, full model)
b: photon-number fluctuation F1 (full model)
c: full-minus-effective deviations dn1 (solid) and dF1 (dashed)
d: effective-model master-equation n1 (solid) and F1 (dashed)

Panel c is omitted with a warning when no deviation columns are available.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .figspec import (
    CurveSpec,
    FigureSpec,
    MissingColumnError,
    PanelSpec,
    load_columns,
    render,
    resolve_csv,
)


def _effective_prefix(data) -> str:
    if "bh_master_n1" in data:
        return "bh_master_"
    if "bh_traj_n1" in data:
        return "bh_traj_"
    raise MissingColumnError(
        "columns missing from CSV input: ['bh_master_n1' or 'bh_traj_n1']")


def plot_mott(csv_arg: str, out_path: str) -> dict:
    """Render the figure; returns panel/warning metadata."""
    csv_path = resolve_csv(csv_arg)
    paths = [csv_path]
    deviations = csv_path.parent / "deviations.csv"
    data = load_columns(paths)
    if "dn1" not in data and deviations.exists():
        paths.append(deviations)
        data = load_columns(paths)

    warnings = []
    eff = _effective_prefix(data)
    panels = [
        PanelSpec("a", "photon number (full model)",
                  (CurveSpec("full_n1", "-"),), ylabel=r"$n_1$"),
        PanelSpec("b", "number fluctuation (full model)",
                  (CurveSpec("full_F1", "-"),), ylabel=r"$F_1$"),
    ]
    if "dn1" in data and "dF1" in data:
        panels.append(PanelSpec(
            "c", "full minus effective",
            (CurveSpec("dn1", "-", r"$\delta n_1$"),
             CurveSpec("dF1", "--", r"$\delta F_1$"))))
    else:
        warnings.append("deviation columns absent; panel c omitted")
    panels.append(PanelSpec(
        "d", "effective model (master equation)",
        (CurveSpec(f"{eff}n1", "-", r"$n_1$"),
         CurveSpec(f"{eff}F1", "--", r"$F_1$"))))

    spec = FigureSpec(csv_paths=tuple(str(p) for p in paths),
                      panels=tuple(panels), output_path=str(out_path))
    render(spec, data)
    return {
        "output": str(out_path),
        "panels": [p.key for p in panels],
        "columns": spec.referenced_columns(),
        "warnings": warnings,
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Mott-scenario panels from a photonmott timeseries CSV")
    parser.add_argument("csv", help="timeseries.csv or its directory")
    parser.add_argument("output", help="output image path (.png)")
    args = parser.parse_args(argv)
    try:
        meta = plot_mott(args.csv, args.output)
    except (MissingColumnError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for warning in meta["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    print(json.dumps(meta, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())

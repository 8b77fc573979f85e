import shutil

import numpy as np
import pytest

from conftest import GOLDEN
from mottfigures import MissingColumnError, load_columns, plot_mott, plot_transition
from mottfigures.transition import crossing_time

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def strip_columns(src, dst, drop):
    """Copy a CSV without the named columns."""
    lines = src.read_text().splitlines()
    header = lines[0].split(",")
    keep = [i for i, name in enumerate(header) if name not in drop]
    with open(dst, "w") as fh:
        for line in lines:
            cells = line.split(",")
            fh.write(",".join(cells[i] for i in keep) + "\n")


class TestPlotMott:
    def test_four_panels_from_golden(self, tmp_path):
        out = tmp_path / "mott.png"
        meta = plot_mott(str(GOLDEN / "mott_timeseries.csv"), str(out))
        assert meta["panels"] == ["a", "b", "c", "d"]
        assert meta["warnings"] == []
        for col in ("full_n1", "full_F1", "dn1", "dF1",
                    "bh_master_n1", "bh_master_F1"):
            assert col in meta["columns"]
        assert out.read_bytes().startswith(PNG_MAGIC)

    def test_accepts_run_directory(self, tmp_path):
        run_dir = tmp_path / "run"
        run_dir.mkdir()
        shutil.copy(GOLDEN / "mott_timeseries.csv", run_dir / "timeseries.csv")
        out = tmp_path / "mott.png"
        meta = plot_mott(str(run_dir), str(out))
        assert out.exists()
        assert meta["panels"] == ["a", "b", "c", "d"]

    def test_byte_stable_rendering(self, tmp_path):
        out1 = tmp_path / "a.png"
        out2 = tmp_path / "b.png"
        plot_mott(str(GOLDEN / "mott_timeseries.csv"), str(out1))
        plot_mott(str(GOLDEN / "mott_timeseries.csv"), str(out2))
        assert out1.read_bytes() == out2.read_bytes()

    def test_missing_deviations_omits_panel_c(self, tmp_path):
        csv = tmp_path / "no_dev.csv"
        strip_columns(GOLDEN / "mott_timeseries.csv", csv,
                      drop={"dn1", "dn2", "dF1", "dF2"})
        out = tmp_path / "mott.png"
        meta = plot_mott(str(csv), str(out))
        assert meta["panels"] == ["a", "b", "d"]
        assert any("panel c omitted" in w for w in meta["warnings"])
        assert out.read_bytes().startswith(PNG_MAGIC)

    def test_missing_primary_column_raises_named_error(self, tmp_path):
        csv = tmp_path / "broken.csv"
        strip_columns(GOLDEN / "mott_timeseries.csv", csv, drop={"full_n1"})
        with pytest.raises(MissingColumnError, match="full_n1"):
            plot_mott(str(csv), str(tmp_path / "x.png"))

    def test_cli_entry(self, tmp_path, capsys):
        from mottfigures.mott import main

        out = tmp_path / "cli.png"
        assert main([str(GOLDEN / "mott_timeseries.csv"), str(out)]) == 0
        assert out.exists()
        assert main([str(tmp_path / "nonexistent.csv"), str(out)]) == 2


class TestPlotTransition:
    def test_four_panels_with_crossing(self, tmp_path):
        out = tmp_path / "transition.png"
        meta = plot_transition(str(GOLDEN / "transition_timeseries.csv"),
                               str(out))
        assert meta["panels"] == ["a", "b", "c", "d"]
        assert out.read_bytes().startswith(PNG_MAGIC)
        # golden ramp: U from 10 J down to 0.1 J, so a crossing must exist
        data = load_columns([GOLDEN / "transition_timeseries.csv"])
        assert data["U"][0] > data["J"][0] > data["U"][-1]
        t_cross = meta["U_equals_J_crossing_time"]
        assert t_cross is not None
        assert data["t"][0] < t_cross < data["t"][-1]

    def test_crossing_interpolation(self):
        t = np.linspace(0.0, 1.0, 11)
        u = 2.0 - 2.0 * t  # crosses J = 1 at t = 0.5
        j = np.ones_like(t)
        assert crossing_time(t, u, j) == pytest.approx(0.5)

    def test_no_crossing_returns_none(self):
        t = np.linspace(0.0, 1.0, 5)
        assert crossing_time(t, np.full(5, 3.0), np.ones(5)) is None

    def test_byte_stable_rendering(self, tmp_path):
        out1 = tmp_path / "a.png"
        out2 = tmp_path / "b.png"
        plot_transition(str(GOLDEN / "transition_timeseries.csv"), str(out1))
        plot_transition(str(GOLDEN / "transition_timeseries.csv"), str(out2))
        assert out1.read_bytes() == out2.read_bytes()

    def test_missing_scenario_columns_raise(self, tmp_path):
        csv = tmp_path / "no_u.csv"
        strip_columns(GOLDEN / "transition_timeseries.csv", csv, drop={"U"})
        with pytest.raises(MissingColumnError, match="U"):
            plot_transition(str(csv), str(tmp_path / "x.png"))


def test_acceptance_secondary(tmp_path):
    ok = True
    details = []
    for name, plot, golden in (
        ("plot_mott", plot_mott, GOLDEN / "mott_timeseries.csv"),
        ("plot_transition", plot_transition,
         GOLDEN / "transition_timeseries.csv"),
    ):
        out1 = tmp_path / f"{name}_1.png"
        out2 = tmp_path / f"{name}_2.png"
        meta = plot(str(golden), str(out1))
        plot(str(golden), str(out2))
        four_panels = meta["panels"] == ["a", "b", "c", "d"]
        stable = out1.read_bytes() == out2.read_bytes()
        ok = ok and four_panels and stable
        details.append(f"{name}: panels {meta['panels']}, "
                       f"byte-stable {stable}")
    print(f"[ACCEPTANCE] figure_regeneration: {'PASS' if ok else 'FAIL'} "
          f"({'; '.join(details)})")
    assert ok

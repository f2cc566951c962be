"""Rendering contracts: valid figures, hard failures, byte determinism."""

import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from linfig import FigureError, build_figure, load_spec, render

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
ACCEPTANCE = REPO_ROOT / "artifacts" / "acceptance"

SWEEP_HEADER = "type,branches,mults,adds,mean_sndr_db,std_sndr_db,min_sndr_db"


def write_sweep_csv(path: Path, include_invalid=True):
    rows = [SWEEP_HEADER]
    for n in range(2, 21, 2):
        sndr = 58.0 - 40.0 * math.exp(-n / 4)
        rows.append(f"proposed-abs,{n},{n + 1},{2 * n + 1},{sndr:.6f},0.3,{sndr - 1:.6f}")
    for k in range(2, 11):
        sndr = 50.0 - 30.0 * math.exp(-k / 2)
        rows.append(f"hammerstein,{k - 1},{2 * k - 1},{k},{sndr:.6f},0.2,{sndr - 1:.6f}")
    if include_invalid:
        rows.append("proposed-abs,1,2,3,nan,nan,nan")
    path.write_text("\n".join(rows) + "\n")


def write_spectrum_csv(path: Path, level_db: float):
    lines = ["freq_rad,mag_db"]
    for i in range(257):
        freq = math.pi * i / 256
        mag = level_db + 10 * math.sin(7 * freq)
        lines.append(f"{freq:.8f},{mag:.4f}")
    path.write_text("\n".join(lines) + "\n")


def make_spec(tmp_path: Path, figure: str, inputs: dict, name="spec.json", **extra):
    doc = {"figure": figure, "inputs": inputs, "output": f"{figure}.png", **extra}
    spec_path = tmp_path / name
    spec_path.write_text(json.dumps(doc))
    return spec_path


@pytest.fixture()
def sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    write_sweep_csv(path)
    return path


class TestSndrFigures:
    def test_branches_figure_renders(self, tmp_path, sweep_csv):
        spec = make_spec(tmp_path, "sndr_branches", {"sweep": sweep_csv.name})
        out = render(spec)
        assert out.exists() and out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_reference_line_at_58db(self, tmp_path, sweep_csv):
        spec = load_spec(make_spec(tmp_path, "sndr_branches", {"sweep": sweep_csv.name}))
        fig = build_figure(spec)
        ax = fig.axes[0]
        hlines = [
            line for line in ax.get_lines()
            if len(set(line.get_ydata())) == 1 and line.get_ydata()[0] == 58.0
        ]
        assert hlines, "58 dB quantization reference line missing"

    def test_both_series_present_and_trending(self, tmp_path, sweep_csv):
        spec = load_spec(make_spec(tmp_path, "sndr_mults", {"sweep": sweep_csv.name}))
        fig = build_figure(spec)
        labels = {line.get_label() for line in fig.axes[0].get_lines()}
        assert "proposed (|v|)" in labels
        assert "Hammerstein" in labels

    def test_invalid_rows_skipped(self, tmp_path, sweep_csv):
        # the nan N=1 row must not leak into the plotted data
        spec = load_spec(make_spec(tmp_path, "sndr_branches", {"sweep": sweep_csv.name}))
        fig = build_figure(spec)
        for line in fig.axes[0].get_lines():
            assert all(math.isfinite(y) for y in line.get_ydata())


class TestSpectrumFigure:
    def test_renders_before_and_after(self, tmp_path):
        write_spectrum_csv(tmp_path / "before.csv", -60.0)
        write_spectrum_csv(tmp_path / "after.csv", -85.0)
        spec = make_spec(
            tmp_path, "spectrum", {"before": "before.csv", "after": "after.csv"}
        )
        assert render(spec).exists()

    def test_missing_input_named(self, tmp_path):
        write_spectrum_csv(tmp_path / "before.csv", -60.0)
        spec = make_spec(
            tmp_path, "spectrum", {"before": "before.csv", "after": "nope.csv"}
        )
        with pytest.raises(FigureError, match="nope.csv"):
            render(spec)


class TestFailureModes:
    def test_empty_csv_rejected_no_image(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(SWEEP_HEADER + "\n")
        spec = make_spec(tmp_path, "sndr_branches", {"sweep": "empty.csv"})
        with pytest.raises(FigureError, match="empty.csv"):
            render(spec)
        assert not (tmp_path / "sndr_branches.png").exists()

    def test_wrong_header_names_column(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("type,branches,mults,adds,mean_db,std,min\nx,1,2,3,4,5,6\n")
        spec = make_spec(tmp_path, "sndr_branches", {"sweep": "bad.csv"})
        with pytest.raises(FigureError, match="mean_sndr_db"):
            render(spec)

    def test_unknown_figure_id(self, tmp_path):
        spec = tmp_path / "s.json"
        spec.write_text(json.dumps({"figure": "pie", "inputs": {}, "output": "x.png"}))
        with pytest.raises(FigureError, match="pie"):
            load_spec(spec)

    def test_cli_exit_code_and_message(self, tmp_path):
        spec = make_spec(tmp_path, "sndr_branches", {"sweep": "missing.csv"})
        result = subprocess.run(
            [sys.executable, "-m", "linfig", str(spec)], capture_output=True, text=True
        )
        assert result.returncode == 1
        assert "missing.csv" in result.stderr


def test_deterministic_bytes(tmp_path, sweep_csv):
    spec1 = make_spec(tmp_path, "sndr_branches", {"sweep": sweep_csv.name}, name="s1.json")
    first = render(spec1).read_bytes()
    (tmp_path / "sndr_branches.png").unlink()
    spec2 = make_spec(tmp_path, "sndr_branches", {"sweep": sweep_csv.name}, name="s2.json")
    assert render(spec2).read_bytes() == first


def test_axis_limit_overrides(tmp_path, sweep_csv):
    spec = load_spec(
        make_spec(
            tmp_path, "sndr_branches", {"sweep": sweep_csv.name},
            ylim=[20, 62], title="check",
        )
    )
    fig = build_figure(spec)
    assert fig.axes[0].get_ylim() == (20.0, 62.0)
    assert fig.axes[0].get_title() == "check"


@pytest.fixture(scope="module")
def csv_dir(tmp_path_factory):
    if (ACCEPTANCE / "sweep_branches.csv").exists():
        return ACCEPTANCE
    # fall back to a fresh reduced-scale run of the primary CLI
    out = tmp_path_factory.mktemp("cli_csvs")
    overrides = [
        "--set", "ensemble_size=8",
        "--set", "signal_length=1024",
        "--set", "branch_sweep=[2,4,8,12,16]",
        "--set", "hammerstein_sweep=[2,3,5,7]",
    ]
    for cmd in ("sweep-branches", "sweep-mults", "spectrum"):
        result = subprocess.run(
            ["memlin", cmd, "-o", str(out), *overrides],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, result.stderr
    return out


class TestAcceptanceA10:
    """Render the three figures from the primary component's CSV outputs."""

    def test_a10_three_figures_from_primary_csvs(self, csv_dir, tmp_path):
        specs = {
            "sndr_branches": {"sweep": str(csv_dir / "sweep_branches.csv")},
            "sndr_mults": {"sweep": str(csv_dir / "sweep_mults.csv")},
            "spectrum": {
                "before": str(csv_dir / "spectrum_before.csv"),
                "after": str(csv_dir / "spectrum_after.csv"),
            },
        }
        images = []
        for figure, inputs in specs.items():
            spec_path = make_spec(tmp_path, figure, inputs, name=f"{figure}.json")
            images.append(render(spec_path))
        assert all(p.exists() and p.stat().st_size > 0 for p in images)
        print(f"[A10] rendered {len(images)} figures from {csv_dir}")

    def test_a10_sndr_plots_include_reference_line(self, csv_dir, tmp_path):
        for figure, key in (("sndr_branches", "sweep_branches"), ("sndr_mults", "sweep_mults")):
            spec_path = make_spec(
                tmp_path, figure, {"sweep": str(csv_dir / f"{key}.csv")},
                name=f"{figure}_ref.json",
            )
            fig = build_figure(load_spec(spec_path))
            ys = [
                line.get_ydata()[0]
                for line in fig.axes[0].get_lines()
                if len(set(line.get_ydata())) == 1
            ]
            assert 58.0 in ys

import json
from pathlib import Path

import pytest

from sdnlw_figures import load_manifest, render_all, render_figure, structure_hash
from sdnlw_figures.cli import EXIT_MANIFEST, EXIT_OK, EXIT_RENDER, main
from sdnlw_figures.manifest import FigureManifest

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden_hashes.json"


def test_render_all_fixture_manifest(tmp_path):
    figures = load_manifest(FIXTURES / "manifest.json")
    written, errors = render_all(figures, tmp_path)
    assert errors == []
    assert sorted(p.name for p in written) == [
        "lambda_vs_logN.svg",
        "strong_split.svg",
        "weak_error.svg",
        "weak_mass_discrimination.svg",
        "wick_decay.svg",
    ]
    for path in written:
        assert path.stat().st_size > 0
        assert path.read_text().lstrip().startswith("<?xml")


def test_structure_hashes_match_golden(tmp_path):
    figures = load_manifest(FIXTURES / "manifest.json")
    written, errors = render_all(figures, tmp_path)
    assert errors == []
    golden = json.loads(GOLDEN.read_text())
    hashes = {p.stem: structure_hash(p) for p in written}
    assert hashes == golden


def test_rerender_is_byte_identical(tmp_path):
    figures = load_manifest(FIXTURES / "manifest.json")
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    written1, _ = render_all(figures, out1)
    written2, _ = render_all(figures, out2)
    for p1, p2 in zip(sorted(written1), sorted(written2)):
        assert p1.read_bytes() == p2.read_bytes()


def test_lambda_figure_has_data_and_reference_curves(tmp_path):
    figures = load_manifest(FIXTURES / "manifest.json")
    lam = next(f for f in figures if f.id == "lambda_vs_logN")
    path = render_figure(lam, tmp_path)
    svg = path.read_text()
    # Legend carries one entry per data series plus the reference label.
    assert "lambda" in svg
    assert "(3/4pi) alpha^2 log N" in svg
    assert "expected: increasing" in svg


def test_categorical_axis_renders_tick_labels(tmp_path):
    figures = load_manifest(FIXTURES / "manifest.json")
    mass = next(f for f in figures if f.id == "weak_mass_discrimination")
    svg = render_figure(mass, tmp_path).read_text()
    for label in ("limit", "alt", "massless"):
        assert label in svg


def test_missing_column_gives_per_figure_error(tmp_path):
    good = FigureManifest(
        id="ok", csv=FIXTURES / "weak_error.csv", x="n", y=("u_err_q90",)
    )
    bad = FigureManifest(
        id="broken", csv=FIXTURES / "weak_error.csv", x="n", y=("no_such_column",)
    )
    lost = FigureManifest(id="lost", csv=FIXTURES / "gone.csv", x="n", y=("v",))
    written, errors = render_all([good, bad, lost], tmp_path)
    assert [p.stem for p in written] == ["ok"]
    assert len(errors) == 2
    assert "broken" in errors[0] and "no_such_column" in errors[0]
    assert "lost" in errors[1]


def test_cli_full_run(tmp_path, capsys):
    code = main(["--manifest", str(FIXTURES / "manifest.json"), "--out", str(tmp_path)])
    assert code == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 5
    assert all(line.endswith(".svg") for line in out)


def test_cli_empty_manifest(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"version": 1, "figures": []}))
    code = main(["--manifest", str(path), "--out", str(tmp_path / "out")])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    assert list((tmp_path / "out").glob("*.svg")) == []


def test_cli_missing_column_exit_code(tmp_path, capsys):
    doc = {
        "version": 1,
        "figures": [
            {"id": "broken", "csv": "weak_error.csv", "x": "n", "y": ["no_such_column"]}
        ],
    }
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    (tmp_path / "weak_error.csv").write_bytes((FIXTURES / "weak_error.csv").read_bytes())
    code = main(["--manifest", str(path), "--out", str(tmp_path / "out")])
    assert code == EXIT_RENDER
    assert "no_such_column" in capsys.readouterr().err


def test_cli_invalid_manifest_exit_code(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text("{broken")
    code = main(["--manifest", str(path), "--out", str(tmp_path / "out")])
    assert code == EXIT_MANIFEST
    assert "sdnlw-figures:" in capsys.readouterr().err

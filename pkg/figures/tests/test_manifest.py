import json
from pathlib import Path

import pytest

from sdnlw_figures import ManifestError, load_manifest

FIXTURES = Path(__file__).parent / "fixtures"


def test_load_fixture_manifest():
    figures = load_manifest(FIXTURES / "manifest.json")
    assert [f.id for f in figures] == [
        "lambda_vs_logN",
        "wick_decay",
        "strong_split",
        "weak_error",
        "weak_mass_discrimination",
    ]
    lam = figures[0]
    assert lam.csv == FIXTURES / "lambda_vs_logN.csv"
    assert lam.x == "log_n"
    assert lam.y == ("lambda", "reference")
    assert lam.reference is not None
    assert lam.reference.column == "reference"
    assert figures[1].xscale == "log"
    assert figures[1].monotonic == "decreasing"
    assert figures[4].reference is None


def test_empty_manifest(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"version": 1, "figures": []}))
    assert load_manifest(path) == []


def _write(tmp_path, doc):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    return path


@pytest.mark.parametrize(
    "figure",
    [
        {"id": "a", "x": "n", "y": ["v"]},
        {"id": "a", "csv": "a.csv", "y": ["v"]},
        {"id": "a", "csv": "a.csv", "x": "n"},
        {"id": "a", "csv": "a.csv", "x": "n", "y": []},
        {"id": "a", "csv": "a.csv", "x": "n", "y": "v"},
        {"id": "a", "csv": "a.csv", "x": "n", "y": ["v"], "xscale": "loglog"},
        {"id": "a", "csv": "a.csv", "x": "n", "y": ["v"], "monotonic": "flat"},
        {"id": "a", "csv": "a.csv", "x": "n", "y": ["v"], "reference": {"column": "r"}},
    ],
)
def test_invalid_figure_entries(tmp_path, figure):
    path = _write(tmp_path, {"version": 1, "figures": [figure]})
    with pytest.raises(ManifestError):
        load_manifest(path)


def test_duplicate_ids_rejected(tmp_path):
    fig = {"id": "a", "csv": "a.csv", "x": "n", "y": ["v"]}
    path = _write(tmp_path, {"version": 1, "figures": [fig, fig]})
    with pytest.raises(ManifestError):
        load_manifest(path)


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ManifestError):
        load_manifest(bad)
    top = _write(tmp_path, {"version": 1})
    with pytest.raises(ManifestError):
        load_manifest(top)


def test_csv_paths_resolve_relative_to_manifest(tmp_path):
    sub = tmp_path / "deep"
    sub.mkdir()
    path = sub / "m.json"
    path.write_text(
        json.dumps(
            {"version": 1, "figures": [{"id": "a", "csv": "a.csv", "x": "n", "y": ["v"]}]}
        )
    )
    figures = load_manifest(path)
    assert figures[0].csv == sub / "a.csv"

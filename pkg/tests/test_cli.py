"""Tests for the command-line front end."""

import json

import pytest

from sdnlw.cli import (
    STUDY_ALIASES,
    load_study_config,
    main,
    parse_ladder,
    resolve_workers,
)
from sdnlw.studies import ConfigError


def test_parse_ladder_geometric():
    assert parse_ladder("4:64:x2") == (4, 8, 16, 32, 64)
    assert parse_ladder("3:100:x3") == (3, 9, 27, 81)


def test_parse_ladder_list():
    assert parse_ladder("8,16,32") == (8, 16, 32)


def test_parse_ladder_errors():
    for bad in ("4:64", "4:64:2", "4:2:x2", "1:8:x2", "4:8:x1", "a,b", "x:y:xz"):
        with pytest.raises(ConfigError):
            parse_ladder(bad)


def test_resolve_workers(monkeypatch):
    monkeypatch.delenv("SDNLW_WORKERS", raising=False)
    assert resolve_workers(None) == 1
    assert resolve_workers(4) == 4
    monkeypatch.setenv("SDNLW_WORKERS", "3")
    assert resolve_workers(None) == 3
    assert resolve_workers(2) == 2
    monkeypatch.setenv("SDNLW_WORKERS", "many")
    with pytest.raises(ConfigError):
        resolve_workers(None)


def test_load_study_config(tmp_path):
    p = tmp_path / "cfg.toml"
    p.write_text("[study]\nn_ladder = [4, 8]\nalpha = 2.0\n")
    table = load_study_config(str(p))
    assert table == {"n_ladder": [4, 8], "alpha": 2.0}
    bad = tmp_path / "bad.toml"
    bad.write_text("[study]\nbanana = 1\n")
    with pytest.raises(ConfigError):
        load_study_config(str(bad))


def test_main_renorm(tmp_path):
    code = main(["renorm", "--alpha", "1.0", "--n-ladder", "4:32:x2",
                 "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "lambda_study.csv").exists()


def test_main_study_with_config(tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text(
        "[study]\nn_ladder = [4, 8]\nmc_replicas = 2\nt_final = 0.3\n"
    )
    out = tmp_path / "out"
    code = main(["study", "strong", "--config", str(cfg), "--out", str(out)])
    assert code in (0, 2)
    meta = json.loads((out / "study_meta.json").read_text())
    assert meta["study"] == "strong_triviality"
    assert meta["replicas"] == 2


def test_main_bad_inputs(tmp_path):
    # Missing config file.
    assert main(["study", "weak", "--config", str(tmp_path / "nope.toml"),
                 "--out", str(tmp_path)]) == 4
    # Unknown config key.
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("[study]\nbanana = 1\n")
    assert main(["study", "weak", "--config", str(cfg), "--out", str(tmp_path)]) == 4
    # Malformed TOML.
    cfg.write_text("[study\n")
    assert main(["study", "weak", "--config", str(cfg), "--out", str(tmp_path)]) == 4
    # Bad ladder on renorm.
    assert main(["renorm", "--n-ladder", "4:64", "--out", str(tmp_path)]) == 4


def test_main_plotdata(tmp_path):
    src = tmp_path / "src"
    main(["renorm", "--n-ladder", "4:16:x2", "--out", str(src)])
    dst = tmp_path / "dst"
    assert main(["plotdata", "--in", str(src), "--out", str(dst)]) == 0
    assert (dst / "manifest.json").exists()


def test_alias_table_covers_all_studies():
    from sdnlw.studies import STUDY_NAMES

    assert set(STUDY_ALIASES.values()) == set(STUDY_NAMES)

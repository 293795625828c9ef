"""Tests for the ladder-study runners, persistence and plot-data emission."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from sdnlw.integrator import limit_mass
from sdnlw.spectral import pointwise_values
from sdnlw.studies import (
    EXIT_OK,
    MANIFEST_SCHEMA,
    RECORD_DT,
    ConfigError,
    StudySpec,
    _step_size,
    _trend_ok,
    emit_plotdata,
    initial_data,
    run_lambda_study,
    run_strong_study,
    run_weak_study,
    run_wick_study,
    write_csv,
)


def test_spec_validation():
    with pytest.raises(ConfigError):
        StudySpec(study="nope", output_dir="x")
    with pytest.raises(ConfigError):
        StudySpec(study="weak_limit", output_dir="x", n_ladder=(8, 8))
    with pytest.raises(ConfigError):
        StudySpec(study="weak_limit", output_dir="x", n_ladder=(1, 2))
    with pytest.raises(ConfigError):
        StudySpec(study="weak_limit", output_dir="x", initial_data="wavelet")
    with pytest.raises(ConfigError):
        StudySpec(study="weak_limit", output_dir="x", epsilon=1.5)
    with pytest.raises(ConfigError):
        StudySpec(study="weak_limit", output_dir="x", mc_replicas=0)
    with pytest.raises(ConfigError):
        StudySpec(study="tuned_damping", output_dir="x", tuned_branch="maybe")
    spec = StudySpec(study="weak_limit", output_dir="x")
    assert spec.n_ladder == (16, 32, 64, 128)
    assert spec.replicas == 16
    assert StudySpec(study="weak_limit", output_dir="x", mc_replicas=5).replicas == 5


def test_step_size_divides_record_grid():
    for n in (2, 4, 8, 16, 64, 128, 1000):
        h, m = _step_size(n)
        assert h * m == pytest.approx(RECORD_DT)
        assert h <= min(0.05, 0.5 / n) + 1e-12


def test_trend_ok():
    assert _trend_ok([5.0, 4.0, 3.0, 2.0])
    assert _trend_ok([9.0, 1.0, 3.0, 2.0, 1.0])  # only the last window counts
    assert not _trend_ok([3.0, 2.0, 2.0])
    assert _trend_ok([2.0, 1.0])


def test_initial_data_consistent_across_bands():
    a = initial_data("single_mode", 8)
    b = initial_data("single_mode", 32)
    assert b.pos.coeff(1, 0) == a.pos.coeff(1, 0) == pytest.approx(math.pi)
    # The same physical field regardless of the truncation.
    va = pointwise_values(a.pos, 32)
    vb = pointwise_values(b.pos, 32)
    assert np.max(np.abs(va - vb)) < 1e-12
    # single_mode is cos(x1) in physical space.
    xs = 2.0 * math.pi * np.arange(32) / 32
    assert np.max(np.abs(va - np.cos(xs)[:, None])) < 1e-12
    z = initial_data("zero", 8)
    assert np.all(z.pos.coeffs == 0) and np.all(z.vel.coeffs == 0)
    bump = initial_data("bump", 16)
    assert bump.pos.coeff(0, 0) == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        initial_data("wavelet", 8)


def test_write_csv_fixed_precision(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, ["a", "b", "c"], [[1, 1.0 / 3.0, True], [2, float("nan"), False]])
    text = p.read_text()
    assert "0.333333333333" in text
    assert text.splitlines()[0] == "a,b,c"
    assert text.splitlines()[1].endswith(",1")


def test_lambda_study_outputs(tmp_path):
    spec = StudySpec(
        study="lambda_asymptotics", output_dir=str(tmp_path), n_ladder=(4, 8, 16, 32)
    )
    code = run_lambda_study(spec)
    assert code == EXIT_OK
    rows = (tmp_path / "lambda_study.csv").read_text().splitlines()
    assert rows[0].startswith("n,alpha,lambda,reference,residual")
    assert len(rows) == 5
    meta = json.loads((tmp_path / "study_meta.json").read_text())
    assert meta["exit_code"] == 0 and meta["study"] == "lambda_asymptotics"


def test_wick_study_small(tmp_path):
    spec = StudySpec(
        study="wick_decay",
        output_dir=str(tmp_path),
        n_ladder=(2, 4),
        mc_replicas=2,
        t_final=0.2,
    )
    code = run_wick_study(spec)
    assert code in (0, 2)
    assert (tmp_path / "wick_summary.csv").exists()
    assert (tmp_path / "wick_records.csv").exists()


def test_strong_study_small_and_deterministic(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    kwargs = dict(
        study="strong_triviality",
        n_ladder=(4, 8),
        mc_replicas=3,
        t_final=0.5,
        seed=7,
    )
    run_strong_study(StudySpec(output_dir=str(out1), **kwargs))
    run_strong_study(StudySpec(output_dir=str(out2), **kwargs))
    for name in ("strong_summary.csv", "strong_records.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_weak_study_small(tmp_path):
    spec = StudySpec(
        study="weak_limit",
        output_dir=str(tmp_path),
        n_ladder=(4, 8),
        mc_replicas=2,
        t_final=0.3,
    )
    code = run_weak_study(spec)
    assert code in (0, 2)
    assert (tmp_path / "weak_summary.csv").exists()
    assert (tmp_path / "weak_mass.csv").exists()
    mass_rows = (tmp_path / "weak_mass.csv").read_text().splitlines()
    assert mass_rows[1].startswith("mass_limit") and mass_rows[2].startswith("mass_zero")


def test_limit_mass_scaling():
    assert limit_mass(2.0) == pytest.approx(4.0 * limit_mass(1.0))


def test_emit_plotdata_and_manifest(tmp_path):
    src = tmp_path / "src"
    dst = tmp_path / "dst"
    run_lambda_study(
        StudySpec(study="lambda_asymptotics", output_dir=str(src), n_ladder=(4, 8, 16))
    )
    run_strong_study(
        StudySpec(
            study="strong_triviality",
            output_dir=str(src),
            n_ladder=(4, 8),
            mc_replicas=2,
            t_final=0.5,
        )
    )
    code = emit_plotdata(str(src), str(dst))
    assert code == EXIT_OK
    manifest = json.loads((dst / "manifest.json").read_text())
    ids = {f["id"] for f in manifest["figures"]}
    assert {"lambda_vs_logN", "strong_split"} <= ids
    for fig in manifest["figures"]:
        assert (dst / fig["csv"]).exists()
    # The manifest validates against its own published schema.
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((dst / "plot_manifest.schema.json").read_text())
    assert schema == MANIFEST_SCHEMA
    jsonschema.validate(manifest, schema)


def test_emit_plotdata_empty_dir(tmp_path):
    src = tmp_path / "empty"
    src.mkdir()
    dst = tmp_path / "out"
    assert emit_plotdata(str(src), str(dst)) == EXIT_OK
    manifest = json.loads((dst / "manifest.json").read_text())
    assert manifest["figures"] == []

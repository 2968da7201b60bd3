import json

import pytest

from blockrg import cli


def test_default_config_loads():
    cfg = cli.load_config(None)
    assert cfg.experiment == "all"
    assert cfg.geometry == {"d": 1, "L": 3, "k": 2, "m": 4}
    assert cfg.params.a == 1.0


def test_missing_geometry_field_rejected(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("geometry: {d: 1, k: 1, m: 2}\n")
    rc = cli.main(["--config", str(p), "--experiment", "spectrum",
                   "--out", str(tmp_path / "o")])
    assert rc == 2


def test_unknown_key_rejected(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("geometry: {d: 1, L: 3, k: 1, m: 2}\nbogus_section: 1\n")
    rc = cli.main(["--config", str(p), "--out", str(tmp_path / "o")])
    assert rc == 2
    p2 = tmp_path / "c2.yaml"
    p2.write_text("geometry: {d: 1, L: 3, k: 1, m: 2, extra: 7}\n")
    assert cli.main(["--config", str(p2), "--out", str(tmp_path / "o")]) == 2


def test_unknown_experiment_rejected(tmp_path):
    rc = cli.main(["--experiment", "nope", "--out", str(tmp_path / "o")])
    assert rc == 2


def test_invalid_geometry_is_config_error(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("geometry: {d: 1, L: 4, k: 1, m: 2}\n")
    assert cli.main(["--config", str(p), "--out", str(tmp_path / "o")]) == 2
    p.write_text("geometry: {d: 1, L: 3, k: 3, m: 2}\n")
    assert cli.main(["--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_spectrum_suite_and_csv(tmp_path):
    out = tmp_path / "rep"
    rc = cli.main(["--experiment", "spectrum", "--out", str(out)])
    assert rc == 0
    text = (out / "spectrum.csv").read_text()
    lines = text.strip().split("\n")
    assert lines[0] == cli.CSV_HEADER
    assert all(line.count(",") == 10 for line in lines)
    assert all(line.endswith(("true", "false")) for line in lines[1:])
    summary = json.loads((out / "summary.json").read_text())
    assert summary["spectrum"]["status"] == "pass"
    assert "wall_time_seconds" in summary["spectrum"]


def test_csv_determinism(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["--experiment", "ct-report", "--out", str(out1), "--seed", "7"]) == 0
    assert cli.main(["--experiment", "ct-report", "--out", str(out2), "--seed", "7"]) == 0
    assert (out1 / "ct-report.csv").read_bytes() == (out2 / "ct-report.csv").read_bytes()


def test_rg_verify_reference(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("geometry: {d: 1, L: 3, k: 2, m: 2}\nexperiment: rg-verify\n")
    out = tmp_path / "rep"
    assert cli.main(["--config", str(p), "--out", str(out)]) == 0
    lines = (out / "rg-verify.csv").read_text().strip().split("\n")[1:]
    assert any("rg_telescope_residual" in line for line in lines)
    assert all(line.endswith("true") for line in lines)


def test_decay_profile_rows(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("geometry: {d: 1, L: 3, k: 1, m: 3}\n")
    out = tmp_path / "rep"
    assert cli.main(["--config", str(p), "--experiment", "decay-profile",
                     "--out", str(out)]) == 0
    lines = (out / "decay-profile.csv").read_text().strip().split("\n")[1:]
    assert sum("profile_mag_at_dist" in line for line in lines) >= 20
    assert any("neg_fit_rate" in line for line in lines)


def test_internal_error_isolated(tmp_path):
    # side-length 1 cube cannot support the default decay window: suite errors,
    # exit code 3, summary records it
    p = tmp_path / "c.yaml"
    p.write_text("geometry: {d: 1, L: 3, k: 2, m: 2}\n")
    out = tmp_path / "rep"
    rc = cli.main(["--config", str(p), "--experiment", "decay-profile",
                   "--out", str(out)])
    assert rc == 3
    summary = json.loads((out / "summary.json").read_text())
    assert summary["decay-profile"]["status"] == "error"


def test_merge_strict_nested():
    with pytest.raises(cli.ConfigError):
        cli._merge_strict({"a": {"b": 1}}, {"a": {"c": 2}})
    merged = cli._merge_strict({"a": {"b": 1}, "c": 2}, {"a": {"b": 5}})
    assert merged == {"a": {"b": 5}, "c": 2}

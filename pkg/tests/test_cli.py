import json

import numpy as np
import pytest

from telehead.cli import main
from telehead.config import load_config
from telehead.rig import MOTOR_COUNT


def test_scenario_play_offline_and_replay(tmp_path, capsys):
    record = tmp_path / "greeting.session"
    assert main(["scenario", "play", "greeting", "--virtual-clock", "--record", str(record)]) == 0
    out = capsys.readouterr().out
    assert "scenario complete" in out
    assert record.exists()

    assert main(["replay", str(record)]) == 0
    out = capsys.readouterr().out
    assert "bit-identical" in out


def test_record_subcommand_defaults_to_greeting(tmp_path, capsys):
    record = tmp_path / "default.session"
    assert main(["record", str(record)]) == 0
    assert record.stat().st_size > 0


def test_sweep_audio_table(tmp_path, capsys):
    out_file = tmp_path / "sweep.tsv"
    assert main(["sweep-audio", "--out", str(out_file)]) == 0
    lines = out_file.read_text().strip().split("\n")
    assert lines[0].split("\t")[0] == "position"
    assert len(lines) == 9  # header + 8 positions


def test_sweep_audio_with_tone_scenario(tmp_path, capsys):
    spec = tmp_path / "tones.json"
    spec.write_text(json.dumps({"positions": [5, 7], "tone_hz": 660.0, "duration_s": 0.05}))
    assert main(["sweep-audio", "--scenario", str(spec)]) == 0
    out = capsys.readouterr().out
    assert len(out.strip().split("\n")) == 3


def test_fit_mapping_cli(tmp_path, capsys):
    rng = np.random.default_rng(0)
    m = 5
    offset = rng.normal(size=MOTOR_COUNT) * 0.1
    weights = rng.normal(size=(MOTOR_COUNT, m)) * 0.2
    samples_path = tmp_path / "samples.jsonl"
    with open(samples_path, "w") as fh:
        for _ in range(30):
            f = rng.uniform(0, 1, m)
            w = offset + weights @ f
            fh.write(json.dumps({"f": f.tolist(), "w": w.tolist()}) + "\n")
    out_path = tmp_path / "fitted.json"
    assert main(["fit-mapping", str(samples_path), "--out", str(out_path)]) == 0
    config = load_config(str(out_path))
    assert config["mapping"] is not None
    assert np.allclose(np.array(config["mapping"]["offset"]), offset, atol=1e-6)


def test_fit_mapping_rank_deficient_is_an_error(tmp_path, capsys):
    samples_path = tmp_path / "flat.jsonl"
    with open(samples_path, "w") as fh:
        for _ in range(10):
            fh.write(json.dumps({"f": [0.5, 0.5], "w": [0.0] * MOTOR_COUNT}) + "\n")
    assert main(["fit-mapping", str(samples_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_replay_missing_file_is_an_error(tmp_path, capsys):
    assert main(["replay", str(tmp_path / "nope.session")]) == 2


def test_operator_offline_smoke(capsys):
    config_overrides = {"bus": {"port": 0}, "console": {"port": 0}}
    import tempfile, os

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(config_overrides, fh)
        path = fh.name
    try:
        assert main([
            "--config", path,
            "operator", "run", "--offline", "--scenario", "greeting", "--duration", "0.4",
        ]) == 0
        out = capsys.readouterr().out
        assert "offline loopback session running" in out
    finally:
        os.unlink(path)

import json
from pathlib import Path

import numpy as np
import pytest

from biovit.cli import build_config, build_parser, main
from biovit.protocol import DataPacket, encode_packet
from biovit.session import AttentionSession, export_csv, ingest_csv
from biovit.trend import TrendModelKind

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("BIOVIT_NO_COLOR", "1")


def test_trend_prints_compact_equation(tmp_path, capsys):
    t = np.arange(1, 20_001)
    s = AttentionSession("moc", seconds=t - 1.0, attention=42.186 + 0.000012 * t)
    path = tmp_path / "moc.csv"
    path.write_text(export_csv(s))
    assert main(["trend", str(path)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "Yt = 42.186 + 0.000012 × t + 0.000000 × t²"
    assert out[1].startswith("full precision: Yt = 42.18")
    assert out[2].startswith("MAPE 0.00")
    assert out[3] == "shape: Degenerate"


def test_analyze_without_files_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_decode_corrupted_capture(tmp_path, capsys):
    frames = [bytearray(encode_packet(DataPacket(attention=a, meditation=10))) for a in (40, 50, 60, 70)]
    frames[1][-1] ^= 0x01
    cap = tmp_path / "cap.bin"
    cap.write_bytes(b"\x00\x01" + b"".join(frames))
    out = tmp_path / "cap.csv"
    assert main(["decode", str(cap), "-o", str(out)]) == 0
    err = capsys.readouterr().err
    assert "2 frame errors" in err
    assert "ChecksumMismatch" in err
    s = ingest_csv(out.read_text())
    assert s.attention.tolist() == [40, 60, 70]


def test_decode_empty_capture_fails(tmp_path, capsys):
    cap = tmp_path / "empty.bin"
    cap.write_bytes(b"")
    assert main(["decode", str(cap)]) == 1
    assert "error" in capsys.readouterr().err


def test_analyze_summary_matches_golden(tmp_path):
    out = tmp_path / "rep.md"
    assert main(["analyze", "--input-format", "summary", str(FIXTURES / "reference_summary.csv"), "-o", str(out)]) == 0
    golden = Path(__file__).parent / "golden" / "reference_summary.md"
    assert out.read_text() == golden.read_text()


def test_analyze_json_to_stdout(capsys):
    assert main(["analyze", "--input-format", "summary", "--format", "json", str(FIXTURES / "reference_summary.csv")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["retention_rate"] == 77.8


def test_analyze_bad_input_returns_error(tmp_path, capsys):
    bad = tmp_path / "x.csv"
    bad.write_text("nope\n")
    assert main(["analyze", str(bad)]) == 1
    assert "biovit: error" in capsys.readouterr().err


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nefga_threshold = 2.0\nmodels = linear, quadratic\nefga-display = round\n")
    parser = build_parser()
    args = parser.parse_args(["analyze", "--config", str(cfg), "--efga-threshold", "1.5", "a.csv"])
    c = build_config(args)
    assert c.efga_threshold == 1.5
    assert c.models == (TrendModelKind.LINEAR, TrendModelKind.QUADRATIC)
    assert c.efga_display == "round"
    assert c.confidence == 95.0
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(ValueError):
        build_config(parser.parse_args(["analyze", "--config", str(bad), "a.csv"]))


def test_synth_then_analyze(tmp_path, capsys):
    out = tmp_path / "coh"
    assert main(["synth", "-o", str(out), "--n-samples", "200", "--seed", "3"]) == 0
    files = sorted(out.glob("*.csv"))
    assert len(files) == 18
    rep = tmp_path / "rep.json"
    assert main(["analyze", *map(str, files), "--format", "json", "--models", "linear,quadratic", "-o", str(rep)]) == 0
    doc = json.loads(rep.read_text())
    assert len(doc["normality"]) == 18
    assert len(doc["efga_groups"]["retained"]) + len(doc["efga_groups"]["declined"]) == 18


def test_synth_from_json_spec(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "seed": 4,
        "participants": [
            {"participant_id": "A", "n_samples": 30, "coefficients": [50, 0.1, 0], "noise_sd": 5, "clamp": True},
            {"n_samples": 30, "trend": "linear", "coefficients": [20, 0.5]},
        ],
    }))
    out = tmp_path / "o"
    assert main(["synth", "--spec", str(spec), "-o", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["A.csv", "P02.csv"]
    b = ingest_csv((out / "P02.csv").read_text())
    np.testing.assert_allclose(b.attention, 20 + 0.5 * np.arange(1, 31))

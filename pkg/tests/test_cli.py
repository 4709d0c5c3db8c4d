import json

from click.testing import CliRunner

from polycert.cli import main


def test_gen_is_deterministic(tmp_path):
    runner = CliRunner()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        res = runner.invoke(main, [
            "gen", "--kind", "random", "--m", "4", "--n", "4", "--d", "3",
            "--seed", "1", "--out", str(out),
        ])
        assert res.exit_code == 0, res.output
    assert a.read_bytes() == b.read_bytes()


def test_gen_planted_kinds(tmp_path):
    runner = CliRunner()
    out = tmp_path / "r.json"
    res = runner.invoke(main, [
        "gen", "--kind", "planted-rank", "--m", "4", "--n", "5", "--d", "2",
        "--r", "2", "--seed", "3", "--out", str(out),
    ])
    assert res.exit_code == 0, res.output
    doc = json.loads(out.read_text())
    assert doc["witness"]["rank"] == 2
    res = runner.invoke(main, [
        "gen", "--kind", "planted-membership", "--m", "3", "--n", "4",
        "--d", "2", "--seed", "4", "--out", str(tmp_path / "m.json"),
    ])
    assert res.exit_code == 0, res.output


def test_prove_verify_roundtrip_and_tamper(tmp_path):
    runner = CliRunner()
    inst = tmp_path / "inst.json"
    transcript = tmp_path / "t.json"
    assert runner.invoke(main, [
        "gen", "--kind", "planted-membership", "--m", "3", "--n", "4",
        "--d", "2", "--seed", "5", "--out", str(inst),
    ]).exit_code == 0
    res = runner.invoke(main, [
        "prove", "--protocol", "rsm", "--instance", str(inst),
        "--sigma", str(1 << 16), "--out", str(transcript),
    ])
    assert res.exit_code == 0, res.output
    res = runner.invoke(main, ["verify", str(transcript)])
    assert res.exit_code == 0, res.output
    # tamper one prover field element, keep the digest honest, expect reject
    doc = json.loads(transcript.read_text())
    for msg in doc["messages"]:
        if msg["sender"] == "P" and msg["payload"]["kind"] == "poly":
            coeffs = msg["payload"]["coeffs"]
            if coeffs:
                coeffs[0] = str((int(coeffs[0]) + 1) % (2**31 - 1))
                break
    else:
        raise AssertionError("no polynomial prover message found")
    from polycert.transcript import Transcript

    t = Transcript.from_json_dict({**doc, "digest": None})
    doc["digest"] = t.digest()
    transcript.write_text(json.dumps(doc))
    res = runner.invoke(main, ["verify", str(transcript)])
    assert res.exit_code == 1, res.output


def test_prove_hermite_from_oracle(tmp_path):
    runner = CliRunner()
    inst = tmp_path / "inst.json"
    transcript = tmp_path / "t.json"
    assert runner.invoke(main, [
        "gen", "--kind", "random", "--m", "3", "--n", "3", "--d", "2",
        "--seed", "6", "--out", str(inst),
    ]).exit_code == 0
    res = runner.invoke(main, [
        "prove", "--protocol", "hermite", "--instance", str(inst),
        "--sigma", str(1 << 16), "--out", str(transcript),
    ])
    assert res.exit_code == 0, res.output
    assert runner.invoke(main, ["verify", str(transcript)]).exit_code == 0


def test_run_reports_communication(tmp_path):
    runner = CliRunner()
    inst = tmp_path / "inst.json"
    assert runner.invoke(main, [
        "gen", "--kind", "random", "--m", "4", "--n", "4", "--d", "2",
        "--seed", "7", "--out", str(inst),
    ]).exit_code == 0
    res = runner.invoke(main, [
        "run", "--protocol", "matmul", "--instance", str(inst),
        "--mode", "interactive", "--seed", "9",
    ])
    assert res.exit_code == 0, res.output
    assert "communication:" in res.output
    assert "ACCEPT" in res.output


def test_run_exit_code_on_reject(tmp_path):
    runner = CliRunner()
    inst = tmp_path / "inst.json"
    assert runner.invoke(main, [
        "gen", "--kind", "random", "--m", "3", "--n", "3", "--d", "2",
        "--seed", "8", "--out", str(inst),
    ]).exit_code == 0
    # a random matrix is almost surely nonsingular: singularity rejects
    res = runner.invoke(main, [
        "run", "--protocol", "singularity", "--instance", str(inst),
        "--permissive",
    ])
    assert res.exit_code == 1, res.output


def test_usage_errors_exit_2(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, [
        "gen", "--kind", "planted-rank", "--m", "3", "--n", "3", "--d", "1",
        "--out", str(tmp_path / "x.json"),
    ])
    assert res.exit_code == 2  # missing --r
    inst = tmp_path / "inst.json"
    assert runner.invoke(main, [
        "gen", "--kind", "random", "--m", "2", "--n", "2", "--d", "1",
        "--seed", "1", "--out", str(inst),
    ]).exit_code == 0
    res = runner.invoke(main, [
        "prove", "--protocol", "rsm", "--instance", str(inst),
        "--out", str(tmp_path / "t.json"),
    ])
    assert res.exit_code == 2  # rsm needs a planted membership vector


def test_experiment_single_protocol(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, [
        "experiment", "--protocol", "matmul", "--trials", "150",
        "--sigma", "32", "--out-dir", str(tmp_path / "reports"),
    ])
    assert res.exit_code == 0, res.output
    assert "[pass]" in res.output
    files = list((tmp_path / "reports").glob("*.json"))
    assert files
    doc = json.loads(files[0].read_text())
    assert doc["passed"] is True


def test_run_interactive_transcript_saves_and_verifies(tmp_path):
    runner = CliRunner()
    inst = tmp_path / "inst.json"
    out = tmp_path / "interactive.json"
    assert runner.invoke(main, [
        "gen", "--kind", "random", "--m", "3", "--n", "3", "--d", "2",
        "--seed", "21", "--out", str(inst),
    ]).exit_code == 0
    res = runner.invoke(main, [
        "run", "--protocol", "determinant", "--instance", str(inst),
        "--mode", "interactive", "--seed", "77", "--permissive",
        "--out", str(out),
    ])
    assert res.exit_code == 0, res.output
    # interactive transcripts carry their seed, so they re-verify offline too
    res = runner.invoke(main, ["verify", str(out)])
    assert res.exit_code == 0, res.output

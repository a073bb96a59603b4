import json
import math

import pytest

from viskeep.cli import main
from viskeep.demos import BASIC_SCENARIO, CHAIN_SPEC, PROFILE_JSON
from viskeep.chains import chain_to_json_dict
from viskeep.scenarios import save_scenario, scenario_to_json_dict


@pytest.fixture
def basic_file(tmp_path):
    path = tmp_path / "basic.json"
    save_scenario(BASIC_SCENARIO, path)
    return path


def write_json(path, payload):
    path.write_text(json.dumps(payload) + "\n")
    return path


def test_check_feasible_scenario(basic_file, tmp_path):
    out = tmp_path / "report.json"
    assert main(["check", "--scenario", str(basic_file),
                 "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["feasible"] is True
    assert data["projection_agrees"] is True
    assert len(data["conditions"]) == 3


def test_check_infeasible_scenario(tmp_path, capsys):
    sc = scenario_to_json_dict(BASIC_SCENARIO)
    sc["Omega_L"] = 0.27
    path = write_json(tmp_path / "bad.json", sc)
    assert main(["check", "--scenario", str(path)]) == 1
    assert "leader_turn_rate" in capsys.readouterr().err


def test_check_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["check", "--scenario", str(path)]) == 2
    assert "error" in capsys.readouterr().err


def test_check_missing_file():
    assert main(["check", "--scenario", "/nonexistent/x.json"]) == 2


def test_synth_window(basic_file, tmp_path):
    out = tmp_path / "gain.json"
    dump = tmp_path / "poly.txt"
    assert main(["synth", "--scenario", str(basic_file), "--out", str(out),
                 "--dump-polytope", str(dump)]) == 0
    data = json.loads(out.read_text())
    assert data["gain"]["k11"] == pytest.approx(1.5173, abs=1e-3)
    assert data["certificates"]["admissible"] is True
    assert data["certificates"]["invariant"] is True
    assert data["kkt_residual"] <= 1e-7
    assert "rationalization" in data
    assert dump.exists() and "<=" in dump.read_text()


def test_synth_output_reproducible_byte_for_byte(basic_file, tmp_path):
    out1, out2 = tmp_path / "g1.json", tmp_path / "g2.json"
    assert main(["synth", "--scenario", str(basic_file), "--out", str(out1)]) == 0
    assert main(["synth", "--scenario", str(basic_file), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_synth_infeasible(tmp_path):
    sc = scenario_to_json_dict(BASIC_SCENARIO)
    sc["V_L"] = 0.999
    path = write_json(tmp_path / "sat.json", sc)
    assert main(["synth", "--scenario", str(path)]) == 1


def test_simulate_with_gain_file(basic_file, tmp_path):
    gain = write_json(tmp_path / "gain.json",
                      {"k11": 1.5173, "k22": 0.3707, "k23": 0.4925})
    profile = write_json(tmp_path / "profile.json", PROFILE_JSON["basic"])
    out = tmp_path / "run"
    code = main([
        "simulate", "--scenario", str(basic_file), "--gain", str(gain),
        "--profile", str(profile), "--s0", "0.3285,-0.1626,0.1071",
        "--horizon", "3.0", "--out", str(out),
    ])
    assert code == 0
    header = (out / "trace.csv").read_text().splitlines()[0]
    assert header.startswith("t,dp1,p2,beta")
    violations = json.loads((out / "violations.json").read_text())
    assert violations["clean"] is True and violations["clamp_events"] == 0


def test_simulate_rejects_oversized_start(basic_file, tmp_path):
    assert main([
        "simulate", "--scenario", str(basic_file), "--s0", "0.5,0,0",
        "--horizon", "1.0", "--out", str(tmp_path / "x"),
    ]) == 2


def test_simulate_chain(tmp_path):
    spec = write_json(tmp_path / "chain.json", chain_to_json_dict(CHAIN_SPEC))
    gains = write_json(tmp_path / "gains.json", [
        {"k11": 0.2066, "k22": 0.0315, "k23": 0.3361},
        {"k11": 0.5087, "k22": 0.0669, "k23": 0.3400},
        {"k11": 1.7273, "k22": 0.2678, "k23": 0.3348},
    ])
    profile = write_json(tmp_path / "profile.json", PROFILE_JSON["chain"])
    out = tmp_path / "run"
    code = main([
        "simulate", "--chain-spec", str(spec), "--gains", str(gains),
        "--profile", str(profile),
        "--s0", "0,0,0.0374;0,0,0.2244;0,0,0.2618",
        "--horizon", "3.0", "--out", str(out),
    ])
    assert code == 0
    for k in (1, 2, 3):
        assert (out / f"trace_link{k}.csv").exists()


def test_chain_command(tmp_path):
    spec = write_json(tmp_path / "chain.json", chain_to_json_dict(CHAIN_SPEC))
    out = tmp_path / "report.json"
    assert main(["chain", "--spec", str(spec), "--closed",
                 "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["feasible"]["feasible"] is True
    assert data["closed"]["feasible"] is False


def test_chain_command_uniform_infeasible(tmp_path):
    spec = write_json(tmp_path / "uniform.json", {
        "n": 3,
        "links": [{"a": 0.4, "b": 0.5, "d": 3.0}] * 2,
        "robots": [{"V": 0.3, "Omega": 0.5}] * 3,
    })
    assert main(["chain", "--spec", str(spec)]) == 1


def test_chain_command_length_bound(tmp_path):
    out = tmp_path / "len.json"
    code = main(["chain", "--maps", f"a=0.1,b={math.pi / 14},d=7",
                 "--max-n", "100", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["max_chain_length"]["max_robots"] == 34
    assert data["max_chain_length"]["capped"] is False


def test_chain_command_generate(tmp_path):
    out = tmp_path / "generated.json"
    code = main(["chain", "--generate", "a=0.1,d=7,n=10,V1=0.02",
                 "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["generated"]["n"] == 10
    assert data["generated"]["provenance"]["generator"]["n"] == 10
    assert data["feasible"]["feasible"] is True


def test_fme_round_trip(tmp_path, capsys):
    path = tmp_path / "sys.txt"
    path.write_text("1 0 <= 2\n-1 0 <= -1\n1 1 <= 3\n")
    out = tmp_path / "projected.txt"
    code = main(["fme", "--input", str(path), "--eliminate", "0",
                 "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert "1 <= 2" in text  # y <= 2 survives the projection
    assert "feasible: True" in capsys.readouterr().err


def test_fme_detects_infeasible(tmp_path, capsys):
    path = tmp_path / "sys.txt"
    path.write_text("1 <= 1\n-1 <= -2\n")
    assert main(["fme", "--input", str(path)]) == 1
    assert "feasible: False" in capsys.readouterr().err


def test_fme_matches_check_on_polytope_dump(basic_file, tmp_path):
    gain_out = tmp_path / "gain.json"
    dump = tmp_path / "poly.txt"
    assert main(["synth", "--scenario", str(basic_file),
                 "--out", str(gain_out), "--dump-polytope", str(dump)]) == 0
    assert main(["fme", "--input", str(dump), "--eliminate", "0,1,2",
                 "--out", str(tmp_path / "proj.txt")]) == 0


def test_demo_bundle(tmp_path, capsys):
    out = tmp_path / "demo"
    code = main(["demo", "--out", str(out), "--horizon", "2.0"])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary == {"basic": "ok", "ubb": "ok", "circle": "ok",
                       "chain": "ok"}
    for name in ("basic", "ubb", "circle"):
        assert (out / name / "scenario.json").exists()
        assert (out / name / "gain.json").exists()
        assert (out / name / "trace.csv").exists()
    assert (out / "chain" / "trace_link3.csv").exists()
    assert (out / "chain" / "gains.json").exists()

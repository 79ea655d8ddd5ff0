import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from percwalk import cli
from percwalk import serialize as io
from percwalk.hilbert import Topology


def run(tmp_path, *argv):
    return cli.main(["--out", str(tmp_path), *argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# init mini-language


def test_parse_init_forms():
    top = Topology.line(3)
    v, coin = cli.parse_init("LL", top, 2)
    assert v[0] == pytest.approx(1) and coin is not None
    v, _ = cli.parse_init("basis:1,R,2,L", top, 2)
    assert v[6 * 3 + 4] == 1
    v, coin = cli.parse_init("bell:0,1,0,0:1,2", top, 2)
    assert np.linalg.norm(v) == pytest.approx(1)
    w = (np.abs(v) ** 2).reshape(3, 2, 3, 2).sum(axis=(1, 3))
    assert w[1, 2] == pytest.approx(1)
    v, coin = cli.parse_init("bell:1,1j,0,0", top, 2)
    assert abs(coin.b) ** 2 == pytest.approx(0.5)
    v, _ = cli.parse_init("R", top, 1)
    assert v[1] == 1


@pytest.mark.parametrize("spec", ["bell:1,2", "basis:0,L,9,R", "XY", "bell:0,0,0,0", "basis:0,Q,0,L"])
def test_parse_init_rejects(spec):
    with pytest.raises(cli.UsageError):
        cli.parse_init(spec, Topology.line(3), 2)


# exit codes


def test_attractors_line4(tmp_path):
    assert run(tmp_path, "attractors", "--topology", "line", "--n", "4", "--check", "shift") == 0
    checks = json.loads((tmp_path / "checks.json").read_text())
    assert checks["sector_sizes"] == {"1": 21, "i": 10, "-i": 10, "-1": 2}
    manifest = json.loads((tmp_path / "attractors_manifest.json").read_text())
    assert manifest["exit_code"] == 0 and "basis.json" in manifest["outputs"]
    assert {"command", "argv", "flags", "seed", "version", "duration_s"} <= set(manifest)


def test_attractors_circle5_all(tmp_path):
    assert run(tmp_path, "attractors", "--topology", "circle", "--n", "5", "--check", "all") == 0
    checks = json.loads((tmp_path / "checks.json").read_text())
    assert checks["sector_sizes"] == {"1": 3}
    assert checks["skipped_checks"] == ["oracle"]
    assert run(tmp_path, "attractors", "--topology", "circle", "--n", "3", "--check", "all") == 0
    checks = json.loads((tmp_path / "checks.json").read_text())
    assert checks["oracle_dimensions"] == {"1": 3} and checks["skipped_checks"] == []


def test_attractors_check_failure(tmp_path):
    # the oracle finds a third lambda=-1 attractor at N=2
    assert run(tmp_path, "attractors", "--topology", "line", "--n", "2", "--check", "oracle") == 1
    checks = json.loads((tmp_path / "checks.json").read_text())
    assert checks["oracle_dimensions"]["-1"] == 3


def test_guard_exit(tmp_path):
    assert run(tmp_path, "attractors", "--topology", "line", "--n", "30", "--check", "oracle") == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["attractors", "--topology", "torus", "--n", "4"],
        ["attractors", "--topology", "line", "--n", "1"],
        ["evolve", "--topology", "line", "--n", "3", "--steps", "2", "--p", "1.5"],
        ["evolve", "--topology", "line", "--n", "3", "--steps", "2", "--init", "bogus"],
        ["evolve", "--topology", "line", "--n", "3", "--steps", "-1"],
        ["bogus"],
    ],
)
def test_usage_errors(tmp_path, argv):
    assert run(tmp_path, *argv) == 2


def test_seed_range(tmp_path):
    assert run(tmp_path, "--seed", str(2**64), "evolve", "--topology", "line", "--n", "2", "--steps", "1") == 2


# evolve


def test_evolve_zero_steps_echoes_initial(tmp_path):
    assert run(tmp_path, "evolve", "--topology", "line", "--n", "3", "--steps", "0", "--init", "basis:1,L,2,R") == 0
    rho = io.operator_from_json(io.read_json(tmp_path / "state.json"))
    psi, _ = cli.parse_init("basis:1,L,2,R", Topology.line(3), 2)
    np.testing.assert_array_equal(rho, np.outer(psi, psi.conj()))


def test_evolve_series(tmp_path):
    argv = ["evolve", "--topology", "line", "--n", "4", "--steps", "300", "--init", "psi-", "--series"]
    assert run(tmp_path, *argv) == 0
    rows = read_csv(tmp_path / "series.csv")
    assert rows[0] == ["t", "hs_distance"] and len(rows) == 302
    assert float(rows[-1][1]) < 1e-6
    manifest = json.loads((tmp_path / "evolve_manifest.json").read_text())
    assert manifest["results"]["mixing_time"] is not None


def test_mc_identical_seeds(tmp_path):
    argv = ["--seed", "7", "evolve", "--topology", "line", "--n", "3", "--steps", "5",
            "--mode", "mc", "--trajectories", "500", "--init", "LR"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["--out", str(a), *argv]) == 0
    assert cli.main(["--out", str(b), *argv]) == 0
    assert (a / "state.json").read_bytes() == (b / "state.json").read_bytes()


def test_replay_reproduces(tmp_path):
    argv = ["--out", str(tmp_path), "--seed", "3", "evolve", "--topology", "circle", "--n", "3", "--steps", "4",
            "--mode", "mc", "--trajectories", "200", "--p-list", "0.2,0.5,0.7", "--init", "psi+"]
    assert cli.main(argv) == 0
    first = (tmp_path / "state.json").read_bytes()
    (tmp_path / "state.json").unlink()
    assert cli.main(["replay", str(tmp_path / "evolve_manifest.json")]) == 0
    assert (tmp_path / "state.json").read_bytes() == first


# asymptotic and entanglement


def test_asymptotic_positions_csv(tmp_path):
    argv = ["--format", "csv", "asymptotic", "--topology", "line", "--n", "4", "--init", "LL", "--emit", "positions"]
    assert run(tmp_path, *argv) == 0
    rows = read_csv(tmp_path / "positions_phase2.csv")
    assert rows[0] == ["x", "y", "w"] and len(rows) == 17
    assert sum(float(r[2]) for r in rows[1:]) == pytest.approx(1)


def test_asymptotic_closed_form_circle(tmp_path):
    argv = ["asymptotic", "--topology", "circle", "--n", "5", "--init", "bell:0,1,0,0", "--emit", "coins",
            "--phase", "0", "--source", "closed-form"]
    assert run(tmp_path, *argv) == 0
    m = io.operator_from_json(io.read_json(tmp_path / "coins_phase0.json"))
    assert np.trace(m).real == pytest.approx(1)


def test_asymptotic_closed_form_unavailable(tmp_path):
    argv = ["asymptotic", "--topology", "line", "--n", "5", "--init", "LL", "--source", "closed-form"]
    assert run(tmp_path, *argv) == 2


def test_entanglement_pipeline(tmp_path):
    assert run(tmp_path, "asymptotic", "--topology", "circle", "--n", "5", "--init", "psi-", "--emit", "state", "--phase", "0") == 0
    src = tmp_path / "state_phase0.json"
    assert run(tmp_path, "entanglement", "--input", str(src), "--emit", "pt-spectrum") == 0
    res = json.loads((tmp_path / "entanglement_pt-spectrum.json").read_text())
    assert res["min_eigenvalue"] == pytest.approx(-0.1, abs=1e-12)
    assert res["is_ppt"] is False
    assert run(tmp_path, "entanglement", "--input", str(src), "--split", "coins", "--emit", "concurrence") == 0
    assert run(tmp_path, "entanglement", "--input", str(tmp_path / "missing.json")) == 2


# report


def test_report_figure2(tmp_path):
    assert run(tmp_path, "report", "--figure", "2", "--init", "LL") == 0
    grids = [np.array(read_csv(tmp_path / f"positions_phase{k}.csv")[1:], dtype=float)[:, 1:] for k in range(4)]
    assert all(g.shape == (4, 4) for g in grids)
    np.testing.assert_array_equal(grids[1], grids[3])


def test_report_figure1(tmp_path):
    assert run(tmp_path, "report", "--figure", "1", "--q", "0", "--grid", "20") == 0
    manifest = json.loads((tmp_path / "report_manifest.json").read_text())
    assert manifest["results"]["figure1_classifier_disagreements"] == 0


def test_report_claims(tmp_path):
    assert run(tmp_path, "report", "--check-claims", "--sizes", "3") == 0
    rep = json.loads((tmp_path / "discrepancies.json").read_text())
    assert rep["3"]["formulas_match"] is True
    assert rep["3"]["claim_ppt_for_all_inputs_holds"] is False
    assert "line4_closed_form_vs_projection" in rep


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "percwalk", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "bell:a,b,c,d" in proc.stdout

import json
import math

import pytest

from geogate import cli, sweeps
from geogate.pulseforge import PulseSequence


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(tmp_path, command, config_text="", *extra):
    out = tmp_path / "out"
    argv = [command, "--out", str(out), *extra]
    if config_text:
        argv += ["--config", write(tmp_path, config_text)]
    return cli.main(argv), out


def test_fidelity_command(tmp_path, capsys):
    rc, out = run(tmp_path, "fidelity", "[scenario]\npreset = square\nscheme = NGQG-A\ngate = S\n")
    assert rc == 0
    report = json.loads((out / "fidelity.json").read_text())
    assert report["scheme"] == "NGQG-A" and report["gate"] == "S"
    assert report["fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert len(report["per_state"]) == 6
    assert json.loads(capsys.readouterr().out)["fidelity"] == report["fidelity"]


def test_fidelity_with_noise_and_custom_gate(tmp_path):
    text = """
[scenario]
scheme = CNGQG-A
[gate]
alpha0_pi = 0.5
beta0_pi = 0
gamma_g_pi = 0.5
[noise]
epsilon = 0.1
[decoherence]
kappa_ratio = 1e-4
"""
    rc, out = run(tmp_path, "fidelity", text)
    assert rc == 0
    f = json.loads((out / "fidelity.json").read_text())["fidelity"]
    assert 0.9 < f < 0.999


def test_export_round_trip(tmp_path):
    rc, out = run(tmp_path, "export", "[scenario]\npreset = transmon\nscheme = OCNGQG-A\nk_pi = 1.13\n")
    assert rc == 0
    seq = PulseSequence.from_dict(json.loads((out / "sequence.json").read_text()))
    assert seq.k == pytest.approx(1.13 * math.pi)
    assert seq.duration * 1e9 == pytest.approx(200 / 3, abs=0.1)


def test_sweep_k_with_svg(tmp_path):
    text = "[scenario]\ngate = S\n[sweep]\npath = A\nmode = X\npoints = 11\n"
    rc, out = run(tmp_path, "sweep-k", text, "--svg", "--threads", "2")
    assert rc == 0
    summary = json.loads((out / "sweep_k.json").read_text())
    assert set(summary) >= {"argmax", "max_fidelity", "grid_spec"}
    assert (out / "sweep_k.csv").read_text().startswith("k,fidelity\n")
    assert (out / "sweep_k.svg").read_text().startswith("<svg")


def test_robustness_curve_and_map(tmp_path):
    text = "[scenario]\ngate = S\n[sweep]\nschemes = NGQG-A, DG\nerror_axis = epsilon\npoints = 5\n"
    rc, out = run(tmp_path, "robustness", text)
    assert rc == 0
    assert (out / "curve_NGQG-A_epsilon.csv").exists() and (out / "curve_DG_epsilon.csv").exists()
    text = "[scenario]\nscheme = NGQG-B\n[sweep]\nerror_axis = both\npoints = 3\n"
    rc, out = run(tmp_path, "robustness", text, "--svg")
    assert rc == 0
    assert (out / "map_NGQG-B.svg").exists()


def test_cp_effective_preset():
    text = "[scenario]\npreset = cp-effective\n[sweep]\nsamples = 10\n"
    cfg = cli.build_config(cli.read_config(text))
    assert cfg.scenario.setting == "effective"
    assert cfg.gate.name == "CP"


@pytest.mark.parametrize(
    "text, needle",
    [
        ("[scenario]\nbogus = 1\n", "bogus"),
        ("[nonsense]\n", "nonsense"),
        ("[envelope]\nomega_max = fast\n", "omega_max"),
        ("[scenario]\nscheme = XYZ\n", "scheme"),
        ("[gate]\nalpha0_pi = 0.5\n", "beta0_pi"),
        ("[decoherence]\nkappa_ratio = 1e-4\nkappa_z = 3\n", "kappa_ratio"),
        ("[decoherence]\nkappa_z = -3\n", "kappa_z"),
        ("[scenario]\nloops = 0\n", "loops"),
        ("[envelope]\nomega_max = 0\n", "omega_max"),
    ],
)
def test_config_errors_name_the_key(tmp_path, capsys, text, needle):
    rc, _ = run(tmp_path, "fidelity", text)
    assert rc == 2
    assert needle in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert cli.main(["fidelity", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_runtime_error_exit_code(tmp_path, capsys):
    rc, _ = run(tmp_path, "sweep-k", "[sweep]\npoints = 1\n")
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_bad_threads(tmp_path):
    assert cli.main(["fidelity", "--threads", "0", "--out", str(tmp_path)]) == 2


def test_unit_conversions():
    data = cli.read_config("[model]\ng12 = 10e6\n[scenario]\nk_pi = 0.5\n")
    assert data["model"]["g12"] == pytest.approx(2 * math.pi * 10e6)
    assert data["scenario"]["k_pi"] == pytest.approx(math.pi / 2)


def test_dt_override():
    cfg = cli.build_config(cli.read_config("[scenario]\ndt = 1e-3\n"), dt=2e-3)
    assert cfg.scenario.dt == 2e-3


def test_heatmap_svg_has_every_cell():
    grid = sweeps.SweepGrid((sweeps.Axis("x", "1", 0, 1, 3), sweeps.Axis("y", "1", 0, 1, 2)))
    svg = cli.heatmap_svg(sweeps.SweepResult(grid, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]), "t")
    assert svg.count("<rect") >= 6


def test_inline_comments():
    data = cli.read_config("[scenario]\npreset = transmon  ; a comment\nk_pi = 1.13  # another\n")
    assert data["scenario"]["preset"] == "transmon"
    assert data["scenario"]["k_pi"] == pytest.approx(1.13 * math.pi)

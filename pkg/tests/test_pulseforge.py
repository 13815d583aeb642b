import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import equal_up_to_phase
from geogate import pulseforge as pf
from geogate.metrics import propagator_distance
from geogate.models import TransmonSpec, TwoQubitSpec

PI = math.pi
GATES = {"S": pf.GATE_S, "H": pf.GATE_H}


def test_ocngqg_s_segments(oracles):
    rec = oracles["ocngqg_s_k113_segments"]
    seq = pf.build_ocngqg(pf.GATE_S, rec.inputs["k_pi"] * PI)
    assert [s.area for s in seq.segments] == pytest.approx(rec.expected["areas"], abs=rec.tolerance)
    assert [s.phase for s in seq.active] == pytest.approx(rec.expected["phases"], abs=rec.tolerance)


def test_ngqg_s_segments(oracles):
    rec = oracles["ngqg_a_s_segments"]
    seq = pf.build_ngqg(pf.GATE_S)
    assert [s.area for s in seq.segments] == pytest.approx(rec.expected["areas"])
    assert [s.phase for s in seq.segments] == pytest.approx(rec.expected["phases"])


def test_cngqg_two_loops(oracles):
    rec = oracles["cngqg_a_s_two_loops"]
    seq = pf.build_cngqg(pf.GATE_S, 2)
    assert len(seq.segments) == rec.expected["count"]
    assert seq.segments[1].phase == pytest.approx(rec.expected["phase_2"])
    assert seq.segments[4].phase == pytest.approx(rec.expected["phase_5"])


def test_segment_counts(oracles):
    rec = oracles["export_segment_counts"].expected
    assert len(pf.build_ocngqg(pf.GATE_S, 1.13 * PI).active) == rec["ocngqg_s_nonzero"]
    assert [s.area for s in pf.build_ngqg(pf.GATE_H).segments] == pytest.approx(rec["ngqg_a_h_areas"])
    assert len(pf.build_dynamical("H").segments) == rec["dg_h_count"]


def test_gate_targets(oracle_matrix):
    for name, gate in GATES.items():
        assert np.allclose(gate.unitary(), oracle_matrix("gate_targets", name), atol=1e-12)


def test_dg_propagators(oracle_matrix):
    for name in GATES:
        u = pf.ideal_propagator(pf.build_dynamical(name))
        assert np.allclose(u, oracle_matrix("dg_propagators", name), atol=1e-12)


@pytest.mark.parametrize("scheme", pf.SCHEMES)
@pytest.mark.parametrize("name", ["S", "H"])
def test_products_match_oracle(oracles, oracle_matrix, scheme, name):
    k = oracles["scheme_products_k13"].inputs["k_pi"] * PI
    u = pf.ideal_propagator(pf.build_scheme(scheme, GATES[name], k=k))
    assert np.allclose(u, oracle_matrix("scheme_products_k13", name, scheme), atol=1e-12)


@pytest.mark.parametrize("scheme", pf.SCHEMES)
@pytest.mark.parametrize("name", ["S", "H"])
def test_ideal_propagators_are_gates(scheme, name):
    gate = GATES[name]
    u = pf.ideal_propagator(pf.build_scheme(scheme, gate, k=0.77 * PI))
    assert propagator_distance(u, gate.unitary()) < 1e-12


@given(st.floats(0, 2 * PI), st.sampled_from(["A", "B"]), st.sampled_from(["S", "H"]))
def test_ocngqg_any_k(k, path, name):
    gate = GATES[name]
    assert equal_up_to_phase(pf.ideal_propagator(pf.build_ocngqg(gate, k, path)), gate.unitary(), 1e-12)


@given(st.floats(0, PI), st.floats(-PI, PI), st.floats(-1.9 * PI, 1.9 * PI), st.integers(1, 4))
def test_arbitrary_gates(a0, b0, g, loops):
    gate = pf.GateSpec(a0, b0, g)
    for path in "AB":
        u = pf.ideal_propagator(pf.build_cngqg(gate, loops, path))
        assert propagator_distance(u, gate.unitary()) < 1e-10


def test_k_range():
    with pytest.raises(ValueError):
        pf.build_ocngqg(pf.GATE_S, -0.1)
    with pytest.raises(ValueError):
        pf.build_ocngqg(pf.GATE_S, 2 * PI + 0.1)


def test_bad_inputs():
    with pytest.raises(ValueError):
        pf.GateSpec(-0.1, 0, 0.1)
    with pytest.raises(ValueError):
        pf.GateSpec(0, 0, 2 * PI)
    with pytest.raises(ValueError):
        pf.build_scheme("XYZ", pf.GATE_S)
    with pytest.raises(ValueError):
        pf.build_ngqg(pf.GATE_S, path="C")
    with pytest.raises(ValueError):
        pf.build_cngqg(pf.GATE_S, loops=0)
    with pytest.raises(ValueError):
        pf.Envelope("gauss")
    with pytest.raises(ValueError):
        pf.Envelope(omega_max=0)
    with pytest.raises(KeyError):
        pf.optimal_k("NGQG-A", pf.GATE_S)


def test_optimal_k_table():
    assert pf.optimal_k("OCNGQG-A", pf.GATE_H, "X") == pytest.approx(1.43 * PI)
    assert pf.optimal_k("OCNGQG-A", pf.GATE_S) == pytest.approx(1.13 * PI)


def test_transmon_durations():
    env = TransmonSpec().envelope()
    ns = {s: pf.build_scheme(s, pf.GATE_S, env).duration * 1e9 for s in ("OCNGQG-A", "NGQG-A", "CNGQG-A")}
    assert ns["OCNGQG-A"] == pytest.approx(200 / 3, abs=0.1)
    assert ns["NGQG-A"] == pytest.approx(100 / 3, abs=0.1)
    assert ns["CNGQG-A"] == pytest.approx(200 / 3, abs=0.1)


def test_cp_durations():
    env = TwoQubitSpec().envelope()
    ocn = pf.build_scheme("OCNGQG-A", pf.GATE_CP, env, k=1.27 * PI).duration
    ngq = pf.build_ngqg(pf.GATE_CP, env=env).duration
    assert ocn * 1e9 == pytest.approx(121.6, abs=1)
    assert ngq * 1e9 == pytest.approx(60.8, abs=1)


def test_square_and_sin2_durations():
    assert pf.Envelope().duration(PI) == PI
    assert pf.Envelope(pf.SIN2, 2.0).duration(PI) == PI


def test_sin2_area():
    env = pf.Envelope(pf.SIN2, 3.0)
    T = env.duration(PI / 2)
    tau = np.linspace(0, T, 20001)
    assert np.trapezoid(env.amplitude(tau, T), tau) == pytest.approx(PI / 2, rel=1e-8)


def test_drag_quadrature(oracles):
    rec = oracles["drag_quadrature_quarter"]
    env = pf.Envelope(pf.SIN2, rec.inputs["omega_max"], rec.inputs["alpha"])
    T = rec.inputs["T"]
    val = env.complex_amplitude(np.array([T / 4]), T)[0]
    assert val.imag == pytest.approx(rec.expected, rel=rec.tolerance)
    assert val.real == pytest.approx(rec.inputs["omega_max"] / 2, rel=1e-12)


def test_json_round_trip():
    seq = pf.build_scheme("OCNGQG-B", pf.GATE_H, TransmonSpec().envelope(), k=1.67 * PI)
    back = pf.PulseSequence.from_json(seq.to_json())
    assert back == seq


def test_sampled_drive():
    seq = pf.build_ngqg(pf.GATE_S)
    shortest = min(s.duration for s in seq.active)
    with pytest.raises(ValueError):
        pf.sampled_drive(seq, shortest / 50)
    with pytest.raises(ValueError):
        pf.sampled_drive(seq, 0.0)
    d = pf.sampled_drive(seq, shortest / 200)
    assert d.times[0] == 0.0 and d.times[-1] <= seq.duration
    assert np.all(np.abs(d.amplitude) == 1.0)
    assert set(np.round(d.phase, 12)) == set(np.round([s.phase for s in seq.active], 12))


def test_reduce_phase():
    assert pf.reduce_phase(-PI / 2) == pytest.approx(1.5 * PI)

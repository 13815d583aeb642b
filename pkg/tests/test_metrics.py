import json
import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from geogate import pulseforge as pf
from geogate.lindblad import piecewise_propagator
from geogate.metrics import (
    PAIR_COMPUTATIONAL,
    SINGLE_QUBIT_STATES,
    TWO_QUBIT_STATES,
    cp_target,
    propagator_distance,
    single_qubit_fidelity,
    state_averaged_fidelity,
    two_qubit_fidelity,
)
from geogate.matrixcore import I2, SX
from geogate.models import (
    DecoherenceSpec,
    NoiseSpec,
    TwoQubitSpec,
    collapse_operators,
    effective_cp_hamiltonian,
    ideal_qubit_hamiltonian,
)

PI = math.pi


def test_state_sets():
    assert len(SINGLE_QUBIT_STATES) == 6
    assert len(TWO_QUBIT_STATES) == 16
    for s in (*SINGLE_QUBIT_STATES, *TWO_QUBIT_STATES):
        assert np.linalg.norm(s) == pytest.approx(1.0)
    assert PAIR_COMPUTATIONAL == (0, 1, 3, 4)


def test_ideal_construction_is_exact(oracles):
    rec = oracles["ideal_construction_bounds"].expected
    seq = pf.build_scheme("OCNGQG-A", pf.GATE_S)
    res = single_qubit_fidelity(pf.GATE_S.unitary(), ideal_qubit_hamiltonian(seq))
    assert res.fidelity == pytest.approx(rec["ocngqg_s_fidelity"], abs=1e-9)
    assert len(res.per_state) == 6


def test_identity_vs_cp(oracles):
    rec = oracles["cp_identity_fidelity"]
    spec = TwoQubitSpec()
    seq = pf.PulseSequence((), "idle", pf.GATE_CP, spec.envelope())
    h = effective_cp_hamiltonian(spec, seq, embed=True)
    assert two_qubit_fidelity(cp_target(), h).fidelity == pytest.approx(rec.expected, abs=rec.tolerance)


def test_effective_cp(oracles):
    rec = oracles["ideal_construction_bounds"].expected
    spec = TwoQubitSpec()
    seq = pf.build_scheme("OCNGQG-A", pf.GATE_CP, spec.envelope(), k=1.27 * PI)
    h = effective_cp_hamiltonian(spec, seq, embed=True)
    assert two_qubit_fidelity(cp_target(), h).fidelity >= rec["cp_effective_min"]


def test_non_unitary_target():
    seq = pf.build_ngqg(pf.GATE_S)
    with pytest.raises(ValueError):
        single_qubit_fidelity(np.diag([1.0, 0.5]), ideal_qubit_hamiltonian(seq))


def test_distance(oracles):
    rec = oracles["distance_identity_sigma_x"]
    assert propagator_distance(I2, SX) == pytest.approx(rec.expected, abs=rec.tolerance)
    with pytest.raises(ValueError):
        propagator_distance(I2, np.eye(3))


@given(st.floats(-PI, PI))
def test_distance_ignores_global_phase(theta):
    u = pf.GATE_H.unitary()
    assert propagator_distance(u, np.exp(1j * theta) * u) < 1e-12


@given(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.floats(0, 0.05))
def test_fidelity_bounds(eps, delta, kappa):
    seq = pf.build_scheme("NGQG-B", pf.GATE_H)
    h = ideal_qubit_hamiltonian(seq, NoiseSpec(eps, delta))
    res = single_qubit_fidelity(pf.GATE_H.unitary(), h, collapse_operators("ideal", DecoherenceSpec(kappa, kappa)))
    assert all(-1e-9 <= p <= 1 + 1e-9 for p in res.per_state)
    assert res.fidelity == pytest.approx(np.mean(res.per_state))


def test_six_state_average_matches_haar():
    # for a unitary error the six-state average equals the Haar average (2 + |tr U^+ V|^2) / 6
    seq = pf.build_scheme("DG", pf.GATE_S)
    h = ideal_qubit_hamiltonian(seq, NoiseSpec(0.1, 0.05))
    v = piecewise_propagator(h)
    u = pf.GATE_S.unitary()
    haar = (2 + abs(np.trace(u.conj().T @ v)) ** 2) / 6
    assert single_qubit_fidelity(u, h).fidelity == pytest.approx(haar, abs=1e-10)
    # Monte Carlo cross-check of the same quantity
    rng = np.random.default_rng(5)
    psi = scipy.stats.unitary_group.rvs(2, size=4000, random_state=rng)[:, :, 0]
    mc = np.mean(np.abs(np.einsum("si,si->s", (psi @ u.T).conj(), psi @ v.T)) ** 2)
    assert mc == pytest.approx(haar, abs=5e-3)


def test_result_serialisation():
    seq = pf.build_ngqg(pf.GATE_S)
    res = single_qubit_fidelity(pf.GATE_S.unitary(), ideal_qubit_hamiltonian(seq))
    data = json.loads(res.to_json())
    assert data["fidelity"] == res.fidelity
    assert res.to_dict()["per_state"] == res.per_state


def test_explicit_index():
    seq = pf.build_ngqg(pf.GATE_S)
    h = ideal_qubit_hamiltonian(seq)
    res = state_averaged_fidelity(pf.GATE_S.unitary(), SINGLE_QUBIT_STATES, h, index=(0, 1))
    assert res.fidelity == pytest.approx(1.0, abs=1e-9)

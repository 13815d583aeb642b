import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from geogate import models
from geogate import pulseforge as pf
from geogate.lindblad import IntegrationError, piecewise_propagator, propagate_states
from geogate.matrixcore import is_hermitian
from geogate.metrics import cp_target, propagator_distance, two_qubit_fidelity
from geogate.models import (
    CP_SUBSPACE,
    DecoherenceSpec,
    NoiseSpec,
    TransmonSpec,
    TwoQubitSpec,
    bessel_j,
    collapse_operators,
    dissipators,
    effective_cp_hamiltonian,
    ideal_qubit_hamiltonian,
    lowering,
    transmon_hamiltonian,
    twoqubit_interaction_hamiltonian,
)

PI = math.pi


def sample_times(h, n=37):
    return np.linspace(0, h.duration, n)


def assert_hermitian_everywhere(h):
    for t in sample_times(h):
        assert is_hermitian(h.evaluate(float(t)), atol=1e-9 * max(1.0, h.max_rate))


@given(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.sampled_from(pf.SCHEMES))
def test_ideal_hamiltonian_hermitian(eps, delta, scheme):
    h = ideal_qubit_hamiltonian(pf.build_scheme(scheme, pf.GATE_H, k=1.1 * PI), NoiseSpec(eps, delta))
    assert_hermitian_everywhere(h)


@pytest.mark.parametrize("drag", [True, False])
def test_transmon_hamiltonian_hermitian(drag):
    seq = pf.build_scheme("OCNGQG-A", pf.GATE_S, TransmonSpec().envelope(drag))
    assert_hermitian_everywhere(transmon_hamiltonian(seq, NoiseSpec(0.1, -0.1)))


def test_pair_hamiltonians_hermitian():
    spec = TwoQubitSpec()
    seq = pf.build_scheme("OCNGQG-A", pf.GATE_CP, spec.envelope(), k=1.27 * PI)
    assert_hermitian_everywhere(twoqubit_interaction_hamiltonian(spec, seq, NoiseSpec(0.05, 0.05)))
    assert_hermitian_everywhere(effective_cp_hamiltonian(spec, seq, NoiseSpec(0.0, 0.1), embed=True))


def test_z_error_term(oracle_matrix, oracles):
    rec = oracles["z_error_term"]
    seq = pf.build_ngqg(pf.GATE_S, env=pf.Envelope(omega_max=rec.inputs["omega_max"]))
    h = ideal_qubit_hamiltonian(seq, NoiseSpec(delta=rec.inputs["delta"]))
    clean = ideal_qubit_hamiltonian(seq)
    diff = h.evaluate(0.3) - clean.evaluate(0.3)
    assert np.allclose(diff, oracle_matrix("z_error_term"), atol=rec.tolerance)


def test_transmon_static_levels(oracles):
    rec = oracles["transmon_static_d3"]
    spec = TransmonSpec(anharmonicity=rec.inputs["alpha"])
    seq = pf.build_ngqg(pf.GATE_S, env=spec.envelope())
    h = transmon_hamiltonian(seq, spec=spec)
    # the sin^2 drive vanishes at t = 0
    assert np.allclose(np.diag(h.evaluate(0.0)).real, rec.expected, atol=rec.tolerance)


def test_unstable_step_is_reported():
    seq = pf.build_ngqg(pf.GATE_S, env=pf.Envelope(pf.SIN2, 2 * PI * 60e6))
    h = transmon_hamiltonian(seq, spec=TransmonSpec(anharmonicity=2 * PI * 1e12))
    with pytest.raises(IntegrationError):
        piecewise_propagator(h, dt=seq.duration / 4000)


def test_transmon_needs_three_levels():
    with pytest.raises(ValueError):
        TransmonSpec(levels=2)
    with pytest.raises(ValueError):
        collapse_operators(models.TRANSMON, DecoherenceSpec(), levels=2)


def test_bad_specs():
    with pytest.raises(ValueError):
        NoiseSpec(math.nan, 0)
    with pytest.raises(ValueError):
        DecoherenceSpec(-1.0, 0.0)
    with pytest.raises(ValueError):
        collapse_operators("fluxonium", DecoherenceSpec())


def test_g_eff(oracles):
    rec = oracles["g_eff_beta18"]
    spec = TwoQubitSpec(g12=rec.inputs["g12"], beta=rec.inputs["beta"])
    assert spec.g_eff == pytest.approx(rec.expected, rel=rec.tolerance)
    assert spec.g_eff / (2 * PI * 1e6) == pytest.approx(16.448, abs=1e-3)


@given(st.integers(0, 3), st.floats(-10, 10))
def test_bessel_against_scipy(n, x):
    assert bessel_j(n, x) == pytest.approx(scipy.special.jv(n, x), abs=1e-12)


def test_bessel_negative_order():
    assert bessel_j(-1, 1.8) == pytest.approx(-bessel_j(1, 1.8))


def test_lowering_operator():
    a = lowering(3)
    assert np.allclose(a.conj().T @ a, np.diag([0, 1, 2]))


def test_dissipators_drop_zero_rates():
    ch = collapse_operators(models.TWO_TRANSMON, DecoherenceSpec(0.0, 2.0))
    assert len(ch) == 4
    kept = dissipators(ch)
    assert len(kept) == 2 and all(r == 2.0 for r, _ in kept)


def test_ideal_block_of_transmon():
    # with a very stiff anharmonicity the qubit block reduces to the ideal model
    spec = TransmonSpec(anharmonicity=2 * PI * 100e9)
    seq = pf.build_ngqg(pf.GATE_S, env=pf.Envelope(pf.SIN2, spec.omega_max))
    u3 = piecewise_propagator(transmon_hamiltonian(seq, spec=spec))
    u2 = piecewise_propagator(ideal_qubit_hamiltonian(seq))
    assert propagator_distance(u3[:2, :2], u2) < 1e-3


def test_level_truncation_converges():
    env = TransmonSpec().envelope()
    seq = pf.build_scheme("OCNGQG-A", pf.GATE_S, env)
    psi = np.array([1, 1, 0, 0], dtype=complex) / math.sqrt(2)
    dt = seq.duration / 20000
    f = {}
    for d in (3, 4, 5):
        h = transmon_hamiltonian(seq, spec=TransmonSpec(levels=d))
        out = propagate_states(h, np.r_[psi[:2], np.zeros(d - 2)], dt=dt).final_state
        f[d] = out[:2]
    assert np.linalg.norm(f[4] - f[5]) < np.linalg.norm(f[3] - f[5]) + 1e-9
    assert np.linalg.norm(f[3] - f[5]) < 1e-2


def test_effective_model_is_exact_gate():
    spec = TwoQubitSpec()
    seq = pf.build_scheme("OCNGQG-A", pf.GATE_CP, spec.envelope(), k=1.27 * PI)
    h = effective_cp_hamiltonian(spec, seq, embed=True)
    assert two_qubit_fidelity(cp_target(), h).fidelity > 1 - 1e-9


def test_effective_model_two_level():
    spec = TwoQubitSpec()
    seq = pf.build_ngqg(pf.GATE_CP, env=spec.envelope())
    u = piecewise_propagator(effective_cp_hamiltonian(spec, seq), dt=seq.duration / 4000)
    assert propagator_distance(u, pf.GATE_CP.unitary()) < 1e-9


def test_full_pair_close_to_effective():
    spec = TwoQubitSpec()
    seq = pf.build_ngqg(pf.GATE_CP, env=spec.envelope())
    full = two_qubit_fidelity(cp_target(), twoqubit_interaction_hamiltonian(spec, seq)).fidelity
    assert full > 0.98


def test_full_pair_rabi_period():
    spec = TwoQubitSpec()
    period = 2 * PI / spec.g_eff
    # resonant drive in phase 0 for one nominal period
    seq = pf.PulseSequence((pf.PulseSegment(2 * PI, 0.0, period * 1.2),), "probe", pf.GATE_CP, spec.envelope())
    h = twoqubit_interaction_hamiltonian(spec, seq)
    psi0 = np.zeros(9, complex)
    psi0[CP_SUBSPACE[0]] = 1
    run = propagate_states(h, psi0, record_every=5)
    p02 = np.abs(run.samples[:, CP_SUBSPACE[1]]) ** 2
    t_half = run.times[int(np.argmax(p02))]
    assert 2 * t_half == pytest.approx(period, rel=0.03)

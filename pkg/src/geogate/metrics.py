"""State-averaged gate fidelities and propagator distances.

The single-qubit fidelity averages ``<psi|U^+ rho(tau) U|psi>`` over the six
axis states of the Bloch sphere; the two-qubit one averages over the 16
products of ``{|0>, |1>, (|0>-i|1>)/sqrt2, (|0>+|1>)/sqrt2}``. Levels outside
the computational block keep zero amplitude in the ideal output state, so
leaked population simply lowers the overlap.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lindblad import evolve_lindblad, propagate_states
from .matrixcore import is_unitary
from .models import Hamiltonian, dissipators, two_level_index

_R = 1 / math.sqrt(2)

SINGLE_QUBIT_STATES = (
    np.array([1, 0], dtype=complex),
    np.array([0, 1], dtype=complex),
    np.array([_R, 1j * _R]),
    np.array([_R, -1j * _R]),
    np.array([_R, _R], dtype=complex),
    np.array([_R, -_R], dtype=complex),
)

TWO_QUBIT_FACTOR_STATES = (
    np.array([1, 0], dtype=complex),
    np.array([0, 1], dtype=complex),
    np.array([_R, -1j * _R]),
    np.array([_R, _R], dtype=complex),
)

TWO_QUBIT_STATES = tuple(np.kron(a, b) for a, b in itertools.product(TWO_QUBIT_FACTOR_STATES, repeat=2))

# |00>, |01>, |10>, |11> inside the 3x3-level pair space.
PAIR_COMPUTATIONAL = tuple(two_level_index(a, b) for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)))


@dataclass
class FidelityResult:
    fidelity: float
    per_state: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"fidelity": self.fidelity, "per_state": list(self.per_state)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def cp_target(gamma: float = math.pi / 2) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(-1j * gamma)])


def _embed(vectors: np.ndarray, dim: int, index: Sequence[int]) -> np.ndarray:
    out = np.zeros((len(vectors), dim), dtype=complex)
    out[:, list(index)] = vectors
    return out


def state_averaged_fidelity(
    target: np.ndarray,
    states: Sequence[np.ndarray],
    h: Hamiltonian,
    collapse: Sequence[tuple[float, np.ndarray]] = (),
    index: Sequence[int] | None = None,
    dt: float | None = None,
) -> FidelityResult:
    """Mean overlap of evolved states with ``target @ psi`` over ``states``.

    ``index`` places the computational basis inside the model's space
    (defaults to the first ``len(target)`` levels). Without dissipation the
    states are propagated as vectors, which is equivalent and cheaper.
    """
    target = np.asarray(target, dtype=complex)
    if not is_unitary(target, atol=1e-9):
        raise ValueError("target must be unitary")
    if index is None:
        index = range(target.shape[0])
    psi0 = _embed(np.array(states), h.dim, index)
    ideal = _embed(np.array(states) @ target.T, h.dim, index)
    if dissipators(collapse):
        rho0 = np.einsum("si,sj->sij", psi0, psi0.conj())
        rho = evolve_lindblad(h, collapse, rho0, dt=dt).final_state
        overlaps = np.einsum("si,sij,sj->s", ideal.conj(), rho, ideal)
    else:
        out = propagate_states(h, psi0, dt=dt).final_state
        overlaps = np.abs(np.einsum("si,si->s", ideal.conj(), out)) ** 2
    if np.max(np.abs(np.imag(overlaps))) > 1e-8:
        raise ArithmeticError("state overlaps have a non-negligible imaginary part")
    per_state = [float(v) for v in np.real(overlaps)]
    return FidelityResult(float(np.mean(per_state)), per_state)


def single_qubit_fidelity(
    target: np.ndarray,
    h: Hamiltonian,
    collapse: Sequence[tuple[float, np.ndarray]] = (),
    dt: float | None = None,
) -> FidelityResult:
    """Six-state average fidelity; the qubit occupies the two lowest levels of ``h``."""
    if h.dim < 2:
        raise ValueError("model dimension must be at least 2")
    return state_averaged_fidelity(target, SINGLE_QUBIT_STATES, h, collapse, (0, 1), dt)


def two_qubit_fidelity(
    target: np.ndarray,
    h: Hamiltonian,
    collapse: Sequence[tuple[float, np.ndarray]] = (),
    dt: float | None = None,
) -> FidelityResult:
    """16-state average fidelity for the 3x3-level transmon pair."""
    index = PAIR_COMPUTATIONAL if h.dim == 9 else tuple(range(4))
    return state_averaged_fidelity(target, TWO_QUBIT_STATES, h, collapse, index, dt)


def propagator_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``1 - |tr(a^+ b)| / dim``, blind to a global phase."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(1.0 - abs(np.trace(a.conj().T @ b)) / a.shape[0])

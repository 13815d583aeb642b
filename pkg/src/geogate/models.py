"""Hamiltonians and collapse operators for the three physical settings.

* ideal two-level qubit with X (amplitude) and Z (detuning) errors,
* a leaky transmon in the frame rotating at the drive frequency,
* two capacitively coupled 3-level transmons with a parametric drive,
  plus the effective two-level model on ``{|11>, |02>}``.

A :class:`Hamiltonian` is stored as a sum ``sum_j c_j(t) M_j`` of constant
matrices with scalar coefficients. The integrator kernels consume that form
directly, so nothing here is evaluated per time step in Python.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .matrixcore import SZ, kron, projector
from .pulseforge import SQUARE, SIN2, Envelope, PulseSequence

TWO_PI = 2 * math.pi

IDEAL = "ideal"
TRANSMON = "transmon"
TWO_TRANSMON = "two-transmon"


@dataclass(frozen=True)
class NoiseSpec:
    """Systematic error ratios: ``epsilon`` scales the drive, ``delta`` detunes."""

    epsilon: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and math.isfinite(self.delta)):
            raise ValueError("noise ratios must be finite")


@dataclass(frozen=True)
class DecoherenceSpec:
    """Dephasing and decay rates in rad/s."""

    kappa_z: float = 0.0
    kappa_minus: float = 0.0

    def __post_init__(self):
        if self.kappa_z < 0 or self.kappa_minus < 0:
            raise ValueError("decoherence rates must be nonnegative")


@dataclass(frozen=True)
class TransmonSpec:
    levels: int = 3
    anharmonicity: float = TWO_PI * 320e6
    omega_max: float = TWO_PI * 60e6

    def __post_init__(self):
        if self.levels < 3:
            raise ValueError("a transmon model needs at least 3 levels")

    def envelope(self, drag: bool = True) -> Envelope:
        return Envelope(SIN2, self.omega_max, self.anharmonicity if drag else None)


@dataclass(frozen=True)
class TwoQubitSpec:
    """Parametrically driven pair of 3-level transmons.

    ``nu`` defaults to the resonance ``delta_omega + alpha2``.
    """

    g12: float = TWO_PI * 10e6
    delta_omega: float = TWO_PI * 594e6
    alpha1: float = TWO_PI * 320e6
    alpha2: float = TWO_PI * 300e6
    beta: float = 1.8
    nu: float | None = None

    @property
    def drive_frequency(self) -> float:
        return self.delta_omega + self.alpha2 if self.nu is None else self.nu

    @property
    def g_eff(self) -> float:
        return 2.0 * math.sqrt(2.0) * self.g12 * bessel_j(1, self.beta)

    def envelope(self) -> Envelope:
        return Envelope(SQUARE, self.g_eff)


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind by its ascending series."""
    if n < 0:
        return (-1) ** n * bessel_j(-n, x)
    half = x / 2.0
    term = half**n / math.factorial(n)
    total = term
    m = 0
    while True:
        m += 1
        term *= -(half * half) / (m * (m + n))
        total += term
        if abs(term) <= 1e-17 * max(abs(total), 1e-300) or m > 200:
            return total


@dataclass(frozen=True)
class Hamiltonian:
    """Time-dependent Hermitian operator ``H(t) = sum_j c_j(t) terms[j]``.

    ``coefficient_fn(t, seg)`` returns an array of shape ``(len(t), J)``;
    ``seg`` is the index of the segment containing each time, which resolves
    the value at a segment boundary. ``breakpoints`` are the segment edges
    and ``max_rate`` bounds both the operator norm and the fastest
    oscillation in the coefficients (rad/s).
    """

    dim: int
    terms: np.ndarray
    coefficient_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    breakpoints: np.ndarray
    max_rate: float

    @property
    def duration(self) -> float:
        return float(self.breakpoints[-1])

    def segment_of(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        nseg = max(len(self.breakpoints) - 1, 1)
        return np.clip(np.searchsorted(self.breakpoints, t, side="right") - 1, 0, nseg - 1)

    def coefficients(self, t, seg=None) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        seg = self.segment_of(t) if seg is None else np.atleast_1d(np.asarray(seg, dtype=int))
        return np.asarray(self.coefficient_fn(t, seg), dtype=complex).reshape(len(t), len(self.terms))

    def evaluate(self, t: float, seg: int | None = None) -> np.ndarray:
        c = self.coefficients([t], None if seg is None else [seg])[0]
        return np.tensordot(c, self.terms, axes=1)

    __call__ = evaluate


def _rate_bound(terms: np.ndarray, coeffs: np.ndarray, extra: float = 0.0) -> float:
    norms = np.array([np.linalg.norm(m, 2) for m in terms])
    return float(np.max(np.abs(coeffs), axis=0) @ norms) + extra


def _probe(seq: PulseSequence, fn, n: int = 2001):
    """Coefficient samples on a uniform grid, used only for step-size bounds."""
    bp = seq.breakpoints
    t = np.linspace(0.0, bp[-1], n) if bp[-1] > 0 else np.zeros(1)
    seg = np.clip(np.searchsorted(bp, t, side="right") - 1, 0, max(len(bp) - 2, 0))
    return fn(t, seg)


def _drive_coefficients(seq: PulseSequence, scale: float):
    """Complex ``scale * Omega_R(t) * exp(-i phi)`` for the lowering part of the drive."""

    def fn(t, seg):
        if not seq.active:
            return np.zeros(len(t), complex)
        amp, phase = seq.drive(t, seg)
        return scale * amp * np.exp(-1j * phase)

    return fn


def ideal_qubit_hamiltonian(seq: PulseSequence, noise: NoiseSpec = NoiseSpec()) -> Hamiltonian:
    """``-(delta Om/2) sz + (1+eps)/2 Omega(t) (cos phi sx + sin phi sy)``."""
    om = seq.envelope.omega_max
    terms = np.array([SZ, projector(2, 0, 1), projector(2, 1, 0)])
    drive = _drive_coefficients(seq, (1.0 + noise.epsilon) / 2.0)
    z = -noise.delta * om / 2.0

    def coefficient_fn(t, seg):
        c = drive(t, seg)
        return np.column_stack([np.full(len(t), z, dtype=complex), c, np.conj(c)])

    rate = _rate_bound(terms, _probe(seq, coefficient_fn))
    return Hamiltonian(2, terms, coefficient_fn, seq.breakpoints, rate)


def lowering(levels: int) -> np.ndarray:
    """``sum_l sqrt(l) |l-1><l|``."""
    return np.diag(np.sqrt(np.arange(1, levels)), 1).astype(complex)


def number(levels: int) -> np.ndarray:
    return np.diag(np.arange(levels)).astype(complex)


def transmon_hamiltonian(
    seq: PulseSequence,
    noise: NoiseSpec = NoiseSpec(),
    spec: TransmonSpec = TransmonSpec(),
) -> Hamiltonian:
    """Rotating-frame transmon with DRAG drive and level-weighted Z error.

    Diagonal ``-l(l-1)/2 alpha + delta Om l``; ladder coupling
    ``(sqrt(l)/2)(1+eps) Omega_R(t) exp(-i phi) |l-1><l| + h.c.``. The DRAG
    quadrature is whatever the sequence envelope carries.
    """
    d = spec.levels
    if d < 3:
        raise ValueError("transmon model needs at least 3 levels")
    om = seq.envelope.omega_max
    l = np.arange(d)
    static = np.diag(-l * (l - 1) / 2.0 * spec.anharmonicity + noise.delta * om * l).astype(complex)
    a = lowering(d)
    terms = np.array([static, a, a.conj().T])
    drive = _drive_coefficients(seq, (1.0 + noise.epsilon) / 2.0)

    def coefficient_fn(t, seg):
        c = drive(t, seg)
        return np.column_stack([np.ones(len(t), dtype=complex), c, np.conj(c)])

    rate = _rate_bound(terms, _probe(seq, coefficient_fn))
    return Hamiltonian(d, terms, coefficient_fn, seq.breakpoints, rate)


def two_level_index(l1: int, l2: int, levels: int = 3) -> int:
    return levels * l1 + l2


def _pair_op(a: tuple[int, int], b: tuple[int, int]) -> np.ndarray:
    return projector(9, two_level_index(*a), two_level_index(*b))


def twoqubit_interaction_hamiltonian(
    spec: TwoQubitSpec,
    seq: PulseSequence,
    noise: NoiseSpec = NoiseSpec(),
) -> Hamiltonian:
    """Interaction-picture Hamiltonian of the coupled pair on 3x3 levels.

    Three exchange terms, each dressed by ``exp(i beta cos(nu t + eta))``.
    ``eta`` follows the sequence: ``eta = phi_segment + pi/2``. Errors enter
    as ``g12 -> (1+eps) g12`` and ``Delta -> Delta + delta g12`` with ``nu``
    held fixed.
    """
    g = (1.0 + noise.epsilon) * spec.g12
    detuning = spec.delta_omega + noise.delta * spec.g12
    nu = spec.drive_frequency
    freqs = np.array([detuning, detuning - spec.alpha1, detuning + spec.alpha2])
    ops = [
        _pair_op((1, 0), (0, 1)),
        math.sqrt(2) * _pair_op((2, 0), (1, 1)),
        math.sqrt(2) * _pair_op((1, 1), (0, 2)),
    ]
    terms = np.array(ops + [m.conj().T for m in ops])
    phases = np.array([s.phase for s in seq.active]) + math.pi / 2
    beta = spec.beta

    def coefficient_fn(t, seg):
        eta = phases[seg] if len(phases) else np.zeros(len(t))
        mod = np.exp(1j * beta * np.cos(nu * t + eta))
        c = g * np.exp(1j * np.outer(t, freqs)) * mod[:, None]
        return np.hstack([c, np.conj(c)])

    oscillation = float(np.max(np.abs(freqs))) + abs(beta * nu)
    rate = max(_rate_bound(terms, np.full((1, 6), g)), oscillation)
    return Hamiltonian(9, terms, coefficient_fn, seq.breakpoints, rate)


CP_SUBSPACE = (two_level_index(1, 1), two_level_index(0, 2))


def effective_cp_hamiltonian(
    spec: TwoQubitSpec,
    seq: PulseSequence,
    noise: NoiseSpec = NoiseSpec(),
    embed: bool = False,
) -> Hamiltonian:
    """Resonant two-level model on ``{|11>, |02>}`` with Rabi rate ``g_eff``.

    The drive phase is ``eta - pi/2``, which is the segment phase itself. A
    detuning error leaves a residual ``exp(i delta g12 t)`` on the exchange.
    With ``embed=True`` the operator is placed in the 9-dimensional pair space.
    """
    scale = (1.0 + noise.epsilon) * spec.g_eff / seq.envelope.omega_max / 2.0
    drive = _drive_coefficients(seq, scale)
    shift = noise.delta * spec.g12
    if embed:
        up = _pair_op((1, 1), (0, 2))
        dim = 9
    else:
        up = projector(2, 0, 1)
        dim = 2
    terms = np.array([up, up.conj().T])

    def coefficient_fn(t, seg):
        c = drive(t, seg) * np.exp(1j * shift * t)
        return np.column_stack([c, np.conj(c)])

    rate = _rate_bound(terms, _probe(seq, coefficient_fn)) + abs(shift)
    return Hamiltonian(dim, terms, coefficient_fn, seq.breakpoints, rate)


def collapse_operators(
    setting: str,
    dec: DecoherenceSpec,
    levels: int = 3,
) -> list[tuple[float, np.ndarray]]:
    """Rate/operator pairs for ``setting`` in ``{"ideal", "transmon", "two-transmon"}``.

    The ideal qubit uses ``sz`` and ``|0><1|``; transmons use the level
    number operator and the weighted lowering operator, one pair per
    transmon in the coupled case.
    """
    if setting == IDEAL:
        return [(dec.kappa_z, SZ.copy()), (dec.kappa_minus, projector(2, 0, 1))]
    if setting == TRANSMON:
        if levels < 3:
            raise ValueError("transmon model needs at least 3 levels")
        return [(dec.kappa_z, number(levels)), (dec.kappa_minus, lowering(levels))]
    if setting == TWO_TRANSMON:
        eye = np.eye(3, dtype=complex)
        az, am = number(3), lowering(3)
        return [
            (dec.kappa_z, kron(az, eye)),
            (dec.kappa_minus, kron(am, eye)),
            (dec.kappa_z, kron(eye, az)),
            (dec.kappa_minus, kron(eye, am)),
        ]
    raise ValueError(f"unknown setting {setting!r}")


def dissipators(collapse: Sequence[tuple[float, np.ndarray]]) -> list[tuple[float, np.ndarray]]:
    """Drop zero-rate channels."""
    return [(float(r), np.asarray(a, dtype=complex)) for r, a in collapse if r > 0]

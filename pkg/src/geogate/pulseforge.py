"""Pulse-sequence builders for geometric and dynamical single-qubit gates.

Every scheme is a list of resonant segments, each with a pulse area and a
constant drive phase. The envelope decides how an area becomes a duration:

* square:  ``duration = area / omega_max``
* sin2:    ``duration = 2 * area / omega_max`` (the envelope restarts in
  every segment, so each segment integrates ``omega_max * T / 2``).

Phases are kept unreduced; compare them modulo ``2*pi``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .matrixcore import I2, SX, SY, pauli_vector

PI = math.pi

SCHEMES = ("OCNGQG-A", "OCNGQG-B", "CNGQG-A", "CNGQG-B", "NGQG-A", "NGQG-B", "DG")
SQUARE = "square"
SIN2 = "sin2"


@dataclass(frozen=True)
class GateSpec:
    """Target rotation ``exp(-i gamma_g n.sigma)`` with axis angles ``(alpha0, beta0)``."""

    alpha0: float
    beta0: float
    gamma_g: float
    name: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.alpha0 <= PI + 1e-12:
            raise ValueError(f"alpha0 must lie in [0, pi], got {self.alpha0}")
        if not -2 * PI < self.gamma_g < 2 * PI:
            raise ValueError(f"gamma_g must lie in (-2pi, 2pi), got {self.gamma_g}")

    @property
    def axis(self) -> tuple[float, float, float]:
        a, b = self.alpha0, self.beta0
        return (math.sin(a) * math.cos(b), math.sin(a) * math.sin(b), math.cos(a))

    def unitary(self) -> np.ndarray:
        g = self.gamma_g
        return math.cos(g) * I2 - 1j * math.sin(g) * pauli_vector(*self.axis)


GATE_S = GateSpec(0.0, 0.0, PI / 4, name="S")
GATE_H = GateSpec(PI / 4, 0.0, PI / 2, name="H")
# CP acts on the {|11>, |02>} pair: |11> picks up exp(-i pi/2).
GATE_CP = GateSpec(0.0, 0.0, PI / 2, name="CP")
PRESETS = {"S": GATE_S, "H": GATE_H, "CP": GATE_CP}

# Optimal path parameters in units of pi, keyed by (scheme, gate, error mode).
OPTIMAL_K_PI = {
    ("OCNGQG-A", "S", "X"): 1.13,
    ("OCNGQG-A", "S", "Z"): 1.13,
    ("OCNGQG-A", "S", "Both"): 1.13,
    ("OCNGQG-A", "H", "X"): 1.43,
    ("OCNGQG-A", "H", "Z"): 1.27,
    ("OCNGQG-A", "H", "Both"): 1.17,
    ("OCNGQG-A", "CP", "Both"): 1.27,
    ("OCNGQG-B", "S", "X"): 1.87,
    ("OCNGQG-B", "S", "Z"): 1.87,
    ("OCNGQG-B", "S", "Both"): 1.87,
    ("OCNGQG-B", "H", "X"): 1.67,
    ("OCNGQG-B", "H", "Z"): 0.27,
}


def optimal_k(scheme: str, gate: GateSpec, mode: str = "Both") -> float:
    """Tabulated optimal path parameter (radians) for a preset gate."""
    key = (scheme, gate.name, mode)
    if key not in OPTIMAL_K_PI:
        raise KeyError(f"no tabulated k for {key}")
    return OPTIMAL_K_PI[key] * PI


@dataclass(frozen=True)
class Envelope:
    """Per-segment pulse shape with peak Rabi rate ``omega_max`` (rad/s).

    ``drag_alpha`` (rad/s), when set, adds the quadrature correction
    ``-i dOmega/dt / (2 alpha)`` to the complex drive amplitude.
    """

    kind: str = SQUARE
    omega_max: float = 1.0
    drag_alpha: float | None = None

    def __post_init__(self):
        if self.kind not in (SQUARE, SIN2):
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        if not self.omega_max > 0:
            raise ValueError("omega_max must be positive")
        if self.drag_alpha is not None and self.drag_alpha == 0:
            raise ValueError("drag anharmonicity must be nonzero")

    def duration(self, area: float) -> float:
        if self.kind == SQUARE:
            return area / self.omega_max
        return 2.0 * area / self.omega_max

    def amplitude(self, tau, T):
        """Real envelope value at local time ``tau`` within a segment of length ``T``."""
        tau = np.asarray(tau, dtype=float)
        if self.kind == SQUARE:
            return np.full_like(tau, self.omega_max)
        return self.omega_max * np.sin(PI * tau / T) ** 2

    def derivative(self, tau, T):
        tau = np.asarray(tau, dtype=float)
        if self.kind == SQUARE:
            return np.zeros_like(tau)
        return self.omega_max * (PI / T) * np.sin(2 * PI * tau / T)

    def complex_amplitude(self, tau, T):
        omega = self.amplitude(tau, T).astype(complex)
        if self.drag_alpha is not None:
            omega = omega - 1j * self.derivative(tau, T) / (2.0 * self.drag_alpha)
        return omega


@dataclass(frozen=True)
class PulseSegment:
    area: float
    phase: float
    duration: float

    def __post_init__(self):
        if self.area < 0:
            raise ValueError("segment area must be nonnegative")


@dataclass(frozen=True)
class PulseSequence:
    segments: tuple[PulseSegment, ...]
    scheme: str
    gate: GateSpec
    envelope: Envelope = field(default_factory=Envelope)
    k: float | None = None

    @property
    def duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    @property
    def total_area(self) -> float:
        return float(sum(s.area for s in self.segments))

    @property
    def active(self) -> tuple[PulseSegment, ...]:
        """Segments that actually execute (zero-area ones are pruned)."""
        return tuple(s for s in self.segments if s.area > 0)

    @property
    def breakpoints(self) -> np.ndarray:
        """Start times of the active segments followed by the end time."""
        durs = [s.duration for s in self.active]
        return np.concatenate([[0.0], np.cumsum(durs)])

    def drive(self, t, seg):
        """Complex drive amplitude and phase at times ``t`` inside active segments ``seg``."""
        active = self.active
        starts = self.breakpoints[:-1]
        seg = np.asarray(seg, dtype=int)
        T = np.array([s.duration for s in active])[seg]
        phase = np.array([s.phase for s in active])[seg]
        tau = np.asarray(t, dtype=float) - starts[seg]
        return self.envelope.complex_amplitude(tau, T), phase

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "gate": {
                "alpha0": self.gate.alpha0,
                "beta0": self.gate.beta0,
                "gamma_g": self.gate.gamma_g,
                "name": self.gate.name,
            },
            "k": self.k,
            "envelope": {
                "kind": self.envelope.kind,
                "omega_max": self.envelope.omega_max,
                "drag_alpha": self.envelope.drag_alpha,
            },
            "segments": [asdict(s) for s in self.segments],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "PulseSequence":
        g = data["gate"]
        e = data["envelope"]
        return cls(
            segments=tuple(PulseSegment(**s) for s in data["segments"]),
            scheme=data["scheme"],
            gate=GateSpec(g["alpha0"], g["beta0"], g["gamma_g"], g.get("name")),
            envelope=Envelope(e["kind"], e["omega_max"], e.get("drag_alpha")),
            k=data.get("k"),
        )

    @classmethod
    def from_json(cls, text: str) -> "PulseSequence":
        return cls.from_dict(json.loads(text))


def _segments(pairs: Iterable[tuple[float, float]], env: Envelope) -> tuple[PulseSegment, ...]:
    return tuple(PulseSegment(area, phase, env.duration(area)) for area, phase in pairs)


def _orange_slice(alpha0: float, beta0: float, gamma: float, path: str) -> list[tuple[float, float]]:
    if path == "A":
        middle = beta0 - gamma + PI / 2
    elif path == "B":
        middle = beta0 - gamma - PI / 2
    else:
        raise ValueError(f"path must be 'A' or 'B', got {path!r}")
    return [(alpha0, beta0 - PI / 2), (PI, middle), (PI - alpha0, beta0 - PI / 2)]


def build_ocngqg(gate: GateSpec, k: float, path: str = "A", env: Envelope = Envelope()) -> PulseSequence:
    """Seven-segment double loop; ``k`` is the angle between the two petals."""
    if not 0.0 <= k <= 2 * PI + 1e-12:
        raise ValueError(f"path parameter k must lie in [0, 2pi], got {k}")
    a0, b0, g = gate.alpha0, gate.beta0, gate.gamma_g
    if path == "A":
        p2 = b0 - g / 2 + PI / 2
        p5 = b0 + k + PI / 2
        p6 = b0 + k + g / 2 - PI / 2
    elif path == "B":
        p2 = b0 - g / 2 - PI / 2
        p5 = b0 - k + PI / 2
        p6 = b0 - k + g / 2 + PI / 2
    else:
        raise ValueError(f"path must be 'A' or 'B', got {path!r}")
    pairs = [
        (a0, b0 - PI / 2),
        (PI, p2),
        (PI - a0, b0 - PI / 2),
        (a0, b0 - PI / 2),
        (PI, p5),
        (PI, p6),
        (a0, b0 + PI / 2),
    ]
    return PulseSequence(_segments(pairs, env), f"OCNGQG-{path}", gate, env, k)


def build_ngqg(gate: GateSpec, path: str = "A", env: Envelope = Envelope()) -> PulseSequence:
    """Single orange-slice loop of three segments."""
    pairs = _orange_slice(gate.alpha0, gate.beta0, gate.gamma_g, path)
    return PulseSequence(_segments(pairs, env), f"NGQG-{path}", gate, env)


def build_cngqg(gate: GateSpec, loops: int = 2, path: str = "A", env: Envelope = Envelope()) -> PulseSequence:
    """``loops`` repetitions of the single loop, each carrying ``gamma_g / loops``."""
    if loops < 1:
        raise ValueError("loops must be at least 1")
    if loops == 1:
        return build_ngqg(gate, path, env)
    pairs = _orange_slice(gate.alpha0, gate.beta0, gate.gamma_g / loops, path) * loops
    return PulseSequence(_segments(pairs, env), f"CNGQG-{path}", gate, env)


# Execution order (first applied first); the operator product reads right to left.
_DYNAMICAL = {
    "S": [(PI / 2, 0.0), (PI / 2, 3 * PI / 2), (PI / 2, PI)],
    "H": [(PI / 2, PI / 2), (PI, 0.0)],
    "CP": [(PI, 0.0), (PI, 3 * PI / 2)],
}


def build_dynamical(gate: str | GateSpec, env: Envelope = Envelope()) -> PulseSequence:
    label = gate.name if isinstance(gate, GateSpec) else gate
    if label not in _DYNAMICAL:
        raise ValueError(f"no dynamical composition for gate {label!r}")
    spec = gate if isinstance(gate, GateSpec) else PRESETS[label]
    return PulseSequence(_segments(_DYNAMICAL[label], env), "DG", spec, env)


def build_scheme(
    scheme: str,
    gate: GateSpec,
    env: Envelope = Envelope(),
    k: float | None = None,
    loops: int = 2,
) -> PulseSequence:
    """Dispatch on a scheme tag such as ``"OCNGQG-A"`` or ``"DG"``."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    family, _, path = scheme.partition("-")
    if family == "OCNGQG":
        if k is None:
            k = optimal_k(scheme, gate)
        return build_ocngqg(gate, k, path, env)
    if family == "CNGQG":
        return build_cngqg(gate, loops, path, env)
    if family == "NGQG":
        return build_ngqg(gate, path, env)
    return build_dynamical(gate, env)


def segment_unitary(area: float, phase: float) -> np.ndarray:
    """Resonant rotation ``cos(area/2) I - i sin(area/2) (cos phase X + sin phase Y)``."""
    c, s = math.cos(area / 2), math.sin(area / 2)
    return c * I2 - 1j * s * (math.cos(phase) * SX + math.sin(phase) * SY)


def ideal_propagator(seq: PulseSequence | Sequence[PulseSegment]) -> np.ndarray:
    segments = seq.active if isinstance(seq, PulseSequence) else seq
    u = I2.copy()
    for s in segments:
        u = segment_unitary(s.area, s.phase) @ u
    return u


@dataclass(frozen=True)
class DriveSamples:
    times: np.ndarray
    amplitude: np.ndarray  # complex, DRAG quadrature included
    phase: np.ndarray


def sampled_drive(seq: PulseSequence, dt: float) -> DriveSamples:
    """Sample the drive on a uniform grid of spacing ``dt``.

    Raises ``ValueError`` unless ``dt`` resolves the shortest segment with at
    least 100 samples.
    """
    active = seq.active
    if dt <= 0:
        raise ValueError("dt must be positive")
    if active:
        shortest = min(s.duration for s in active)
        if dt >= shortest / 100:
            raise ValueError(f"dt={dt:g} too coarse for shortest segment {shortest:g} s")
    n = int(math.floor(seq.duration / dt)) + 1 if active else 0
    times = np.arange(n) * dt
    if not active:
        return DriveSamples(times, np.zeros(0, complex), np.zeros(0))
    seg = np.clip(np.searchsorted(seq.breakpoints, times, side="right") - 1, 0, len(active) - 1)
    amp, phase = seq.drive(times, seg)
    return DriveSamples(times, amp, phase)


def reduce_phase(phi):
    """Reduce an angle to ``[0, 2pi)``."""
    return np.mod(phi, 2 * PI)


__all__ = [
    "GateSpec",
    "Envelope",
    "PulseSegment",
    "PulseSequence",
    "DriveSamples",
    "GATE_S",
    "GATE_H",
    "GATE_CP",
    "PRESETS",
    "SCHEMES",
    "SQUARE",
    "SIN2",
    "OPTIMAL_K_PI",
    "optimal_k",
    "build_ocngqg",
    "build_ngqg",
    "build_cngqg",
    "build_dynamical",
    "build_scheme",
    "ideal_propagator",
    "segment_unitary",
    "sampled_drive",
    "reduce_phase",
]

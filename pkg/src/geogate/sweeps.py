"""Parameter sweeps: k scans, robustness curves and maps, the CP (Delta, beta) map.

Every sweep is driven by an explicit :class:`Scenario`. Grid points are
independent tasks; a thread pool may run them in any order because each
result is written to its own slot of the output array. The compiled kernels
release the GIL, so threads do run concurrently.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import models
from .lindblad import evolve_lindblad, propagate_states, step_grid
from .metrics import (
    PAIR_COMPUTATIONAL,
    TWO_QUBIT_STATES,
    FidelityResult,
    cp_target,
    single_qubit_fidelity,
    two_qubit_fidelity,
)
from .models import DecoherenceSpec, NoiseSpec, TransmonSpec, TwoQubitSpec
from .pulseforge import (
    GATE_CP,
    PI,
    SCHEMES,
    SIN2,
    SQUARE,
    Envelope,
    GateSpec,
    PulseSequence,
    build_scheme,
    optimal_k,
    segment_unitary,
)

ERROR_MODES = ("X", "Z", "Both")
ERROR_SIZE = 0.1
K_POINTS = 201
MAP_POINTS = 41
# Effective two-level model of the CP gate
EFFECTIVE = "effective"


@dataclass(frozen=True)
class Scenario:
    """Everything a fidelity evaluation needs besides scheme, gate and errors.

    ``setting`` is ``"ideal"``, ``"transmon"``, ``"two-transmon"`` or
    ``"effective"``. Rates are rad/s; in the ideal setting they may be in
    units of ``omega_max``.
    """

    setting: str = models.IDEAL
    envelope_kind: str = SQUARE
    omega_max: float = 1.0
    drag: bool = False
    decoherence: DecoherenceSpec = DecoherenceSpec()
    transmon: TransmonSpec = TransmonSpec()
    pair: TwoQubitSpec = TwoQubitSpec()
    loops: int = 2
    dt: float | None = None

    def __post_init__(self):
        if self.setting not in (models.IDEAL, models.TRANSMON, models.TWO_TRANSMON, EFFECTIVE):
            raise ValueError(f"unknown setting {self.setting!r}")

    @property
    def two_qubit(self) -> bool:
        return self.setting in (models.TWO_TRANSMON, EFFECTIVE)

    def envelope(self) -> Envelope:
        if self.two_qubit:
            return self.pair.envelope()
        drag = self.transmon.anharmonicity if (self.drag and self.setting == models.TRANSMON) else None
        return Envelope(self.envelope_kind, self.omega_max, drag)

    def sequence(self, scheme: str, gate: GateSpec, k: float | None = None) -> PulseSequence:
        return build_scheme(scheme, gate, self.envelope(), k=k, loops=self.loops)

    def hamiltonian(self, seq: PulseSequence, noise: NoiseSpec = NoiseSpec()) -> models.Hamiltonian:
        if self.setting == models.IDEAL:
            return models.ideal_qubit_hamiltonian(seq, noise)
        if self.setting == models.TRANSMON:
            return models.transmon_hamiltonian(seq, noise, self.transmon)
        if self.setting == models.TWO_TRANSMON:
            return models.twoqubit_interaction_hamiltonian(self.pair, seq, noise)
        return models.effective_cp_hamiltonian(self.pair, seq, noise, embed=True)

    def collapse(self) -> list[tuple[float, np.ndarray]]:
        if self.setting == EFFECTIVE:
            return models.collapse_operators(models.TWO_TRANSMON, self.decoherence)
        return models.collapse_operators(self.setting, self.decoherence, self.transmon.levels)

    def with_decoherence(self, dec: DecoherenceSpec) -> "Scenario":
        return replace(self, decoherence=dec)

    def fidelity(
        self,
        scheme: str,
        gate: GateSpec,
        k: float | None = None,
        noise: NoiseSpec = NoiseSpec(),
    ) -> FidelityResult:
        seq = self.sequence(scheme, gate, k)
        h = self.hamiltonian(seq, noise)
        if self.two_qubit:
            return two_qubit_fidelity(cp_target(gate.gamma_g), h, self.collapse(), self.dt)
        return single_qubit_fidelity(gate.unitary(), h, self.collapse(), self.dt)


def _kappa(rate: float) -> DecoherenceSpec:
    return DecoherenceSpec(rate, rate)


TWO_PI = 2 * math.pi

# square pulse, no decoherence
SQUARE_IDEAL = Scenario()
# sin^2 pulse, kappa = omega_max / 1e4
SIN2_DAMPED = Scenario(envelope_kind=SIN2, decoherence=_kappa(1e-4))
TRANSMON = Scenario(
    setting=models.TRANSMON,
    envelope_kind=SIN2,
    omega_max=TWO_PI * 60e6,
    drag=True,
    decoherence=_kappa(TWO_PI * 2e3),
)
CP = Scenario(setting=models.TWO_TRANSMON, decoherence=_kappa(TWO_PI * 2e3))
CP_EFFECTIVE = replace(CP, setting=EFFECTIVE)

SCENARIOS = {
    "square": SQUARE_IDEAL,
    "sin2-damped": SIN2_DAMPED,
    "transmon": TRANSMON,
    "cp": CP,
    "cp-effective": CP_EFFECTIVE,
}


def error_noise(mode: str, size: float = ERROR_SIZE) -> NoiseSpec:
    """``X`` sets epsilon, ``Z`` sets delta, ``Both`` sets both."""
    if mode == "X":
        return NoiseSpec(epsilon=size)
    if mode == "Z":
        return NoiseSpec(delta=size)
    if mode == "Both":
        return NoiseSpec(epsilon=size, delta=size)
    raise ValueError(f"error mode must be one of {ERROR_MODES}, got {mode!r}")


@dataclass(frozen=True)
class Axis:
    name: str
    unit: str
    min: float
    max: float
    points: int

    def __post_init__(self):
        if self.points < 2:
            raise ValueError(f"axis {self.name!r} needs at least 2 points, got {self.points}")
        if not self.min < self.max:
            raise ValueError(f"axis {self.name!r} needs min < max")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.points)

    def to_dict(self) -> dict:
        return {"name": self.name, "unit": self.unit, "min": self.min, "max": self.max, "points": self.points}


@dataclass(frozen=True)
class SweepGrid:
    axes: tuple[Axis, ...]
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep grid has one or two axes")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.points for a in self.axes)

    def points(self) -> list[tuple[float, ...]]:
        """Grid coordinates in row-major order."""
        return [tuple(float(v) for v in p) for p in itertools.product(*(a.values for a in self.axes))]

    def to_dict(self) -> dict:
        return {"axes": [a.to_dict() for a in self.axes], "fixed": self.fixed}


@dataclass
class SweepResult:
    grid: SweepGrid
    values: np.ndarray
    label: str = "fidelity"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(self.grid.shape)

    @property
    def infidelity(self) -> np.ndarray:
        return 1.0 - self.values

    @property
    def argmax_index(self) -> tuple[int, ...]:
        # first maximum in row-major order, i.e. the smallest coordinates on ties
        return tuple(int(i) for i in np.unravel_index(int(np.argmax(self.values)), self.grid.shape))

    @property
    def argmax(self) -> tuple[float, ...]:
        return tuple(float(a.values[i]) for a, i in zip(self.grid.axes, self.argmax_index))

    @property
    def max_value(self) -> float:
        return float(self.values[self.argmax_index])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([a.name for a in self.grid.axes] + [self.label])
        for coords, v in zip(self.grid.points(), self.values.ravel()):
            w.writerow([f"{c:.10g}" for c in coords] + [f"{v:.10g}"])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())

    def summary(self) -> dict:
        return {"argmax": list(self.argmax), "max_fidelity": self.max_value, "grid_spec": self.grid.to_dict()}

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=1)


def run_grid(
    grid: SweepGrid,
    task: Callable[[tuple[float, ...]], float],
    threads: int = 1,
    label: str = "fidelity",
) -> SweepResult:
    """Evaluate ``task`` at every grid point; slot ``i`` always holds point ``i``."""
    pts = grid.points()
    out = np.empty(len(pts))
    if threads <= 1:
        for i, p in enumerate(pts):
            out[i] = task(p)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, v in enumerate(pool.map(task, pts)):
                out[i] = v
    return SweepResult(grid, out, label)


def k_axis(points: int = K_POINTS) -> Axis:
    return Axis("k", "rad", 0.0, 2 * PI, points)


def optimize_k(
    gate: GateSpec,
    path: str = "A",
    error_mode: str = "Both",
    grid_points: int = K_POINTS,
    scenario: Scenario = SQUARE_IDEAL,
    threads: int = 1,
) -> SweepResult:
    """Fidelity of the seven-segment sequence against ``k`` under a fixed error."""
    noise = error_noise(error_mode)
    scheme = f"OCNGQG-{path}"
    grid = SweepGrid((k_axis(grid_points),), {"scheme": scheme, "gate": gate.name, "mode": error_mode})

    def task(p):
        return scenario.fidelity(scheme, gate, p[0], noise).fidelity

    return run_grid(grid, task, threads)


def _noise_on(axis: str, value: float) -> NoiseSpec:
    if axis == "epsilon":
        return NoiseSpec(epsilon=value)
    if axis == "delta":
        return NoiseSpec(delta=value)
    raise ValueError(f"error axis must be 'epsilon' or 'delta', got {axis!r}")


def robustness_curve(
    schemes: Iterable[str],
    gate: GateSpec,
    error_axis: str,
    span: tuple[float, float] = (-0.2, 0.2),
    points: int = 41,
    scenario: Scenario = SQUARE_IDEAL,
    k: float | None = None,
    threads: int = 1,
) -> dict[str, SweepResult]:
    """Fidelity against one error ratio, one result per scheme.

    ``k`` applies to the seven-segment schemes; by default the tabulated
    optimum for the matching error (X for epsilon, Z for delta) is used.
    """
    schemes = list(schemes)
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}")
    mode = "X" if error_axis == "epsilon" else "Z"
    _noise_on(error_axis, 0.0)
    out = {}
    for s in schemes:
        ks = k
        if ks is None and s.startswith("OCNGQG"):
            ks = optimal_k(s, gate, mode)
        grid = SweepGrid((Axis(error_axis, "1", span[0], span[1], points),), {"scheme": s, "gate": gate.name})

        def task(p, s=s, ks=ks):
            return scenario.fidelity(s, gate, ks, _noise_on(error_axis, p[0])).fidelity

        out[s] = run_grid(grid, task, threads)
    return out


def robustness_map(
    scheme: str,
    gate: GateSpec,
    eps_range: tuple[float, float] = (-0.1, 0.1),
    delta_range: tuple[float, float] = (-0.1, 0.1),
    points: int = MAP_POINTS,
    scenario: Scenario = SIN2_DAMPED,
    k: float | None = None,
    threads: int = 1,
) -> SweepResult:
    """2-D fidelity map over (epsilon, delta)."""
    grid = SweepGrid(
        (Axis("epsilon", "1", *eps_range, points), Axis("delta", "1", *delta_range, points)),
        {"scheme": scheme, "gate": gate.name},
    )

    def task(p):
        return scenario.fidelity(scheme, gate, k, NoiseSpec(p[0], p[1])).fidelity

    return run_grid(grid, task, threads)


def cp_parameter_map(
    delta_range: tuple[float, float],
    beta_range: tuple[float, float],
    points: int = 11,
    spec: TwoQubitSpec = TwoQubitSpec(),
    dec: DecoherenceSpec = CP.decoherence,
    k: float = 1.27 * PI,
    scheme: str = "OCNGQG-A",
    dt: float | None = None,
    threads: int = 1,
) -> SweepResult:
    """CP fidelity over (Delta in rad/s, beta); the drive stays at ``Delta + alpha2``."""
    grid = SweepGrid(
        (Axis("delta_omega", "rad/s", *delta_range, points), Axis("beta", "1", *beta_range, points)),
        {"scheme": scheme, "k": k},
    )

    def task(p):
        pair = replace(spec, delta_omega=p[0], beta=p[1], nu=None)
        sc = Scenario(setting=models.TWO_TRANSMON, decoherence=dec, pair=pair, dt=dt)
        if pair.g_eff == 0:
            # no exchange at all: the pair idles and the gate is the identity
            return float(np.mean([abs(np.vdot(cp_target() @ s, s)) ** 2 for s in TWO_QUBIT_STATES]))
        return sc.fidelity(scheme, GATE_CP, k).fidelity

    return run_grid(grid, task, threads)


@dataclass
class DynamicsTrace:
    times: np.ndarray
    fidelity: dict[str, np.ndarray]

    @property
    def final(self) -> dict[str, float]:
        return {name: float(v[-1]) for name, v in self.fidelity.items()}

    def decomposition(self) -> dict[str, float]:
        """Final infidelity split into oscillating-term and decoherence parts."""
        f = self.final
        out = {}
        if "full" in f:
            out["total"] = 1.0 - f["full"]
        if "no-decoherence" in f:
            out["hot"] = 1.0 - f["no-decoherence"]
            if "full" in f:
                out["decoherence"] = f["no-decoherence"] - f["full"]
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time_s", "variant", "fidelity"])
        for name, vals in self.fidelity.items():
            for t, v in zip(self.times, vals):
                w.writerow([f"{t:.10g}", name, f"{v:.10g}"])
        return buf.getvalue()


DYNAMICS_VARIANTS = ("full", "no-decoherence", "effective")


def ideal_loop_propagators(seq: PulseSequence, times: np.ndarray, dim: int = 9) -> np.ndarray:
    """Exact noiseless propagators of a square-envelope CP loop at ``times``.

    Completed segments contribute full resonant rotations, the running one
    a partial rotation; the 2x2 block acts on ``{|11>, |02>}`` and every
    other level is left alone.
    """
    if seq.envelope.kind != SQUARE:
        raise ValueError("closed-form loop propagators need a square envelope")
    active = seq.active
    bp = seq.breakpoints
    rate = seq.envelope.omega_max
    i11, i02 = models.CP_SUBSPACE
    out = np.empty((len(times), dim, dim), dtype=complex)
    for n, t in enumerate(times):
        u = np.eye(2, dtype=complex)
        for j, s in enumerate(active):
            if t <= bp[j]:
                break
            area = s.area if t >= bp[j + 1] else rate * (t - bp[j])
            u = segment_unitary(area, s.phase) @ u
        full = np.eye(dim, dtype=complex)
        full[np.ix_([i11, i02], [i11, i02])] = u
        out[n] = full
    return out


def dynamics_trace(
    spec: TwoQubitSpec = TwoQubitSpec(),
    dec: DecoherenceSpec = CP.decoherence,
    variants: Sequence[str] = DYNAMICS_VARIANTS,
    k: float = 1.27 * PI,
    scheme: str = "OCNGQG-A",
    samples: int = 200,
    dt: float | None = None,
) -> DynamicsTrace:
    """CP fidelity along the gate, each instant compared with the ideal loop.

    Variants: ``full`` (coupled transmons with decoherence),
    ``no-decoherence`` (same Hamiltonian, unitary) and ``effective`` (the
    two-level exchange model, unitary). At the end of the loop the reference
    is ``diag(1, 1, 1, -i)``, so the last points are gate fidelities.
    """
    for v in variants:
        if v not in DYNAMICS_VARIANTS:
            raise ValueError(f"unknown variant {v!r}")
    full = Scenario(setting=models.TWO_TRANSMON, decoherence=dec, pair=spec, dt=dt)
    seq = full.sequence(scheme, GATE_CP, k)
    h_full = full.hamiltonian(seq)
    h_eff = models.effective_cp_hamiltonian(spec, seq, embed=True)
    # one step size for every variant so the samples line up in time
    if dt is None:
        dt = 0.02 / max(h_full.max_rate, h_eff.max_rate)
    every = max(1, step_grid(h_full, dt=dt).n // samples)
    psi0 = np.zeros((len(TWO_QUBIT_STATES), 9), dtype=complex)
    psi0[:, list(PAIR_COMPUTATIONAL)] = np.array(TWO_QUBIT_STATES)

    traces = {}
    times = None
    ideal = None

    def reference(run_times):
        nonlocal times, ideal
        if ideal is None:
            times = run_times
            ideal = np.einsum("rde,se->srd", ideal_loop_propagators(seq, times), psi0)
        return ideal

    def pure(samples, run_times):
        ref = reference(run_times)
        return np.mean(np.abs(np.einsum("srd,srd->sr", ref.conj(), samples)) ** 2, axis=0)

    if "full" in variants:
        rho0 = np.einsum("si,sj->sij", psi0, psi0.conj())
        rep = evolve_lindblad(h_full, full.collapse(), rho0, dt=dt, record_every=every)
        ref = reference(rep.times)
        vals = np.einsum("srd,srde,sre->sr", ref.conj(), rep.samples, ref)
        traces["full"] = np.mean(vals.real, axis=0)
    if "no-decoherence" in variants:
        run = propagate_states(h_full, psi0, dt=dt, record_every=every)
        traces["no-decoherence"] = pure(run.samples, run.times)
    if "effective" in variants:
        run = propagate_states(h_eff, psi0, dt=dt, record_every=every)
        traces["effective"] = pure(run.samples, run.times)
    return DynamicsTrace(times, traces)

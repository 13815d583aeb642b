"""Fixed-step RK4 time evolution.

The master equation is

    drho/dt = i[rho, H] + 1/2 sum_m k_m (2 A rho A^+ - A^+A rho - rho A^+A)

which with this normalisation decays an excited population as
``exp(-k t)`` under ``A = |0><1|``. Steps are aligned to the Hamiltonian's
breakpoints so that no step straddles a discontinuity. States are never
renormalised; trace and norm drift are measured and reported.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .models import Hamiltonian, dissipators

# (max rate) * dt bound used to pick the default step.
DEFAULT_PHASE_STEP = 0.02
TRACE_FAIL = 1e-6
TRACE_WARN = 1e-8


class IntegrationError(RuntimeError):
    """Trace or norm drift exceeded the failure threshold; use a smaller dt."""


def default_dt(h: Hamiltonian) -> float:
    return DEFAULT_PHASE_STEP / h.max_rate if h.max_rate > 0 else math.inf


@dataclass(frozen=True)
class StepGrid:
    starts: np.ndarray
    steps: np.ndarray
    segments: np.ndarray

    @property
    def n(self) -> int:
        return len(self.steps)

    @property
    def ends(self) -> np.ndarray:
        return self.starts + self.steps


def step_grid(h: Hamiltonian, duration: float | None = None, dt: float | None = None) -> StepGrid:
    """Uniform steps inside each segment, never crossing a breakpoint."""
    if dt is None:
        dt = default_dt(h)
    if not dt > 0:
        raise ValueError("dt must be positive")
    bp = np.asarray(h.breakpoints, dtype=float)
    end = h.duration if duration is None else float(duration)
    starts, steps, segs = [], [], []
    for i in range(len(bp) - 1):
        a, b = bp[i], min(bp[i + 1], end)
        if b <= a:
            continue
        n = max(1, math.ceil((b - a) / dt - 1e-9))
        hstep = (b - a) / n
        starts.append(a + hstep * np.arange(n))
        steps.append(np.full(n, hstep))
        segs.append(np.full(n, i))
    if end > bp[-1]:
        # free evolution after the last segment keeps the last segment's parameters
        n = max(1, math.ceil((end - bp[-1]) / dt - 1e-9))
        hstep = (end - bp[-1]) / n
        starts.append(bp[-1] + hstep * np.arange(n))
        steps.append(np.full(n, hstep))
        segs.append(np.full(n, max(len(bp) - 2, 0)))
    if not starts:
        return StepGrid(np.zeros(0), np.zeros(0), np.zeros(0, dtype=int))
    return StepGrid(np.concatenate(starts), np.concatenate(steps), np.concatenate(segs))


def stage_coefficients(h: Hamiltonian, grid: StepGrid) -> np.ndarray:
    """Coefficients at ``t``, ``t + dt/2`` and ``t + dt`` for every step, shape ``(n, 3, J)``."""
    if grid.n == 0:
        return np.zeros((0, 3, len(h.terms)), dtype=complex)
    t = np.stack([grid.starts, grid.starts + grid.steps / 2, grid.ends], axis=1).ravel()
    seg = np.repeat(grid.segments, 3)
    return h.coefficients(t, seg).reshape(grid.n, 3, len(h.terms))


def _record_indices(grid: StepGrid, record_every: int | None) -> np.ndarray:
    if not record_every:
        return np.zeros(0, dtype=np.int_)
    idx = np.arange(0, grid.n + 1, record_every)
    if idx[-1] != grid.n:
        idx = np.append(idx, grid.n)
    return idx.astype(np.int_)


def _record_times(grid: StepGrid, idx: np.ndarray) -> np.ndarray:
    edges = np.concatenate([[0.0], grid.ends]) if grid.n else np.zeros(1)
    return edges[idx]


@dataclass
class DensityDiagnostics:
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float

    def ok(self, trace_tol: float = TRACE_WARN, herm_tol: float = 1e-10, eig_tol: float = -1e-7) -> bool:
        return (
            self.trace_error < trace_tol
            and self.hermiticity_error < herm_tol
            and self.min_eigenvalue > eig_tol
        )


def density_diagnostics(rho: np.ndarray) -> DensityDiagnostics:
    """Trace, Hermiticity and positivity checks for one density matrix."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    sym = (rho + rho.conj().T) / 2
    return DensityDiagnostics(
        trace_error=abs(complex(np.trace(rho)) - 1.0),
        hermiticity_error=herm,
        min_eigenvalue=float(np.linalg.eigvalsh(sym).min()),
    )


@dataclass
class EvolutionReport:
    final_state: np.ndarray
    trace_drift: float
    steps: int
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    samples: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return self.trace_drift < TRACE_WARN

    def observable_rows(self, observables: dict[str, np.ndarray]) -> list[tuple[float, str, float]]:
        """``(time_s, name, value)`` rows of ``Re tr(O rho(t))`` for a single-state run."""
        if self.samples is None:
            return []
        samples = self.samples if self.samples.ndim == 3 else self.samples[0]
        rows = []
        for t, rho in zip(self.times, samples):
            for name, op in observables.items():
                rows.append((float(t), name, float(np.real(np.trace(op @ rho)))))
        return rows

    def write_csv(self, path, observables: dict[str, np.ndarray]) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", "observable_name", "value"])
            for t, name, v in self.observable_rows(observables):
                w.writerow([f"{t:.10g}", name, f"{v:.10g}"])


def _split_dissipation(collapse, dim):
    chans = dissipators(collapse)
    for _, a in chans:
        if a.shape != (dim, dim):
            raise ValueError(f"collapse operator shape {a.shape} does not match dim {dim}")
    drift = np.zeros((dim, dim), dtype=complex)
    jumps = []
    for rate, a in chans:
        drift += -0.5j * rate * (a.conj().T @ a)
        jumps.append(math.sqrt(rate) * a)
    jumps_arr = np.array(jumps, dtype=complex) if jumps else np.zeros((0, dim, dim), dtype=complex)
    return drift, jumps_arr


def evolve_lindblad(
    h: Hamiltonian,
    collapse: Sequence[tuple[float, np.ndarray]],
    rho0: np.ndarray,
    duration: float | None = None,
    dt: float | None = None,
    record_every: int | None = None,
) -> EvolutionReport:
    """Integrate the master equation from ``rho0`` (one matrix or a batch).

    Raises :class:`IntegrationError` when the trace of any state drifts by
    more than 1e-6.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    single = rho0.ndim == 2
    batch = rho0[None] if single else rho0
    if batch.shape[1:] != (h.dim, h.dim):
        raise ValueError(f"rho0 shape {rho0.shape} does not match dim {h.dim}")
    grid = step_grid(h, duration, dt)
    coeffs = stage_coefficients(h, grid)
    drift, jumps = _split_dissipation(collapse, h.dim)
    rec = _record_indices(grid, record_every)
    final, records = kernels.lindblad_rk4(h.terms, coeffs, grid.steps, drift, jumps, batch, rec)
    drift_val = float(np.max(np.abs(np.trace(final, axis1=1, axis2=2) - np.trace(batch, axis1=1, axis2=2))))
    if not drift_val <= TRACE_FAIL:  # also catches nan
        raise IntegrationError(f"trace drift {drift_val:.3g} exceeds {TRACE_FAIL:g}; reduce dt")
    return EvolutionReport(
        final_state=final[0] if single else final,
        trace_drift=drift_val,
        steps=grid.n,
        times=_record_times(grid, rec),
        samples=(records[0] if single else records) if len(rec) else None,
    )


@dataclass
class UnitaryRun:
    final_state: np.ndarray
    norm_drift: float
    steps: int
    times: np.ndarray
    samples: np.ndarray | None


def propagate_states(
    h: Hamiltonian,
    psi0: np.ndarray,
    duration: float | None = None,
    dt: float | None = None,
    record_every: int | None = None,
) -> UnitaryRun:
    psi0 = np.asarray(psi0, dtype=complex)
    single = psi0.ndim == 1
    batch = psi0[None] if single else psi0
    if batch.shape[1] != h.dim:
        raise ValueError(f"state dimension {batch.shape[1]} does not match {h.dim}")
    grid = step_grid(h, duration, dt)
    coeffs = stage_coefficients(h, grid)
    rec = _record_indices(grid, record_every)
    final, records = kernels.schrodinger_rk4(h.terms, coeffs, grid.steps, batch, rec)
    drift = float(np.max(np.abs(np.linalg.norm(final, axis=1) - np.linalg.norm(batch, axis=1))))
    if not drift <= TRACE_FAIL:  # also catches nan
        raise IntegrationError(f"norm drift {drift:.3g} exceeds {TRACE_FAIL:g}; reduce dt")
    return UnitaryRun(
        final_state=final[0] if single else final,
        norm_drift=drift,
        steps=grid.n,
        times=_record_times(grid, rec),
        samples=(records[0] if single else records) if len(rec) else None,
    )


def evolve_unitary(
    h: Hamiltonian,
    psi0: np.ndarray,
    duration: float | None = None,
    dt: float | None = None,
) -> np.ndarray:
    """RK4 solution of ``i dpsi/dt = H psi``; returns the final state(s)."""
    return propagate_states(h, psi0, duration, dt).final_state


def piecewise_propagator(h: Hamiltonian, duration: float | None = None, dt: float | None = None) -> np.ndarray:
    """Full propagator from the same RK4 scheme, one column per basis state."""
    basis = np.eye(h.dim, dtype=complex)
    return propagate_states(h, basis, duration, dt).final_state.T

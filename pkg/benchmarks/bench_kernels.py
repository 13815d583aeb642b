"""Time the compiled RK4 kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each case integrates the same step grid with both backends and reports the
best wall time and the largest difference between the two results.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from geogate import kernels, sweeps
from geogate import pulseforge as pf
from geogate.lindblad import stage_coefficients, step_grid
from geogate.metrics import PAIR_COMPUTATIONAL, SINGLE_QUBIT_STATES, TWO_QUBIT_STATES
from geogate.models import dissipators


def _case(scenario, scheme, gate, k, states, index):
    seq = scenario.sequence(scheme, gate, k)
    h = scenario.hamiltonian(seq)
    grid = step_grid(h)
    coeffs = stage_coefficients(h, grid)
    chans = dissipators(scenario.collapse())
    drift = sum((-0.5j * r * (a.conj().T @ a) for r, a in chans), np.zeros((h.dim, h.dim), complex))
    jumps = np.array([math.sqrt(r) * a for r, a in chans])
    psi = np.zeros((len(states), h.dim), complex)
    psi[:, list(index)] = np.array(states)
    rho = np.einsum("si,sj->sij", psi, psi.conj())
    rec = np.zeros(0, dtype=np.int_)
    return {
        "lindblad": lambda b: b.lindblad_rk4(h.terms, coeffs, grid.steps, drift, jumps, rho, rec)[0],
        "schrodinger": lambda b: b.schrodinger_rk4(h.terms, coeffs, grid.steps, psi, rec)[0],
    }, grid.n


CASES = {
    "transmon d=3, OCNGQG-A S": lambda: _case(sweeps.TRANSMON, "OCNGQG-A", pf.GATE_S, 1.13 * math.pi,
                                              SINGLE_QUBIT_STATES, (0, 1)),
    "transmon pair 9 levels, OCNGQG-A CP": lambda: _case(sweeps.CP, "OCNGQG-A", pf.GATE_CP, 1.27 * math.pi,
                                                         TWO_QUBIT_STATES, PAIR_COMPUTATIONAL),
}


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if "cython" not in kernels.BACKENDS:
        print("compiled backend not built; only the fallback is available")
        return 1
    py, cy = kernels.get_backend("python"), kernels.get_backend("cython")
    print(f"{'case':40s} {'kernel':12s} {'steps':>7s} {'python s':>9s} {'cython s':>9s} {'speedup':>8s} {'max diff':>9s}")
    for name, build in CASES.items():
        runs, n = build()
        for kernel, run in runs.items():
            tp, a = best_time(lambda: run(py), args.repeat)
            tc, b = best_time(lambda: run(cy), args.repeat)
            diff = float(np.max(np.abs(a - b)))
            print(f"{name:40s} {kernel:12s} {n:7d} {tp:9.3f} {tc:9.3f} {tp / tc:8.1f} {diff:9.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

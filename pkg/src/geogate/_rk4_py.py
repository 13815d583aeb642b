"""Pure numpy versions of the RK4 kernels in ``_rk4.pyx``.

Same signatures and same arithmetic; the state batch is vectorised so each
stage costs a handful of numpy calls instead of a Python loop per entry.
"""

from __future__ import annotations

import numpy as np


def _lindblad_rhs(k, jumps, rho):
    m = -1j * (k @ rho)
    for op in jumps:
        m += 0.5 * (op @ rho @ op.conj().T)
    return m + np.conj(np.swapaxes(m, -1, -2))


def lindblad_rk4(terms, coeffs, steps, drift, jumps, rho0, record_at):
    terms = np.asarray(terms, dtype=complex)
    coeffs = np.asarray(coeffs, dtype=complex)
    drift = np.asarray(drift, dtype=complex)
    jumps = [np.asarray(j, dtype=complex) for j in jumps]
    rho = np.array(rho0, dtype=complex, copy=True)
    record_at = np.asarray(record_at, dtype=int)
    records = np.zeros((rho.shape[0], len(record_at)) + rho.shape[1:], dtype=complex)
    ri = 0
    while ri < len(record_at) and record_at[ri] == 0:
        records[:, ri] = rho
        ri += 1
    for n, h in enumerate(np.asarray(steps, dtype=float)):
        k0, k1, k2 = np.tensordot(coeffs[n], terms, axes=1) + drift
        r1 = _lindblad_rhs(k0, jumps, rho)
        r2 = _lindblad_rhs(k1, jumps, rho + 0.5 * h * r1)
        r3 = _lindblad_rhs(k1, jumps, rho + 0.5 * h * r2)
        r4 = _lindblad_rhs(k2, jumps, rho + h * r3)
        rho = rho + (h / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4)
        while ri < len(record_at) and record_at[ri] == n + 1:
            records[:, ri] = rho
            ri += 1
    return rho, records


def schrodinger_rk4(terms, coeffs, steps, psi0, record_at):
    terms = np.asarray(terms, dtype=complex)
    coeffs = np.asarray(coeffs, dtype=complex)
    psi = np.array(psi0, dtype=complex, copy=True)
    record_at = np.asarray(record_at, dtype=int)
    records = np.zeros((psi.shape[0], len(record_at), psi.shape[1]), dtype=complex)
    ri = 0
    while ri < len(record_at) and record_at[ri] == 0:
        records[:, ri] = psi
        ri += 1
    for n, h in enumerate(np.asarray(steps, dtype=float)):
        h0, h1, h2 = -1j * np.tensordot(coeffs[n], terms, axes=1)
        r1 = psi @ h0.T
        r2 = (psi + 0.5 * h * r1) @ h1.T
        r3 = (psi + 0.5 * h * r2) @ h1.T
        r4 = (psi + h * r3) @ h2.T
        psi = psi + (h / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4)
        while ri < len(record_at) and record_at[ri] == n + 1:
            records[:, ri] = psi
            ri += 1
    return psi, records

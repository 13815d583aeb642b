# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-step RK4 kernels.

Both kernels take the Hamiltonian as ``sum_j coeffs[step, stage, j] * terms[j]``
with stage 0, 1, 2 at ``t``, ``t + h/2`` and ``t + h``. Operators are
converted to coordinate lists once so the inner loops only touch nonzeros.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


def _pattern(terms, drift):
    mask = np.any(terms != 0, axis=0) | (drift != 0)
    rows, cols = np.nonzero(mask)
    vals = np.ascontiguousarray(terms[:, rows, cols])
    base = np.ascontiguousarray(drift[rows, cols])
    return rows.astype(np.intc), cols.astype(np.intc), vals, base


def _jump_lists(jumps):
    rows, cols, vals, ptr = [], [], [], [0]
    total = 0
    for op in jumps:
        r, c = np.nonzero(op)
        rows.append(r)
        cols.append(c)
        vals.append(op[r, c])
        total += len(r)
        ptr.append(total)
    if rows:
        return (
            np.concatenate(rows).astype(np.intc),
            np.concatenate(cols).astype(np.intc),
            np.ascontiguousarray(np.concatenate(vals), dtype=complex),
            np.asarray(ptr, dtype=np.intc),
        )
    return np.zeros(0, np.intc), np.zeros(0, np.intc), np.zeros(0, complex), np.zeros(1, np.intc)


cdef inline void _assemble(int nnz, int nterm, const cplx[:, ::1] vals, const cplx[::1] base,
                           const cplx[::1] c, cplx[::1] k) noexcept nogil:
    cdef int p, j
    cdef cplx acc
    for p in range(nnz):
        acc = base[p]
        for j in range(nterm):
            acc = acc + c[j] * vals[j, p]
        k[p] = acc


cdef void _lindblad_rhs(int d, int nnz, const int[::1] kr, const int[::1] kc, const cplx[::1] k,
                        int nchan, const int[::1] jr, const int[::1] jc, const cplx[::1] jv,
                        const int[::1] jptr, const cplx[:, ::1] rho, cplx[:, ::1] m,
                        cplx[:, ::1] out) noexcept nogil:
    # out = M + M^dagger with M = -i K rho + 1/2 sum L rho L^dagger
    cdef int a, b, p, q, r, col, ch
    cdef cplx v, va
    for a in range(d):
        for b in range(d):
            m[a, b] = 0
    for p in range(nnz):
        r = kr[p]
        col = kc[p]
        v = -1j * k[p]
        for b in range(d):
            m[r, b] = m[r, b] + v * rho[col, b]
    for ch in range(nchan):
        for p in range(jptr[ch], jptr[ch + 1]):
            a = jr[p]
            va = 0.5 * jv[p]
            for q in range(jptr[ch], jptr[ch + 1]):
                b = jr[q]
                m[a, b] = m[a, b] + va * rho[jc[p], jc[q]] * jv[q].conjugate()
    for a in range(d):
        for b in range(d):
            out[a, b] = m[a, b] + m[b, a].conjugate()


def lindblad_rk4(terms, coeffs, steps, drift, jumps, rho0, record_at):
    """Integrate ``drho/dt = -i K rho + i rho K^dagger + sum L rho L^dagger``.

    ``drift`` is the anti-Hermitian part ``-(i/2) sum L^dagger L`` that turns
    ``H`` into ``K``; ``jumps`` are the rate-scaled operators ``sqrt(k) A``.
    Returns the final states and the states recorded after the step counts
    listed in ``record_at``.
    """
    terms = np.ascontiguousarray(terms, dtype=complex)
    drift = np.ascontiguousarray(drift, dtype=complex)
    jumps = np.ascontiguousarray(jumps, dtype=complex)
    cdef cplx[:, :, ::1] cf = np.ascontiguousarray(coeffs, dtype=complex)
    cdef double[::1] hs = np.ascontiguousarray(steps, dtype=float)
    rho_arr = np.array(rho0, dtype=complex, order="C", copy=True)
    cdef cplx[:, :, ::1] rho = rho_arr
    cdef long[::1] rec = np.ascontiguousarray(record_at, dtype=np.int_)
    cdef int nrec = rec.shape[0]
    cdef int nstate = rho.shape[0]
    cdef int d = rho.shape[1]
    cdef int nstep = hs.shape[0]
    cdef int nterm = terms.shape[0]
    records_arr = np.zeros((nstate, nrec, d, d), dtype=complex)
    cdef cplx[:, :, :, ::1] records = records_arr

    kr_a, kc_a, vals_a, base_a = _pattern(terms, drift)
    cdef int[::1] kr = kr_a
    cdef int[::1] kc = kc_a
    cdef cplx[:, ::1] vals = vals_a
    cdef cplx[::1] base = base_a
    cdef int nnz = kr.shape[0]
    jr_a, jc_a, jv_a, jptr_a = _jump_lists(jumps)
    cdef int[::1] jr = jr_a
    cdef int[::1] jc = jc_a
    cdef cplx[::1] jv = jv_a
    cdef int[::1] jptr = jptr_a
    cdef int nchan = jptr.shape[0] - 1

    cdef cplx[::1] k0 = np.zeros(max(nnz, 1), complex)
    cdef cplx[::1] k1 = np.zeros(max(nnz, 1), complex)
    cdef cplx[::1] k2 = np.zeros(max(nnz, 1), complex)
    cdef cplx[:, ::1] m = np.zeros((d, d), complex)
    cdef cplx[:, ::1] tmp = np.zeros((d, d), complex)
    cdef cplx[:, ::1] r1 = np.zeros((d, d), complex)
    cdef cplx[:, ::1] r2 = np.zeros((d, d), complex)
    cdef cplx[:, ::1] r3 = np.zeros((d, d), complex)
    cdef cplx[:, ::1] r4 = np.zeros((d, d), complex)
    cdef int s, n, a, b, ri
    cdef double h

    with nogil:
        for s in range(nstate):
            ri = 0
            while ri < nrec and rec[ri] == 0:
                for a in range(d):
                    for b in range(d):
                        records[s, ri, a, b] = rho[s, a, b]
                ri += 1
            for n in range(nstep):
                h = hs[n]
                _assemble(nnz, nterm, vals, base, cf[n, 0], k0)
                _assemble(nnz, nterm, vals, base, cf[n, 1], k1)
                _assemble(nnz, nterm, vals, base, cf[n, 2], k2)
                _lindblad_rhs(d, nnz, kr, kc, k0, nchan, jr, jc, jv, jptr, rho[s], m, r1)
                for a in range(d):
                    for b in range(d):
                        tmp[a, b] = rho[s, a, b] + 0.5 * h * r1[a, b]
                _lindblad_rhs(d, nnz, kr, kc, k1, nchan, jr, jc, jv, jptr, tmp, m, r2)
                for a in range(d):
                    for b in range(d):
                        tmp[a, b] = rho[s, a, b] + 0.5 * h * r2[a, b]
                _lindblad_rhs(d, nnz, kr, kc, k1, nchan, jr, jc, jv, jptr, tmp, m, r3)
                for a in range(d):
                    for b in range(d):
                        tmp[a, b] = rho[s, a, b] + h * r3[a, b]
                _lindblad_rhs(d, nnz, kr, kc, k2, nchan, jr, jc, jv, jptr, tmp, m, r4)
                for a in range(d):
                    for b in range(d):
                        rho[s, a, b] = rho[s, a, b] + (h / 6.0) * (
                            r1[a, b] + 2.0 * r2[a, b] + 2.0 * r3[a, b] + r4[a, b])
                while ri < nrec and rec[ri] == n + 1:
                    for a in range(d):
                        for b in range(d):
                            records[s, ri, a, b] = rho[s, a, b]
                    ri += 1
    return rho_arr, records_arr


cdef void _schrodinger_rhs(int d, int nnz, const int[::1] kr, const int[::1] kc,
                           const cplx[::1] k, const cplx[::1] psi, cplx[::1] out) noexcept nogil:
    cdef int a, p
    for a in range(d):
        out[a] = 0
    for p in range(nnz):
        out[kr[p]] = out[kr[p]] - 1j * k[p] * psi[kc[p]]


def schrodinger_rk4(terms, coeffs, steps, psi0, record_at):
    """Integrate ``i dpsi/dt = H psi`` for a batch of state vectors."""
    terms = np.ascontiguousarray(terms, dtype=complex)
    d = terms.shape[1]
    cdef cplx[:, :, ::1] cf = np.ascontiguousarray(coeffs, dtype=complex)
    cdef double[::1] hs = np.ascontiguousarray(steps, dtype=float)
    psi_arr = np.array(psi0, dtype=complex, order="C", copy=True)
    cdef cplx[:, ::1] psi = psi_arr
    cdef long[::1] rec = np.ascontiguousarray(record_at, dtype=np.int_)
    cdef int nrec = rec.shape[0]
    cdef int nstate = psi.shape[0]
    cdef int dim = psi.shape[1]
    cdef int nstep = hs.shape[0]
    cdef int nterm = terms.shape[0]
    records_arr = np.zeros((nstate, nrec, dim), dtype=complex)
    cdef cplx[:, :, ::1] records = records_arr

    kr_a, kc_a, vals_a, base_a = _pattern(terms, np.zeros((d, d), complex))
    cdef int[::1] kr = kr_a
    cdef int[::1] kc = kc_a
    cdef cplx[:, ::1] vals = vals_a
    cdef cplx[::1] base = base_a
    cdef int nnz = kr.shape[0]

    cdef cplx[::1] k0 = np.zeros(max(nnz, 1), complex)
    cdef cplx[::1] k1 = np.zeros(max(nnz, 1), complex)
    cdef cplx[::1] k2 = np.zeros(max(nnz, 1), complex)
    cdef cplx[::1] tmp = np.zeros(dim, complex)
    cdef cplx[::1] r1 = np.zeros(dim, complex)
    cdef cplx[::1] r2 = np.zeros(dim, complex)
    cdef cplx[::1] r3 = np.zeros(dim, complex)
    cdef cplx[::1] r4 = np.zeros(dim, complex)
    cdef int s, n, a, ri
    cdef double h

    with nogil:
        for s in range(nstate):
            ri = 0
            while ri < nrec and rec[ri] == 0:
                for a in range(dim):
                    records[s, ri, a] = psi[s, a]
                ri += 1
            for n in range(nstep):
                h = hs[n]
                _assemble(nnz, nterm, vals, base, cf[n, 0], k0)
                _assemble(nnz, nterm, vals, base, cf[n, 1], k1)
                _assemble(nnz, nterm, vals, base, cf[n, 2], k2)
                _schrodinger_rhs(dim, nnz, kr, kc, k0, psi[s], r1)
                for a in range(dim):
                    tmp[a] = psi[s, a] + 0.5 * h * r1[a]
                _schrodinger_rhs(dim, nnz, kr, kc, k1, tmp, r2)
                for a in range(dim):
                    tmp[a] = psi[s, a] + 0.5 * h * r2[a]
                _schrodinger_rhs(dim, nnz, kr, kc, k1, tmp, r3)
                for a in range(dim):
                    tmp[a] = psi[s, a] + h * r3[a]
                _schrodinger_rhs(dim, nnz, kr, kc, k2, tmp, r4)
                for a in range(dim):
                    psi[s, a] = psi[s, a] + (h / 6.0) * (r1[a] + 2.0 * r2[a] + 2.0 * r3[a] + r4[a])
                while ri < nrec and rec[ri] == n + 1:
                    for a in range(dim):
                        records[s, ri, a] = psi[s, a]
                    ri += 1
    return psi_arr, records_arr

"""Compiled forward/adjoint evaluation of the layered circuit.

Parameter vector layout: ``[theta_bar, phi_bar, phi_1, theta_1, xi_1, ..., phi_P, theta_P, xi_P]``.
Gate order: ``R_y(theta_bar)``, ``R_z(phi_bar)``, then per layer ``OAT(phi_k)``,
``R_y(xi_k)``, ``R_z(theta_k)``.

``R_y(x) = D V exp(-i x lam) V^T D*`` with ``V`` real orthogonal.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _to_eig(psi, vecs, d, out):
    n = psi.shape[0]
    for j in range(n):
        out[j] = 0j
    for i in range(n):
        w = d[i].conjugate() * psi[i]
        wr, wi = w.real, w.imag
        for j in range(n):
            out[j] += complex(vecs[i, j] * wr, vecs[i, j] * wi)


@njit(cache=True)
def _from_eig(psi_t, vecs, d, out):
    n = psi_t.shape[0]
    for i in range(n):
        ar = 0.0
        ai = 0.0
        for j in range(n):
            ar += vecs[i, j] * psi_t[j].real
            ai += vecs[i, j] * psi_t[j].imag
        out[i] = d[i] * complex(ar, ai)


@njit(cache=True)
def forward(x, lam, vecs, d, m):
    n = m.shape[0]
    p = (x.shape[0] - 2) // 3
    psi = np.zeros(n, dtype=np.complex128)
    psi[0] = 1.0
    tmp = np.empty(n, dtype=np.complex128)
    m2 = m * m
    for g in range(2 + 3 * p):
        if g == 0:
            kind, val = 1, x[0]
        elif g == 1:
            kind, val = 2, x[1]
        else:
            r = (g - 2) % 3
            base = 2 + 3 * ((g - 2) // 3)
            if r == 0:
                kind, val = 0, x[base]
            elif r == 1:
                kind, val = 1, x[base + 2]
            else:
                kind, val = 2, x[base + 1]
        if kind == 0:
            for i in range(n):
                psi[i] *= np.exp(1j * val * m2[i])
        elif kind == 2:
            for i in range(n):
                psi[i] *= np.exp(-1j * val * m[i])
        else:
            _to_eig(psi, vecs, d, tmp)
            for j in range(n):
                tmp[j] *= np.exp(-1j * val * lam[j])
            _from_eig(tmp, vecs, d, psi)
    return psi


@njit(cache=True)
def cost_grad(x, lam, vecs, d, m, target):
    """Return ``1 - |<target|psi_f>|^2`` and its gradient in ``x``."""
    n = m.shape[0]
    p = (x.shape[0] - 2) // 3
    ngates = 2 + 3 * p
    kinds = np.empty(ngates, dtype=np.int64)
    slots = np.empty(ngates, dtype=np.int64)
    kinds[0], slots[0] = 1, 0
    kinds[1], slots[1] = 2, 1
    for k in range(p):
        base = 2 + 3 * k
        kinds[2 + 3 * k], slots[2 + 3 * k] = 0, base
        kinds[3 + 3 * k], slots[3 + 3 * k] = 1, base + 2
        kinds[4 + 3 * k], slots[4 + 3 * k] = 2, base + 1
    m2 = m * m

    # stored post-gate states; eigenbasis representation for R_y gates
    after = np.empty((ngates, n), dtype=np.complex128)
    psi = np.zeros(n, dtype=np.complex128)
    psi[0] = 1.0
    tmp = np.empty(n, dtype=np.complex128)
    for g in range(ngates):
        val = x[slots[g]]
        kind = kinds[g]
        if kind == 0:
            for i in range(n):
                psi[i] *= np.exp(1j * val * m2[i])
            after[g] = psi
        elif kind == 2:
            for i in range(n):
                psi[i] *= np.exp(-1j * val * m[i])
            after[g] = psi
        else:
            _to_eig(psi, vecs, d, tmp)
            for j in range(n):
                tmp[j] *= np.exp(-1j * val * lam[j])
            after[g] = tmp
            _from_eig(tmp, vecs, d, psi)

    overlap = 0j
    for i in range(n):
        overlap += target[i].conjugate() * psi[i]
    cost = 1.0 - (overlap.real ** 2 + overlap.imag ** 2)

    grad = np.zeros(x.shape[0])
    chi = target.copy()
    chi_t = np.empty(n, dtype=np.complex128)
    for g in range(ngates - 1, -1, -1):
        val = x[slots[g]]
        kind = kinds[g]
        dov = 0j
        if kind == 0:
            for i in range(n):
                dov += chi[i].conjugate() * (1j * m2[i]) * after[g, i]
            for i in range(n):
                chi[i] *= np.exp(-1j * val * m2[i])
        elif kind == 2:
            for i in range(n):
                dov += chi[i].conjugate() * (-1j * m[i]) * after[g, i]
            for i in range(n):
                chi[i] *= np.exp(1j * val * m[i])
        else:
            _to_eig(chi, vecs, d, chi_t)
            for j in range(n):
                dov += chi_t[j].conjugate() * (-1j * lam[j]) * after[g, j]
            for j in range(n):
                chi_t[j] *= np.exp(1j * val * lam[j])
            _from_eig(chi_t, vecs, d, chi)
        grad[slots[g]] += -2.0 * (overlap.conjugate() * dov).real
    return cost, grad


@njit(cache=True)
def cost_only(x, lam, vecs, d, m, target):
    psi = forward(x, lam, vecs, d, m)
    overlap = 0j
    for i in range(m.shape[0]):
        overlap += target[i].conjugate() * psi[i]
    return 1.0 - (overlap.real ** 2 + overlap.imag ** 2)

"""Cyclic Jacobi eigensolver for Hermitian matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian

HERMITIAN_TOL = 1e-9
OFFDIAG_TOL = 1e-13
MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns, orthonormal

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {a.shape}")
    dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if dev > tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}")


def jacobi_eigh(
    a: np.ndarray, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS
) -> EigenDecomposition:
    a = np.asarray(a, dtype=complex)
    check_hermitian(a)
    a = (a + a.conj().T) / 2
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        # Direct norm of the off-diagonal part; subtracting the diagonal from the
        # full norm cancels catastrophically once the rotations have converged.
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-20 * scale:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e100:
                    t = 0.5 / abs(theta)
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # Phase-align the (p, q) entry, then apply a real plane rotation:
                # J = [[c, s], [-s*conj(phase), c*conj(phase)]], A <- J^H A J.
                cph = phase.conjugate()
                for m in (a, v):
                    mp = m[:, p].copy()
                    mq = m[:, q]
                    m[:, p] = c * mp - (s * cph) * mq
                    m[:, q] = s * mp + (c * cph) * mq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - (s * phase) * rq
                a[q, :] = s * rp + (c * phase) * rq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    w = np.real(np.diag(a)).copy()
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])

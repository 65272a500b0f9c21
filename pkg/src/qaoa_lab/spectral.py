"""Dense symmetric eigensolver (cyclic Jacobi) and graph matrices.

Graphs in this project have at most a few dozen vertices, so a plain cyclic
Jacobi iteration is exact, dependency-free, and easy to audit.
"""

from __future__ import annotations

import numpy as np

from .graphs import Graph

__all__ = [
    "SYMMETRY_TOL",
    "OFFDIAG_TOL",
    "laplacian_matrix",
    "jacobi_eigh",
    "symmetric_eigenvalues",
]

SYMMETRY_TOL = 1e-12
OFFDIAG_TOL = 1e-12
_MAX_SWEEPS = 100


def laplacian_matrix(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian D - A as a dense float array."""
    a = g.adjacency_matrix()
    return np.diag(a.sum(axis=1)) - a


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt((off * off).sum()))


def jacobi_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a real symmetric matrix.

    Cyclic Jacobi rotations, sweeping all off-diagonal pairs until the
    off-diagonal Frobenius norm drops below ``OFFDIAG_TOL``. Returns
    ``(values, vectors)`` with values ascending and vectors in matching
    columns.

    Raises
    ------
    ValueError
        If the input is not square or not symmetric within ``SYMMETRY_TOL``.
    """
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if not np.allclose(a, a.T, atol=SYMMETRY_TOL, rtol=0.0):
        raise ValueError("matrix is not symmetric within tolerance")
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v

    for _ in range(_MAX_SWEEPS):
        if _offdiag_norm(a) < OFFDIAG_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # Golub & Van Loan rotation choice; |t| <= 1 keeps it stable.
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                sign = 1.0 if theta >= 0 else -1.0
                t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    else:
        if _offdiag_norm(a) >= OFFDIAG_TOL:
            raise RuntimeError(f"Jacobi iteration did not converge in {_MAX_SWEEPS} sweeps")

    values = a.diagonal().copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def symmetric_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix (see ``jacobi_eigh``)."""
    values, _ = jacobi_eigh(matrix)
    return values

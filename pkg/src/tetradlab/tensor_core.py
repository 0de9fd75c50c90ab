"""Small dense tensor helpers.

Tensors are plain ``numpy`` arrays. Index layouts used across the package:

* square matrices ``M[..., i, j]``
* rank-3 tensors ``T[..., i, j, k]`` (e.g. torsion ``S^i_{jk}``)
* rank-4 tensors ``R[..., i, j, k, l]``

Leading ``...`` axes are batch axes; every routine here broadcasts over them
unless stated otherwise.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NotSymmetric, SingularMatrix

MAX_DIM = 8
ZERO_EIGEN_TOL = 1e-9


class Signature(NamedTuple):
    plus: int
    minus: int
    zero: int

    def __str__(self) -> str:
        return "+" * self.plus + "-" * self.minus + "0" * self.zero


def _check_square(m: np.ndarray) -> None:
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    if m.shape[-1] > MAX_DIM:
        raise ValueError(f"dimension {m.shape[-1]} exceeds cap {MAX_DIM}")


def determinant(m) -> np.ndarray | float:
    """LU determinant; singular input gives 0 (or a value at round-off level)."""
    m = np.asarray(m, dtype=float)
    _check_square(m)
    d = np.linalg.det(m)
    return float(d) if np.ndim(d) == 0 else d


def inverse(m, tol: float = 1e-12) -> np.ndarray:
    """Matrix inverse; raises :class:`SingularMatrix` when ``|det| <= tol``."""
    m = np.asarray(m, dtype=float)
    _check_square(m)
    d = np.linalg.det(m)
    if np.any(np.abs(d) <= tol):
        raise SingularMatrix(f"|det| <= {tol:g}")
    return np.linalg.inv(m)


def jacobi_eigenvalues(m, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm falls below
    ``tol`` times the full norm. Returns eigenvalues in ascending order.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    total = np.linalg.norm(a)
    if total == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-17 * (abs(a[p, p]) + abs(a[q, q])) + 1e-300:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.hypot(theta, 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def eigen_signature(m, tol: float = ZERO_EIGEN_TOL) -> Signature:
    """Count positive, negative and (``|lambda| <= tol``) zero eigenvalues."""
    m = np.asarray(m, dtype=float)
    _check_square(m)
    if m.ndim != 2:
        raise ValueError("eigen_signature takes a single matrix")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > 1e-10 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-10")
    ev = jacobi_eigenvalues(0.5 * (m + m.T))
    plus = int(np.sum(ev > tol))
    minus = int(np.sum(ev < -tol))
    return Signature(plus, minus, len(ev) - plus - minus)


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def antisymmetrize_last(t: np.ndarray) -> np.ndarray:
    """Antisymmetric part in the last two indices."""
    return 0.5 * (t - np.swapaxes(t, -1, -2))

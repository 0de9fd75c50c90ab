"""Levi-Civita curvature of metrics on a chart, by nested finite differences.

Riemann tensor layout ``R[i, j, k, l] = R^i_{jkl}`` with
``[nabla_k, nabla_l] V^i = R^i_{jkl} V^j``. The Ricci tensor is
``R_jl = ricci_sign * R^i_{jil}``: ``ricci_sign=+1`` gives positive scalar
curvature on round spheres, ``ricci_sign=-1`` the opposite convention, in
which the Killing-metric Einstein identity and the teleparallel form of the
Hilbert Lagrangian hold with the signs they are usually quoted with.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fd
from .errors import SingularMetric
from .frame_fields import FrameField
from .lagrangian import weitzenbock_invariants
from .teleparallel import curvature_from_connection, dirac_einstein_metric, killing_tensor, torsion

MetricField = Callable[[np.ndarray], np.ndarray]

TELEPARALLEL_RICCI_SIGN = -1


@dataclass
class CurvaturePoint:
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray | float
    metric: np.ndarray


def _inverse(g: np.ndarray) -> np.ndarray:
    if np.any(np.abs(np.linalg.det(g)) <= 1e-14):
        raise SingularMetric("metric not invertible")
    return np.linalg.inv(g)


def christoffel(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """``Gamma^i_{jk} = 1/2 g^{il} (d_j g_lk + d_k g_lj - d_l g_jk)``; ``dg[..., a, b, c] = d_c g_ab``."""
    ginv = _inverse(g)
    low = (np.einsum("...lkj->...ljk", dg) + np.einsum("...ljk->...ljk", dg)
           - np.einsum("...jkl->...ljk", dg))
    return 0.5 * np.einsum("...il,...ljk->...ijk", ginv, low)


def christoffel_field(g_field: MetricField, step: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: christoffel(g_field(x), fd.gradient(g_field, x, step))


def levi_civita_curvature(g_field: MetricField, x, step: float = fd.DEFAULT_STEP,
                          ricci_sign: int = 1) -> CurvaturePoint:
    """Christoffels, Riemann, Ricci and scalar curvature of ``g_field`` at ``x``."""
    x = np.asarray(x, dtype=float)
    gam_field = christoffel_field(g_field, step)
    g = g_field(x)
    gam = gam_field(x)
    riem = curvature_from_connection(gam, fd.gradient(gam_field, x, step))
    ric = ricci_sign * np.einsum("...ijil->...jl", riem)
    scalar = np.einsum("...jl,...jl->...", _inverse(g), ric)
    return CurvaturePoint(gam, riem, ric, scalar, g)


def first_bianchi(riem: np.ndarray) -> np.ndarray:
    """``R^i_{jkl} + R^i_{klj} + R^i_{ljk}``."""
    return (riem + np.einsum("...iklj->...ijkl", riem) + np.einsum("...iljk->...ijkl", riem))


def einstein_tensor(cp: CurvaturePoint) -> np.ndarray:
    return cp.ricci - 0.5 * np.asarray(cp.scalar)[..., None, None] * cp.metric


def killing_metric_field(frame: FrameField) -> MetricField:
    return lambda x: killing_tensor(torsion(frame.at(x)))


def einstein_residuals(frame: FrameField, points, step: float | None = None,
                       ricci_sign: int = TELEPARALLEL_RICCI_SIGN, constant: float | None = None) -> np.ndarray:
    """Pointwise ``max |R_ij - R gamma_ij / 2 + (n-2)/8 gamma_ij|`` for ``gamma = gamma[e]``.

    ``constant`` overrides the ``-(n-2)/8`` proportionality factor.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = frame.dim
    step = frame.step if step is None else step
    cp = levi_civita_curvature(killing_metric_field(frame), pts, step, ricci_sign)
    c = -(n - 2) / 8.0 if constant is None else constant
    return np.max(np.abs(einstein_tensor(cp) - c * cp.metric), axis=(-2, -1))


def einstein_check(frame: FrameField, points, step: float | None = None,
                   ricci_sign: int = TELEPARALLEL_RICCI_SIGN) -> float:
    return float(np.max(einstein_residuals(frame, points, step, ricci_sign)))


def fit_cosmological_constant(g_field: MetricField, x, step: float = fd.DEFAULT_STEP,
                              ricci_sign: int = TELEPARALLEL_RICCI_SIGN) -> tuple[float, float]:
    """Least-squares ``Lambda`` in ``R_ij - R g_ij / 2 = Lambda g_ij``; returns ``(Lambda, misfit)``."""
    cp = levi_civita_curvature(g_field, x, step, ricci_sign)
    G, g = einstein_tensor(cp).ravel(), cp.metric.ravel()
    lam = float(G @ g / (g @ g))
    return lam, float(np.max(np.abs(G - lam * g)))


def hilbert_sides(frame: FrameField, eta, points, step: float | None = None,
                  ricci_sign: int = TELEPARALLEL_RICCI_SIGN):
    """Both sides of ``R[h] sqrt|h| = (J1 + 2 J2 - 4 J3) sqrt|h| + 4 (S^a_{ab} h^{bi} sqrt|h|)_{,i}``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    step = frame.step if step is None else step
    eta = np.asarray(eta, dtype=float)
    h_field = lambda x: dirac_einstein_metric(frame.at(x, order=0), eta)
    cp = levi_civita_curvature(h_field, pts, step, ricci_sign)
    vol = np.sqrt(np.abs(np.linalg.det(cp.metric)))
    lhs = cp.scalar * vol

    def vector_density(x):
        fp = frame.at(x)
        s = torsion(fp)
        h = dirac_einstein_metric(fp, eta)
        return np.einsum("...aab,...bi->...i", s, np.linalg.inv(h)) * np.sqrt(np.abs(np.linalg.det(h)))[..., None]

    fp = frame.at(pts)
    s = torsion(fp)
    j1, j2, j3 = weitzenbock_invariants(s, cp.metric)
    div = np.einsum("...ii->...", fd.gradient(vector_density, pts, step))
    rhs = (j1 + 2 * j2 - 4 * j3) * vol + 4.0 * div
    return lhs, rhs


def hilbert_identity_check(frame: FrameField, eta, points, step: float | None = None,
                           ricci_sign: int = TELEPARALLEL_RICCI_SIGN) -> float:
    lhs, rhs = hilbert_sides(frame, eta, points, step, ricci_sign)
    return float(np.max(np.abs(lhs - rhs)))

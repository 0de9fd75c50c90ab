"""Field momentum, Dirac-Einstein stress and field-equation residuals.

``H_i^{jk} = dL/dS^i_{jk}`` is taken as the antisymmetric (in ``j, k``) part
of the unconstrained gradient. Equivalently, it is half the derivative with
respect to an independent component ``S^i_{jk}``, ``j < k``, so that
``S^i_{jk} H_i^{jk} = n L`` for a density homogeneous of degree ``n``.
``Q^{ij} = dL/dh_ij`` is the symmetric part of the unconstrained gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fd
from .errors import DegenerateLagrangeTensor
from .frame_fields import FrameField, FramePoint
from .lagrangian import (
    ModelSpec,
    _metric_inverse,
    born_infeld_tensor,
    evaluate_model,
    quadratic_density,
    sqrt_det,
    torsion_trace_vector,
    weitzenbock_invariants,
)
from .teleparallel import connection, density_divergence, dirac_einstein_metric, torsion_trace

MOMENTUM_FD_STEP = 1e-6


def _antisym(d: np.ndarray) -> np.ndarray:
    return 0.5 * (d - np.swapaxes(d, -1, -2))


def _gl_gradient(spec: ModelSpec, s: np.ndarray):
    L = born_infeld_tensor(s, spec.lam, spec.mu, spec.nu)
    lt = sqrt_det(L, spec.prefactor)
    degenerate = np.asarray(lt.degenerate)
    n = s.shape[-1]
    safe = np.where(degenerate[..., None, None], np.eye(n), L)
    # dL/dM_ab = 1/2 density (M^-1)_ba
    w = 0.5 * np.asarray(lt.density)[..., None, None] * np.swapaxes(np.linalg.inv(safe), -1, -2)
    t = torsion_trace_vector(s)
    eye = np.eye(n)
    d = 4.0 * spec.lam * (np.einsum("...qb,...rbp->...pqr", w, s)
                          + np.einsum("...aq,...rap->...pqr", w, s))
    u = np.einsum("...qb,...b->...q", w, t) + np.einsum("...aq,...a->...q", w, t)
    d = d + 4.0 * spec.mu * np.einsum("pr,...q->...pqr", eye, u)
    v = np.einsum("...ab,...qab->...q", w, s)
    d = d + 4.0 * spec.nu * (np.einsum("pr,...q->...pqr", eye, v)
                             + np.einsum("...p,...qr->...pqr", t, w))
    return d, degenerate


def _quadratic_gradient(spec: ModelSpec, s: np.ndarray, h: np.ndarray) -> np.ndarray:
    c1, c2, c3 = spec.coefficients
    hinv = _metric_inverse(h)
    tau = np.einsum("...aai->...i", s)
    n = s.shape[-1]
    dj1 = 2.0 * np.einsum("...pi,...qj,...rk,...ijk->...pqr", h, hinv, hinv, s)
    dj2 = 2.0 * np.einsum("...qj,...rjp->...pqr", hinv, s)
    dj3 = 2.0 * np.einsum("pq,...r->...pqr", np.eye(n), np.einsum("...rj,...j->...r", hinv, tau))
    vol = np.sqrt(np.abs(np.linalg.det(h)))[..., None, None, None]
    return spec.prefactor * vol * (c1 * dj1 + c2 * dj2 + c3 * dj3)


def field_momentum(spec: ModelSpec, s: np.ndarray, fp: FramePoint | None = None) -> np.ndarray:
    """Analytic ``H_i^{jk}``; raises :class:`DegenerateLagrangeTensor` if ``det L_ij = 0``."""
    h, degenerate = _momentum(spec, s, fp)
    if np.any(degenerate):
        raise DegenerateLagrangeTensor("field momentum undefined where det L_ij = 0")
    return h


def _momentum(spec: ModelSpec, s: np.ndarray, fp: FramePoint | None):
    if spec.is_gl_invariant:
        d, degenerate = _gl_gradient(spec, s)
    else:
        if fp is None:
            raise ValueError("quadratic families need the frame point")
        d = _quadratic_gradient(spec, s, dirac_einstein_metric(fp, spec.eta_matrix))
        degenerate = np.zeros(s.shape[:-3], dtype=bool)
    return _antisym(d), degenerate


def _density(spec: ModelSpec, s: np.ndarray, h: np.ndarray | None) -> np.ndarray:
    if spec.is_gl_invariant:
        return np.asarray(evaluate_model(spec, s).density)
    return spec.prefactor * quadratic_density(s, h, spec.coefficients)


def field_momentum_fd(spec: ModelSpec, s: np.ndarray, fp: FramePoint | None = None,
                      step: float = MOMENTUM_FD_STEP) -> np.ndarray:
    """``H`` by central differences over the independent components ``j < k``."""
    s = np.asarray(s, dtype=float)
    n = s.shape[-1]
    h = None if spec.is_gl_invariant else dirac_einstein_metric(fp, spec.eta_matrix)
    out = np.zeros_like(s)
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                bump = np.zeros_like(s)
                bump[..., i, j, k], bump[..., i, k, j] = step, -step
                dl = (_density(spec, s + bump, h) - _density(spec, s - bump, h)) / (2 * step)
                out[..., i, j, k] = 0.5 * dl
                out[..., i, k, j] = -0.5 * dl
    return out


def stress(spec: ModelSpec, s: np.ndarray, h: np.ndarray) -> np.ndarray:
    """``Q^{ij} = dL/dh_ij`` for the torsion-quadratic families (zero for GL models)."""
    if spec.is_gl_invariant:
        return np.zeros_like(h)
    c1, c2, c3 = spec.coefficients
    hinv = _metric_inverse(h)
    vol = np.sqrt(np.abs(np.linalg.det(h)))
    tau = np.einsum("...aai->...i", s)
    y = np.einsum("...bj,...ck,...abc,...ijk->...ai", hinv, hinv, s, s)
    z = np.einsum("...ai,...ck,...abc,...ijk->...bj", h, hinv, s, s)
    w = np.einsum("...ai,...bj,...abc,...ijk->...ck", h, hinv, s, s)
    v = np.einsum("...aib,...bja->...ij", s, s)
    tt = tau[..., :, None] * tau[..., None, :]
    sandwich = lambda m: hinv @ m @ hinv
    dj1 = y - sandwich(z) - sandwich(w)
    dj2 = -sandwich(v)
    dj3 = -sandwich(tt)
    j1, j2, j3 = weitzenbock_invariants(s, h)
    g = c1 * j1 + c2 * j2 + c3 * j3
    d = vol[..., None, None] * ((c1 * dj1 + c2 * dj2 + c3 * dj3)
                                + 0.5 * g[..., None, None] * np.swapaxes(hinv, -1, -2))
    d = spec.prefactor * d
    return 0.5 * (d + np.swapaxes(d, -1, -2))


def stress_fd(spec: ModelSpec, s: np.ndarray, h: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central FD of the density over independent symmetric entries of ``h``."""
    h = np.asarray(h, dtype=float)
    n = h.shape[-1]
    out = np.zeros_like(h)
    for i in range(n):
        for j in range(i, n):
            bump = np.zeros_like(h)
            bump[..., i, j] = bump[..., j, i] = step
            dl = (_density(spec, s, h + bump) - _density(spec, s, h - bump)) / (2 * step)
            if i == j:
                out[..., i, i] = dl
            else:
                out[..., i, j] = out[..., j, i] = 0.5 * dl
    return out


# --------------------------------------------------------------------------
# field equations


@dataclass
class ResidualPoint:
    K: np.ndarray
    max_abs: float
    frobenius: float

    @classmethod
    def from_matrix(cls, k: np.ndarray) -> "ResidualPoint":
        return cls(k, float(np.max(np.abs(k))), float(np.linalg.norm(k)))


def _momentum_or_nan(spec: ModelSpec, frame: FrameField, x: np.ndarray) -> np.ndarray:
    fp = frame.at(x)
    g = connection(fp)
    s = 0.5 * (g - np.swapaxes(g, -1, -2))
    h, degenerate = _momentum(spec, s, fp)
    return np.where(degenerate[..., None, None, None], np.nan, h)


def residuals(frame: FrameField, spec: ModelSpec, points, step: float | None = None):
    """Field-equation residual ``K_i^j`` at a batch of points.

    ``K_i^j = nabla_k H_i^{jk} + 2 S^l_{lk} H_i^{jk} - 2 h_ik Q^{kj}`` (the last
    term only for models depending on ``h[e, eta]``). ``H`` is recomputed
    from the frame on every stencil node. Returns ``(K, degenerate)`` where
    ``degenerate`` flags points whose stencil touched ``det L_ij = 0``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    step = frame.step if step is None else step
    fp = frame.at(pts)
    gamma = connection(fp)
    s = 0.5 * (gamma - np.swapaxes(gamma, -1, -2))
    field = lambda x: _momentum_or_nan(spec, frame, x)
    h = field(pts)
    dh = fd.gradient(field, pts, step)
    k = density_divergence(h, dh, gamma) + 2.0 * np.einsum("...k,...ijk->...ij", torsion_trace(s), h)
    if not spec.is_gl_invariant:
        metric = dirac_einstein_metric(fp, spec.eta_matrix)
        k = k - 2.0 * metric @ stress(spec, s, metric)
    degenerate = np.any(np.isnan(k), axis=(-2, -1))
    return k, degenerate


def residual(frame: FrameField, spec: ModelSpec, x, step: float | None = None) -> ResidualPoint:
    k, degenerate = residuals(frame, spec, np.asarray(x, dtype=float)[None, :], step)
    if degenerate[0]:
        raise DegenerateLagrangeTensor(f"det L_ij = 0 on the stencil around {x}")
    return ResidualPoint.from_matrix(k[0])


def secondary_constraint(frame: FrameField, spec: ModelSpec, x, step: float | None = None) -> np.ndarray:
    """``K_i^0``: the time column of the residual (coordinate 0 is time)."""
    return residual(frame, spec, x, step).K[:, 0]

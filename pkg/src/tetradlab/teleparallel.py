"""Teleparallel connection, torsion and frame-derived metrics.

Index layouts (leading batch axes allowed everywhere):

* connection ``gamma[i, j, k] = Gamma^i_{jk} = e^i_A d_k e^A_j`` -- the
  derivative index is the last one, so ``nabla_k V^i = d_k V^i + Gamma^i_{jk} V^j``
* torsion ``S[i, j, k] = S^i_{jk} = Gamma^i_{[jk]}``
* nonholonomy ``c[C, A, B] = gamma^C_{AB}`` with ``[e_A, e_B] = gamma^C_{AB} e_C``
* field momenta ``H[i, j, k] = H_i^{jk}``

With these definitions ``S^i_{jk} = 1/2 gamma^A_{BC} e^i_A e^B_j e^C_k``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import fd
from .frame_fields import FrameField, FramePoint, coframe


def connection(fp: FramePoint) -> np.ndarray:
    """``Gamma^i_{jk} = e^i_A d_k e^A_j = -(d_k e^i_B) e^B_j``."""
    if fp.de is None:
        raise ValueError("connection needs first derivatives of the frame")
    co = coframe(fp)
    return -np.einsum("...ibk,...bj->...ijk", fp.de, co)


def torsion(fp: FramePoint) -> np.ndarray:
    g = connection(fp)
    return 0.5 * (g - np.swapaxes(g, -1, -2))


def torsion_trace(s: np.ndarray) -> np.ndarray:
    """``S^l_{lk}`` (contraction of the upper index with the first lower one)."""
    return np.einsum("...llk->...k", s)


def nonholonomy(fp: FramePoint, s: np.ndarray) -> np.ndarray:
    """``gamma^C_{AB} = 2 S^i_{jk} e^C_i e^j_A e^k_B``."""
    co = coframe(fp)
    return 2.0 * np.einsum("...ijk,...ci,...ja,...kb->...cab", s, co, fp.e, fp.e)


def dirac_einstein_metric(fp: FramePoint, eta) -> np.ndarray:
    """``h_ij = eta_AB e^A_i e^B_j``."""
    co = coframe(fp)
    return np.einsum("ab,...ai,...bj->...ij", np.asarray(eta, dtype=float), co, co)


def killing_tensor(s: np.ndarray) -> np.ndarray:
    """``gamma_ij = 4 S^k_{im} S^m_{jk}``; symmetric by relabelling."""
    g = 4.0 * np.einsum("...kim,...mjk->...ij", s, s)
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def gamma_big(s: np.ndarray) -> np.ndarray:
    """``Gamma_ij = 4 S^k_{lk} S^l_{ij}`` (not symmetric in general)."""
    return 4.0 * np.einsum("...klk,...lij->...ij", s, s)


def density_divergence(h: np.ndarray, dh: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Teleparallel divergence ``nabla_k H_i^{jk}`` of a weight-one density.

    ``dh[..., i, j, k, l] = d_l H_i^{jk}``. The convention is

        d_k H_i^{jk} - Gamma^l_{ik} H_l^{jk} + Gamma^j_{lk} H_i^{lk}
        + Gamma^k_{lk} H_i^{jl} - Gamma^l_{lk} H_i^{jk}

    where the last term carries the density weight.
    """
    return (
        np.einsum("...ijkk->...ij", dh)
        - np.einsum("...lik,...ljk->...ij", gamma, h)
        + np.einsum("...jlk,...ilk->...ij", gamma, h)
        + np.einsum("...klk,...ijl->...ij", gamma, h)
        - np.einsum("...llk,...ijk->...ij", gamma, h)
    )


def teleparallel_divergence(h_field: Callable[[np.ndarray], np.ndarray], gamma: np.ndarray, x,
                            step: float = fd.DEFAULT_STEP) -> np.ndarray:
    """``nabla_k H_i^{jk}`` at ``x``; partials of ``h_field`` by central FD."""
    x = np.asarray(x, dtype=float)
    return density_divergence(h_field(x), fd.gradient(h_field, x, step), gamma)


def torsion_field(frame: FrameField) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: torsion(frame.at(x))


def torsion_partials(frame: FrameField, x, step: float | None = None) -> np.ndarray:
    """``ds[..., i, j, k, l] = d_l S^i_{jk}``, by FD of the torsion field."""
    return fd.gradient(torsion_field(frame), x, frame.step if step is None else step)


def connection_curvature(frame: FrameField, x, step: float | None = None) -> np.ndarray:
    """Curvature ``R^i_{jkl}`` of the teleparallel connection (should vanish)."""
    x = np.asarray(x, dtype=float)
    field = lambda p: connection(frame.at(p))
    g = field(x)
    dg = fd.gradient(field, x, frame.step if step is None else step)  # [i, j, l, k] = d_k Gamma^i_{jl}
    return curvature_from_connection(g, dg)


def curvature_from_connection(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """``R^i_{jkl} = d_k G^i_{jl} - d_l G^i_{jk} + G^i_{mk} G^m_{jl} - G^i_{ml} G^m_{jk}``."""
    d = np.einsum("...ijlk->...ijkl", dg)
    quad = np.einsum("...imk,...mjl->...ijkl", g, g)
    return d - np.swapaxes(d, -1, -2) + quad - np.swapaxes(quad, -1, -2)


def covariant_derivative_metric(g: np.ndarray, dg: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """``nabla_k g_ij = d_k g_ij - Gamma^l_{ik} g_lj - Gamma^l_{jk} g_il``."""
    return (dg - np.einsum("...lik,...lj->...ijk", gamma, g)
            - np.einsum("...ljk,...il->...ijk", gamma, g))

"""Central finite-difference partials for batched fields on charts."""

from __future__ import annotations

from typing import Callable

import numpy as np

DEFAULT_STEP = 1e-3

# 4th-order central first-derivative stencil: offsets and weights (times 1/h).
_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0

Field = Callable[[np.ndarray], np.ndarray]


def stencil_points(x: np.ndarray, step: float) -> np.ndarray:
    """Stencil nodes around ``x``: shape ``(..., n, 4, n)`` (direction, node, coord)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    shifts = np.eye(n)[:, None, :] * (_OFFSETS[None, :, None] * step)
    return x[..., None, None, :] + shifts


def combine(values: np.ndarray, batch_ndim: int, step: float) -> np.ndarray:
    """Collapse stencil values ``(..., n, 4, *shape)`` into ``(..., *shape, n)``."""
    d = np.tensordot(values, _WEIGHTS, axes=([batch_ndim + 1], [0])) / step
    # d: (..., n, *shape) -> move direction axis last
    return np.moveaxis(d, batch_ndim, -1)


def gradient(func: Field, x, step: float = DEFAULT_STEP) -> np.ndarray:
    """Partials of ``func`` at ``x`` with the derivative index appended last.

    ``func`` maps points of shape ``(..., n)`` to values ``(..., *shape)`` and
    must broadcast over leading axes. The result has shape
    ``(..., *shape, n)`` with ``out[..., k] = d func / d x^k``.
    """
    x = np.asarray(x, dtype=float)
    batch_ndim = x.ndim - 1
    values = func(stencil_points(x, step))
    return combine(values, batch_ndim, step)


def flat_call(func: Field, x) -> np.ndarray:
    """Evaluate a function that only accepts ``(P, n)`` on arbitrary batches."""
    x = np.asarray(x, dtype=float)
    lead = x.shape[:-1]
    out = func(x.reshape(-1, x.shape[-1]))
    return out.reshape(lead + out.shape[1:])

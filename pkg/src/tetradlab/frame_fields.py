"""Coordinate charts and frame fields on them.

A frame at a point is the matrix ``e[i, A] = e^i_A`` (column ``A`` holds the
components of leg ``e_A``). First derivatives are stored as
``de[i, A, j] = d_j e^i_A`` and second derivatives as
``dde[i, A, j, k] = d_k d_j e^i_A``.

All evaluators take points of shape ``(..., n)`` and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fd
from .errors import CriticalRho, DegenerateFrame, JacobiViolation, SeriesNonConvergent
from .lie_algebra import StructureConstants, jacobi_residual

FRAME_DET_TOL = 1e-12
SERIES_TERMS = 24
SERIES_TAIL = 1e-18
SERIES_NORM_LIMIT = 2.0 * np.pi * 0.9
SECOND_DERIVATIVE_STEP = 2e-3
DEFAULT_SEED = 42
DEFAULT_POINTS = 20


@dataclass(frozen=True)
class Chart:
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        lo, hi = tuple(map(float, self.lower)), tuple(map(float, self.upper))
        if len(lo) != len(hi) or not lo:
            raise ValueError("chart bounds must be non-empty and of equal length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("chart needs lower < upper on every axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def box(cls, n: int, half_width: float, label: str = "") -> "Chart":
        return cls((-half_width,) * n, (half_width,) * n, label)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lower) & (x <= self.upper), axis=-1)

    def sample(self, count: int = DEFAULT_POINTS, seed: int = DEFAULT_SEED, scale: float = 0.5) -> np.ndarray:
        """Seeded uniform draw from the centred sub-box at ``scale`` of the chart."""
        lo, hi = np.array(self.lower), np.array(self.upper)
        mid, half = 0.5 * (lo + hi), 0.5 * scale * (hi - lo)
        rng = np.random.default_rng(seed)
        return mid + rng.uniform(-1.0, 1.0, size=(count, self.dim)) * half


@dataclass
class FramePoint:
    e: np.ndarray
    de: np.ndarray | None = None
    dde: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.e.shape[-1]

    @property
    def coframe(self) -> np.ndarray:
        return coframe(self)


def coframe(fp: FramePoint, tol: float = FRAME_DET_TOL) -> np.ndarray:
    """``e^A_i``, the inverse of ``e^i_A``."""
    det = np.linalg.det(fp.e)
    if np.any(np.abs(det) <= tol):
        raise DegenerateFrame(f"frame determinant below {tol:g}")
    return np.linalg.inv(fp.e)


Evaluator = Callable[[np.ndarray], np.ndarray]


class FrameField:
    """A frame field on a chart.

    ``func`` returns ``e^i_A`` at points ``(..., n)``. ``jacobian`` and
    ``hessian``, when given, return analytic first/second partials; otherwise
    a 4th-order central stencil with step ``step`` is used (second
    derivatives nest the first-derivative evaluator with step
    ``second_step``).
    """

    def __init__(
        self,
        chart: Chart,
        func: Evaluator,
        jacobian: Evaluator | None = None,
        hessian: Evaluator | None = None,
        step: float = fd.DEFAULT_STEP,
        second_step: float = SECOND_DERIVATIVE_STEP,
        label: str = "",
        meta: dict | None = None,
    ):
        self.chart = chart
        self._func = func
        self._jacobian = jacobian
        self._hessian = hessian
        self.step = step
        self.second_step = second_step
        self.label = label or chart.label
        self.meta = dict(meta or {})

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def strategy(self) -> str:
        return "analytic" if self._jacobian is not None else f"finite-difference(h={self.step:g}, order=4)"

    def frame(self, x) -> np.ndarray:
        return self._func(np.asarray(x, dtype=float))

    def derivative(self, x, step: float | None = None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._jacobian is not None:
            return self._jacobian(x)
        return fd.gradient(self._func, x, self.step if step is None else step)

    def second_derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._hessian is not None:
            return self._hessian(x)
        return fd.gradient(self.derivative, x, self.second_step)

    def at(self, x, order: int = 1) -> FramePoint:
        x = np.asarray(x, dtype=float)
        fp = FramePoint(self.frame(x))
        if order >= 1:
            fp.de = self.derivative(x)
        if order >= 2:
            fp.dde = self.second_derivative(x)
        return fp

    def with_step(self, step: float) -> "FrameField":
        """Same field with a different FD step (analytic parts unchanged)."""
        return FrameField(self.chart, self._func, self._jacobian, self._hessian,
                          step, 2.0 * step, self.label, self.meta)

    def transformed(self, a) -> "FrameField":
        """Global GL(n,R) action ``e -> e A`` for a constant invertible ``A``."""
        a = np.asarray(a, dtype=float)
        if abs(np.linalg.det(a)) <= FRAME_DET_TOL:
            raise DegenerateFrame("GL transformation must be invertible")
        jac = hess = None
        if self._jacobian is not None:
            jac = lambda x: np.einsum("...iBj,BA->...iAj", self._jacobian(x), a)
        if self._hessian is not None:
            hess = lambda x: np.einsum("...iBjk,BA->...iAjk", self._hessian(x), a)
        return FrameField(self.chart, lambda x: self._func(x) @ a, jac, hess,
                          self.step, self.second_step, f"{self.label}*A", self.meta)

    def locally_transformed(self, a_field: Evaluator, label: str = "") -> "FrameField":
        """Pointwise action ``e(x) -> e(x) A(x)``; derivatives by FD."""
        return FrameField(self.chart, lambda x: self._func(x) @ a_field(x), step=self.step,
                          second_step=self.second_step, label=label or f"{self.label}*A(x)")


def constant_frame(n: int, half_width: float = 1.0) -> FrameField:
    """``e^i_A = delta^i_A`` with analytic (zero) derivatives."""
    if n < 1:
        raise ValueError("n must be >= 1")
    eye = np.eye(n)

    def func(x):
        return np.broadcast_to(eye, x.shape[:-1] + (n, n)).copy()

    return FrameField(
        Chart.box(n, half_width, f"constant({n})"),
        func,
        jacobian=lambda x: np.zeros(x.shape[:-1] + (n, n, n)),
        hessian=lambda x: np.zeros(x.shape[:-1] + (n, n, n, n)),
        label=f"constant({n})",
    )


def maurer_cartan_series(z: np.ndarray, terms: int = SERIES_TERMS, tail: float = SERIES_TAIL) -> np.ndarray:
    """``(1 - exp(-Z)) / Z = sum_k (-Z)^k / (k+1)!`` for batched square ``Z``."""
    n = z.shape[-1]
    term = np.broadcast_to(np.eye(n), z.shape).copy()
    total = term.copy()
    for k in range(1, terms):
        term = -(term @ z) / (k + 1)
        total += term
        if np.max(np.abs(term), initial=0.0) < tail:
            break
    return total


def group_frame(sc: StructureConstants, radius: float = 1.0, **kwargs) -> FrameField:
    """Invariant frame of the group of ``sc`` in canonical coordinates of the first kind.

    The co-frame at ``x`` is ``f(ad_x)`` with ``f(z) = (1 - exp(-z))/z`` and the
    frame is its inverse. With this choice the legs close under the Lie
    bracket with the catalog constants themselves,
    ``[e_A, e_B] = c^C_{AB} e_C``.
    """
    if jacobi_residual(sc) >= 1e-12:
        raise JacobiViolation(f"{sc.name or 'algebra'} violates the Jacobi identity")
    n = sc.dim

    def coframe_at(x):
        z = sc.ad(x)
        if z.size and np.max(np.linalg.norm(z, ord=2, axis=(-2, -1))) > SERIES_NORM_LIMIT:
            raise SeriesNonConvergent("||ad_x|| exceeds 0.9 * 2 pi")
        return maurer_cartan_series(z)

    def func(x):
        return np.linalg.inv(coframe_at(x))

    label = f"group({sc.name})" if sc.name else "group"
    return FrameField(Chart.box(n, radius, label), func, label=label,
                      meta={"structure": sc, "kind": "group"}, **kwargs)


def extended_frame(sc: StructureConstants, radius: float = 1.0,
                   tau_range: tuple[float, float] = (-1.0, 1.0), **kwargs) -> FrameField:
    """Block frame ``E_0 = d/dtau``, ``E_Sigma`` = group frame of ``sc``.

    Coordinates are ``(tau, x^1, ..., x^{n-1})``.
    """
    base = group_frame(sc, radius, **kwargs)
    n = sc.dim + 1

    def func(x):
        out = np.zeros(x.shape[:-1] + (n, n))
        out[..., 0, 0] = 1.0
        out[..., 1:, 1:] = base.frame(x[..., 1:])
        return out

    def jac(x):
        out = np.zeros(x.shape[:-1] + (n, n, n))
        out[..., 1:, 1:, 1:] = base.derivative(x[..., 1:])
        return out

    chart = Chart((tau_range[0],) + (-radius,) * sc.dim, (tau_range[1],) + (radius,) * sc.dim,
                  f"R x group({sc.name})")
    return FrameField(chart, func, jacobian=jac, label=chart.label, step=base.step,
                      meta={"structure": sc, "kind": "extended", "base": base})


@dataclass(frozen=True)
class Rho:
    """Scalar profile rho(tau) with its first two derivatives."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    d2f: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    tau_range: tuple[float, float] = (-1.0, 1.0)


RHO_PRESETS: dict[str, Rho] = {
    "exp": Rho(np.exp, np.exp, np.exp, "exp(tau)"),
    "exp2": Rho(lambda t: np.exp(2 * t), lambda t: 2 * np.exp(2 * t), lambda t: 4 * np.exp(2 * t), "exp(2 tau)"),
    "affine": Rho(lambda t: 1 + 0.5 * t, lambda t: 0.5 + 0 * t, lambda t: 0 * t, "1 + tau/2", (0.0, 1.0)),
    "square": Rho(lambda t: t**2, lambda t: 2 * t, lambda t: 2 + 0 * t, "tau^2"),
    "one": Rho(lambda t: 1 + 0 * t, lambda t: 0 * t, lambda t: 0 * t, "1"),
}

VARIANTS = ("E", "e", "e-prime")


@dataclass(frozen=True)
class DeformationSpec:
    rho: Rho
    variant: str = "e"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")


def check_rho(rho: Rho, tau_lo: float, tau_hi: float, samples: int = 2001) -> None:
    """Reject rho that is non-positive or has a critical point on [tau_lo, tau_hi]."""
    t = np.linspace(tau_lo, tau_hi, samples)
    r, dr = rho.f(t), rho.df(t)
    if np.any(r <= 0):
        raise CriticalRho(f"rho = {rho.label} is not positive on [{tau_lo}, {tau_hi}]")
    if np.any(dr == 0) or np.any(np.sign(dr[1:]) != np.sign(dr[:-1])):
        raise CriticalRho(f"rho = {rho.label} has a critical point on [{tau_lo}, {tau_hi}]")


def deform(frame: FrameField, spec: DeformationSpec, require_regular: bool = True) -> FrameField:
    """Rescale legs of an extended frame by ``rho(tau)``.

    Variant ``e`` scales every leg, ``e-prime`` only the spatial legs
    (``E_0`` untouched), ``E`` returns the base frame. Derivatives use the
    product rule in ``tau`` on top of the base frame's own strategy.
    """
    if frame.meta.get("kind") != "extended":
        raise ValueError("deform expects a frame built by extended_frame")
    if spec.variant == "E":
        return frame
    lo, hi = frame.chart.lower[0], frame.chart.upper[0]
    if require_regular:
        check_rho(spec.rho, lo, hi)
    n = frame.dim
    rho = spec.rho
    mask = np.ones(n)
    if spec.variant == "e-prime":
        mask[0] = 0.0

    def scales(tau, which):
        # per-leg factor and its tau-derivatives
        if which == 0:
            return mask * rho.f(tau)[..., None] + (1 - mask)
        g = rho.df if which == 1 else rho.d2f
        return mask * g(tau)[..., None]

    def func(x):
        return frame.frame(x) * scales(x[..., 0], 0)[..., None, :]

    def jac(x):
        tau = x[..., 0]
        e, de = frame.frame(x), frame.derivative(x)
        out = de * scales(tau, 0)[..., None, :, None]
        out[..., 0] += e * scales(tau, 1)[..., None, :]
        return out

    def hess(x):
        tau = x[..., 0]
        e, de, dde = frame.frame(x), frame.derivative(x), frame.second_derivative(x)
        s0, s1, s2 = (scales(tau, k)[..., None, :] for k in range(3))
        out = dde * s0[..., None, None]
        out[..., 0, :] += de * s1[..., None]
        out[..., :, 0] += de * s1[..., None]
        out[..., 0, 0] += e * s2
        return out

    label = f"{frame.label} deformed[{spec.variant}, rho={rho.label}]"
    meta = dict(frame.meta, kind="deformed", base=frame, deformation=spec)
    return FrameField(frame.chart, func, jacobian=jac, hessian=hess, label=label,
                      step=frame.step, meta=meta)


def polynomial_frame(n: int, seed: int = DEFAULT_SEED, amplitude: float = 0.1,
                     half_width: float = 1.0) -> FrameField:
    """Smooth non-group frame: identity plus seeded quadratic polynomial entries."""
    rng = np.random.default_rng(seed)
    lin = amplitude * rng.uniform(-1, 1, size=(n, n, n))
    quad = amplitude * rng.uniform(-1, 1, size=(n, n, n, n))

    def func(x):
        return (np.eye(n) + np.einsum("iaj,...j->...ia", lin, x)
                + np.einsum("iajk,...j,...k->...ia", quad, x, x))

    def jac(x):
        return np.broadcast_to(lin, x.shape[:-1] + lin.shape) + np.einsum("iajk,...k->...iaj", quad + np.swapaxes(quad, -1, -2), x)

    def hess(x):
        return np.broadcast_to(quad + np.swapaxes(quad, -1, -2), x.shape[:-1] + quad.shape).copy()

    label = f"polynomial({n}, seed={seed})"
    return FrameField(Chart.box(n, half_width, label), func, jacobian=jac, hessian=hess, label=label)

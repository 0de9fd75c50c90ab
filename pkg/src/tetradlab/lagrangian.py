"""Square-root-determinant Lagrangians.

Covers the Born-Infeld matter builders (electromagnetic, scalar, quadratic
electromagnetic, gauge multiplet, minimal-surface effective tensor), the
torsion-quadratic Weitzenboeck family, and the GL(n,R)-invariant Lagrange
tensor built from torsion alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError, DegenerateLagrangeTensor, MissingField, SingularMetric
from .frame_fields import FramePoint
from .quadrature import adaptive_simpson
from .teleparallel import dirac_einstein_metric, gamma_big, killing_tensor

DEGENERACY_TOL = 1e-12
METRIC_DET_TOL = 1e-12
PROFILE_TOL = 1e-10
PROFILE_DEPTH = 40


@dataclass
class LagrangeTensor:
    L: np.ndarray | None
    det: np.ndarray | float
    density: np.ndarray | float
    sign: np.ndarray | int
    degenerate: np.ndarray | bool


def _is_degenerate(L: np.ndarray, det, tol: float = DEGENERACY_TOL):
    n = L.shape[-1]
    scale = np.max(np.abs(L), axis=(-2, -1)) ** n
    return (np.abs(det) <= tol * scale) | (scale == 0)


def sqrt_det(L, prefactor: float = 1.0, tol: float = DEGENERACY_TOL) -> LagrangeTensor:
    """``prefactor * sqrt(|det L|)``; a vanishing determinant is flagged, not raised."""
    L = np.asarray(L)
    det = np.linalg.det(L)
    if np.iscomplexobj(det):
        mod = np.abs(det)
        sign = np.sign(det.real)
    else:
        mod, sign = np.abs(det), np.sign(det)
    degenerate = _is_degenerate(L, det, tol)
    density = prefactor * np.sqrt(mod)
    if np.ndim(det) == 0:
        return LagrangeTensor(L, complex(det) if np.iscomplexobj(det) else float(det),
                              float(density), int(sign), bool(degenerate))
    return LagrangeTensor(L, det, density, sign.astype(int), degenerate)


# --------------------------------------------------------------------------
# GL(n,R)-invariant torsion Lagrangian


def torsion_trace_vector(s: np.ndarray) -> np.ndarray:
    """``S^k_{ik}`` (upper index against the second lower one)."""
    return np.einsum("...kik->...i", s)


def born_infeld_tensor(s: np.ndarray, lam: float, mu: float, nu: float) -> np.ndarray:
    """``4 lam S^k_{im} S^m_{jk} + 4 mu S^k_{ik} S^m_{jm} + 4 nu S^k_{lk} S^l_{ij}``."""
    t = torsion_trace_vector(s)
    return (
        lam * killing_tensor(s)
        + 4.0 * mu * t[..., :, None] * t[..., None, :]
        + 4.0 * nu * np.einsum("...l,...lij->...ij", t, s)
    )


FAMILIES = ("gl_born_infeld", "quadratic", "hilbert")


@dataclass(frozen=True)
class ModelSpec:
    """Which Lagrangian to evaluate.

    ``gl_born_infeld`` uses ``lam, mu, nu``; ``quadratic`` uses ``c1, c2, c3``
    and the internal metric ``eta``; ``hilbert`` is ``quadratic(1, 2, -4)``.
    """

    family: str = "gl_born_infeld"
    lam: float = 1.0
    mu: float = 0.0
    nu: float = 0.0
    c1: float = 1.0
    c2: float = 2.0
    c3: float = -4.0
    eta: tuple | None = None
    prefactor: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        vals = (self.lam, self.mu, self.nu, self.c1, self.c2, self.c3, self.prefactor)
        if not all(np.isfinite(v) for v in vals):
            raise ConfigError("model coefficients must be finite")
        if self.eta is not None:
            eta = np.asarray(self.eta, dtype=float)
            if eta.ndim != 2 or eta.shape[0] != eta.shape[1]:
                raise ConfigError("eta must be a square matrix")
            object.__setattr__(self, "eta", tuple(map(tuple, eta.tolist())))
        if self.family != "gl_born_infeld" and self.eta is None:
            raise ConfigError(f"family {self.family!r} needs eta")

    @classmethod
    def gl_born_infeld(cls, lam: float = 1.0, mu: float = 0.0, nu: float = 0.0, prefactor: float = 1.0):
        return cls("gl_born_infeld", lam=lam, mu=mu, nu=nu, prefactor=prefactor)

    @classmethod
    def quadratic(cls, c1: float, c2: float, c3: float, eta, prefactor: float = 1.0):
        return cls("quadratic", c1=c1, c2=c2, c3=c3, eta=eta, prefactor=prefactor)

    @classmethod
    def hilbert(cls, eta, prefactor: float = 1.0):
        return cls("hilbert", c1=1.0, c2=2.0, c3=-4.0, eta=eta, prefactor=prefactor)

    @property
    def is_gl_invariant(self) -> bool:
        return self.family == "gl_born_infeld"

    @property
    def eta_matrix(self) -> np.ndarray | None:
        return None if self.eta is None else np.array(self.eta)

    @property
    def coefficients(self) -> tuple[float, float, float]:
        if self.family == "hilbert":
            return (1.0, 2.0, -4.0)
        return (self.c1, self.c2, self.c3)

    def to_dict(self) -> dict:
        if self.is_gl_invariant:
            d = {"family": self.family, "lambda": self.lam, "mu": self.mu, "nu": self.nu}
        else:
            c1, c2, c3 = self.coefficients
            d = {"family": self.family, "c1": c1, "c2": c2, "c3": c3,
                 "eta": [list(r) for r in self.eta]}
        d["prefactor"] = self.prefactor
        return d

    @classmethod
    def from_dict(cls, cfg: Mapping) -> "ModelSpec":
        """Build from config keys ``family, lambda, mu, nu, c1, c2, c3, eta, prefactor``."""
        allowed = {"family", "lambda", "mu", "nu", "c1", "c2", "c3", "eta", "prefactor"}
        unknown = set(cfg) - allowed
        if unknown:
            raise ConfigError(f"unknown model keys: {sorted(unknown)}")
        family = cfg.get("family", "gl_born_infeld")
        kw = dict(prefactor=float(cfg.get("prefactor", 1.0)))
        if family == "gl_born_infeld":
            return cls.gl_born_infeld(float(cfg.get("lambda", 1.0)), float(cfg.get("mu", 0.0)),
                                      float(cfg.get("nu", 0.0)), **kw)
        if family == "hilbert":
            return cls.hilbert(cfg.get("eta"), **kw)
        return cls(family, c1=float(cfg.get("c1", 1.0)), c2=float(cfg.get("c2", 2.0)),
                   c3=float(cfg.get("c3", -4.0)), eta=cfg.get("eta"), **kw)


# --------------------------------------------------------------------------
# Weitzenboeck family


def _metric_inverse(h: np.ndarray) -> np.ndarray:
    det = np.linalg.det(h)
    scale = np.max(np.abs(h), axis=(-2, -1)) ** h.shape[-1]
    if np.any(np.abs(det) <= METRIC_DET_TOL * np.maximum(scale, 1e-300)):
        raise SingularMetric("metric is singular")
    return np.linalg.inv(h)


def weitzenbock_invariants(s: np.ndarray, h: np.ndarray):
    """The three torsion-quadratic scalars ``(J1, J2, J3)`` built with metric ``h``."""
    hinv = _metric_inverse(h)
    j1 = np.einsum("...ai,...bj,...ck,...abc,...ijk->...", h, hinv, hinv, s, s)
    j2 = np.einsum("...ij,...aib,...bja->...", hinv, s, s)
    tr = np.einsum("...aai->...i", s)
    j3 = np.einsum("...ij,...i,...j->...", hinv, tr, tr)
    return j1, j2, j3


def quadratic_density(s: np.ndarray, h: np.ndarray, coeffs) -> np.ndarray:
    c1, c2, c3 = coeffs
    j1, j2, j3 = weitzenbock_invariants(s, h)
    return (c1 * j1 + c2 * j2 + c3 * j3) * np.sqrt(np.abs(np.linalg.det(h)))


# --------------------------------------------------------------------------
# scalar potentials


def potential_scalars(s: np.ndarray, power: int | None = None) -> dict[str, np.ndarray]:
    """Zeroth-order homogeneous scalars of the torsion, built with ``gamma_ij``.

    ``contracted_torsion``: gamma_il gamma^jm gamma^kn S^i_jk S^l_mn;
    ``trace_norm``: gamma^ij S^k_ik S^m_jm;
    ``gamma_trace``: tr((gamma^-1 Gamma)^power), default power ``n``.
    """
    g = killing_tensor(s)
    ginv = np.linalg.inv(g)
    t = torsion_trace_vector(s)
    mixed = ginv @ gamma_big(s)
    p = s.shape[-1] if power is None else power
    return {
        "contracted_torsion": np.einsum("...il,...jm,...kn,...ijk,...lmn->...", g, ginv, ginv, s, s),
        "trace_norm": np.einsum("...ij,...i,...j->...", ginv, t, t),
        "gamma_trace": np.trace(np.linalg.matrix_power(mixed, p), axis1=-2, axis2=-1),
    }


Potential = Callable[[Mapping[str, np.ndarray]], np.ndarray]


def evaluate_model(spec: ModelSpec, s: np.ndarray, fp: FramePoint | None = None,
                   potential: Potential | None = None) -> LagrangeTensor:
    """Lagrangian density of ``spec`` at torsion ``s``.

    For the torsion-quadratic families ``fp`` is needed to build
    ``h = h[e, eta]``; the returned ``L`` field is then ``None``.
    ``potential`` optionally multiplies the density by a function of
    :func:`potential_scalars`.
    """
    if spec.is_gl_invariant:
        lt = sqrt_det(born_infeld_tensor(s, spec.lam, spec.mu, spec.nu), spec.prefactor)
    else:
        if fp is None:
            raise MissingField("quadratic families need the frame to build h[e, eta]")
        h = dirac_einstein_metric(fp, spec.eta_matrix)
        dens = spec.prefactor * quadratic_density(s, h, spec.coefficients)
        det = np.linalg.det(h)
        lt = LagrangeTensor(None, det, dens, np.sign(dens), np.asarray(dens) == 0)
    if potential is not None:
        lt.density = lt.density * potential(potential_scalars(s))
    return lt


def require_nondegenerate(lt: LagrangeTensor) -> LagrangeTensor:
    if np.any(lt.degenerate):
        raise DegenerateLagrangeTensor("det L_ij = 0 (e.g. vanishing torsion)")
    return lt


# --------------------------------------------------------------------------
# Born-Infeld matter builders


@dataclass
class MatterSample:
    """Field values at one point.

    ``dpsi`` is a real gradient ``(n,)``, a complex one as a real pair
    ``(2, n)``, or for the minimal-surface builder the gradients of the
    transverse fields ``(m - n, n)``.
    """

    g: np.ndarray
    F: np.ndarray | None = None
    dpsi: np.ndarray | None = None
    gauge_F: np.ndarray | None = None
    gauge_metric: np.ndarray | None = None
    target_metric: np.ndarray | None = None

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=float)
        if self.F is not None:
            self.F = np.asarray(self.F, dtype=float)
            if not np.array_equal(self.F, -self.F.T):
                raise ValueError("F must be antisymmetric")


@dataclass
class MatterLagrangian:
    tensor: LagrangeTensor
    subtraction: float | None
    total: float


MATTER_VARIANTS = ("em", "scalar", "em_quadratic", "gauge", "minimal_surface")


def _need(sample: MatterSample, *names: str) -> None:
    missing = [n for n in names if getattr(sample, n) is None]
    if missing:
        raise MissingField(f"sample lacks {', '.join(missing)}")


def _grad_outer(dpsi: np.ndarray) -> np.ndarray:
    dpsi = np.asarray(dpsi, dtype=float)
    if dpsi.ndim == 1:
        return np.outer(dpsi, dpsi)
    # complex field as (re, im): symmetric part Re(conj(dPsi)_i dPsi_j)
    return np.outer(dpsi[0], dpsi[0]) + np.outer(dpsi[1], dpsi[1])


def bi_matter_tensor(variant: str, sample: MatterSample, b: float = 1.0, alpha: float = 1.0,
                     beta: float = 1.0, gamma: float = 1.0, delta: float = 0.0) -> MatterLagrangian:
    """Build the Lagrange tensor of a Born-Infeld matter model.

    ``em`` and ``scalar`` return the full Lagrangian
    ``-sqrt|det(b g + X)| + b^(n/2) sqrt|det g|`` in ``total`` so that it
    vanishes with the field; other variants return the bare density.
    """
    g = sample.g
    n = g.shape[0]
    if variant == "em":
        _need(sample, "F")
        L = b * g + sample.F
    elif variant == "scalar":
        _need(sample, "dpsi")
        L = b * g + _grad_outer(sample.dpsi)
    elif variant == "em_quadratic":
        _need(sample, "F")
        F, ginv = sample.F, np.linalg.inv(g)
        FF = np.einsum("kl,ik,lj->ij", ginv, F, F)
        inv2 = np.einsum("kr,ls,kl,rs->", ginv, ginv, F, F)
        L = alpha * g + beta * F + gamma * FF + delta * inv2 * g
    elif variant == "gauge":
        _need(sample, "gauge_F", "gauge_metric")
        ginv = np.linalg.inv(g)
        L = alpha * g + gamma * np.einsum("kl,Kik,Llj,KL->ij", ginv, sample.gauge_F,
                                          sample.gauge_F, sample.gauge_metric)
    elif variant == "minimal_surface":
        _need(sample, "target_metric", "dpsi")
        H = np.asarray(sample.target_metric, dtype=float)
        psi = np.atleast_2d(np.asarray(sample.dpsi, dtype=float))
        h_ii, h_si, h_ss = H[:n, :n], H[n:, :n], H[n:, n:]
        cross = np.einsum("si,sj->ij", h_si, psi)
        L = h_ii + cross + cross.T + np.einsum("st,si,tj->ij", h_ss, psi, psi)
    else:
        raise ValueError(f"unknown matter variant {variant!r}; choose from {MATTER_VARIANTS}")
    lt = sqrt_det(L)
    if variant in ("em", "scalar"):
        sub = b ** (n / 2) * np.sqrt(abs(np.linalg.det(g)))
        return MatterLagrangian(lt, float(sub), float(-lt.density + sub))
    return MatterLagrangian(lt, None, float(lt.density))


def coupled_matter_tensor(gamma_ij, psi, dpsi, a: float, b: float) -> LagrangeTensor:
    """``(1 - a conj(Psi) Psi) gamma_ij + b conj(Psi)_{,i} Psi_{,j}`` for complex ``Psi``.

    ``psi`` is ``(re, im)`` and ``dpsi`` is ``(2, n)``. The tensor is complex
    in general; the density uses the modulus of its determinant.
    """
    z = complex(psi[0], psi[1])
    dz = np.asarray(dpsi[0], dtype=float) + 1j * np.asarray(dpsi[1], dtype=float)
    L = (1.0 - a * abs(z) ** 2) * np.asarray(gamma_ij, dtype=complex) + b * np.outer(dz.conj(), dz)
    return sqrt_det(L)


def radial_profile(A: float, b: float, r: float, tol: float = PROFILE_TOL) -> float:
    """Static radial potential ``sqrt(A b) * int_0^r du / sqrt(A + u^4)``."""
    if A <= 0 or b <= 0 or r < 0:
        raise ValueError("radial_profile needs A > 0, b > 0, r >= 0")
    integral = adaptive_simpson(lambda u: 1.0 / np.sqrt(A + u**4), 0.0, r, tol, PROFILE_DEPTH)
    return float(np.sqrt(A * b) * integral)

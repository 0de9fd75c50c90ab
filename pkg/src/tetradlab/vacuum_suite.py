"""End-to-end verification of the Lie-group vacuum solutions, with reports."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import fd
from .errors import NotSemisimple
from .frame_fields import (
    DEFAULT_POINTS,
    DEFAULT_SEED,
    RHO_PRESETS,
    DeformationSpec,
    FrameField,
    Rho,
    deform,
    extended_frame,
    group_frame,
)
from .lagrangian import ModelSpec
from .lie_algebra import StructureConstants, catalog, is_semisimple, killing_form
from .teleparallel import dirac_einstein_metric, killing_tensor, torsion
from .tensor_core import Signature, eigen_signature
from .variation import residuals

DEFAULT_TOL = 1e-6
MIN_POINTS = 20
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Sampling:
    count: int = DEFAULT_POINTS
    seed: int = DEFAULT_SEED
    scale: float = 0.5


@dataclass
class PointRecord:
    coords: list[float]
    max_abs: float | None
    frobenius: float | None
    degenerate: bool
    signature: str


@dataclass
class ResidualReport:
    model: dict
    frame: str
    points: list[PointRecord]
    tolerance: float
    verdict: bool
    metadata: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        vals = [p.max_abs for p in self.points if not p.degenerate]
        return max(vals) if vals else float("nan")

    @property
    def signatures(self) -> list[str]:
        return [p.signature for p in self.points]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "model": self.model,
            "frame": self.frame,
            "tolerance": self.tolerance,
            "verdict": "pass" if self.verdict else "fail",
            "max_residual": _finite_or_none(self.max_residual),
            "points": [asdict(p) for p in self.points],
            "signature": self.signatures,
            "metadata": self.metadata,
            "extras": self.extras,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = len(self.points[0].coords) if self.points else 0
        w.writerow(["index"] + [f"x{i}" for i in range(n)] + ["max_abs", "frobenius", "degenerate", "signature"])
        for i, p in enumerate(self.points):
            w.writerow([i] + [repr(c) for c in p.coords]
                       + [_fmt(p.max_abs), _fmt(p.frobenius), int(p.degenerate), p.signature])
        return buf.getvalue()

    def write(self, out_dir: str | Path, stem: str = "report") -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        js, cs = out / f"{stem}.json", out / f"{stem}.csv"
        js.write_text(self.to_json(), encoding="utf-8", newline="\n")
        cs.write_text(self.to_csv(), encoding="utf-8", newline="\n")
        return js, cs


def _fmt(v):
    return "" if v is None else repr(float(v))


def _finite_or_none(v):
    return float(v) if v is not None and np.isfinite(v) else None


def decide(points: list[PointRecord], tol: float, min_points: int = MIN_POINTS) -> bool:
    good = [p for p in points if not p.degenerate]
    return len(points) >= min_points and bool(good) and all(p.max_abs < tol for p in good)


def gamma_signature(g: np.ndarray) -> Signature:
    scale = max(1.0, float(np.max(np.abs(g))))
    return eigen_signature(g, tol=1e-9 * scale)


def _evaluate(frame: FrameField, spec: ModelSpec, pts: np.ndarray):
    k, degenerate = residuals(frame, spec, pts)
    gam = killing_tensor(torsion(frame.at(pts)))
    records = []
    for x, kk, deg, g in zip(pts, k, degenerate, gam):
        records.append(PointRecord(
            coords=[float(c) for c in x],
            max_abs=None if deg else float(np.max(np.abs(kk))),
            frobenius=None if deg else float(np.linalg.norm(kk)),
            degenerate=bool(deg),
            signature=str(gamma_signature(g)),
        ))
    return records


def _convergence(build, spec: ModelSpec, pts: np.ndarray, step: float) -> list[dict]:
    table = []
    for h in (step, step / 2):
        k, deg = residuals(build(h), spec, pts)
        ok = ~deg
        table.append({"fd_step": h, "max_abs": float(np.max(np.abs(k[ok]))) if ok.any() else None})
    return table


def _metadata(sampling: Sampling, step: float, **extra) -> dict:
    meta = {"seed": sampling.seed, "points": sampling.count, "sample_scale": sampling.scale,
            "fd_step": step, "fd_order": 4, "timestamp": None}
    meta.update(extra)
    return meta


def _semisimple(algebra: str | StructureConstants) -> StructureConstants:
    sc = catalog(algebra) if isinstance(algebra, str) else algebra
    if not is_semisimple(sc):
        raise NotSemisimple(f"{sc.name or 'algebra'} is not semisimple (Killing form degenerate)")
    return sc


def verify_theorem1(algebra: str | StructureConstants, spec: ModelSpec, sampling: Sampling = Sampling(),
                    step: float = fd.DEFAULT_STEP, tol: float = DEFAULT_TOL, radius: float = 1.0,
                    convergence: bool = True) -> ResidualReport:
    """Residual of the field equations on the invariant frame of a semisimple group."""
    sc = _semisimple(algebra)
    build = lambda h: group_frame(sc, radius, step=h)
    frame = build(step)
    pts = frame.chart.sample(sampling.count, sampling.seed, sampling.scale)
    records = _evaluate(frame, spec, pts)
    meta = _metadata(sampling, step, check="theorem1", algebra=sc.name, radius=radius)
    if convergence:
        meta["convergence"] = _convergence(build, spec, pts, step)
    return ResidualReport(spec.to_dict(), frame.label, records, tol, decide(records, tol), meta)


def verify_frame(frame: FrameField, spec: ModelSpec, sampling: Sampling = Sampling(),
                 tol: float = DEFAULT_TOL) -> ResidualReport:
    """Residual report for an arbitrary frame field (no vacuum claim implied)."""
    pts = frame.chart.sample(sampling.count, sampling.seed, sampling.scale)
    records = _evaluate(frame, spec, pts)
    meta = _metadata(sampling, frame.step, check="frame")
    return ResidualReport(spec.to_dict(), frame.label, records, tol, decide(records, tol), meta)


def resolve_rho(rho: str | Rho) -> Rho:
    if isinstance(rho, Rho):
        return rho
    try:
        return RHO_PRESETS[rho]
    except KeyError:
        raise ValueError(f"unknown rho preset {rho!r}; choose from {sorted(RHO_PRESETS)}") from None


def deformed_frame(algebra: str | StructureConstants, rho: str | Rho, variant: str = "e",
                   step: float = fd.DEFAULT_STEP, radius: float = 1.0,
                   tau_range: tuple[float, float] | None = None) -> FrameField:
    sc = catalog(algebra) if isinstance(algebra, str) else algebra
    r = resolve_rho(rho)
    base = extended_frame(sc, radius, tau_range or r.tau_range, step=step)
    return deform(base, DeformationSpec(r, variant))


def verify_theorem2(algebra: str | StructureConstants, rho: str | Rho = "exp", variant: str = "e",
                    spec: ModelSpec = ModelSpec(), sampling: Sampling = Sampling(),
                    step: float = fd.DEFAULT_STEP, tol: float = DEFAULT_TOL, radius: float = 1.0,
                    convergence: bool = True) -> ResidualReport:
    """Residual on a rho-deformed trivial central extension of a semisimple group."""
    sc = _semisimple(algebra)
    r = resolve_rho(rho)
    build = lambda h: deformed_frame(sc, r, variant, h, radius)
    frame = build(step)
    pts = frame.chart.sample(sampling.count, sampling.seed, sampling.scale)
    records = _evaluate(frame, spec, pts)
    meta = _metadata(sampling, step, check="theorem2", algebra=sc.name, rho=r.label,
                     variant=variant, radius=radius, tau_range=list(frame.chart.lower[:1] + frame.chart.upper[:1]))
    if convergence:
        meta["convergence"] = _convergence(build, spec, pts, step)
    form = metric_form_check(frame, pts)
    extras = {"metric_form": asdict(form)}
    return ResidualReport(spec.to_dict(), frame.label, records, tol, decide(records, tol), meta, extras)


@dataclass
class MetricFormResult:
    closed_form_deviation: float
    variant_deviation: float
    tau_drift: float


def _deformation_parts(frame: FrameField):
    if frame.meta.get("kind") != "deformed":
        raise ValueError("expected a frame built by deform()")
    return frame.meta["structure"], frame.meta["deformation"], frame.meta["base"]


def closed_form_metric(frame: FrameField, points) -> np.ndarray:
    """``(n-1) rho'^2 e^0 e^0 + rho^2 C_{LS} e^L e^S`` with ``e`` the all-legs deformation."""
    sc, spec, base = _deformation_parts(frame)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = frame.dim
    tau = pts[:, 0]
    rho, drho = spec.rho.f(tau), spec.rho.df(tau)
    e_all = deform(base, DeformationSpec(spec.rho, "e"), require_regular=False)
    co = np.linalg.inv(e_all.frame(pts))
    c = killing_form(sc)
    time = (n - 1) * drho[:, None, None] ** 2 * np.einsum("pi,pj->pij", co[:, 0], co[:, 0])
    space = rho[:, None, None] ** 2 * np.einsum("ls,pli,psj->pij", c, co[:, 1:], co[:, 1:])
    return time + space


def metric_form_check(frame: FrameField, points) -> MetricFormResult:
    """Compare ``gamma[e]`` with its closed form, across variants, and along tau."""
    sc, spec, base = _deformation_parts(frame)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    gam = killing_tensor(torsion(frame.at(pts)))
    closed = closed_form_metric(frame, pts)
    other = "e-prime" if spec.variant == "e" else "e"
    twin = deform(base, DeformationSpec(spec.rho, other), require_regular=False)
    gam_twin = killing_tensor(torsion(twin.at(pts)))

    def adapted(x):
        # components in the undeformed E basis: gamma(E_A, E_B)
        e = base.frame(x)
        return np.einsum("...ij,...ia,...jb->...ab", killing_tensor(torsion(frame.at(x))), e, e)

    drift = fd.gradient(adapted, pts, frame.step)[..., 0]
    return MetricFormResult(
        closed_form_deviation=float(np.max(np.abs(gam - closed))),
        variant_deviation=float(np.max(np.abs(gam - gam_twin))),
        tau_drift=float(np.max(np.abs(drift))),
    )


def expansion_contrast(frame: FrameField, beta: float = 1.0, x_spatial=None, samples: int = 10) -> dict:
    """Track ``h[e, eta]`` (eta = diag(beta, C)) against ``gamma[e]`` along tau.

    The growth rate is the least-squares slope of ``log|det|`` of the spatial
    block divided by its dimension, i.e. the exponent per spatial direction.
    """
    sc, spec, base = _deformation_parts(frame)
    n = frame.dim
    eta = np.zeros((n, n))
    eta[0, 0] = beta
    eta[1:, 1:] = killing_form(sc)
    lo, hi = frame.chart.lower[0], frame.chart.upper[0]
    taus = np.linspace(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), samples)
    xs = np.zeros(n - 1) if x_spatial is None else np.asarray(x_spatial, dtype=float)
    pts = np.column_stack([taus, np.tile(xs, (samples, 1))])
    fp = frame.at(pts)
    h = dirac_einstein_metric(fp, eta)
    gam = killing_tensor(torsion(fp))
    h_log = np.log(np.abs(np.linalg.det(h[:, 1:, 1:])))
    g_log = np.log(np.abs(np.linalg.det(gam[:, 1:, 1:])))
    h_rate = np.polyfit(taus, h_log, 1)[0] / (n - 1)
    g_rate = np.polyfit(taus, g_log, 1)[0] / (n - 1)
    return {
        "tau": taus.tolist(),
        "h_spatial_logdet": h_log.tolist(),
        "gamma_spatial_logdet": g_log.tolist(),
        "h_rate": float(h_rate),
        "gamma_rate": float(g_rate),
        "h_time_time": h[:, 0, 0].tolist(),
        "gamma_time_time": gam[:, 0, 0].tolist(),
    }

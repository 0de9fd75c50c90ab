"""Command-line entry point.

Usage:
    tetradlab catalog [NAME]
    tetradlab verify theorem1 --algebra su2 --lambda 1
    tetradlab verify theorem2 --algebra sl2r --rho exp --variant e
    tetradlab invariants --algebra su2 --out inv.csv
    tetradlab profile --A 1 --b 1 --r-max 5 --steps 50

Settings come from (lowest to highest precedence) built-in defaults, a flat
JSON file given with ``--config``, and command-line flags.

Exit codes: 0 pass, 1 verification failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import TetradLabError
from .frame_fields import RHO_PRESETS, VARIANTS, DeformationSpec, deform, extended_frame, group_frame
from .lagrangian import FAMILIES, ModelSpec, evaluate_model, radial_profile, weitzenbock_invariants
from .lie_algebra import CATALOG_LISTING, catalog, describe, is_semisimple, killing_form
from .teleparallel import dirac_einstein_metric, torsion
from .vacuum_suite import Sampling, gamma_signature, verify_theorem1, verify_theorem2

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "algebra": "su2",
    "family": "gl_born_infeld",
    "lambda": 1.0,
    "mu": 0.0,
    "nu": 0.0,
    "c1": 1.0,
    "c2": 2.0,
    "c3": -4.0,
    "eta": None,
    "prefactor": 1.0,
    "rho": None,
    "variant": "e",
    "points": 20,
    "seed": 42,
    "radius": 1.0,
    "fd_step": 1e-3,
    "tol": 1e-6,
    "out": None,
    "timestamp": False,
    "A": 1.0,
    "b": 1.0,
    "r_max": 5.0,
    "steps": 50,
}


class UsageError(TetradLabError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat JSON config file")
    p.add_argument("--algebra")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--c3", type=float)
    p.add_argument("--eta", help="killing | minkowski | euclidean | JSON matrix")
    p.add_argument("--rho", choices=sorted(RHO_PRESETS))
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--points", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--fd-step", dest="fd_step", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tetradlab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cat = sub.add_parser("catalog", help="list Lie algebras or describe one")
    cat.add_argument("name", nargs="?")

    ver = sub.add_parser("verify", help="verify a vacuum theorem and write a report")
    ver.add_argument("theorem", choices=["theorem1", "theorem2"])
    _add_common(ver)
    ver.add_argument("--timestamp", action="store_const", const=True,
                     help="record wall-clock time in the report (breaks bit-identical output)")

    inv = sub.add_parser("invariants", help="CSV of torsion invariants at sample points")
    _add_common(inv)

    prof = sub.add_parser("profile", help="CSV of the Born-Infeld radial profile f(r)")
    prof.add_argument("--config", type=Path)
    prof.add_argument("--A", dest="A", type=float)
    prof.add_argument("--b", dest="b", type=float)
    prof.add_argument("--r-max", dest="r_max", type=float)
    prof.add_argument("--steps", type=int)
    prof.add_argument("--out")
    return parser


def load_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    path = getattr(args, "config", None)
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            cfg[key] = value
    if cfg["points"] < 1 or cfg["steps"] < 1:
        raise UsageError("points and steps must be positive")
    if cfg["fd_step"] <= 0 or cfg["tol"] <= 0:
        raise UsageError("fd-step and tol must be positive")
    return cfg


def resolve_eta(value, n: int, algebra_name: str | None = None, extended: bool = False) -> np.ndarray:
    if value is None or (isinstance(value, str) and value == "killing"):
        if algebra_name is None:
            raise UsageError("eta=killing needs an algebra")
        sc = catalog(algebra_name)
        if extended:
            eta = np.zeros((n, n))
            eta[0, 0] = 1.0
            eta[1:, 1:] = killing_form(sc)
            return eta
        if value is None and not is_semisimple(sc):
            return np.eye(n)
        return killing_form(sc)
    if isinstance(value, str):
        if value == "minkowski":
            return np.diag([1.0] + [-1.0] * (n - 1))
        if value == "euclidean":
            return np.eye(n)
        try:
            value = json.loads(value)
        except json.JSONDecodeError:
            raise UsageError(f"cannot parse eta {value!r}") from None
    eta = np.asarray(value, dtype=float)
    if eta.shape != (n, n):
        raise UsageError(f"eta must be {n}x{n}")
    return eta


def model_from_config(cfg: dict, n: int, extended: bool = False) -> ModelSpec:
    keys = {"family": cfg["family"], "lambda": cfg["lambda"], "mu": cfg["mu"], "nu": cfg["nu"],
            "c1": cfg["c1"], "c2": cfg["c2"], "c3": cfg["c3"], "prefactor": cfg["prefactor"]}
    if cfg["family"] != "gl_born_infeld":
        keys["eta"] = resolve_eta(cfg["eta"], n, cfg["algebra"], extended).tolist()
    return ModelSpec.from_dict(keys)


def _sampling(cfg: dict) -> Sampling:
    return Sampling(count=int(cfg["points"]), seed=int(cfg["seed"]))


def cmd_catalog(args) -> int:
    names = [args.name] if args.name else list(CATALOG_LISTING)
    rows = [describe(n) for n in names]
    print(f"{'name':24s} {'dim':>3s}  {'semisimple':10s} {'killing signature (+,-,0)'}")
    for r in rows:
        sig = f"({r.signature.plus},{r.signature.minus},{r.signature.zero})"
        print(f"{r.name:24s} {r.dim:3d}  {str(r.semisimple).lower():10s} {sig}")
    return EXIT_PASS


def cmd_verify(args) -> int:
    cfg = load_config(args)
    n = catalog(cfg["algebra"]).dim
    common = dict(sampling=_sampling(cfg), step=float(cfg["fd_step"]), tol=float(cfg["tol"]),
                  radius=float(cfg["radius"]))
    if args.theorem == "theorem1":
        spec = model_from_config(cfg, n)
        report = verify_theorem1(cfg["algebra"], spec, **common)
    else:
        spec = model_from_config(cfg, n + 1, extended=True)
        report = verify_theorem2(cfg["algebra"], cfg["rho"] or "exp", cfg["variant"], spec, **common)
    if cfg["timestamp"]:
        report.metadata["timestamp"] = datetime.now(timezone.utc).isoformat()
    out = Path(cfg["out"] or "reports")
    js, cs = report.write(out, args.theorem)
    sigs = sorted(set(report.signatures))
    print(f"{args.theorem} {cfg['algebra']}: {'PASS' if report.verdict else 'FAIL'} "
          f"max|K|={report.max_residual:.3e} tol={report.tolerance:g} "
          f"signature={','.join(sigs)} report={js}")
    return EXIT_PASS if report.verdict else EXIT_FAIL


def _emit_csv(rows: list[list], header: list[str], out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(buf.getvalue(), encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(buf.getvalue())


def cmd_invariants(args) -> int:
    cfg = load_config(args)
    sc = catalog(cfg["algebra"])
    step = float(cfg["fd_step"])
    if cfg["rho"]:
        rho = RHO_PRESETS[cfg["rho"]]
        frame = deform(extended_frame(sc, cfg["radius"], rho.tau_range, step=step),
                       DeformationSpec(rho, cfg["variant"]))
    else:
        frame = group_frame(sc, cfg["radius"], step=step)
    n = frame.dim
    eta = resolve_eta(cfg["eta"], n, cfg["algebra"], extended=bool(cfg["rho"]))
    spec = model_from_config(cfg, n, extended=bool(cfg["rho"]))
    pts = frame.chart.sample(int(cfg["points"]), int(cfg["seed"]))
    fp = frame.at(pts)
    s = torsion(fp)
    h = dirac_einstein_metric(fp, eta)
    j1, j2, j3 = weitzenbock_invariants(s, h)
    dens = np.asarray(evaluate_model(spec, s, fp).density) * np.ones(len(pts))
    rows = []
    for i, x in enumerate(pts):
        sig = gamma_signature(h[i])
        rows.append([i, *map(repr, map(float, x)), repr(float(j1[i])), repr(float(j2[i])),
                     repr(float(j3[i])), repr(float(dens[i])), str(sig)])
    header = ["index"] + [f"x{i}" for i in range(n)] + ["J1", "J2", "J3", "density", "signature"]
    _emit_csv(rows, header, cfg["out"])
    return EXIT_PASS


def cmd_profile(args) -> int:
    cfg = load_config(args)
    A, b, r_max, steps = float(cfg["A"]), float(cfg["b"]), float(cfg["r_max"]), int(cfg["steps"])
    if A <= 0 or b <= 0 or r_max < 0:
        raise UsageError("profile needs A > 0, b > 0, r-max >= 0")
    rs = np.linspace(0.0, r_max, steps + 1)
    rows = [[repr(float(r)), repr(radial_profile(A, b, float(r)))] for r in rs]
    _emit_csv(rows, ["r", "f"], cfg["out"])
    return EXIT_PASS


COMMANDS = {"catalog": cmd_catalog, "verify": cmd_verify, "invariants": cmd_invariants, "profile": cmd_profile}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (TetradLabError, ValueError) as exc:
        print(f"tetradlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

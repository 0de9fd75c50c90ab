"""Structure constants, Killing forms and a small catalog of Lie algebras.

Structure constants are stored as ``c[C, A, B] = c^C_{AB}`` so that
``[e_A, e_B] = c^C_{AB} e_C``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import UnknownAlgebra
from .tensor_core import Signature, eigen_signature

SEMISIMPLE_TOL = 1e-9


@dataclass(frozen=True)
class StructureConstants:
    c: np.ndarray
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError(f"structure constants must be (n, n, n), got {c.shape}")
        if not np.array_equal(c, -np.swapaxes(c, 1, 2)):
            raise ValueError("structure constants must be antisymmetric in the lower indices")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Adjoint matrices ``(ad_x)^C_B = c^C_{AB} x^A``; broadcasts over ``x``."""
        return np.einsum("cab,...a->...cb", self.c, x)


def jacobi_residual(sc: StructureConstants) -> float:
    """Largest violation of the Jacobi identity over all index tuples."""
    c = sc.c
    # sum_E c^E_{AB} c^D_{EC}  ->  [A, B, C, D]
    t = np.einsum("eab,dec->abcd", c, c)
    cyc = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
    return float(np.max(np.abs(cyc))) if cyc.size else 0.0


def killing_form(sc: StructureConstants) -> np.ndarray:
    """``eta_AB = c^C_{DA} c^D_{CB}``."""
    eta = np.einsum("cda,dcb->ab", sc.c, sc.c)
    assert np.allclose(eta, eta.T, atol=1e-12)
    return 0.5 * (eta + eta.T)


def is_semisimple(sc: StructureConstants, tol: float = SEMISIMPLE_TOL) -> bool:
    return abs(np.linalg.det(killing_form(sc))) > tol


def killing_signature(sc: StructureConstants) -> Signature:
    return eigen_signature(killing_form(sc))


def ad_invariance_residual(sc: StructureConstants) -> float:
    """max |c^E_{DA} eta_EB + c^E_{DB} eta_AE| -- zero for any Lie algebra."""
    eta = killing_form(sc)
    r = np.einsum("eda,eb->dab", sc.c, eta) + np.einsum("edb,ae->dab", sc.c, eta)
    return float(np.max(np.abs(r)))


def trivial_central_extension(sc: StructureConstants) -> StructureConstants:
    """Prepend a generator (index 0) commuting with everything."""
    n = sc.dim + 1
    c = np.zeros((n, n, n))
    c[1:, 1:, 1:] = sc.c
    return StructureConstants(c, f"R+{sc.name}" if sc.name else "")


def direct_sum(a: StructureConstants, b: StructureConstants) -> StructureConstants:
    n, m = a.dim, b.dim
    c = np.zeros((n + m,) * 3)
    c[:n, :n, :n] = a.c
    c[n:, n:, n:] = b.c
    return StructureConstants(c, f"direct_sum({a.name},{b.name})")


def _epsilon3() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in product(range(3), repeat=3):
        eps[i, j, k] = np.sign((j - i) * (k - i) * (k - j))
    return eps


def abelian(n: int) -> StructureConstants:
    if n < 1:
        raise UnknownAlgebra(f"abelian({n}): dimension must be positive")
    return StructureConstants(np.zeros((n, n, n)), f"abelian({n})")


def heisenberg3() -> StructureConstants:
    c = np.zeros((3, 3, 3))
    c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0  # [X, Y] = Z
    return StructureConstants(c, "heisenberg3")


def su2() -> StructureConstants:
    return StructureConstants(_epsilon3(), "su2")


def so3() -> StructureConstants:
    # isomorphic to su2; same constants
    return StructureConstants(_epsilon3(), "so3")


def sl2r() -> StructureConstants:
    """Basis (H, E, F): [H,E] = 2E, [H,F] = -2F, [E,F] = H."""
    c = np.zeros((3, 3, 3))
    c[1, 0, 1], c[1, 1, 0] = 2.0, -2.0
    c[2, 0, 2], c[2, 2, 0] = -2.0, 2.0
    c[0, 1, 2], c[0, 2, 1] = 1.0, -1.0
    return StructureConstants(c, "sl2r")


_NAMED = {"heisenberg3": heisenberg3, "su2": su2, "so3": so3, "sl2r": sl2r}

CATALOG_NAMES = ("abelian(n)", "heisenberg3", "su2", "so3", "sl2r", "direct_sum(a,b)")
CATALOG_LISTING = ("abelian(3)", "heisenberg3", "su2", "so3", "sl2r", "direct_sum(su2,su2)")


def _split_top_level(args: str) -> list[str]:
    depth, start, parts = 0, 0, []
    for i, ch in enumerate(args):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(args[start:i])
            start = i + 1
    parts.append(args[start:])
    return [p.strip() for p in parts]


def catalog(name: str) -> StructureConstants:
    """Look up an algebra by name, e.g. ``"su2"`` or ``"direct_sum(su2,sl2r)"``."""
    key = name.strip().replace(" ", "").lower()
    if key in _NAMED:
        return _NAMED[key]()
    m = re.fullmatch(r"abelian\((\d+)\)", key)
    if m:
        return abelian(int(m.group(1)))
    m = re.fullmatch(r"direct_sum\((.*)\)", key)
    if m:
        parts = _split_top_level(m.group(1))
        if len(parts) != 2 or not all(parts):
            raise UnknownAlgebra(f"direct_sum needs two arguments: {name!r}")
        return direct_sum(catalog(parts[0]), catalog(parts[1]))
    raise UnknownAlgebra(f"unknown algebra {name!r}; known: {', '.join(CATALOG_NAMES)}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    dim: int
    semisimple: bool
    signature: Signature
    jacobi: float = field(default=0.0)


def describe(name: str) -> CatalogEntry:
    sc = catalog(name)
    return CatalogEntry(
        name=sc.name,
        dim=sc.dim,
        semisimple=is_semisimple(sc),
        signature=killing_signature(sc),
        jacobi=jacobi_residual(sc),
    )

import itertools

import numpy as np
import pytest

from tetradlab.errors import ConfigError, MissingField
from tetradlab.frame_fields import constant_frame, group_frame, polynomial_frame
from tetradlab.lagrangian import (
    MatterSample,
    ModelSpec,
    bi_matter_tensor,
    born_infeld_tensor,
    coupled_matter_tensor,
    evaluate_model,
    potential_scalars,
    quadratic_density,
    radial_profile,
    require_nondegenerate,
    sqrt_det,
    weitzenbock_invariants,
)
from tetradlab.errors import DegenerateLagrangeTensor
from tetradlab.lie_algebra import su2
from tetradlab.teleparallel import dirac_einstein_metric, killing_tensor, torsion

from conftest import random_torsion, well_conditioned

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])
TRIPLES = [(1.0, 0.0, 0.0), (1.0, 0.3, 0.2), (0.7, -0.5, 0.4)]


def simpson_fixed(f, a, b, panels):
    u = np.linspace(a, b, 2 * panels + 1)
    w = np.ones_like(u)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    return (b - a) / (6 * panels) * np.dot(w, f(u))


def random_antisym(rng, n, scale):
    f = rng.normal(size=(n, n))
    return scale * (f - f.T)


def test_sqrt_det_examples():
    lt = sqrt_det(np.eye(4))
    assert lt.density == 1.0 and not lt.degenerate and lt.sign == 1
    lt = sqrt_det(np.zeros((3, 3)))
    assert lt.density == 0.0 and lt.degenerate
    assert sqrt_det(np.eye(2), prefactor=-2.0).density == -2.0
    with pytest.raises(DegenerateLagrangeTensor):
        require_nondegenerate(sqrt_det(np.zeros((2, 2))))


def test_sqrt_det_weak_field_taylor(rng):
    b = 1.7
    g = MINKOWSKI
    ginv = np.linalg.inv(g)
    f = random_antisym(rng, 4, 1.0)
    f2 = np.einsum("ik,jl,ij,kl->", ginv, ginv, f, f)
    errs = []
    for eps in (1e-2, 5e-3):
        dens = sqrt_det(b * g + eps * f).density
        taylor = b**2 * (1 + eps**2 * f2 / (4 * b**2))
        errs.append(abs(dens - taylor))
    # remainder is O(F^4)
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.05)


def test_em_and_scalar_vanish_without_field():
    for n, g in ((4, MINKOWSKI), (3, np.diag([2.0, 1.0, 3.0]))):
        em = bi_matter_tensor("em", MatterSample(g, F=np.zeros((n, n))), b=2.0)
        assert em.total == pytest.approx(0.0, abs=1e-12)
        sc = bi_matter_tensor("scalar", MatterSample(g, dpsi=np.zeros(n)), b=0.5)
        assert sc.total == pytest.approx(0.0, abs=1e-12)


def test_em_weak_field_is_maxwell(rng):
    g = MINKOWSKI
    ginv = np.linalg.inv(g)
    f = random_antisym(rng, 4, 1.0)
    rema = []
    for eps in (1e-2, 5e-3):
        F = eps * f
        maxwell = -0.25 * np.einsum("ik,jl,ij,kl->", ginv, ginv, F, F)
        rema.append(abs(bi_matter_tensor("em", MatterSample(g, F=F)).total - maxwell))
    assert rema[0] < 1e-6
    assert rema[0] / rema[1] == pytest.approx(16, rel=0.05)


def test_complex_scalar_real_pair(rng):
    g = np.diag([1.0, 2.0, 3.0])
    d = rng.normal(size=(2, 3))
    out = bi_matter_tensor("scalar", MatterSample(g, dpsi=d), b=1.0)
    z = d[0] + 1j * d[1]
    ref = np.sqrt(abs(np.linalg.det(g + np.real(np.outer(z.conj(), z)))))
    assert out.tensor.density == pytest.approx(ref, rel=1e-12)


def test_minimal_surface_pullback_oracle(rng):
    n, m = 3, 5
    a = rng.normal(size=(m, m))
    H = a @ a.T + m * np.eye(m)
    dpsi = rng.normal(size=(m - n, n))
    jac = np.vstack([np.eye(n), dpsi])
    induced = jac.T @ H @ jac
    out = bi_matter_tensor("minimal_surface", MatterSample(np.eye(n), dpsi=dpsi, target_metric=H))
    np.testing.assert_allclose(out.tensor.L, induced, atol=1e-12)
    assert out.tensor.density == pytest.approx(np.sqrt(np.linalg.det(induced)), rel=1e-12)


def test_gauge_and_quadratic_variants(rng):
    g = np.eye(3)
    F = random_antisym(rng, 3, 0.2)
    q = bi_matter_tensor("em_quadratic", MatterSample(g, F=F), alpha=1.0, beta=1.0, gamma=0.0, delta=0.0)
    assert q.tensor.density == pytest.approx(np.sqrt(np.linalg.det(g + F)))
    gf = np.stack([random_antisym(rng, 3, 0.2) for _ in range(2)])
    out = bi_matter_tensor("gauge", MatterSample(g, gauge_F=gf, gauge_metric=np.eye(2)), gamma=0.0)
    assert out.total == pytest.approx(1.0)
    with pytest.raises(MissingField):
        bi_matter_tensor("em", MatterSample(g))
    with pytest.raises(ValueError):
        bi_matter_tensor("nosuch", MatterSample(g))
    with pytest.raises(ValueError):
        MatterSample(g, F=np.ones((3, 3)))


def test_coupled_matter_reduces_to_gamma():
    gam = -2.0 * np.eye(3)
    lt = coupled_matter_tensor(gam, (0.0, 0.0), np.zeros((2, 3)), a=0.5, b=1.0)
    assert lt.density == pytest.approx(np.sqrt(8.0))
    lt = coupled_matter_tensor(gam, (0.6, 0.8), np.zeros((2, 3)), a=1.0, b=1.0)
    assert lt.degenerate


def test_radial_profile():
    assert radial_profile(1.0, 1.0, 0.0) == 0.0
    f = lambda u: 1.0 / np.sqrt(1.0 + u**4)
    oracle = simpson_fixed(f, 0.0, 1.0, 10**6)
    assert radial_profile(1.0, 1.0, 1.0) == pytest.approx(oracle, abs=1e-8)
    assert radial_profile(1.0, 1.0, 1.0) == pytest.approx(0.9270373386, abs=1e-9)
    assert radial_profile(2.0, 3.0, 1.0) == pytest.approx(
        np.sqrt(6.0) * simpson_fixed(lambda u: 1 / np.sqrt(2 + u**4), 0, 1, 10**5), abs=1e-9)
    with pytest.raises(ValueError):
        radial_profile(-1.0, 1.0, 1.0)


def test_weitzenbock_six_loop_oracle(rng):
    n = 3
    s = random_torsion(rng, n)
    a = well_conditioned(rng, n)
    h = a @ np.diag([1.0, -1.0, 2.0]) @ a.T
    hi = np.linalg.inv(h)
    j1 = j2 = j3 = 0.0
    for a_, b, c, i, j, k in itertools.product(range(n), repeat=6):
        j1 += h[a_, i] * hi[b, j] * hi[c, k] * s[a_, b, c] * s[i, j, k]
    for i, j, a_, b in itertools.product(range(n), repeat=4):
        j2 += hi[i, j] * s[a_, i, b] * s[b, j, a_]
        j3 += hi[i, j] * s[a_, a_, i] * s[b, b, j]
    np.testing.assert_allclose(weitzenbock_invariants(s, h), (j1, j2, j3), rtol=1e-12)


def test_weitzenbock_zero_and_group():
    z = weitzenbock_invariants(np.zeros((3, 3, 3)), np.eye(3))
    assert all(v == 0 for v in z)
    f = group_frame(su2())
    s = torsion(f.at(f.chart.sample(5, 42)))
    _, _, j3 = weitzenbock_invariants(s, killing_tensor(s))
    assert np.max(np.abs(j3)) < 1e-18


def test_born_infeld_triple_loop_oracle(rng):
    n = 4
    s = random_torsion(rng, n)
    lam, mu, nu = 0.7, -0.5, 0.4
    t = [sum(s[k, i, k] for k in range(n)) for i in range(n)]
    ref = np.zeros((n, n))
    for i, j in itertools.product(range(n), repeat=2):
        acc = 4 * mu * t[i] * t[j]
        for k, m in itertools.product(range(n), repeat=2):
            acc += 4 * lam * s[k, i, m] * s[m, j, k]
        for l in range(n):
            acc += 4 * nu * t[l] * s[l, i, j]
        ref[i, j] = acc
    np.testing.assert_allclose(born_infeld_tensor(s, lam, mu, nu), ref, atol=1e-12)
    # lambda and mu parts are symmetric, nu part is not
    sym = born_infeld_tensor(s, lam, mu, 0.0)
    np.testing.assert_array_equal(sym, sym.T)
    skew = born_infeld_tensor(s, 0.0, 0.0, 1.0)
    assert np.max(np.abs(skew - skew.T)) > 1e-3


def test_gl_model_on_group_frame():
    f = group_frame(su2())
    fp = f.at(f.chart.sample(5, 42))
    s = torsion(fp)
    lt = evaluate_model(ModelSpec.gl_born_infeld(1, 0, 0), s)
    np.testing.assert_allclose(lt.L, killing_tensor(s), atol=1e-14)
    np.testing.assert_allclose(lt.density, np.sqrt(np.abs(np.linalg.det(killing_tensor(s)))))
    assert not np.any(lt.degenerate)


def test_constant_frame_degenerate():
    fp = constant_frame(3).at(np.zeros(3))
    s = torsion(fp)
    lt = evaluate_model(ModelSpec.gl_born_infeld(1, 0.3, 0.2), s)
    assert lt.density == 0.0 and lt.degenerate
    q = evaluate_model(ModelSpec.hilbert(np.eye(3)), s, fp)
    assert q.density == 0.0
    with pytest.raises(MissingField):
        evaluate_model(ModelSpec.hilbert(np.eye(3)), s)


@pytest.mark.parametrize("n", [3, 4])
def test_positive_homogeneity(rng, n):
    for triple in TRIPLES:
        spec = ModelSpec.gl_born_infeld(*triple)
        for _ in range(10):
            s = random_torsion(rng, n)
            base = evaluate_model(spec, s).density
            for lam in (0.5, 2.0, 3.0):
                assert evaluate_model(spec, lam * s).density == pytest.approx(lam**n * base, rel=1e-10)


def test_gl_invariance_of_density(rng):
    f = polynomial_frame(4)
    pts = f.chart.sample(20, 42)
    spec = ModelSpec.gl_born_infeld(1.0, 0.3, 0.2)
    d0 = evaluate_model(spec, torsion(f.at(pts))).density
    for _ in range(5):
        d1 = evaluate_model(spec, torsion(f.transformed(well_conditioned(rng, 4)).at(pts))).density
        assert np.max(np.abs(d1 - d0)) < 1e-10


def test_quadratic_density_and_lorentz_invariance(rng):
    f = polynomial_frame(4)
    fp = f.at(f.chart.sample(5, 42))
    s = torsion(fp)
    spec = ModelSpec.quadratic(1.0, -0.5, 2.0, MINKOWSKI, prefactor=3.0)
    h = dirac_einstein_metric(fp, MINKOWSKI)
    np.testing.assert_allclose(evaluate_model(spec, s, fp).density, 3.0 * quadratic_density(s, h, (1.0, -0.5, 2.0)))
    ch, sh = np.cosh(0.4), np.sinh(0.4)
    boost = np.eye(4)
    boost[0, :2], boost[1, :2] = (ch, sh), (sh, ch)
    g = f.transformed(boost)
    fp2 = g.at(f.chart.sample(5, 42))
    np.testing.assert_allclose(evaluate_model(spec, torsion(fp2), fp2).density,
                               evaluate_model(spec, s, fp).density, rtol=1e-10)


def test_potential_scalars_zeroth_order(rng):
    s = random_torsion(rng, 3)
    base = potential_scalars(s)
    for lam in (0.5, 3.0):
        scaled = potential_scalars(lam * s)
        for key in base:
            assert scaled[key] == pytest.approx(base[key], rel=1e-9)
    spec = ModelSpec.gl_born_infeld(1.0)
    plain = evaluate_model(spec, s).density
    hooked = evaluate_model(spec, s, potential=lambda sc: 2.0 + 0 * sc["trace_norm"]).density
    assert hooked == pytest.approx(2.0 * plain)


def test_model_spec_roundtrip_and_errors():
    for spec in (ModelSpec.gl_born_infeld(1, 0.5, -0.3), ModelSpec.quadratic(1, 2, 3, np.eye(3)),
                 ModelSpec.hilbert(MINKOWSKI, prefactor=-1.0)):
        assert ModelSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(ConfigError):
        ModelSpec("nosuch")
    with pytest.raises(ConfigError):
        ModelSpec.from_dict({"family": "gl_born_infeld", "kappa": 1})
    with pytest.raises(ConfigError):
        ModelSpec("quadratic")
    with pytest.raises(ConfigError):
        ModelSpec.gl_born_infeld(float("nan"))
    assert ModelSpec.gl_born_infeld().is_gl_invariant
    assert ModelSpec.hilbert(np.eye(2)).coefficients == (1.0, 2.0, -4.0)

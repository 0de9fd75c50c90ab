import numpy as np
import pytest
from scipy.linalg import expm

from tetradlab import fd
from tetradlab.errors import CriticalRho, DegenerateFrame, JacobiViolation, SeriesNonConvergent
from tetradlab.frame_fields import (
    RHO_PRESETS,
    Chart,
    DeformationSpec,
    FrameField,
    FramePoint,
    coframe,
    constant_frame,
    deform,
    extended_frame,
    group_frame,
    maurer_cartan_series,
    polynomial_frame,
)
from tetradlab.lie_algebra import StructureConstants, abelian, catalog, sl2r, su2

from conftest import well_conditioned


def fd_bracket_constants(frame, pts, step=1e-3):
    """gamma^C_AB from [e_A, e_B]^i = e^j_A d_j e^i_B - e^j_B d_j e^i_A, all by FD."""
    e = frame.frame(pts)
    de = fd.gradient(frame.frame, pts, step)
    lie = np.einsum("pja,pibj->piab", e, de) - np.einsum("pjb,piaj->piab", e, de)
    return np.einsum("pci,piab->pcab", np.linalg.inv(e), lie)


def test_chart_validation_and_sampling():
    with pytest.raises(ValueError):
        Chart((0.0, 1.0), (1.0, 1.0))
    ch = Chart.box(3, 1.0)
    pts = ch.sample(20, 42)
    assert pts.shape == (20, 3)
    assert np.all(np.abs(pts) <= 0.5)
    np.testing.assert_array_equal(pts, ch.sample(20, 42))
    assert not np.array_equal(pts, ch.sample(20, 43))


def test_coframe_examples(rng):
    np.testing.assert_array_equal(coframe(FramePoint(np.eye(3))), np.eye(3))
    np.testing.assert_allclose(coframe(FramePoint(np.diag([2.0, 3.0]))), np.diag([0.5, 1 / 3]))
    e = well_conditioned(rng, 4)
    assert np.max(np.abs(coframe(FramePoint(e)) @ e - np.eye(4))) < 1e-12
    with pytest.raises(DegenerateFrame):
        coframe(FramePoint(np.zeros((2, 2))))


def test_constant_frame():
    f = constant_frame(3)
    fp = f.at(np.array([0.1, 0.2, 0.3]), order=2)
    np.testing.assert_array_equal(fp.e, np.eye(3))
    assert not fp.de.any() and not fp.dde.any()
    assert f.strategy == "analytic"


def test_maurer_cartan_series_matches_expm(rng):
    z = 0.8 * rng.normal(size=(4, 4))
    # (1 - exp(-Z)) Z^{-1}, Z invertible here
    ref = (np.eye(4) - expm(-z)) @ np.linalg.inv(z)
    np.testing.assert_allclose(maurer_cartan_series(z), ref, atol=1e-13)


def test_group_frame_identity_and_abelian():
    f = group_frame(su2())
    np.testing.assert_allclose(f.frame(np.zeros(3)), np.eye(3), atol=1e-15)
    g = group_frame(abelian(3))
    np.testing.assert_array_equal(g.frame(np.array([0.3, -0.2, 0.5])), np.eye(3))


@pytest.mark.parametrize("name", ["su2", "sl2r", "direct_sum(su2,su2)"])
def test_group_frame_bracket_oracle(name):
    sc = catalog(name)
    f = group_frame(sc)
    pts = f.chart.sample(20, 42)
    gam = fd_bracket_constants(f, pts)
    assert np.max(np.abs(gam - sc.c)) < 1e-8


def test_group_frame_su2_norm_03():
    rng = np.random.default_rng(7)
    x = rng.normal(size=3)
    x *= 0.3 / np.linalg.norm(x)
    gam = fd_bracket_constants(group_frame(su2()), x[None])
    assert np.max(np.abs(gam - su2().c)) < 1e-10


def test_group_frame_errors():
    c = su2().c.copy()
    c[0, 0, 1], c[0, 1, 0] = 0.1, -0.1
    with pytest.raises(JacobiViolation):
        group_frame(StructureConstants(c))
    f = group_frame(su2(), radius=10.0)
    with pytest.raises(SeriesNonConvergent):
        f.frame(np.array([6.0, 0.0, 0.0]))


def test_coframe_times_frame_everywhere():
    f = group_frame(sl2r())
    pts = f.chart.sample(20, 42)
    e = f.frame(pts)
    assert np.max(np.abs(np.linalg.inv(e) @ e - np.eye(3))) < 1e-12


def test_second_derivative_symmetric():
    f = group_frame(su2())
    dde = f.second_derivative(f.chart.sample(5, 42))
    assert np.max(np.abs(dde - np.swapaxes(dde, -1, -2))) < 1e-6


def test_fd_derivative_vs_analytic():
    f = polynomial_frame(3)
    fd_twin = FrameField(f.chart, f.frame)
    pts = f.chart.sample(5, 1)
    assert np.max(np.abs(fd_twin.derivative(pts) - f.derivative(pts))) < 1e-10
    assert np.max(np.abs(fd_twin.second_derivative(pts) - f.second_derivative(pts))) < 1e-7


def test_transformed_frame(rng):
    f = polynomial_frame(3)
    a = well_conditioned(rng, 3)
    g = f.transformed(a)
    x = f.chart.sample(3, 0)
    np.testing.assert_allclose(g.frame(x), f.frame(x) @ a)
    np.testing.assert_allclose(g.derivative(x), np.einsum("piBj,BA->piAj", f.derivative(x), a))
    with pytest.raises(DegenerateFrame):
        f.transformed(np.zeros((3, 3)))


def test_extended_frame_blocks():
    f = extended_frame(su2())
    assert f.dim == 4
    e = f.frame(f.chart.sample(4, 42))
    assert np.all(e[:, 0, 0] == 1.0) and not e[:, 0, 1:].any() and not e[:, 1:, 0].any()


def test_deform_rho_one_is_identity():
    base = extended_frame(su2())
    d = deform(base, DeformationSpec(RHO_PRESETS["one"], "e"), require_regular=False)
    x = base.chart.sample(5, 42)
    np.testing.assert_array_equal(d.frame(x), base.frame(x))
    np.testing.assert_array_equal(d.derivative(x), base.derivative(x))
    with pytest.raises(CriticalRho):
        deform(base, DeformationSpec(RHO_PRESETS["one"], "e"))


def test_deform_variants_and_product_rule():
    base = extended_frame(sl2r())
    x = base.chart.sample(4, 3)
    for variant in ("e", "e-prime"):
        d = deform(base, DeformationSpec(RHO_PRESETS["exp"], variant))
        fd_twin = FrameField(d.chart, d.frame)
        assert np.max(np.abs(fd_twin.derivative(x) - d.derivative(x))) < 1e-9
        assert np.max(np.abs(fd_twin.second_derivative(x) - d.second_derivative(x))) < 1e-6
    e = deform(base, DeformationSpec(RHO_PRESETS["exp"], "e-prime")).frame(x)
    np.testing.assert_allclose(e[:, :, 0], base.frame(x)[:, :, 0])
    np.testing.assert_allclose(e[:, :, 1:], np.exp(x[:, 0])[:, None, None] * base.frame(x)[:, :, 1:])
    assert deform(base, DeformationSpec(RHO_PRESETS["exp"], "E")) is base


def test_critical_rho():
    with pytest.raises(CriticalRho):
        deform(extended_frame(su2()), DeformationSpec(RHO_PRESETS["square"], "e"))
    with pytest.raises(ValueError):
        DeformationSpec(RHO_PRESETS["exp"], "bogus")
    with pytest.raises(ValueError):
        deform(group_frame(su2()), DeformationSpec(RHO_PRESETS["exp"]))

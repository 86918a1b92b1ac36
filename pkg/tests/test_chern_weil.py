import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from transgress.chern_weil import (
    MetricField,
    SuperBundleData,
    check_section,
    chern_connection,
    chern_form,
    curvature,
    degree_on_p1,
    fiber_integrate,
    fs_dual_metric,
    induced_bundles,
    integrate_top,
    perturbed_dual_metrics,
    super_chern_character,
    superconnection_curvature,
)
from transgress.errors import DomainViolationError, SingularMetricError, VanishingSectionError
from transgress.forms import coordinate_symbols, exterior_ops, fd_exterior
from transgress.quadrature import disk_rule

PTS1 = np.array([[0.3 + 0.1j], [-0.2j], [0.0], [0.7 - 0.4j]])
PTS2 = np.array([[0.2 + 0.1j, -0.3j], [0.1, 0.4 + 0.2j]])


def scalar_coeff(field, key, pts):
    v = field.evaluate(pts).get(key)
    return v[:, 0, 0] if v.ndim == 3 else v


# ---------------------------------------------------------------- rank one


@pytest.mark.parametrize(
    "metric, theta, curv",
    [
        # h = 1 + |z|^2: theta = zb/(1+|z|^2), Theta = -1/(1+|z|^2)^2 dz ^ dzb
        ("1 + z*zb", lambda z: np.conj(z) / (1 + abs(z) ** 2), lambda z: -1 / (1 + abs(z) ** 2) ** 2),
        # h = exp(|z|^2): theta = zb, Theta = -dz ^ dzb
        ("exp(z*zb)", lambda z: np.conj(z), lambda z: -np.ones_like(z)),
        ("1", lambda z: 0 * z, lambda z: 0 * z),
    ],
)
def test_rank_one_connection_and_curvature(metric, theta, curv):
    h = MetricField.parse(1, metric)
    z = PTS1[:, 0]
    assert np.allclose(scalar_coeff(chern_connection(h), (0,), PTS1), theta(z), atol=1e-14)
    assert np.allclose(scalar_coeff(curvature(h), (0, 1), PTS1), curv(z), atol=1e-14)


def test_curvature_is_dbar_of_connection():
    h = MetricField.parse(1, "(1 + z*zb)**2 * exp(z + zb)")
    dbar = exterior_ops(chern_connection(h))["delbar"]
    # dbar(theta_z dz) = d_zb theta dzb ^ dz = -d_zb theta dz ^ dzb
    assert np.allclose(scalar_coeff(dbar, (0, 1), PTS1), scalar_coeff(curvature(h), (0, 1), PTS1), atol=1e-12)


def test_flat_metric_has_zero_chern_forms():
    for r in (1, 2):
        h = MetricField.flat(2, r)
        c1 = chern_form(h, 1).evaluate(PTS2)
        assert c1.max_abs() < 1e-15


def test_chern_form_range():
    h = MetricField.parse(1, "1 + z*zb")
    with pytest.raises(ValueError):
        chern_form(h, 2)
    assert chern_form(h, 0).evaluate(PTS1).get(())[0] == 1


def test_rank_two_c2_vanishes_on_a_curve():
    h = MetricField.parse(1, [["2 + z*zb", "z"], ["zb", "1 + z*zb"]])
    assert chern_form(h, 2).evaluate(PTS1).max_abs() == 0


def test_rank_two_matches_determinant():
    # c1 of E equals c1 of det E
    rows = [["2 + z1*zb1", "z2"], ["zb2", "1 + z2*zb2"]]
    h = MetricField.parse(2, rows)
    det = MetricField(2, sp.Matrix(h.expr).det())
    a = chern_form(h, 1).evaluate(PTS2)
    b = chern_form(det, 1).evaluate(PTS2)
    for k in set(a.comps) | set(b.comps):
        assert np.allclose(a.get(k), b.get(k), atol=1e-12)


def test_chern_forms_are_real_and_type_pp():
    rows = [["3 + z1*zb1", "z1*z2"], ["zb1*zb2", "2 + z2*zb2"]]
    h = MetricField.parse(2, rows)
    for j in (1, 2):
        c = chern_form(h, j).evaluate(PTS2)
        diff = c - c.conjugate()
        assert diff.max_abs() < 1e-12
        assert c.off_diagonal_bidegree_max() == 0


def test_c1_is_closed():
    rows = [["3 + z1*zb1", "z1*z2"], ["zb1*zb2", "2 + z2*zb2"]]
    c1 = chern_form(MetricField.parse(2, rows), 1)
    d = fd_exterior(c1, "d").evaluate(PTS2)
    assert d.max_abs() < 1e-7


# ---------------------------------------------------------------- metric checks


def test_validate_agrees_with_finite_differences():
    h = MetricField.parse(2, [["2 + z1*zb1", "z2"], ["zb2", "1 + z2*zb2*z1*zb1"]])
    errs = h.validate(PTS2)
    assert max(errs.values()) < 1e-6


@pytest.mark.parametrize("metric", ["-1 - z*zb", "z*zb"])
def test_non_positive_metric_rejected(metric):
    h = MetricField.parse(1, metric)
    with pytest.raises(SingularMetricError):
        h.check_positive(PTS1)


def test_non_hermitian_rejected():
    h = MetricField.parse(1, [["1", "z"], ["z", "1"]])
    with pytest.raises(SingularMetricError):
        h.check_positive(np.array([[0.5j]]))


# ---------------------------------------------------------------- P^1 degree


def test_fs_degree_one():
    h = fs_dual_metric()
    assert degree_on_p1(h, h) == pytest.approx(1.0, abs=1e-12)


def test_fs_degree_converges_with_order():
    h = fs_dual_metric()
    # the exact 1.0 at the default order is convergence, not a shortcut
    coarse = degree_on_p1(h, h, radial_order=4, n_theta=64)
    assert 1e-5 < abs(coarse - 1) < 1e-3
    assert abs(degree_on_p1(h, h, 64, 64) - 1) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 4.0), st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False))
def test_perturbed_degree_one(a, c):
    assume(a > abs(c) ** 2 / 4 + 0.05)
    h0, h1 = perturbed_dual_metrics(a, c)
    assert degree_on_p1(h0, h1, 48, 96) == pytest.approx(1.0, abs=1e-6)


def test_perturbed_rejects_indefinite():
    with pytest.raises(ValueError):
        perturbed_dual_metrics(0.1, 2 + 0j)


def test_integrate_top_requires_curve():
    with pytest.raises(ValueError):
        integrate_top(chern_form(MetricField.flat(2), 1), disk_rule())


# ---------------------------------------------------------------- induced bundles


def test_tau_times_quotient_is_det():
    hE = MetricField.parse(1, "2 + z*zb")
    ib = induced_bundles(hE)
    assert ib.tau.n == 2
    prod = sp.simplify(ib.tau.expr[0, 0] * ib.quotient.expr[0, 0])
    z, zb = coordinate_symbols(2)
    assert sp.simplify(prod - (2 + z[0] * zb[0])) == 0


def test_rank_two_determinant_identity():
    hE = MetricField.parse(1, [["2 + z*zb", "z"], ["zb", "1"]])
    ib = induced_bundles(hE)
    pts = np.array([[0.1 + 0.2j, 0.3, -0.5j], [0.4j, 1.2 + 0.1j, 0.2]])
    lhs = ib.tau.h(pts)[:, 0, 0] * np.linalg.det(ib.quotient.h(pts))
    rhs = np.linalg.det(hE.h(pts[:, :1]))
    assert np.allclose(lhs, rhs, rtol=1e-12)


def test_quotient_on_zero_section():
    hE = MetricField.parse(1, "2 + z*zb")
    ib = induced_bundles(hE)
    pts = np.column_stack([PTS1[:, 0], np.zeros(len(PTS1))])
    assert np.allclose(ib.quotient.h(pts)[:, 0, 0], hE.h(PTS1)[:, 0, 0], rtol=1e-14)


def test_section_line_metric():
    z, zb = coordinate_symbols(1)
    ib = induced_bundles(MetricField.flat(1, 2), s=sp.Matrix([z[0] ** 2, z[0] ** 3]))
    assert sp.expand(ib.line.expr[0, 0] - (z[0] ** 2 * zb[0] ** 2 + z[0] ** 3 * zb[0] ** 3)) == 0
    assert ib.section_quotient.rank == 1


def test_section_checks():
    z, _ = coordinate_symbols(1)
    with pytest.raises(VanishingSectionError):
        check_section(sp.Matrix([z[0]]), 1, PTS1)
    assert check_section(sp.Matrix([1 + z[0]]), 1, PTS1) > 0
    with pytest.raises(ValueError):
        induced_bundles(MetricField.flat(1, 2), s=sp.Matrix([z[0]]))


def test_fiber_integral_of_tau_dual():
    ib = induced_bundles(MetricField.parse(1, "2 + z*zb"))
    f = fiber_integrate(chern_form(ib.tau_dual, 1))
    vals = f.evaluate(PTS1).get(())
    assert np.allclose(vals, 1.0, atol=1e-10)


def test_fiber_integral_of_low_degree_is_zero():
    f = fiber_integrate(chern_form(MetricField.flat(2), 0))
    assert "degree below fiber dimension: result is zero" in f.notes
    assert f.evaluate(PTS1).max_abs() == 0


# ---------------------------------------------------------------- superconnections


def flat_line_data(v="z1"):
    return SuperBundleData(MetricField.flat(1), MetricField.flat(1), v)


@pytest.mark.parametrize("lam", [0.5, 1.7, 4.0])
def test_superconnection_closed_form(lam):
    ch = super_chern_character(superconnection_curvature(flat_line_data(), lam)).evaluate(PTS1)
    z = PTS1[:, 0]
    expected = lam**2 * np.exp(-(lam**2) * np.abs(z) ** 2) * (1j / (2 * math.pi))
    assert np.allclose(ch.get((0, 1)), expected, atol=1e-13)
    assert np.allclose(ch.get(()), 0, atol=1e-14)


def test_superconnection_total_integral():
    lam = 3.0
    ch = super_chern_character(superconnection_curvature(flat_line_data(), lam))
    rule = disk_rule(2.0, 0j, 64, 32)
    val = integrate_top(ch, rule)
    assert val.real == pytest.approx(1 - math.exp(-(lam**2) * 4), abs=1e-10)


def test_superconnection_lambda_zero_flat():
    data = SuperBundleData(MetricField.flat(2, 2), MetricField.flat(2, 1), [["z1", "z2"]])
    ch = super_chern_character(superconnection_curvature(data, 0.0)).evaluate(PTS2)
    assert np.allclose(ch.get(()), 2 - 1)
    assert ch.max_abs(lambda k: len(k) > 0) < 1e-15


def test_super_ch_degree_two_is_minus_c1_difference():
    hp = MetricField.parse(2, [["2 + z1*zb1", "z2"], ["zb2", "1 + z2*zb2"]])
    hm = MetricField.parse(2, "1 + z1*zb1 + 2*z2*zb2")
    data = SuperBundleData(hp, hm, [["z1", "z2"]])
    ch = super_chern_character(superconnection_curvature(data, 0.0)).evaluate(PTS2)
    c1 = chern_form(hp, 1).evaluate(PTS2) - chern_form(hm, 1).evaluate(PTS2)
    for k in c1.comps:
        assert np.allclose(ch.get(k), -c1.get(k), atol=1e-12)


def test_odd_morphism_validation():
    with pytest.raises(ValueError):
        SuperBundleData(MetricField.flat(1), MetricField.flat(1), "zb1")
    with pytest.raises(ValueError):
        SuperBundleData(MetricField.flat(1, 2), MetricField.flat(1), "z1")


def test_chain_condition():
    z, _ = coordinate_symbols(1)
    ok = SuperBundleData(MetricField.flat(1, 2), MetricField.flat(1, 2),
                         sp.Matrix([[0, z[0]], [0, 0]]), sp.Matrix([[0, 1], [0, 0]]))
    assert ok.check_chain(PTS1) == 0
    bad = SuperBundleData(MetricField.flat(1), MetricField.flat(1), "z1", "1")
    with pytest.raises(DomainViolationError):
        bad.check_chain(PTS1)

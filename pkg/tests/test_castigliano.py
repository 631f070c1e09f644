from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from flexstiff import _kernels
from flexstiff.castigliano import (
    InPlaneMatrix,
    MatrixKind,
    SpringConstants,
    compliance_matrix,
    moment_field,
    spring_constants,
    stiffness_matrix,
)
from flexstiff.errors import SingularCompliance
from flexstiff.geometry import (
    UM,
    BeamPath,
    CrossSection,
    RssParams,
    SpringVariant,
    build_rss_path,
    mirror_x,
)

from conftest import rel_err, rss_params

E = 169e9
SEC = CrossSection(3 * UM, 30 * UM)
EI = E * SEC.second_moment
L = 100 * UM


def cantilever(length=L, section=SEC):
    return BeamPath.from_vertices([(0, 0), (length, 0)], section)


def exact_compliance(path, youngs_modulus):
    """Closed-form integral of products of the linear moments on each segment."""
    mf = moment_field(path)
    ei = youngs_modulus * path.second_moments()
    c = np.zeros((3, 3))
    for k, ln in enumerate(mf.lengths):
        a, b = mf.intercept[k], mf.slope[k]
        c += (np.outer(a, a) * ln + (np.outer(a, b) + np.outer(b, a)) * ln**2 / 2
              + np.outer(b, b) * ln**3 / 3) / ei[k]
    return c


def reference_compliance_rational():
    """Exact rational compliance of the reference path in um, with E factored out."""
    verts = [(0, 0), (40, 0), (40, 46), (46, 46), (46, 0), (52, 0), (64, 0)]
    xt, yt = verts[-1]
    i_um4 = Fraction(30 * 3**3, 12)
    c = [[Fraction(0)] * 3 for _ in range(3)]
    for (x0, y0), (x1, y1) in zip(verts[:-1], verts[1:]):
        ln = Fraction(abs(x1 - x0) + abs(y1 - y0))
        tx, ty = Fraction(x1 - x0) / ln, Fraction(y1 - y0) / ln
        a = [Fraction(y0 - yt), Fraction(xt - x0), Fraction(1)]
        b = [ty, -tx, Fraction(0)]
        for i in range(3):
            for j in range(3):
                c[i][j] += (a[i] * a[j] * ln + (a[i] * b[j] + a[j] * b[i]) * ln**2 / 2
                            + b[i] * b[j] * ln**3 / 3) / i_um4
    return c


# frozen from reference_compliance_rational(): entries of E * C in um-based units
REFERENCE_C_RATIONAL = [
    ["93104/81", "33488/45", "4784/135"],
    ["33488/45", "772688/405", "1592/27"],
    ["4784/135", "1592/27", "104/45"],
]
UNIT_SCALE = np.array([[1e6, 1e6, 1e12], [1e6, 1e6, 1e12], [1e12, 1e12, 1e18]])
REFERENCE_K = np.array([
    [311.4108523438231, 123.40449254115387, -0.007923363071283445],
    [123.40449254115391, 467.674980255396, -0.01382391004855715],
    [-0.007923363071283445, -0.013823910048557155, 5.473035029472273e-07],
])


def test_rational_oracle_matches_frozen_values():
    c = reference_compliance_rational()
    assert [[str(v) for v in row] for row in c] == REFERENCE_C_RATIONAL


def test_reference_config_compliance_exact():
    c_ref = np.array([[float(Fraction(v)) for v in row] for row in REFERENCE_C_RATIONAL]) * UNIT_SCALE / E
    c = compliance_matrix(build_rss_path(RssParams()), E).values
    np.testing.assert_allclose(c, c_ref, rtol=1e-13)


def test_reference_config_stiffness_fixture():
    k = stiffness_matrix(compliance_matrix(build_rss_path(RssParams()), E))
    np.testing.assert_allclose(k.values, REFERENCE_K, rtol=1e-10)
    c = compliance_matrix(build_rss_path(RssParams()), E).values
    assert rel_err(k.values @ c, np.eye(3)) < 1e-9
    sc = spring_constants(RssParams())
    assert sc == SpringConstants.from_matrix(k)


def test_moment_field_cantilever():
    mf = moment_field(cantilever())
    for s in (0.0, 0.3 * L, L):
        m = mf.evaluate(0, s)
        assert m[0] == 0.0
        assert m[1] == pytest.approx(L - s, abs=1e-18)
        assert m[2] == 1.0


def test_moment_field_bracket():
    p = BeamPath.from_vertices([(0, 0), (L, 0), (L, L)], SEC)
    mf = moment_field(p)
    for s in (0.0, 0.5 * L, L):
        assert mf.evaluate(0, s)[0] == pytest.approx(-L)
        assert mf.evaluate(1, s)[0] == pytest.approx(s - L, abs=1e-18)
        assert mf.evaluate(1, s)[1] == pytest.approx(0.0, abs=1e-18)
    assert np.all(mf.intercept[:, 2] == 1.0) and np.all(mf.slope[:, 2] == 0.0)


def test_cantilever_closed_form():
    c = compliance_matrix(cantilever(), E).values
    assert c[1, 1] == pytest.approx(L**3 / (3 * EI), rel=1e-12)
    assert c[1, 2] == pytest.approx(L**2 / (2 * EI), rel=1e-12)
    assert c[2, 2] == pytest.approx(L / EI, rel=1e-12)
    assert c[0, 0] == 0.0 and c[0, 1] == 0.0 and c[0, 2] == 0.0


def test_bracket_hand_integrated():
    p = BeamPath.from_vertices([(0, 0), (L, 0), (L, L)], SEC)
    expected = np.array([
        [4 * L**3 / 3, -L**3 / 2, -3 * L**2 / 2],
        [-L**3 / 2, L**3 / 3, L**2 / 2],
        [-3 * L**2 / 2, L**2 / 2, 2 * L],
    ]) / EI
    np.testing.assert_allclose(compliance_matrix(p, E).values, expected, rtol=1e-12)


def test_straight_cantilever_is_singular():
    with pytest.raises(SingularCompliance) as exc:
        stiffness_matrix(compliance_matrix(cantilever(), E))
    assert abs(exc.value.null_direction[0]) == 1.0
    assert np.allclose(exc.value.null_direction[1:], 0.0)
    assert "x" in str(exc.value)


def test_diagonal_inverse():
    c = InPlaneMatrix(np.diag([2.0, 4.0, 8.0]), MatrixKind.COMPLIANCE)
    np.testing.assert_allclose(stiffness_matrix(c).values, np.diag([0.5, 0.25, 0.125]), rtol=1e-15)


def test_mirror_flips_xy_and_xphi():
    p = BeamPath.from_vertices([(0, 0), (L, 0), (L, L), (2 * L, L)], SEC)
    c = compliance_matrix(p, E).values
    cm = compliance_matrix(mirror_x(p), E).values
    sign = np.array([[1, -1, -1], [-1, 1, 1], [-1, 1, 1]])
    np.testing.assert_allclose(cm, sign * c, rtol=1e-13, atol=1e-13 * np.abs(c).max())


def test_doubling_modulus_doubles_stiffness(ref_params):
    from dataclasses import replace

    k1 = spring_constants(ref_params)
    k2 = spring_constants(replace(ref_params, youngs_modulus=2 * ref_params.youngs_modulus))
    for name in ("k_x", "k_y", "k_phi", "k_xy", "k_xphi", "k_yphi"):
        assert getattr(k2, name) == pytest.approx(2 * getattr(k1, name), rel=1e-12)


def test_width_scaling_law(ref_params):
    from dataclasses import replace

    k1 = spring_constants(ref_params)
    k2 = spring_constants(replace(ref_params, w_p=2 * ref_params.w_p, w_pc=2 * ref_params.w_pc,
                                  thickness=3 * ref_params.thickness))
    for name in ("k_x", "k_y", "k_phi", "k_xy", "k_xphi", "k_yphi"):
        assert getattr(k2, name) == pytest.approx(24 * getattr(k1, name), rel=1e-12)


def test_length_scaling_on_cantilever():
    c1 = compliance_matrix(cantilever(L), E).values
    c2 = compliance_matrix(cantilever(3 * L), E).values
    assert c2[1, 1] == pytest.approx(27 * c1[1, 1], rel=1e-12)
    assert c2[1, 2] == pytest.approx(9 * c1[1, 2], rel=1e-12)
    assert c2[2, 2] == pytest.approx(3 * c1[2, 2], rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(rss_params)
def test_symmetric_and_positive(params):
    path = build_rss_path(params)
    c = compliance_matrix(path, params.youngs_modulus)
    assert np.abs(c.values - c.values.T).max() <= 1e-12 * np.abs(c.values).max()
    k = stiffness_matrix(c)
    assert np.all(np.linalg.eigvalsh(k.values) > 0)
    assert rel_err(k.values @ c.values, np.eye(3)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(rss_params)
def test_quadrature_rule_independence(params):
    path = build_rss_path(params)
    c2 = compliance_matrix(path, params.youngs_modulus, gauss_points=2).values
    c4 = compliance_matrix(path, params.youngs_modulus, gauss_points=4).values
    exact = exact_compliance(path, params.youngs_modulus)
    assert rel_err(c2, c4) <= 1e-13
    assert rel_err(c2, exact) <= 1e-13


@settings(max_examples=60, deadline=None)
@given(rss_params)
def test_mirror_parity_of_constants(params):
    a = spring_constants(params, SpringVariant.TYPE_A)
    b = spring_constants(params, SpringVariant.TYPE_B)
    for name, sign in (("k_x", 1), ("k_y", 1), ("k_phi", 1), ("k_xy", -1), ("k_xphi", -1), ("k_yphi", 1)):
        va, vb = getattr(a, name), getattr(b, name)
        assert abs(vb - sign * va) <= 1e-10 * abs(va)


@pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")
def test_backends_agree():
    rng = np.random.default_rng(7)
    for _ in range(20):
        verts = np.cumsum(rng.normal(size=(9, 2)) * 1e-5, axis=0)
        path = BeamPath.from_vertices(verts, SEC)
        cn = compliance_matrix(path, E, backend="numpy").values
        cj = compliance_matrix(path, E, backend="numba").values
        assert rel_err(cn, cj) < 1e-13


def test_spring_constants_round_trip():
    k = SpringConstants(1.0, 2.0, 3.0, 0.1, 0.2, 0.3)
    assert SpringConstants.from_matrix(k.matrix()) == k

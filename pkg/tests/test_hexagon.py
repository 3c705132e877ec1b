import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from hexflow.errors import DomainError, NotAdmissible
from hexflow.fixtures import tetra_sphere
from hexflow.hexagon import a_quantity, angles_from_lengths, corner_jacobian, face_lengths, log_cosh
from hexflow.schemes import chart_scale_at, f_from_u, make_scheme, sample_admissible

TRI = tetra_sphere()
L2 = math.acosh(2.0)

lengths = st.floats(1e-3, 12.0)


def test_equilateral_self_dual():
    th = angles_from_lengths(L2, L2, L2)
    for t in th:
        assert abs(t - L2) <= 1e-12
    assert th[0] == pytest.approx(1.3169579, abs=1e-7)


def test_equilateral_closed_form():
    # cosh theta = cosh l / (cosh l - 1)
    for c in (1.1, 1.5, 3.0, 10.0, 1e4):
        l = math.acosh(c)
        th = angles_from_lengths(l, l, l)[0]
        assert math.cosh(th) == pytest.approx(c / (c - 1), rel=1e-12)


def test_a_quantity_examples():
    assert a_quantity(L2, L2, L2) == pytest.approx(math.sqrt(27), rel=1e-15)
    assert a_quantity(L2, L2, L2) == pytest.approx(5.1961524, abs=1e-7)
    assert math.sinh(L2) ** 2 * math.sinh(L2) == pytest.approx(3 * math.sqrt(3), rel=1e-14)


@settings(max_examples=300, deadline=None)
@given(lengths, lengths, lengths)
def test_hexagon_law(li, lj, lk):
    th = angles_from_lengths(li, lj, lk)
    ref = [O.theta(*(mp.mpf(v) for v in p)) for p in ((li, lj, lk), (lj, lk, li), (lk, li, lj))]
    for t, r in zip(th, ref):
        assert t == pytest.approx(float(r), rel=1e-12, abs=1e-14)


@settings(max_examples=300, deadline=None)
@given(lengths, lengths, lengths)
def test_angles_permute_with_lengths(li, lj, lk):
    a = angles_from_lengths(li, lj, lk)
    b = angles_from_lengths(lk, li, lj)
    assert b == pytest.approx((a[2], a[0], a[1]), rel=1e-14)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 5.0), st.floats(1e-3, 5.0), st.floats(1e-3, 5.0))
def test_a_quantity_labelling(li, lj, lk):
    A = a_quantity(li, lj, lk)
    assert A > 2
    ls = (li, lj, lk)
    th = angles_from_lengths(*ls)
    for t in range(3):
        r, s = (t + 1) % 3, (t + 2) % 3
        val = math.sinh(ls[r]) * math.sinh(ls[s]) * math.sinh(th[t])
        assert val == pytest.approx(A, rel=1e-12)


def test_short_edge_blows_up_neighbours():
    th = angles_from_lengths(1e-6, 1.0, 1.0)
    assert math.cosh(th[1]) >= 1 / math.tanh(1e-6) * (1 - 1e-12)
    assert th[1] > 14


def test_nonpositive_lengths():
    with pytest.raises(DomainError):
        angles_from_lengths(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        a_quantity(1.0, -1.0, 1.0)


def test_log_cosh():
    for l in (1e-9, 1e-3, 1.0, 19.9, 20.1, 800.0):
        assert float(log_cosh(l)) == pytest.approx(float(mp.log(mp.cosh(l))), rel=1e-14)


# --- corner Jacobian ------------------------------------------------------


def _face_angles(cfg, face, u_face):
    fc = [f_from_u(cfg, c, float(v)) for c, v in zip(face.corners, u_face)]
    return np.array(angles_from_lengths(*face_lengths(cfg, face, fc)))


def test_equilateral_jacobian_pattern():
    cfg = make_scheme("DCS1", TRI, 3.0)
    J = corner_jacobian(cfg, TRI.faces[0], [0.0, 0.0, 0.0])
    assert np.allclose(np.diag(J), J[0, 0], rtol=1e-14)
    off = J[~np.eye(3, dtype=bool)]
    assert np.allclose(off, off[0], rtol=1e-14)
    assert J[0, 0] < 0


def test_equilateral_jacobian_fd():
    cfg = make_scheme("DCS1", TRI, 3.0)
    face = TRI.faces[0]
    J = corner_jacobian(cfg, face, [0.0, 0.0, 0.0])
    fd = O.fd(lambda x: _face_angles(cfg, face, x), -np.ones(3), 1e-5)
    assert O.rel_err(J, fd) < 1e-6


@pytest.mark.parametrize("name", [
    "DCS3-a0", "DCS3-a1", "DCS3-mixed-alpha", "DCS1", "NEW1", "NEW1-neg", "MIXED1", "MIXED2", "MIXED3",
])
def test_jacobian_matches_oracle(zoo, name):
    tri, cfgs = zoo
    cfg = cfgs[name]
    rng = np.random.default_rng(11)
    for _ in range(3):
        u = sample_admissible(cfg, tri, rng)
        f = cfg.f_from_u(u)
        for face in tri.faces:
            ix = list(face.corners)
            J = corner_jacobian(cfg, face, f[ix])
            assert O.rel_err(J, O.face_jacobian(cfg, face, u[ix])) < 1e-9
            assert O.rel_err(J, O.fd(lambda x: _face_angles(cfg, face, x), u[ix], 1e-5)) < 1e-6


@pytest.mark.parametrize("name", ["DCS3-a0", "DCS3-a1", "DCS3-mixed-alpha", "DCS1"])
def test_expanded_closed_form(zoo, name):
    tri, cfgs = zoo
    cfg = cfgs[name]
    rng = np.random.default_rng(5)
    for _ in range(10):
        f = cfg.f_from_u(sample_admissible(cfg, tri, rng))
        C = cfg.chart_scale(f)
        for face in tri.faces:
            ix = list(face.corners)
            J = corner_jacobian(cfg, face, f[ix])
            assert O.rel_err(J, O.expanded_jacobian(face_lengths(cfg, face, f[ix]), C[ix])) < 1e-12


@pytest.mark.parametrize("kind,alpha,eta", [("DCS3", 1, 4.0), ("DCS1", 0, 3.0)])
def test_dominance_limit(kind, alpha, eta):
    cfg = make_scheme(kind, TRI, eta, alpha=alpha)
    J = corner_jacobian(cfg, TRI.faces[0], [25.0, 0.0, 0.0])
    ratio = abs(J[0, 0]) / (abs(J[0, 1]) + abs(J[0, 2]))
    assert ratio > 1e3


def test_angle_decay():
    cfg = make_scheme("DCS1", TRI, 3.0)
    prev = math.inf
    for fi in np.linspace(0.0, 20.0, 41):
        th = angles_from_lengths(*face_lengths(cfg, TRI.faces[0], [fi, 0.0, 0.0]))[0]
        assert th < prev
        prev = th
    assert prev < 1e-3


def test_degenerate_face_raises():
    cfg = make_scheme("DCS3", TRI, 2.0, alpha=0)
    with pytest.raises(NotAdmissible) as info:
        corner_jacobian(cfg, TRI.faces[0], [0.0, 0.0, 1.0])
    assert info.value.edges == [TRI.faces[0].edges[2]]


def _dtheta_df(cfg, face, f):
    C = np.array([chart_scale_at(cfg, c, v) for c, v in zip(face.corners, f)])
    sign = cfg.sign[list(face.corners)]
    return corner_jacobian(cfg, face, f) / (sign * C)[None, :]


@pytest.mark.parametrize("f", [[200.0, 0.5, 0.3], [400.0, 0.5, 0.3], [350.0, 340.0, 0.1], [150.3, 0.5, 0.3]])
def test_jacobian_long_edges_vs_oracle(f):
    # cosh l overflows a double beyond log cosh l = 709; the kernel switches
    # to a scaled form above 300
    cfg = make_scheme("DCS1", TRI, 3.0)
    face = TRI.faces[0]
    got = _dtheta_df(cfg, face, f)
    assert np.all(np.isfinite(got))
    want = O.face_jacobian_f(cfg, face, f)
    for s in range(3):
        assert O.rel_err(got[:, s], want[:, s]) < 1e-9


def test_jacobian_scaled_form_is_continuous():
    cfg = make_scheme("DCS1", TRI, 3.0)
    face = TRI.faces[0]
    # log cosh of the longest edge crosses 300 near f_0 = 150.3
    for f0 in np.linspace(150.0, 150.6, 13):
        a = _dtheta_df(cfg, face, [f0, 0.5, 0.3])
        b = _dtheta_df(cfg, face, [f0 + 1e-9, 0.5, 0.3])
        for s in range(3):
            assert O.rel_err(a[:, s], b[:, s]) < 1e-7

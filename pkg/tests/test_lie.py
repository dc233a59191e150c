import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from helpers import group_from, random_algebra, random_group, random_point
from lorentz_geom.ads import delta_trace
from lorentz_geom.errors import NoPrincipalLog
from lorentz_geom.lie import (BASEPOINT, AlgebraElement, GroupElement, HPoint, IsometryClass,
                              adjoint, classify, exp_alg, hyp_dist, killing_eval, log_grp,
                              moebius_apply, mu, pushforward, rotation, translation_length)

E = math.e
DIAG_E = GroupElement(E, 0.0, 0.0, 1 / E)
ROT = GroupElement(0.0, -1.0, 1.0, 0.0)
PAR = GroupElement(1.0, 0.0, 1.0, 1.0)

floats = st.floats(-3, 3, allow_nan=False)
groups = st.lists(floats, min_size=4, max_size=4).map(group_from)
points = st.tuples(st.floats(-3, 3), st.floats(0.05, 5)).map(lambda t: HPoint(*t))
algebras = st.tuples(floats, floats, floats).map(lambda t: AlgebraElement(*t))


# --- normalization ----------------------------------------------------------

def test_normalization_det_one_and_trace_sign():
    g = GroupElement(-2.0, 0.0, 0.0, -3.0)
    assert abs(g.a * g.d - g.b * g.c - 1) < 1e-12
    assert g.trace > 0


def test_trace_zero_tiebreak_prefers_positive_c():
    assert GroupElement(0.0, 1.0, -1.0, 0.0).c > 0


def test_projective_equality():
    g = GroupElement(1.0, 2.0, 3.0, 7.0)
    assert g.isclose(GroupElement(-1.0, -2.0, -3.0, -7.0))


def test_rejects_nonpositive_determinant():
    with pytest.raises(ValueError):
        GroupElement(1.0, 2.0, 2.0, 1.0)


@given(groups)
def test_normalization_idempotent(g):
    h = GroupElement.from_matrix(g.matrix)
    assert np.abs(h.matrix - g.matrix).max() <= 4e-16 * np.abs(g.matrix).max() ** 3
    assert GroupElement.from_matrix(h.matrix).isclose(h, 4e-16 * np.abs(g.matrix).max() ** 3)


# --- action and distance --------------------------------------------------------

@pytest.mark.parametrize("g, z, out", [
    (GroupElement(1.0, 1.0, 0.0, 1.0), (0, 1), (1, 1)),
    (ROT, (0, 1), (0, 1)),
    (DIAG_E, (0, 1), (0, E * E)),
])
def test_moebius_examples(g, z, out):
    w = moebius_apply(g, HPoint(*z))
    assert abs(w.x - out[0]) < 1e-12 and abs(w.y - out[1]) < 1e-12


@given(groups, groups, points)
def test_moebius_left_action(g, h, z):
    a = moebius_apply(g @ h, z)
    b = moebius_apply(g, moebius_apply(h, z))
    assert abs(a.z - b.z) <= 1e-12 * (1 + abs(a.z)) ** 2 / min(a.y, 1.0)


def test_hyp_dist_examples():
    assert hyp_dist(BASEPOINT, BASEPOINT) == 0
    assert abs(hyp_dist(BASEPOINT, HPoint(0, E * E)) - 2) < 1e-12


def _dist_by_integration(p: HPoint, q: HPoint) -> float:
    """Length of the semicircle (or vertical segment) joining p and q."""
    if abs(p.x - q.x) < 1e-12:
        return abs(quad(lambda y: 1 / y, p.y, q.y)[0])
    c = (q.x ** 2 + q.y ** 2 - p.x ** 2 - p.y ** 2) / (2 * (q.x - p.x))
    a1 = math.atan2(p.y, p.x - c)
    a2 = math.atan2(q.y, q.x - c)
    return abs(quad(lambda t: 1 / math.sin(t), min(a1, a2), max(a1, a2), epsabs=1e-13)[0])


def test_hyp_dist_matches_geodesic_integration():
    rng = np.random.default_rng(0)
    for _ in range(10):
        p, q = random_point(rng), random_point(rng)
        assert abs(hyp_dist(p, q) - _dist_by_integration(p, q)) < 1e-8


@given(groups, points, points)
def test_hyp_dist_invariant_and_symmetric(g, p, q):
    d = hyp_dist(p, q)
    assert d >= 0
    assert abs(d - hyp_dist(q, p)) < 1e-9
    assert abs(d - hyp_dist(moebius_apply(g, p), moebius_apply(g, q))) < 1e-7 * (1 + d)


# --- classification and lengths --------------------------------------------------

@pytest.mark.parametrize("g, tag", [
    (ROT, IsometryClass.ELLIPTIC), (PAR, IsometryClass.PARABOLIC),
    (DIAG_E, IsometryClass.HYPERBOLIC), (GroupElement.identity(), IsometryClass.IDENTITY),
])
def test_classify(g, tag):
    assert classify(g) is tag


@pytest.mark.parametrize("g, ell", [(DIAG_E, 2.0), (ROT, 0.0), (PAR, 0.0)])
def test_translation_length(g, ell):
    assert abs(translation_length(g) - ell) < 1e-12


@given(groups)
def test_translation_length_is_twice_delta_to_identity(g):
    if classify(g) is IsometryClass.HYPERBOLIC:
        assert abs(translation_length(g) - 2 * delta_trace(GroupElement.identity(), g).value) < 1e-9


def test_translation_length_of_powers():
    rng = np.random.default_rng(1)
    for _ in range(20):
        g = random_group(rng, 0.5)
        if classify(g) is not IsometryClass.HYPERBOLIC:
            continue
        for n in range(1, 9):
            ell = translation_length(g)
            assert abs(translation_length(g ** n) - n * ell) < 1e-8 * n * (1 + ell)


def test_mu_examples():
    assert mu(GroupElement.identity()) == 0
    assert abs(mu(DIAG_E) - 2) < 1e-12
    assert mu(rotation(1.234)) < 1e-12


@given(groups, groups)
def test_mu_symmetric_and_subadditive(g, h):
    assert abs(mu(g) - mu(g.inv())) < 1e-8 * (1 + mu(g))
    assert mu(g @ h) <= mu(g) + mu(h) + 1e-8


def test_mu_growth_limits_to_translation_length():
    rng = np.random.default_rng(2)
    checked = 0
    while checked < 10:
        g = random_group(rng, 0.5)
        if classify(g) is not IsometryClass.HYPERBOLIC or translation_length(g) > 8:
            continue
        assert abs(mu(g ** 64) / 64 - translation_length(g)) < 0.1
        checked += 1


# --- exp, log, adjoint, Killing fields -----------------------------------------------

def test_exp_examples():
    assert exp_alg(AlgebraElement.zero()).isclose(GroupElement.identity(), 1e-15)
    t = 0.7
    assert exp_alg(AlgebraElement(t, 0, 0)).isclose(GroupElement(math.exp(t), 0, 0, math.exp(-t)), 1e-14)


def _series_exp(m, terms=20):
    out, term = np.eye(2), np.eye(2)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 1.4])
def test_exp_rotation_matches_power_series(t):
    X = AlgebraElement(0.0, -t, t)
    assert exp_alg(X).isclose(GroupElement.from_matrix(_series_exp(X.matrix)), 1e-10)


@given(algebras)
def test_exp_matches_power_series(X):
    if X.norm() < 2:
        assert exp_alg(X).isclose(GroupElement.from_matrix(_series_exp(X.matrix, 40)), 1e-10)


@given(groups)
def test_exp_log_round_trip(g):
    if abs(g.trace) < 1e-3:
        return
    assert exp_alg(log_grp(g)).isclose(g, 1e-9 * max(1, np.abs(g.matrix).max()) ** 2)


def test_log_rejects_half_turn():
    with pytest.raises(NoPrincipalLog):
        log_grp(ROT)


@given(groups, algebras)
def test_adjoint_preserves_det(g, X):
    Y = adjoint(g, X)
    assert abs(Y.det - X.det) < 1e-10 * (1 + abs(X.det)) * max(1, np.abs(g.matrix).max()) ** 4


def test_adjoint_identity_and_homomorphism():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g, h, X = random_group(rng), random_group(rng), random_algebra(rng)
        assert adjoint(GroupElement.identity(), X).isclose(X, 0)
        assert adjoint(g @ h, X).isclose(adjoint(g, adjoint(h, X)), 1e-9)


def test_adjoint_pushforward_identity():
    """The field of Ad(g)X at g.p equals the differential of g applied to X(p)."""
    rng = np.random.default_rng(4)
    for _ in range(20):
        g, X, p = random_group(rng), random_algebra(rng), random_point(rng)
        lhs = killing_eval(adjoint(g, X), moebius_apply(g, p))
        # differential of g by central finite differences of the Moebius action
        h = 1e-6
        v = killing_eval(X, p).v
        fwd = moebius_apply(g, HPoint.from_complex(p.z + h * v)).z
        bwd = moebius_apply(g, HPoint.from_complex(p.z - h * v)).z
        fd = (fwd - bwd) / (2 * h)
        assert abs(lhs.v - fd) < 1e-6 * (1 + abs(fd))
        assert abs(pushforward(g, killing_eval(X, p)).v - lhs.v) < 1e-9 * (1 + abs(fd))


def test_killing_examples():
    assert killing_eval(AlgebraElement(0, -1, 1), BASEPOINT).norm() < 1e-15
    v = killing_eval(AlgebraElement(1, 0, 0), BASEPOINT)
    assert (v.vx, v.vy) == (0.0, 2.0)


def test_killing_field_is_flow_derivative():
    rng = np.random.default_rng(5)
    for _ in range(20):
        X, p = random_algebra(rng), random_point(rng)
        v = killing_eval(X, p).v
        errs = []
        for t in (1e-3, 1e-4):
            q = moebius_apply(exp_alg(t * X), p).z
            errs.append(abs((q - p.z) / t - v))
        assert errs[1] < errs[0] * 0.2 + 1e-9  # O(t)

import numpy as np
import pytest

from lorentz_geom import hyperbolic as hyp
from lorentz_geom.contraction.instance import derivative_gap
from lorentz_geom.errors import NotAdmissible, NotFilling, StripsOverlap
from lorentz_geom.lengths import admissibility_test, base_length, dlambda
from lorentz_geom.lie import translation_length
from lorentz_geom.strips import (CLASS_BASIS, StripSystem, class_vector, collapse_map, disjoint,
                                 invert_strip_map, macro_family, macro_strip, make_system,
                                 strip_cocycle, strip_map)
from lorentz_geom.words import Word, conjugacy_representatives

W = np.array([0.3, 0.4, 0.3])
PAIRWISE = {"a|b|1", "b|a b|1", "a|a b|A"}  # one arc between each pair of boundary curves


def test_enumeration(atlas):
    assert len(atlas.arcs) == 6
    top = [set(s.labels) for s in atlas.top]
    assert PAIRWISE in top
    assert all(s.fills for s in atlas.top)
    single = [s for s in atlas.systems if s.labels == ("a|b|1",)][0]
    assert not single.fills and single.missed_word is not None
    assert not make_system(atlas.model, []).fills


def test_systems_are_pairwise_disjoint(atlas):
    for s in atlas.systems:
        for i, a in enumerate(s.arcs):
            for b in s.arcs[i + 1:]:
                assert disjoint(atlas.model, a, b)


def test_arcs_meet_boundary_orthogonally(atlas):
    """Projecting any point of the arc onto a boundary axis lands on the foot
    exactly when the arc is perpendicular there; the waist is the midpoint."""
    model = atlas.model
    for arc in atlas.arcs:
        ax1 = model.components[model.component_index(arc.start)].axis
        c2 = model.components[model.component_index(arc.end)].axis
        ax2 = hyp.move_geodesic(model.rep.matrix(arc.word), c2)
        p0, p1 = arc.feet
        for foot, axis in ((p0, ax1), (p1, ax2)):
            assert abs(hyp.signed_side(arc.line, foot)) < 1e-8
            assert abs(hyp.signed_side(axis, foot)) < 1e-8
            for t in (0.3, 0.7):
                z = complex(hyp.geodesic_point(p0, p1, t))
                assert hyp.dist(complex(hyp.project_to_geodesic(axis, z)), foot) < 1e-8
        assert abs(hyp.dist(arc.waist, p0) - hyp.dist(arc.waist, p1)) < 1e-8
        assert abs(hyp.dist(p0, p1) - arc.core_length) < 1e-8


def test_zero_widths_give_conjugate_rep(atlas, surface):
    ss = atlas.strips[1]
    rho = macro_strip(ss, np.zeros(3))
    for w in conjugacy_representatives(2, 4):
        assert abs(abs(rho(w).trace) - abs(surface.rep(w).trace)) < 1e-9


def test_strips_shorten_every_curve(atlas, surface):
    ss = atlas.strips[1]
    rho = macro_strip(ss, np.full(3, 0.1))
    for w in conjugacy_representatives(2, 4):
        assert translation_length(rho(w)) < translation_length(surface.rep(w))


def test_width_slope_matches_dlambda(atlas, surface):
    ss = atlas.strips[1]
    j = surface.rep
    u = strip_cocycle(ss, W)
    s = 1e-3
    rho = macro_strip(ss, W * s)
    for w in conjugacy_representatives(2, 4):
        slope = (translation_length(rho(w)) - base_length(j, w)) / s
        assert abs(slope - dlambda(j, u, w)) < 5e-3 * (1 + abs(slope))


def test_overlapping_strips_rejected(atlas):
    with pytest.raises(StripsOverlap):
        macro_strip(atlas.strips[1], W * 5)
    with pytest.raises(StripsOverlap):
        macro_strip(atlas.strips[1], -W)


def test_strip_cocycle_zero_and_linear(atlas):
    ss = atlas.strips[2]
    assert max(x.norm() for x in strip_cocycle(ss, np.zeros(3)).values) == 0
    a, b = np.array([0.1, 0.5, 0.2]), np.array([0.7, 0.0, 0.3])
    lhs = strip_cocycle(ss, a + b)
    rhs = strip_cocycle(ss, a) + strip_cocycle(ss, b)
    assert all(x.isclose(y, 1e-10) for x, y in zip(lhs.values, rhs.values))


@pytest.mark.parametrize("k", range(4))
def test_strip_cocycle_is_derivative_of_macro_family(atlas, k):
    ss = atlas.strips[k]
    assert derivative_gap(macro_family(ss, W), strip_cocycle(ss, W)) < 1e-6


def test_strip_map(atlas):
    ss = atlas.find(PAIRWISE)
    v = class_vector(strip_cocycle(ss, W))
    assert np.all(v < 0)
    p1, p2 = strip_map(ss, W), strip_map(ss, 2 * W)
    assert np.abs(p1 - p2).max() < 1e-12
    M = np.array([class_vector(strip_cocycle(ss, e)) for e in np.eye(3)])
    assert np.linalg.matrix_rank(M) == 3
    assert [str(w) for w in CLASS_BASIS] == ["a", "b", "a b"]
    with pytest.raises(NotFilling):
        strip_map(ss, [1.0, 0.0, 0.0])


def test_inversion_round_trip_one_system(atlas):
    ss = atlas.strips[0]
    r = invert_strip_map(atlas, strip_cocycle(ss, W))
    got = dict(zip((a.label for a in r.arcs), r.weights))
    for a, w in zip(ss.arcs, W / W.sum()):
        assert abs(got[a.label] - w) < 1e-8
    assert r.residual < 1e-8 and len(r.candidates) == 1


def test_inversion_rejects_lengthening_direction(atlas):
    with pytest.raises(NotAdmissible):
        invert_strip_map(atlas, -strip_cocycle(atlas.strips[0], W))


def test_inversion_boundary_case(atlas):
    ss = atlas.find(PAIRWISE)
    w = np.array([0.5, 0.5, 0.0])
    r = invert_strip_map(atlas, strip_cocycle(ss, w))
    assert len(r.arcs) == 2 and len(r.candidates) == 2
    for _, ws in r.candidates:
        assert min(ws) < 1e-9


def test_strip_cocycles_certified_and_convex(atlas, surface):
    rng = np.random.default_rng(0)
    j = surface.rep
    for ss in atlas.strips:
        us = [strip_cocycle(ss, rng.uniform(0.05, 1, 3)) for _ in range(2)]
        for u in us + [0.3 * us[0] + 0.7 * us[1]]:
            assert admissibility_test(j, u, 6).verdict == "certified-negative-slope"


def test_non_filling_support_has_zero_slope_word(atlas, surface):
    j = surface.rep
    for s in atlas.systems:
        if s.fills:
            continue
        ss = StripSystem(atlas.model, s.arcs)
        u = strip_cocycle(ss, np.ones(len(s.arcs)))
        assert abs(dlambda(j, u, s.missed_word)) < 1e-9


def test_collapse_map_is_one_lipschitz_and_equivariant(atlas, surface):
    ss = atlas.strips[1]
    f, rho = collapse_map(ss, W)
    rng = np.random.default_rng(1)
    x = ss.model.inside
    p = hyp.exp_map(np.full(200, x), rng.uniform(0, 1.5, 200) * x.imag * np.exp(2j * np.pi * rng.uniform(size=200)))
    q = hyp.exp_map(p, rng.uniform(0.01, 0.5, 200) * p.imag * np.exp(2j * np.pi * rng.uniform(size=200)))
    fp = np.array([f(z) for z in p])
    fq = np.array([f(z) for z in q])
    assert np.max(hyp.dist(fp, fq) / hyp.dist(p, q)) <= 1 + 1e-9
    for w in (Word.parse("a"), Word.parse("B"), Word.parse("ab")):
        g, r = surface.rep.matrix(w), rho.matrix(w)
        for z, fz in zip(p[:20], fp[:20]):
            assert hyp.dist(f(complex(hyp.mobius(g, z))), complex(hyp.mobius(r, fz))) < 1e-8


def test_one_holed_torus_round_trip():
    from lorentz_geom.schottky import one_holed_torus
    from lorentz_geom.strips import StripAtlas, SurfaceModel
    surf = one_holed_torus((2.0, 2.0, 2.0))
    at = StripAtlas(SurfaceModel(surf))
    assert len(at.top) >= 2 and all(len(s.arcs) == 3 for s in at.top)
    rng = np.random.default_rng(2)
    for ss in at.strips:
        w = rng.uniform(0.1, 1, 3)
        u = strip_cocycle(ss, w)
        assert admissibility_test(surf.rep, u).verdict == "certified-negative-slope"
        r = invert_strip_map(at, u)
        assert {a.label for a in r.arcs} == {a.label for a in ss.arcs}
        got = dict(zip((a.label for a in r.arcs), r.weights))
        assert max(abs(got[a.label] - x) for a, x in zip(ss.arcs, w / w.sum())) < 1e-8

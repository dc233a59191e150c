import itertools
import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import group_from, random_algebra, random_group, random_point
from lorentz_geom.ads import (FIGURE_COLUMNS, Kind, LineClass, chart_coordinates, classify_line,
                              delta_crossratio, delta_trace, embed, figure_data, figure_svg,
                              j_swap, on_boundary, ProjPoint, rescaled_limit, s_chart,
                              same_delta, subset_membership)
from lorentz_geom.errors import SamePoint
from lorentz_geom.lie import (AlgebraElement, GroupElement, HPoint, IsometryClass, classify,
                              hyp_dist, moebius_apply, rotation)

E = math.e
I = GroupElement.identity()
DIAG_E = GroupElement(E, 0.0, 0.0, 1 / E)
ROT = GroupElement(0.0, -1.0, 1.0, 0.0)
PAR = GroupElement(1.0, 0.0, 1.0, 1.0)
GOLDEN = Path(__file__).parent / "fixtures" / "figure_rows.json"

groups = st.lists(st.floats(-3, 3, allow_nan=False), min_size=4, max_size=4).map(group_from)


def test_embed_and_boundary():
    assert np.allclose(embed(I).vector, np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert on_boundary(ProjPoint.from_vector([1, 0, 0, 0]))
    rng = np.random.default_rng(0)
    assert not any(on_boundary(embed(random_group(rng))) for _ in range(100))


@pytest.mark.parametrize("b, kind, value", [
    (I, Kind.ZERO, 0.0),
    (DIAG_E, Kind.REAL, 1.0),
    (ROT, Kind.IMAGINARY, math.pi / 2),
])
def test_delta_trace_examples(b, kind, value):
    d = delta_trace(I, b)
    assert d.kind is kind and abs(d.value - value) < 1e-12


def test_delta_crossratio_examples():
    d = delta_crossratio(I, GroupElement(E * E, 0, 0, E ** -2))
    assert d.kind is Kind.REAL and abs(d.value - 2) < 1e-12
    assert delta_crossratio(I, PAR).kind is Kind.ZERO
    d = delta_crossratio(I, rotation(0.6))
    assert d.kind is Kind.IMAGINARY and abs(d.value - 0.3) < 1e-12


def test_crossratio_rejects_same_point():
    with pytest.raises(SamePoint):
        delta_crossratio(DIAG_E, DIAG_E)
    with pytest.raises(SamePoint):
        classify_line(ROT, ROT)


@given(groups, groups)
def test_two_formulations_agree(a, b):
    if a.isclose(b, 1e-6):
        return
    assert same_delta(delta_trace(a, b), delta_crossratio(a, b), 1e-7)


def test_bi_invariance():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b, g, h = (random_group(rng, 0.7) for _ in range(4))
        assert same_delta(delta_trace(a, b), delta_trace(g @ a @ h.inv(), g @ b @ h.inv()), 1e-9)


@pytest.mark.parametrize("b, cls", [
    (DIAG_E, LineClass.SPACELIKE), (ROT, LineClass.TIMELIKE), (PAR, LineClass.LIGHTLIKE)])
def test_classify_line(b, cls):
    assert classify_line(I, b) is cls


@given(groups)
def test_lightlike_iff_parabolic(g):
    if g.isclose(I, 1e-6) or abs(abs(g.trace) - 2) < 1e-6 and classify(g) is not IsometryClass.PARABOLIC:
        return
    is_par = classify(g) is IsometryClass.PARABOLIC
    assert (classify_line(I, g) is LineClass.LIGHTLIKE) == is_par


def test_subset_membership():
    f = subset_membership(DIAG_E)
    assert f.in_S and f.in_A and not (f.in_K or f.in_C or f.in_T)
    assert subset_membership(ROT).in_K
    f = subset_membership(PAR)
    assert f.in_C and f.in_T


def test_s_chart():
    assert s_chart(HPoint(0, 1)).isclose(I, 1e-14)
    g = s_chart(HPoint(0, E * E))
    assert g.isclose(DIAG_E, 1e-12)
    rng = np.random.default_rng(2)
    for _ in range(20):
        p = random_point(rng)
        g = s_chart(p)
        assert abs(g.b - g.c) < 1e-10
        q = moebius_apply(g, HPoint(0, 1))
        assert abs(q.z - p.z) < 1e-10 * (1 + abs(p.z))
        assert abs(j_swap(g).trace) < 1e-10


def test_delta_on_symmetric_matrices_is_hyperbolic_distance():
    """P = h h^T in S corresponds to the point h.i; with s_chart(p) = h^2 that
    point is the midpoint of [i, p].  Hence delta(s(p), s(q)) = d(m_p, m_q),
    which is d(i, p) / 2 when q is the basepoint."""
    from lorentz_geom import hyperbolic as hyp
    rng = np.random.default_rng(3)
    for _ in range(30):
        p, q = random_point(rng), random_point(rng)
        d = delta_trace(s_chart(p), s_chart(q))
        mp, mq = hyp.geodesic_point(1j, p.z, 0.5), hyp.geodesic_point(1j, q.z, 0.5)
        assert d.kind is Kind.REAL
        assert abs(d.value - float(hyp.dist(mp, mq))) < 1e-9 * (1 + d.value)
        d0 = delta_trace(I, s_chart(p))
        assert abs(d0.value - 0.5 * hyp_dist(HPoint(0, 1), p)) < 1e-10 * (1 + d0.value)


def test_rescaled_limit_examples():
    for t in (0.1, 0.01, 1e-3):
        r = rescaled_limit(AlgebraElement.zero(), AlgebraElement(1, 0, 0), t)
        assert abs(r.scaled - 1) < 1e-10
        r = rescaled_limit(AlgebraElement.zero(), AlgebraElement(0, -1, 1), t)
        assert abs(r.scaled - 1j) < 1e-10
    with pytest.raises(ValueError):
        rescaled_limit(AlgebraElement.zero(), AlgebraElement(1, 0, 0), 0.5)


def test_rescaled_limit_rate():
    rng = np.random.default_rng(4)
    for _ in range(100):
        x, y = random_algebra(rng), random_algebra(rng)
        for t in (1e-2, 1e-3):
            assert rescaled_limit(x, y, t).error <= 5 * t


# --- figure data -------------------------------------------------------------

def _brute_force_classes():
    reps = []
    for e in itertools.product((-1, 0, 1), repeat=4):
        m = np.array(e, dtype=float).reshape(2, 2)
        det = np.linalg.det(m)
        if det <= 0:
            continue
        m = m / math.sqrt(det)
        if not any(np.allclose(m, r) or np.allclose(m, -r) for r in reps):
            reps.append(m)
    return reps


def test_figure_count_matches_brute_force():
    assert len(figure_data()) == len(_brute_force_classes()) == 12


def test_figure_matches_golden_fixture():
    golden = json.loads(GOLDEN.read_text())
    rows = figure_data()
    assert len(rows) == len(golden)
    for r, g in zip(rows, golden):
        assert set(r) == set(FIGURE_COLUMNS)
        for k, v in g.items():
            assert (abs(r[k] - v) < 1e-10) if isinstance(v, float) else r[k] == v


def test_figure_identity_at_origin_and_traceless_at_infinity():
    rows = figure_data()
    ident = [r for r in rows if r["class"] == "identity"]
    assert len(ident) == 1 and (ident[0]["x"], ident[0]["y"], ident[0]["z"]) == (0, 0, 0)
    for r in rows:
        assert r["at_infinity"] == (abs(r["a"] + r["d"]) < 1e-12)
        assert r["at_infinity"] == r["in_J"]


def test_chart_places_cone_on_the_light_cone():
    # parabolic elements satisfy x^2 + y^2 = z^2 in the chart
    for s in (0.5, 1.0, 3.0):
        for h in (I, ROT, DIAG_E):
            g = h @ GroupElement(1.0, 0.0, s, 1.0) @ h.inv()
            (x, y, z), _ = chart_coordinates(g)
            assert abs(x * x + y * y - z * z) < 1e-9


def test_figure_svg_is_well_formed():
    import xml.etree.ElementTree as ET
    root = ET.fromstring(figure_svg(figure_data()))
    circles = [c for c in root if c.tag.endswith("circle")]
    assert sum("at_infinity" in c.get("class") for c in circles) == 1

"""Acceptance criteria, each at its stated tolerance.  Every test records one
PASS/FAIL line, printed in the terminal summary."""

import math
import time

import numpy as np
import pytest

from conftest import record
from helpers import random_algebra, random_group
from lorentz_geom.ads import (Kind, delta_crossratio, delta_trace, rescaled_limit, same_delta)
from lorentz_geom.contraction.fibration import transition_fiber_check
from lorentz_geom.contraction.fields import (first_variation, flow_distance, killing_field,
                                             radial_field, sum_field)
from lorentz_geom.contraction.instance import derivative_gap, fibration_suite
from lorentz_geom.contraction.properness import properness_violation_search
from lorentz_geom.lengths import dlambda, length_ratio_sup
from lorentz_geom.lie import (AlgebraElement, GroupElement, exp_alg, hyperbolic_diag, rotation,
                              translation_length)
from lorentz_geom.reps import (Cocycle, Representation, act1, act2, act_affine, affine_mul, cocycle_matrices,
                               derivative_cocycle, direct_mul, phi, semidirect_mul)
from lorentz_geom.strips import (invert_strip_map, macro_strip, signed_macro, strip_cocycle)
from lorentz_geom.words import Word


def _check(name, ok, detail=""):
    record(name, ok, detail)
    assert ok, f"{name}: {detail}"


def test_delta_oracle_agreement():
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(500):
        a, b = random_group(rng), random_group(rng)
        if not same_delta(delta_trace(a, b), delta_crossratio(a, b), 1e-8):
            bad += 1
    dt = time.perf_counter() - t0
    _check("delta oracle agreement", bad == 0 and dt < 5, f"mismatches={bad} runtime={dt:.2f}s")


def test_model_geometry_fixtures():
    rng = np.random.default_rng(1)
    I = GroupElement.identity()
    g = hyperbolic_diag(2.0)  # diag(e, 1/e)
    errs = [abs(delta_trace(I, g).value - 1), abs(delta_crossratio(I, g).value - 1),
            abs(translation_length(g) - 2)]
    kinds = [delta_trace(I, g).kind is Kind.REAL, delta_crossratio(I, g).kind is Kind.REAL]
    for th in np.linspace(0.05, math.pi / 2, 20):
        r = rotation(2 * th)
        for d in (delta_trace(I, r), delta_crossratio(I, r)):
            kinds.append(d.kind is Kind.IMAGINARY)
            errs.append(abs(d.value - th))
    for _ in range(20):
        h = random_group(rng)
        s = rng.normal() * 2
        par = h @ GroupElement(1.0, 0.0, s, 1.0) @ h.inv()
        k = random_group(rng)
        for d in (delta_trace(k, k @ par), delta_crossratio(k, k @ par)):
            kinds.append(d.kind is Kind.ZERO)
            errs.append(d.value)
    err = max(errs)
    _check("model-geometry fixtures", all(kinds) and err <= 1e-10, f"max_error={err:.2e}")


def test_flat_limit_constant():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        x, y = random_algebra(rng), random_algebra(rng)
        for t in (1e-2, 1e-3):
            worst = max(worst, rescaled_limit(x, y, t).error / t)
    dt = time.perf_counter() - t0
    _check("flat-limit constant", worst <= 5 and dt < 10, f"max error/t={worst:.3f} runtime={dt:.2f}s")


def test_fibration_suite_macro(instance):
    r = fibration_suite(instance, "macro", n=1000)
    ok = (r["C"] < 1 and r["all_members"] and r["exclusive"] and r["equivariance_max"] < 1e-6
          and r["contraction_rate"] <= r["C"])
    _check("fibration suite (macro)", ok,
           f"C={r['C']:.4f} membership={r['membership_max']:.1e} "
           f"equivariance={r['equivariance_max']:.1e} rate={r['contraction_rate']:.3f}")


def test_fibration_suite_micro(instance):
    r = fibration_suite(instance, "micro", n=1000)
    ok = (r["c"] < 0 and r["all_members"] and r["exclusive"] and r["equivariance_max"] < 1e-6
          and r["within_ball"])
    _check("fibration suite (micro)", ok,
           f"c={r['c']:.4f} membership={r['membership_max']:.1e} "
           f"equivariance={r['equivariance_max']:.1e} ball_slack={r['ball_slack_max']:.2f}")


def test_coherence_length_ratio_and_properness(surface, atlas):
    t0 = time.perf_counter()
    j = surface.rep
    ss = atlas.strips[1]
    w = np.array([0.3, 0.4, 0.3])
    rho = macro_strip(ss, w)
    ratio = length_ratio_sup(j, rho, 6).value
    strip_rep = properness_violation_search(j, rho, N=12)
    same = properness_violation_search(j, j, N=12)
    mixed = [properness_violation_search(j, signed_macro(ss, w * np.array(s) * 0.5), N=12)
             for s in ([1, -1, -1], [1, -1, 1])]
    dt = time.perf_counter() - t0
    ok = (ratio < 1 and not strip_rep.witness and bool(same.witness)
          and all(bool(m.witness) for m in mixed) and dt < 60)
    _check("length-ratio/properness coherence", ok,
           f"ratio_sup={ratio:.4f} strip_witness={bool(strip_rep.witness)} "
           f"j_witness={bool(same.witness)} "
           f"mixed_witnesses={[bool(m.witness) for m in mixed]} runtime={dt:.1f}s")


def _lipschitz_fd(rng):
    """One random (field, pair): returns |first variation - central difference|."""
    X = random_algebra(rng)
    p0 = complex(rng.normal(), math.exp(rng.normal()))
    j = Representation([GroupElement.identity()])
    Y = sum_field(killing_field(j, X), radial_field(j, p0))
    p = complex(rng.normal(), math.exp(rng.normal()))
    q = complex(rng.normal(), math.exp(rng.normal()))
    h = 1e-5
    d = flow_distance(Y, p, q, 0.0)[0]
    fd = (flow_distance(Y, p, q, h)[0] - flow_distance(Y, p, q, -h)[0]) / (2 * h) / d
    ev = first_variation(np.array([p]), np.array([q]), Y(np.array([p])), Y(np.array([q])))[0]
    return abs(ev - fd)


def _dlambda_fd(rng, j):
    u = Cocycle(j, [random_algebra(rng, 0.5) for _ in range(j.rank)])
    while True:
        w = Word(tuple(int(x) for x in rng.choice([1, 2, -1, -2], rng.integers(1, 7)))).cyclic_reduce()
        if len(w):
            break
    U, J = cocycle_matrices(u, w)
    h = 2e-5

    def length(t):
        m = exp_alg(AlgebraElement.from_matrix(t * U)).matrix @ J
        return 2 * math.acosh(abs(np.trace(m)) / 2)
    # fourth-order central stencil
    fd = (8 * (length(h) - length(-h)) - (length(2 * h) - length(-2 * h))) / (12 * h)
    return abs(dlambda(j, u, w) - fd)


def test_first_variation_and_dlambda_oracles(surface):
    rng = np.random.default_rng(3)
    e1 = max(_lipschitz_fd(rng) for _ in range(100))
    e2 = max(_dlambda_fd(rng, surface.rep) for _ in range(100))
    _check("first-variation/dlambda oracles", e1 <= 1e-5 and e2 <= 1e-6,
           f"first_variation_err={e1:.1e} dlambda_err={e2:.1e}")


def test_strip_map_round_trip(atlas):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    worst, support_ok, unique = 0.0, True, True
    for ss in atlas.strips:
        for _ in range(50):
            w = rng.uniform(0.05, 1.0, len(ss.arcs))
            r = invert_strip_map(atlas, strip_cocycle(ss, w))
            support_ok &= {a.label for a in r.arcs} == {a.label for a in ss.arcs}
            unique &= len(r.candidates) == 1
            if support_ok:
                got = dict(zip((a.label for a in r.arcs), r.weights))
                want = w / w.sum()
                worst = max(worst, max(abs(got[a.label] - x) for a, x in zip(ss.arcs, want)))
    dt = time.perf_counter() - t0
    _check("strip-map round trip", support_ok and unique and worst <= 1e-6 and dt < 30,
           f"systems={len(atlas.strips)} weight_err={worst:.1e} unique={unique} runtime={dt:.1f}s")


def test_transition_proxy(instance):
    rng = np.random.default_rng(5)
    pts = instance.domain.sample_points(300, rng)
    ts = (1e-1, 1e-2, 1e-3)
    rep = transition_fiber_check(lambda t: instance.macro_map(t, n=1000), instance.field,
                                 [0.2, 0.1, -0.1], ts, pts)
    ratios = [g / t for g, t in zip(rep.fiber_gap, ts)]
    gap = derivative_gap(instance.family, instance.cocycle)
    bounded = max(ratios) <= 1.0 and max(ratios) <= 10 * max(min(ratios), 1e-12)
    _check("transition proxy", bounded and gap <= 1e-5,
           f"gap/t={[f'{r:.3g}' for r in ratios]} cocycle_gap={gap:.1e}")


def test_algebraic_laws(surface):
    rng = np.random.default_rng(6)
    err = 0.0
    def dist(g, h):  # projective, relative to the entry size
        e = min(np.abs(g.matrix - h.matrix).max(), np.abs(g.matrix + h.matrix).max())
        return e / max(1.0, np.abs(g.matrix).max())
    for _ in range(100):
        # translation scale ~1: the G2 law cancels a^-1 a inside an eight-factor
        # product, so roundoff grows like the square of the conditioning
        p = (random_group(rng, 0.5), random_group(rng, 0.5))
        q = (random_group(rng, 0.5), random_group(rng, 0.5))
        x = random_group(rng, 0.5)
        # action laws of G1 and G2, and phi as homomorphism intertwining them
        err = max(err, dist(act1(direct_mul(p, q), x), act1(p, act1(q, x))))
        err = max(err, dist(act2(semidirect_mul(p, q), x), act2(p, act2(q, x))))
        lhs, rhs = phi(semidirect_mul(p, q)), direct_mul(phi(p), phi(q))
        err = max(err, dist(lhs[0], rhs[0]), dist(lhs[1], rhs[1]))
        err = max(err, dist(act1(phi(p), x), act2(p, x)))
        A = (random_algebra(rng), p[1])
        B = (random_algebra(rng), q[1])
        X = random_algebra(rng)
        e = act_affine(affine_mul(A, B), X) - act_affine(A, act_affine(B, X))
        err = max(err, e.norm() / max(1.0, act_affine(A, act_affine(B, X)).norm()))
    j = surface.rep
    gen_vals = [random_algebra(rng, 0.3) for _ in range(j.rank)]
    u = derivative_cocycle(lambda t: Representation(
        [exp_alg(t * Xg) @ g for g, Xg in zip(j.generators, gen_vals)]))
    law = 0.0
    for _ in range(100):
        w1 = Word(tuple(int(x) for x in rng.choice([1, 2, -1, -2], rng.integers(0, 5))))
        w2 = Word(tuple(int(x) for x in rng.choice([1, 2, -1, -2], rng.integers(0, 5))))
        U1, J1 = cocycle_matrices(u, w1)
        U2, _ = cocycle_matrices(u, w2)
        U12, _ = cocycle_matrices(u, w1 * w2)
        law = max(law, np.abs(U12 - (U1 + J1 @ U2 @ np.linalg.inv(J1))).max() / (1 + np.abs(U12).max()))
    _check("algebraic laws", err <= 1e-10 and law <= 1e-10,
           f"group_law_err={err:.1e} cocycle_law_err={law:.1e}")

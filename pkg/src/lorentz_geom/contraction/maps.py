"""Equivariant Lipschitz maps H^2 -> H^2 and their sampled constants.

A map is stored as a vectorized callable on complex points together with
the pair (j, rho) and a Lipschitz bound C measured on samples.  Kinds:

* strip_collapse: the 1-Lipschitz collapse map of a macroscopic strip
  deformation;
* isometry_composed: a base map followed by a fixed isometry;
* sampled: a map given on a triangulated fundamental domain and extended by
  equivariance (the mesh map below, or a pointwise interpolation).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import hyperbolic as hyp
from ..reps import Representation
from .domain import LETTER_ORDER, PantsDomain


@dataclass
class EquivariantMap:
    """A (j, rho)-equivariant map with a sampled Lipschitz bound C."""

    j: Representation
    rho: Representation
    kind: str
    evaluate: Callable = field(repr=False)
    C: float = float("nan")
    data: dict = field(default_factory=dict, repr=False)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.evaluate(np.atleast_1d(z))
        return complex(out[0]) if z.ndim == 0 else out


def exp_many(V) -> np.ndarray:
    """exp of [[a, b], [c, -a]] for rows (a, b, c), shape (n, 2, 2)."""
    V = np.asarray(V, dtype=float)
    a, b, c = V[..., 0], V[..., 1], V[..., 2]
    q = a * a + b * c
    r = np.sqrt(np.abs(q))
    ch = np.where(q >= 0, np.cosh(r), np.cos(r))
    sc = np.where(r > 1e-12, np.where(q >= 0, np.sinh(r), np.sin(r)) / np.where(r > 1e-12, r, 1), 1.0)
    out = np.empty(V.shape[:-1] + (2, 2))
    out[..., 0, 0] = ch + sc * a
    out[..., 0, 1] = sc * b
    out[..., 1, 0] = sc * c
    out[..., 1, 1] = ch - sc * a
    return out


def blend_points(P, mu):
    """Hyperboloid barycenter of points P (n, k) with weights mu (n, k)."""
    H = hyp.to_hyperboloid(P)
    return hyp.from_hyperboloid(hyp.normalize_hyperboloid(np.einsum("nk,nkj->nj", mu, H)))


def compress_distance(s, rate):
    """Time-rate flow of -grad cosh(s) applied to the distance s: tanh(s/2)
    is multiplied by exp(-rate)."""
    return 2 * np.arctanh(np.tanh(s / 2) * np.exp(-rate))


def mesh_map(dom: PantsDomain, K, kappa: float, t: float, rho: Representation) -> EquivariantMap:
    """Equivariant map built from vertex Killing fields K (nv, 3).

    Free vertices carry exp(t K_v); a tied vertex v = j(l)^-1 w carries
    rho(l)^-1 exp(t K_w) j(l).  Core points map to the hyperboloid blend of
    the vertex isometries applied to the point; funnel points are first moved
    towards the axis by the time-t flow of -kappa grad cosh(s) and then
    blended with the weights of their foot.  Off the domain f = rho(g) f(z')."""
    nv = len(dom.vz)
    G = np.empty((nv, 2, 2))
    free = dom.tie[:, 0] < 0
    G[free] = exp_many(t * K[free])
    rmats = {x: _letter(rho, x) for x in LETTER_ORDER}
    for v in np.flatnonzero(~free):
        w, letter = dom.tie[v]
        G[v] = hyp.inverse(rmats[letter]) @ G[w] @ dom.mats[letter]
    rstack = np.array([rmats[x] for x in LETTER_ORDER])

    def ev(z):
        zr, steps = dom.reduce(z)
        R = dom.accumulate(len(zr), steps, rstack)
        label, foot, s, _ = dom.funnel_split(zr)
        inside = label < 0
        base = np.where(inside, zr, foot)
        verts, mu = dom.barycentric(base)
        q = zr.copy()
        fun = ~inside & (s > 1e-12)
        if np.any(fun):
            s2 = compress_distance(s[fun], t * kappa)
            q[fun] = hyp.geodesic_point(foot[fun], zr[fun], s2 / s[fun])
        imgs = hyp.mobius(G[verts], q[:, None])
        out = blend_points(imgs, mu)
        return hyp.mobius(R, out)
    return EquivariantMap(dom.rep, rho, "sampled", ev, float("nan"),
                          {"t": t, "vertex_isometries": G, "kappa": kappa})


def _letter(rep: Representation, x: int) -> np.ndarray:
    g = rep.generators[abs(x) - 1].matrix
    return g if x > 0 else hyp.inverse(g)


def field_map(dom: PantsDomain, Y, t: float, rho: Representation) -> EquivariantMap:
    """The mesh map whose t-derivative at the identity is the mesh field Y."""
    op = Y.data["operator"]
    theta = Y.data["theta"]
    K = op.vm.values(theta[:-1].reshape(-1, 3))
    return mesh_map(dom, K, float(theta[-1]), t, rho)


def identity_map(j: Representation) -> EquivariantMap:
    return EquivariantMap(j, j, "sampled", lambda z: np.asarray(z, dtype=complex), 1.0)


def constant_map(j: Representation, p0) -> EquivariantMap:
    """Constant map (equivariant only for the trivial rho); a solver model case."""
    p0 = complex(p0)
    trivial = Representation([type(g).identity() for g in j.generators])
    return EquivariantMap(j, trivial, "sampled", lambda z: np.full(np.shape(z), p0, dtype=complex), 0.0)


def contraction_toward(j: Representation, p0, ratio: float) -> EquivariantMap:
    """p -> the point at fraction ratio of the way from p0 to p (a model
    C-Lipschitz map for the solvers; equivariant only for trivial groups)."""
    p0 = complex(p0)
    return EquivariantMap(j, j, "sampled",
                          lambda z: hyp.geodesic_point(np.full(np.shape(z), p0), z, ratio), ratio)


def strip_collapse_map(ss, widths=None) -> EquivariantMap:
    """Collapse map of a macroscopic strip deformation (1-Lipschitz)."""
    from ..strips import collapse_map
    f, rho = collapse_map(ss, widths)
    vf = np.vectorize(f, otypes=[complex])
    return EquivariantMap(ss.model.rep, rho, "strip_collapse", vf, 1.0,
                          {"strips": ss, "widths": widths})


def compose_isometry(f: EquivariantMap, h) -> EquivariantMap:
    """h o f, equivariant for (j, h rho h^-1), with the same bound."""
    h = np.asarray(getattr(h, "matrix", h), dtype=float)
    hi = hyp.inverse(h)
    rho = Representation([type(g).from_matrix(h @ g.matrix @ hi) for g in f.rho.generators])
    return EquivariantMap(f.j, rho, "isometry_composed", lambda z: hyp.mobius(h, f.evaluate(z)),
                          f.C, {"base": f, "isometry": h})


def stretch(f: EquivariantMap, p, q):
    """d(f(p), f(q)) / d(p, q) for sampled pairs."""
    p, q = np.atleast_1d(np.asarray(p, dtype=complex)), np.atleast_1d(np.asarray(q, dtype=complex))
    return hyp.dist(f.evaluate(p), f.evaluate(q)) / hyp.dist(p, q)


def lipschitz_bound_sampled(f, p, q) -> float:
    """max over sampled pairs of the stretch ratio (maps) or of the pair
    lipschitz quantity (fields).  Samples should cover a fundamental domain
    and its generator translates; equivariance then makes the bound global
    up to sampling density.  This is a lower bound of the true constant."""
    from .fields import EquivariantField, first_variation
    p, q = np.atleast_1d(np.asarray(p, dtype=complex)), np.atleast_1d(np.asarray(q, dtype=complex))
    keep = hyp.dist(p, q) > 1e-12
    p, q = p[keep], q[keep]
    if len(p) < 1:
        raise ValueError("need at least two distinct samples")
    if isinstance(f, EquivariantField):
        return float(np.max(first_variation(p, q, f(p), f(q))))
    return float(np.max(stretch(f, p, q)))


def local_pairs(dom: PantsDomain, rng, n: int, radius=(0.01, 0.4), funnel_depth: float = 2.0):
    """Short random pairs around the domain, its collar and funnels."""
    from .meshfield import funnel_points
    p = np.concatenate([dom.sample_points(n, rng), funnel_points(dom, rng, n // 8, funnel_depth)])
    p = hyp.exp_map(p, rng.uniform(0, 0.3, len(p)) * p.imag * np.exp(2j * np.pi * rng.uniform(size=len(p))))
    q = hyp.exp_map(p, rng.uniform(*radius, len(p)) * p.imag * np.exp(2j * np.pi * rng.uniform(size=len(p))))
    return p, q


def measure_bound(f: EquivariantMap, dom: PantsDomain, n: int = 4000, seed: int = 0) -> float:
    """Sampled Lipschitz constant on local pairs, stored on the map."""
    p, q = local_pairs(dom, np.random.default_rng(seed), n)
    f.C = lipschitz_bound_sampled(f, p, q)
    return f.C


def interpolate_maps(f0: EquivariantMap, f1: EquivariantMap, t: float) -> EquivariantMap:
    """Pointwise geodesic interpolation f_t(p) = point at fraction t from
    f0(p) to f1(p); equivariant for the common pair, bound <= max(C0, C1)
    by convexity of the distance."""
    def ev(z):
        a, b = f0.evaluate(z), f1.evaluate(z)
        return hyp.geodesic_point(a, b, t) if 0 < t < 1 else (a if t <= 0 else b)
    C = max(f0.C, f1.C)
    return EquivariantMap(f0.j, f0.rho, "sampled", ev, C, {"interpolates": (f0, f1, t)})


def stretch_locus_sample(f: EquivariantMap, C0: float, eps: float, points, h: float = 1e-3,
                         n_dir: int = 8):
    """Sampled points whose local stretch over pairs of radius h exceeds C0 - eps."""
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    best = np.zeros(len(points))
    for k in range(n_dir):
        e = np.exp(1j * np.pi * k / n_dir) * points.imag * h
        best = np.maximum(best, stretch(f, points, hyp.exp_map(points, e)))
    return points[best > C0 - eps]

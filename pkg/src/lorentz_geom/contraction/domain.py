"""Triangulated fundamental domain of a pair of pants.

The convex core is cut along two seams into the right-angled octagon
O = H u r(H) (H the hexagon, r the reflection in the seam AB).  Its sides
r(s_CA) -> s_CA and s_BC -> r(s_BC) are paired by a and b; the four other
sides lie on boundary axes, beyond which the funnels start.  Vertices on a
paired side are tied to their partners so that piecewise data on the mesh
extends equivariantly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from .. import hyperbolic as hyp
from ..errors import GeometryError
from ..schottky import SchottkySurface
from ..words import Word

LETTER_ORDER = (1, -1, 2, -2)


def geodesic_intersection(g1, g2) -> complex:
    m = hyp.standardizer(g1)
    x, y = hyp.move_geodesic(m, g2)
    if np.isinf(x) or np.isinf(y) or (x < 0) == (y < 0):
        raise GeometryError("geodesics do not cross")
    return complex(hyp.mobius(hyp.inverse(m), 1j * math.sqrt(-x * y)))


def klein(z, center_map):
    """Klein-model coordinates after moving the domain center to i."""
    P = hyp.to_hyperboloid(hyp.mobius(center_map, np.asarray(z, dtype=complex)))
    return np.stack([P[..., 1] / P[..., 0], P[..., 2] / P[..., 0]], axis=-1)


@dataclass(frozen=True)
class Side:
    name: str
    start: complex
    end: complex
    axis: str | None  # boundary axis name for the four funnel sides


class PantsDomain:
    """Octagon mesh with tied vertices, funnel projections and point reduction."""

    def __init__(self, surface: SchottkySurface, h: float = 0.3):
        if surface.kind != "pants" or surface.hexagon is None:
            raise GeometryError("sampled maps and fields are implemented for the pair of pants")
        self.surface = surface
        self.rep = surface.rep
        self.h = h
        hexa = surface.hexagon
        r = lambda z: complex(hyp.reflect(hexa.seams["AB"], z))
        A, B, C = hexa.axes["A"], hexa.axes["B"], hexa.axes["C"]
        cA = geodesic_intersection(A, hexa.seams["CA"])
        cC1 = geodesic_intersection(C, hexa.seams["CA"])
        cC2 = geodesic_intersection(C, hexa.seams["BC"])
        cB = geodesic_intersection(B, hexa.seams["BC"])
        self.sides = [
            Side("A", r(cA), cA, "A"),
            Side("s_CA", cA, cC1, None),
            Side("C", cC1, cC2, "C"),
            Side("s_BC", cC2, cB, None),
            Side("B", cB, r(cB), "B"),
            Side("r(s_BC)", r(cB), r(cC2), None),
            Side("r(C)", r(cC2), r(cC1), "rC"),
            Side("r(s_CA)", r(cC1), r(cA), None),
        ]
        self.axes = {"A": A, "B": B, "C": C, "rC": _reflect_geo(hexa.seams["AB"], C)}
        corners = np.array([s.start for s in self.sides])
        P = hyp.normalize_hyperboloid(hyp.to_hyperboloid(corners).sum(axis=0))
        self.center = complex(hyp.from_hyperboloid(P))
        self.center_map = hyp.inverse(hyp._to_i(self.center))
        self.mats = {x: self.rep.matrix(Word((x,))) for x in LETTER_ORDER}
        # outward orientation of the funnel axes: positive side = funnel
        self.funnel_sign = {k: -np.sign(hyp.signed_side(g, self.center)) for k, g in self.axes.items()}
        self._build_vertices()
        self._triangulate()

    # -- mesh ---------------------------------------------------------------

    def _side_points(self, side: Side, include_end: bool):
        n = max(1, int(math.ceil(float(hyp.dist(side.start, side.end)) / self.h)))
        t = np.linspace(0, 1, n + 1)
        if not include_end:
            t = t[:-1]
        return [complex(z) for z in hyp.geodesic_point(side.start, side.end, t)]

    def _build_vertices(self):
        """Vertices with tie data: tie[v] = (source vertex, letter) means the
        vertex is j(letter)^-1 of the source, or (-1, 0) for a free vertex."""
        z, tie = [], []

        def add(p, source=-1, letter=0):
            z.append(complex(p))
            tie.append((source, letter))
            return len(z) - 1

        a_inv, b_inv = hyp.inverse(self.mats[1]), hyp.inverse(self.mats[2])
        sides = {s.name: s for s in self.sides}
        # s_CA (with both corners) free; r(s_CA) tied through a
        for p in self._side_points(sides["s_CA"], True):
            v = add(p)
            add(hyp.mobius(a_inv, p), v, 1)
        # r(s_BC) (with both corners) free; s_BC tied through b
        for p in self._side_points(sides["r(s_BC)"], True):
            v = add(p)
            add(hyp.mobius(b_inv, p), v, 2)
        # interiors of the axis sides
        for name in ("A", "C", "B", "r(C)"):
            for p in self._side_points(sides[name], False)[1:]:
                add(p)
        boundary = np.array(z)
        # interior: greedy hyperbolic packing of a fine Klein grid
        k_corners = klein(np.array([s.start for s in self.sides]), self.center_map)
        lim = np.abs(k_corners).max()
        g = np.linspace(-lim, lim, int(2 * lim / (self.h / 6)) + 1)
        kk = np.array([(x, y) for x in g for y in g])
        inside = self._klein_inside(kk, k_corners, margin=1e-6)
        cand = self._from_klein(kk[inside])
        order = np.argsort(hyp.dist(cand, self.center))
        pts = list(boundary)
        for c in cand[order]:
            d = hyp.dist(np.array(pts), c)
            bd = hyp.dist(boundary, c).min()
            if d.min() >= self.h and bd >= 0.75 * self.h:
                pts.append(c)
                add(c)
        self.vz = np.array(z)
        self.tie = np.array(tie, dtype=int)
        self.free = np.flatnonzero(self.tie[:, 0] < 0)
        self.free_index = -np.ones(len(z), dtype=int)
        self.free_index[self.free] = np.arange(len(self.free))

    def _klein_inside(self, kk, poly, margin=0.0):
        ok = np.ones(len(kk), dtype=bool)
        n = len(poly)
        orient = np.sign(_cross2(poly[1] - poly[0], poly[2] - poly[1]))
        for i in range(n):
            e = poly[(i + 1) % n] - poly[i]
            ok &= orient * _cross2(e, kk - poly[i]) > margin
        return ok

    def _from_klein(self, kk):
        x0 = 1 / np.sqrt(1 - (kk ** 2).sum(axis=1))
        P = np.stack([x0, x0 * kk[:, 0], x0 * kk[:, 1]], axis=-1)
        return hyp.mobius(hyp.inverse(self.center_map), hyp.from_hyperboloid(P))

    def _triangulate(self):
        self.vk = klein(self.vz, self.center_map)
        self.tri = Delaunay(self.vk)
        if len(self.tri.coplanar):
            raise GeometryError("degenerate triangulation")
        self.vx0 = hyp.to_hyperboloid(hyp.mobius(self.center_map, self.vz))[:, 0]

    @property
    def simplices(self):
        return self.tri.simplices

    def edges(self):
        s = self.tri.simplices
        e = np.concatenate([s[:, [0, 1]], s[:, [1, 2]], s[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    # -- point location -----------------------------------------------------

    def barycentric(self, z):
        """Triangle vertices (n, 3) and hyperboloid blend weights (n, 3) of core points."""
        k = klein(z, self.center_map)
        s = self.tri.find_simplex(k, tol=1e-9)
        miss = s < 0
        if np.any(miss):  # rounding just outside the hull: use the nearest triangle
            cen = self.vk[self.tri.simplices].mean(axis=1)
            for i in np.flatnonzero(miss):
                s[i] = int(np.argmin(((cen - k[i]) ** 2).sum(axis=1)))
        T = self.tri.transform[s]
        b = np.einsum("nij,nj->ni", T[:, :2], k - T[:, 2])
        beta = np.concatenate([b, 1 - b.sum(axis=1, keepdims=True)], axis=1)
        verts = self.tri.simplices[s]
        x0 = hyp.to_hyperboloid(hyp.mobius(self.center_map, np.asarray(z, dtype=complex)))[..., 0]
        mu = beta * x0[:, None] / self.vx0[verts]
        return verts, mu / mu.sum(axis=1, keepdims=True)

    def funnel_split(self, z):
        """For points of the closed domain: funnel label (-1 for the core),
        foot on the axis, distance s and outward unit normal at z."""
        z = np.asarray(z, dtype=complex)
        label = -np.ones(len(z), dtype=int)
        foot = z.copy()
        s = np.zeros(len(z))
        for i, (k, g) in enumerate(self.axes.items()):
            d = self.funnel_sign[k] * hyp.signed_side(g, z)
            hit = d > 0
            if np.any(hit):
                label[hit] = i
                foot[hit] = hyp.project_to_geodesic(g, z[hit])
                s[hit] = d[hit]
        normal = np.zeros(len(z), dtype=complex)
        f = s > 1e-12
        if np.any(f):
            # unit normal at z pointing away from the axis: parallel transport of v
            normal[f] = -hyp.unit_tangent(z[f], foot[f])
        return label, foot, s, normal

    # -- reduction ------------------------------------------------------------

    @property
    def _pp(self):
        hp = self.surface.certificate.halfplanes
        ang = np.array([hyp.geo_angles(hp[x].geo) for x in LETTER_ORDER])
        inv = np.array([hyp.inverse(self.mats[x]) for x in LETTER_ORDER])
        return ang, inv

    def reduce(self, z, max_steps: int = 2000):
        """z = j(g) z' with z' in the closed domain.  Returns z' and the list of
        steps (point indices, letter positions in LETTER_ORDER), in order."""
        from ..strips import side_values
        ang, inv = self._pp
        z = np.array(np.atleast_1d(z), dtype=complex)
        steps = []
        active = np.arange(len(z))
        for _ in range(max_steps):
            depth = side_values(ang, z[active])
            k = np.argmax(depth, axis=0)
            hit = depth[k, np.arange(len(active))] > 1e-12
            if not np.any(hit):
                return z, steps
            active, k = active[hit], k[hit]
            z[active] = hyp.mobius(inv[k], z[active])
            steps.append((active, k))
        raise GeometryError("point reduction did not terminate")

    def accumulate(self, n, steps, mats):
        """Products M(x1) M(x2) ... along the reduction steps, shape (n, 2, 2)."""
        out = np.tile(np.eye(2), (n, 1, 1))
        for idx, k in steps:
            out[idx] = out[idx] @ mats[k]
        return out

    def accumulate_cocycle(self, n, steps, u):
        """(j(g), u(g)) along the reduction steps."""
        J = np.tile(np.eye(2), (n, 1, 1))
        U = np.zeros((n, 2, 2))
        gm = np.array([self.mats[x] for x in LETTER_ORDER])
        um = []
        for x in LETTER_ORDER:
            X = u.values[abs(x) - 1].matrix
            g = self.mats[abs(x)]
            um.append(X if x > 0 else -hyp.inverse(g) @ X @ g)
        um = np.array(um)
        for idx, k in steps:
            Jk = J[idx]
            U[idx] = U[idx] + Jk @ um[k] @ hyp.inverse(Jk)
            J[idx] = Jk @ gm[k]
        return J, U

    def sample_points(self, n, rng, funnel_depth: float = 1.5):
        """Random points of the closed domain: core points by rejection in Klein
        coordinates, a share of them pushed into the funnels."""
        k_corners = klein(np.array([s.start for s in self.sides]), self.center_map)
        lim = np.abs(k_corners).max()
        out = []
        while sum(len(o) for o in out) < n:
            kk = rng.uniform(-lim, lim, size=(4 * n, 2))
            kk = kk[self._klein_inside(kk, k_corners)]
            out.append(self._from_klein(kk))
        return np.concatenate(out)[:n]


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _reflect_geo(seam, geo):
    return tuple(float(x) if not np.isinf(x) else x for x in (
        hyp.mobius_real(hyp.reflection_matrix(seam), geo[1]), hyp.mobius_real(hyp.reflection_matrix(seam), geo[0])))

"""Arcs, the pruned arc complex and strip deformations of rank-2 surfaces.

An arc is a geodesic of H^2 meeting two lifts of the convex-core boundary
perpendicularly; its waist is the midpoint of the segment between the feet.
Strips sit on the left of each oriented arc.  Holonomies are computed with a
base point x0 in the complement of all arc lifts: a lift W separating x0 from
a point contributes the translation along the perpendicular to W at its waist,
towards x0, by the strip width.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import hyperbolic as hyp
from .errors import NoPositiveSolution, NotAdmissible, NotFilling, StripsOverlap
from .lie import AlgebraElement, GroupElement
from .lengths import admissibility_test, dlambda
from .reps import Cocycle, Representation, word_table
from .schottky import SchottkySurface, axis_endpoints
from .words import Word, conjugacy_representatives

TOL = 1e-10


def null_vectors(theta):
    """Light-like vectors (1, -cos t, sin t) of ideal points given as angles."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.ones_like(theta), -np.cos(theta), np.sin(theta)], axis=-1)


def side_values(line_angles, points):
    """Signed distances of points (M,) to geodesics (N, 2); positive on the left.

    Returns an array of shape (N, M)."""
    L1 = null_vectors(line_angles[..., 0])
    L2 = null_vectors(line_angles[..., 1])
    n = -np.cross(L1, L2)
    norm = np.sqrt(np.abs(-n[..., 0] ** 2 + n[..., 1] ** 2 + n[..., 2] ** 2))
    P = hyp.to_hyperboloid(np.atleast_1d(points))
    return np.arcsinh((n @ P.T) / norm[..., None])


def _fermi_tau(axis, z):
    """Position of the projection of z along the oriented axis."""
    w = hyp.mobius(hyp.standardizer(axis), z)
    return float(np.log(np.abs(w)))


@dataclass(frozen=True)
class BoundaryComponent:
    name: str
    word: Word
    axis: tuple  # oriented so the convex core lies on the left
    length: float
    sign: int  # +1 if j(word) translates along the axis orientation


class SurfaceModel:
    """Boundary data and word tables of a certified rank-2 surface."""

    def __init__(self, surf: SchottkySurface):
        self.surface = surf
        self.rep = surf.rep
        self.inside = surf.certificate.inside
        comps = []
        for w in surf.boundary_words:
            m = self.rep.matrix(w)
            axis, sign = axis_endpoints(m), 1
            if hyp.signed_side(axis, self.inside) < 0:
                axis, sign = (axis[1], axis[0]), -1
            ell = 2 * math.acosh(abs(np.trace(m)) / 2)
            comps.append(BoundaryComponent(str(w), w, tuple(float(x) for x in axis), ell, sign))
        self.components = comps
        self._mats = {}
        self._near = {}

    @property
    def euler_characteristic(self) -> int:
        return 1 - self.rep.rank

    def component_index(self, name: str) -> int:
        for i, c in enumerate(self.components):
            if c.name == name:
                return i
        raise KeyError(name)

    @cached_property
    def table(self):
        return word_table(self.rep, 8)

    def words_upto(self, n: int):
        words, mats = self.table
        count = sum(1 for w in words if len(w) <= n)
        return words[:count], mats[:count]

    @cached_property
    def letters(self):
        hp = self.surface.certificate.halfplanes
        return {x: (hp[x], self.rep.matrix(Word((x,)))) for x in sorted(hp, key=lambda x: (abs(x), x < 0))}

    @cached_property
    def spacing(self):
        return min(0.05, 0.5 * self.surface.certificate.margin)

    @cached_property
    def _pingpong(self):
        keys = list(self.letters)
        ang = np.array([hyp.geo_angles(self.letters[x][0].geo) for x in keys])
        inv = np.array([hyp.inverse(self.letters[x][1]) for x in keys])
        return keys, ang, inv

    def reduce_many(self, z, max_steps: int = 500):
        """Write each z = j(g) z' with z' outside every ping-pong half-plane."""
        keys, ang, inv = self._pingpong
        z = np.array(np.atleast_1d(z), dtype=complex)
        letters = [[] for _ in range(len(z))]
        active = np.arange(len(z))
        for _ in range(max_steps):
            depth = side_values(ang, z[active])  # (4, n)
            k = np.argmax(depth, axis=0)
            hit = depth[k, np.arange(len(active))] > 1e-10
            if not np.any(hit):
                return [Word(tuple(g)) for g in letters], z
            active, k = active[hit], k[hit]
            z[active] = hyp.mobius(inv[k], z[active])
            for a, kk in zip(active, k):
                letters[a].append(keys[kk])
        raise RuntimeError("point reduction did not terminate")

    def reduce(self, z):
        words, zs = self.reduce_many([z])
        return words[0], complex(zs[0])

    def cover(self, p, q):
        """Words g such that j(g)D may meet the segment [p, q] (D the ping-pong
        domain), thickened by one letter to catch pieces between samples."""
        n = max(2, int(math.ceil(float(hyp.dist(p, q)) / self.spacing)) + 1)
        pts = hyp.geodesic_point(p, q, np.linspace(0, 1, n))
        found = set(self.reduce_many(pts)[0])
        out = set(found)
        for g in found:
            out.update(g * Word((x,)) for x in self.letters)
        return sorted(out, key=lambda w: (len(w), str(w)))

    @cached_property
    def boundary_near(self):
        """Per component, words k with j(k).axis meeting the ping-pong domain."""
        out = []
        for c in self.components:
            p = complex(hyp.project_to_geodesic(c.axis, self.inside))
            q = complex(hyp.mobius(self.rep.matrix(c.word), p))
            out.append([k.inverse() for k in self.cover(p, q)])
        return out

    def lifts_meeting(self, p, q, near):
        """Distinct words g k (g in cover([p, q]), k in near)."""
        return sorted({g * k for g in self.cover(p, q) for k in near}, key=lambda w: (len(w), str(w)))

    def matrix(self, w: Word):
        m = self._mats.get(w.letters)
        if m is None:
            m = self._mats[w.letters] = self.rep.matrix(w)
        return m

    def matrices(self, words):
        return np.array([self.matrix(w) for w in words]).reshape(-1, 2, 2)


def move_line(mats, angles):
    return np.stack([hyp.move_angles(mats, angles[0]), hyp.move_angles(mats, angles[1])], axis=-1)


# ---------------------------------------------------------------------------
# Arcs


@dataclass(frozen=True)
class Arc:
    """An arc from component ``start`` to component ``end``.

    Its standard lift is perpendicular to axis(start) and to j(word).axis(end)
    and is oriented from the first foot to the second."""

    start: str
    end: str
    word: Word
    line: tuple = field(compare=False)
    feet: tuple = field(compare=False)
    waist: complex = field(compare=False)
    core_length: float = field(compare=False)
    tau: float = field(compare=False)

    @property
    def label(self) -> str:
        return f"{self.start}|{self.end}|{self.word}"

    @property
    def angles(self) -> np.ndarray:
        return hyp.geo_angles(self.line)

    def to_json(self):
        return {"from": self.start, "to": self.end, "word": str(self.word)}


def arc_from_words(model: SurfaceModel, start: str, end: str, word: Word) -> Arc:
    c1 = model.components[model.component_index(start)]
    c2 = model.components[model.component_index(end)]
    m = model.rep.matrix(word)
    far = hyp.move_geodesic(m, c2.axis)
    f1, f2 = hyp.common_perpendicular(c1.axis, far)
    line = hyp.geodesic_through(f1, hyp.log_map(f1, f2))
    waist = complex(hyp.geodesic_point(f1, f2, 0.5))
    tau = _fermi_tau(c1.axis, f1) % c1.length
    return Arc(start, end, word, tuple(float(x) for x in line), (complex(f1), complex(f2)),
               waist, float(hyp.dist(f1, f2)), tau)


def _shortest_mod_stabilizer(word: Word, stab: Word) -> Word:
    cands = [word * stab ** m for m in range(-3, 4)]
    return min(cands, key=lambda w: (len(w), str(w)))


def _canonical_end(model, ci, h: Word, foot):
    """Move the end on j(h).axis_c to the standard lift with tau in [0, l)."""
    c = model.components[ci]
    back = hyp.inverse(model.rep.matrix(h))
    f = complex(hyp.mobius(back, foot))
    tau = _fermi_tau(c.axis, f)
    n = math.floor(tau / c.length)
    if tau - n * c.length > c.length - 1e-9:
        n += 1
    g = (c.word ** (-n * c.sign)) * h.inverse()
    return tau - n * c.length, g


def _arc_near(model: SurfaceModel, arc: Arc):
    """Words k with j(k).arc meeting the ping-pong domain."""
    if arc.label not in model._near:
        model._near[arc.label] = [k.inverse() for k in model.cover(*arc.feet)]
    return model._near[arc.label]


def arc_lifts_meeting(model: SurfaceModel, arc: Arc, p, q):
    """(words, angles) of the lifts of arc that may cross the segment [p, q]."""
    words = model.lifts_meeting(p, q, _arc_near(model, arc))
    return words, move_line(model.matrices(words), arc.angles)


def is_simple(model: SurfaceModel, arc: Arc) -> bool:
    words, ang = arc_lifts_meeting(model, arc, *arc.feet)
    other = ~hyp.angles_equal(ang, arc.angles)
    return not np.any(hyp.angles_cross(arc.angles, ang[other]))


def disjoint(model: SurfaceModel, a1: Arc, a2: Arc) -> bool:
    _, ang = arc_lifts_meeting(model, a2, *a1.feet)
    return not np.any(hyp.angles_equal(ang, a1.angles) | hyp.angles_cross(a1.angles, ang))


def _leaves_core(model: SurfaceModel, f1, f2) -> bool:
    """Does a boundary lift strictly separate f1 from f2?"""
    cov = model.cover(f1, f2)
    for ci, c in enumerate(model.components):
        words = sorted({g * k for g in cov for k in model.boundary_near[ci]}, key=lambda w: (len(w), str(w)))
        ang = move_line(model.matrices(words), hyp.geo_angles(c.axis))
        s = side_values(ang, np.array([f1, f2]))
        if np.any((s[:, 0] * s[:, 1] < 0) & (np.abs(s).min(axis=1) > 1e-9)):
            return True
    return False


def enumerate_arcs(model: SurfaceModel, max_word: int = 2):
    """Simple arcs whose lift joins axis(c1) to j(h).axis(c2) with |h| <= max_word,
    one per isotopy class, in deterministic order."""
    words, mats = model.words_upto(max_word)
    cands = []
    for ci, c1 in enumerate(model.components):
        std = hyp.geo_angles(c1.axis)
        for cj, c2 in enumerate(model.components):
            for h, m in zip(words, mats):
                far = hyp.move_geodesic(m, c2.axis)
                fa = hyp.geo_angles(far)
                if hyp.angles_equal(fa, std) or hyp.angles_cross(std, fa):
                    continue
                try:
                    f1, f2 = hyp.common_perpendicular(c1.axis, far)
                except ValueError:
                    continue
                if _leaves_core(model, f1, f2):
                    continue
                # canonical form: the end with the least (component, tau) is the start
                t1, g1 = _canonical_end(model, ci, Word(), f1)
                t2, g2 = _canonical_end(model, cj, h, f2)
                ends = sorted([(ci, t1, g1, cj, h), (cj, t2, g2, ci, Word())], key=lambda e: (e[0], e[1]))
                s_ci, tau, g, o_ci, o_h = ends[0]
                other = _shortest_mod_stabilizer(g * o_h, model.components[o_ci].word)
                cands.append((s_ci, tau, o_ci, other))
    cands.sort(key=lambda c: (c[0], c[2], len(c[3]), str(c[3]), c[1]))
    arcs, seen = [], []
    for s_ci, tau, o_ci, other in cands:
        ell = model.components[s_ci].length
        if any(s == s_ci and abs((tau - t + ell / 2) % ell - ell / 2) < 1e-7 for s, t in seen):
            continue
        seen.append((s_ci, tau))
        arc = arc_from_words(model, model.components[s_ci].name, model.components[o_ci].name, other)
        if is_simple(model, arc):
            arcs.append(arc)
    return arcs


# ---------------------------------------------------------------------------
# Arc systems and the filling test


@dataclass(frozen=True)
class ArcSystem:
    arcs: tuple
    fills: bool
    boundary_cycles: int
    missed_word: Word | None = None  # a short curve disjoint from all arcs

    @property
    def labels(self):
        return tuple(a.label for a in self.arcs)

    def to_json(self):
        return {"arcs": [a.to_json() for a in self.arcs], "fills": self.fills}


@dataclass(frozen=True)
class WeightedArcSystem:
    arcs: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.arcs) != len(self.weights):
            raise ValueError("one weight per arc")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")

    def normalized(self) -> WeightedArcSystem:
        s = sum(self.weights)
        return WeightedArcSystem(self.arcs, tuple(w / s for w in self.weights))

    def to_json(self):
        return {"arcs": [a.to_json() for a in self.arcs], "weights": list(self.weights)}


def _end_positions(model: SurfaceModel, arc: Arc):
    """(component index, tau mod length) of both ends of an arc."""
    out = []
    c1 = model.component_index(arc.start)
    out.append((c1, arc.tau % model.components[c1].length))
    c2 = model.component_index(arc.end)
    tau, _ = _canonical_end(model, c2, arc.word, arc.feet[1])
    out.append((c2, tau % model.components[c2].length))
    return out


def boundary_cycle_count(model: SurfaceModel, arcs) -> int:
    """Boundary circles of the surface cut along the arcs.

    Walk along the boundary with the surface on the left; at an arc endpoint
    follow the arc to its other end and keep walking.  The arcs fill (cut the
    surface into disks) exactly when this count is k + chi."""
    half = []  # (component, tau, arc index, end index)
    for i, arc in enumerate(arcs):
        for e, (c, tau) in enumerate(_end_positions(model, arc)):
            half.append((c, tau, i, e))
    succ = {}
    for ci in range(len(model.components)):
        on = sorted((h for h in half if h[0] == ci), key=lambda h: h[1])
        for k, h in enumerate(on):
            succ[(h[2], h[3])] = on[(k + 1) % len(on)][2:]
    perm = {h: succ[(h[0], 1 - h[1])] for h in succ}
    seen, cycles = set(), 0
    for h in perm:
        if h in seen:
            continue
        cycles += 1
        while h not in seen:
            seen.add(h)
            h = perm[h]
    touched = {h[0] for h in half}
    return cycles + sum(1 for ci in range(len(model.components)) if ci not in touched)


def missed_curve(model: SurfaceModel, arcs, L: int = 4):
    """A cyclically reduced word |w| <= L whose axis meets no lift of the arcs."""
    for w in conjugacy_representatives(model.rep.rank, L):
        m = model.rep.matrix(w)
        ax = axis_endpoints(m)
        p = complex(hyp.project_to_geodesic(ax, model.inside))
        q = complex(hyp.mobius(m, p))
        hit = False
        for arc in arcs:
            _, ang = arc_lifts_meeting(model, arc, p, q)
            if np.any(hyp.angles_cross(hyp.geo_angles(ax), ang)):
                hit = True
                break
        if not hit:
            return w
    return None


def make_system(model: SurfaceModel, arcs) -> ArcSystem:
    arcs = tuple(arcs)
    cycles = boundary_cycle_count(model, arcs) if arcs else len(model.components)
    fills = bool(arcs) and cycles == len(arcs) + model.euler_characteristic
    missed = missed_curve(model, arcs) if arcs else Word.gen(0)
    return ArcSystem(arcs, fills, cycles, missed)


def enumerate_arc_systems(model: SurfaceModel, max_word: int = 2):
    """All nonempty systems of pairwise disjoint arcs, tagged with filling."""
    arcs = enumerate_arcs(model, max_word)
    n = len(arcs)
    ok = {(i, k): disjoint(model, arcs[i], arcs[k]) for i in range(n) for k in range(i + 1, n)}
    out = []
    top = -3 * model.euler_characteristic  # arcs in a maximal system
    for size in range(1, top + 1):
        for combo in itertools.combinations(range(n), size):
            if all(ok[p] for p in itertools.combinations(combo, 2)):
                out.append(make_system(model, [arcs[i] for i in combo]))
    return arcs, out


# ---------------------------------------------------------------------------
# Strips


def arc_frame(arc: Arc) -> np.ndarray:
    """Isometry taking i to the waist and the upward imaginary axis to the
    perpendicular pointing to the left of the arc.  The arc itself is the image
    of the unit circle and level sets of log|F^-1 z| are its perpendiculars."""
    p = arc.waist
    left = 1j * hyp.unit_tangent(p, arc.feet[1])
    w = left / p.imag
    theta = 0.5 * (np.angle(w) - 0.5 * np.pi)
    c, s = np.cos(theta), np.sin(theta)
    return hyp._to_i(p) @ np.array([[c, s], [-s, c]])


def frame_translation(frames, amount):
    """Translations by ``amount`` along the frame axes (towards increasing level)."""
    e = np.exp(0.5 * np.asarray(amount, dtype=float))
    d = np.zeros(np.shape(frames))
    d[..., 0, 0] = e
    d[..., 1, 1] = 1 / e
    return frames @ d @ hyp.inverse(frames)


@dataclass(frozen=True)
class StripData:
    """Strip of width d on the left of an arc: alpha, its parallel alpha' and the
    closest pair (p, p')."""

    arc: Arc
    parallel: tuple
    p: complex
    p_prime: complex
    width: float

    def to_json(self):
        return {"arc": self.arc.to_json(), "parallel": [_json_end(x) for x in self.parallel],
                "p": [self.p.real, self.p.imag], "p_prime": [self.p_prime.real, self.p_prime.imag],
                "width": self.width}


def _json_end(x):
    return "inf" if np.isinf(x) else float(x)


def strip_data(arc: Arc, width: float) -> StripData:
    F = arc_frame(arc)
    e = math.exp(width)
    par = (hyp.mobius_real(F, -e), hyp.mobius_real(F, e))
    return StripData(arc, par, arc.waist, complex(hyp.mobius(F, 1j * e)), float(width))


def wall_words(model: SurfaceModel, arc: Arc, x0: complex | None = None):
    """Words h such that j(h).arc may meet the ping-pong domain (thickened by
    two letters) or the segments from x0 to its generator images."""
    base = _arc_near(model, arc)
    out = set(base)
    for k in base:
        for x in model.letters:
            out.add(Word((x,)) * k)
            for y in model.letters:
                out.add(Word((x, y)) * k)
    if x0 is not None:
        for x, (_, m) in model.letters.items():
            out.update(model.lifts_meeting(x0, complex(hyp.mobius(m, x0)), base))
    return sorted(out, key=lambda w: (len(w), str(w)))


class WallSet:
    """Lifts j(h).alpha of the arcs of a system that can matter near the
    fundamental domain, vectorized.

    ``frames[k]`` is j(h) times the arc frame; ``level`` is log|F^-1 z|, the
    signed distance along the waist perpendicular, positive on the left."""

    def __init__(self, model: SurfaceModel, arcs, x0=None):
        idx, words, frames = [], [], []
        for i, arc in enumerate(arcs):
            ws = wall_words(model, arc, x0)
            idx.extend([i] * len(ws))
            words.extend(ws)
            frames.append(model.matrices(ws) @ arc_frame(arc))
        self.arc_index = np.array(idx, dtype=int)
        self.words = words
        self.frames = np.concatenate(frames) if frames else np.zeros((0, 2, 2))
        self.inv_frames = hyp.inverse(self.frames)
        self.angles = np.stack([hyp.move_angles(self.frames, hyp.ideal_angle(-1.0)),
                                hyp.move_angles(self.frames, hyp.ideal_angle(1.0))], axis=-1)

    def __len__(self):
        return len(self.arc_index)

    def level(self, z):
        """Shape (walls, points)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        w = hyp.mobius(self.inv_frames[:, None], z[None, :])
        return np.log(np.abs(w))


class StripSystem:
    """A weighted arc system on a surface with its wall lifts and base point.

    The base point x0 is a core point far from every arc lift; it is chosen once
    per arc system and does not depend on the weights."""

    def __init__(self, model: SurfaceModel, arcs, weights=None):
        self.model = model
        self.arcs = tuple(arcs)
        self.weights = np.ones(len(self.arcs)) if weights is None else np.asarray(weights, dtype=float)
        if len(self.weights) != len(self.arcs):
            raise ValueError("one weight per arc")
        self.x0 = self._base_point(WallSet(model, self.arcs))
        self.walls = WallSet(model, self.arcs, self.x0)
        lev = self.walls.level(self.x0)[:, 0]
        self.sigma = np.where(lev > 0, 1.0, -1.0)  # +1: x0 on the left of the wall
        self.dist_x0 = np.abs(lev)
        half = np.zeros(self.walls.frames.shape)
        half[:, 0, 0] = 0.5 * self.sigma
        half[:, 1, 1] = -0.5 * self.sigma
        self.K = self.walls.frames @ half @ self.walls.inv_frames  # unit speed towards x0

    @property
    def system(self) -> WeightedArcSystem:
        return WeightedArcSystem(self.arcs, tuple(float(w) for w in self.weights))

    def _base_point(self, walls):
        x = self.model.inside
        pts = [x]
        for r in (0.2, 0.4, 0.6, 0.8):
            for th in np.linspace(0, 2 * math.pi, 24, endpoint=False):
                pts.append(complex(hyp.exp_map(x, r * x.imag * complex(math.cos(th), math.sin(th)))))
        pts = np.array(pts)
        d = np.abs(side_values(walls.angles, pts)).min(axis=0)
        return complex(pts[int(np.argmax(d))])

    def wall_widths(self, widths):
        return np.asarray(widths, dtype=float)[self.walls.arc_index]

    def collapse_amounts(self, z, widths):
        """Translation amount of each wall at each point, shape (walls, points).

        The outward level (away from x0) is -sigma * level; the strip occupies
        the outward levels [start, start + w]."""
        w = self.wall_widths(widths)[:, None]
        out = -self.sigma[:, None] * self.walls.level(z)
        start = np.where(self.sigma > 0, -1.0, 0.0)[:, None] * w
        return np.clip(out - start, 0.0, w)

    def local_collapse(self, z, widths):
        """Composite of the wall translations at z (before any deck reduction)."""
        m = self.collapse_amounts(np.array([z]), widths)[:, 0]
        idx = np.flatnonzero(m > 0)
        idx = idx[np.argsort(self.dist_x0[idx])]
        out = np.eye(2)
        for k in idx:
            out = out @ frame_translation(self.walls.frames[k], self.sigma[k] * m[k])
        return out

    def check_overlap(self, widths):
        """Raise StripsOverlap unless the strips near x0 are pairwise disjoint and
        avoid x0 (strip edges are pairwise disjoint geodesics, nested correctly)."""
        w = self.wall_widths(widths)
        if np.any((w > 0) & (self.dist_x0 <= w + 1e-12) & (self.sigma > 0)):
            raise StripsOverlap("the base point lies inside a strip")
        near = np.flatnonzero((self.dist_x0 < 3.0) & (w > 0))
        F = self.walls.frames[near]
        e = np.exp(w[near])
        far = np.stack([hyp.move_angles(F, hyp.ideal_angle(-e)), hyp.move_angles(F, hyp.ideal_angle(e))], -1)
        edges = np.concatenate([self.walls.angles[near], far])
        owner = np.concatenate([near, near])
        for a in range(len(edges)):
            hit = hyp.angles_cross(edges[a], edges) | hyp.angles_equal(edges[a], edges)
            hit &= owner != owner[a]
            if np.any(hit):
                raise StripsOverlap("strip edges cross")
        # an edge of one strip strictly inside another strip
        mids = hyp.mobius(F, 1j * np.sqrt(e))
        lev = self.walls.level(mids)[near]
        inside = (lev > 0) & (lev < w[near][:, None])
        np.fill_diagonal(inside, False)
        if np.any(inside):
            raise StripsOverlap("strips overlap")


def strip_system(surface, system: WeightedArcSystem) -> StripSystem:
    model = surface if isinstance(surface, SurfaceModel) else SurfaceModel(surface)
    return StripSystem(model, system.arcs, system.weights)


def macro_strip(ss: StripSystem, widths=None, scale: float = 1.0) -> Representation:
    """Holonomy after deleting strips of the given widths (default: scale times
    the weights) and regluing; each generator is post-composed with the wall
    translations met between x0 and j(gen) x0."""
    widths = ss.weights * scale if widths is None else np.asarray(widths, dtype=float)
    if np.any(widths < 0):
        raise StripsOverlap("strip widths must be nonnegative")
    ss.check_overlap(widths)
    return signed_macro(ss, widths)


def signed_macro(ss: StripSystem, widths) -> Representation:
    """Holonomy with signed widths: negative widths insert strips instead."""
    widths = np.asarray(widths, dtype=float)
    sgn = np.sign(ss.wall_widths(widths))
    gens = []
    for g in ss.model.rep.generators:
        z = complex(hyp.mobius(g.matrix, ss.x0))
        m = ss.collapse_amounts(np.array([z]), np.abs(widths))[:, 0]
        idx = np.flatnonzero(m > 0)
        idx = idx[np.argsort(ss.dist_x0[idx])]
        T = np.eye(2)
        for k in idx:
            T = T @ frame_translation(ss.walls.frames[k], sgn[k] * ss.sigma[k] * m[k])
        gens.append(GroupElement.from_matrix(T @ g.matrix))
    return Representation(gens)


def macro_family(ss: StripSystem, weights=None):
    """s -> holonomy with widths s * weights."""
    weights = ss.weights if weights is None else np.asarray(weights, dtype=float)
    return lambda s: signed_macro(ss, s * weights)


def strip_cocycle(ss: StripSystem, weights=None) -> Cocycle:
    """Infinitesimal strip deformation: for each generator, the sum over walls
    between x0 and j(gen) x0 of weight times the unit translation towards x0."""
    weights = ss.weights if weights is None else np.asarray(weights, dtype=float)
    t = ss.wall_widths(weights)
    vals = []
    for g in ss.model.rep.generators:
        lev = -ss.sigma * ss.walls.level(complex(hyp.mobius(g.matrix, ss.x0)))[:, 0]
        sep = lev > 0
        vals.append(AlgebraElement.from_matrix(np.einsum("k,kij->ij", t * sep, ss.K)))
    return Cocycle(ss.model.rep, vals)


def collapse_map(ss: StripSystem, widths=None):
    """The 1-Lipschitz (j, rho)-equivariant strip-collapse map, with rho.

    Points are first reduced into the ping-pong domain: p = j(g) q, and
    f(p) = rho(g) f_loc(q)."""
    widths = ss.weights if widths is None else np.asarray(widths, dtype=float)
    rho = macro_strip(ss, widths)
    hp = ss.model.surface.certificate.halfplanes
    gens = {x: ss.model.rep.matrix(Word((x,))) for x in hp}
    rgens = {x: rho.matrix(Word((x,))) for x in hp}

    def f(z):
        z = complex(z)
        R = np.eye(2)
        for _ in range(200):
            for x, h in hp.items():
                if h.contains(z):
                    z = complex(hyp.mobius(hyp.inverse(gens[x]), z))
                    R = R @ rgens[x]
                    break
            else:
                break
        return complex(hyp.mobius(R @ ss.local_collapse(z, widths), z))
    return f, rho


# ---------------------------------------------------------------------------
# Strip map and its inversion

CLASS_BASIS = (Word.parse("a"), Word.parse("b"), Word.parse("ab"))


def class_vector(u: Cocycle) -> np.ndarray:
    """Coordinates of [u] in H^1: dlambda on the words a, b, ab."""
    return np.array([dlambda(u.base, u, w) for w in CLASS_BASIS])


def projectivize(v, tol=1e-14) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n <= tol:
        raise ValueError("zero class has no projective image")
    v = v / n
    first = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
    return -v if first > 0 else v


def strip_map(ss: StripSystem, weights=None, require_filling: bool = True) -> np.ndarray:
    """Projective class of the strip cocycle of a weighted filling system."""
    weights = ss.weights if weights is None else np.asarray(weights, dtype=float)
    if require_filling:
        support = [a for a, t in zip(ss.arcs, weights) if t > 0]
        if not make_system(ss.model, support).fills:
            raise NotFilling("the weighted arcs do not cut the surface into disks")
    return projectivize(class_vector(strip_cocycle(ss, weights)))


@dataclass(frozen=True)
class InversionResult:
    arcs: tuple
    weights: tuple  # normalized to sum 1
    residual: float  # distance between projective classes
    candidates: tuple  # (arc labels, weights) of every nonnegative solution

    def to_json(self):
        return {"arcs": [a.to_json() for a in self.arcs], "weights": list(self.weights),
                "residual": self.residual,
                "candidates": [{"arcs": list(c), "weights": list(w)} for c, w in self.candidates]}


class StripAtlas:
    """Top-dimensional filling arc systems of a surface with their class matrices."""

    def __init__(self, model: SurfaceModel, max_word: int = 2):
        self.model = model
        self.arcs, self.systems = enumerate_arc_systems(model, max_word)
        top = -3 * model.euler_characteristic
        self.top = [s for s in self.systems if s.fills and len(s.arcs) == top]
        self.strips = [StripSystem(model, s.arcs) for s in self.top]
        self.matrices = []
        for ss in self.strips:
            cols = [class_vector(strip_cocycle(ss, np.eye(len(ss.arcs))[i])) for i in range(len(ss.arcs))]
            self.matrices.append(np.array(cols).T)

    def find(self, labels) -> StripSystem:
        for ss in self.strips:
            if {a.label for a in ss.arcs} == set(labels):
                return ss
        raise KeyError(labels)


def invert_strip_map(atlas: StripAtlas, u: Cocycle, tol: float = 1e-9, L: int = 6) -> InversionResult:
    """Weighted filling arc system whose strip cocycle has the class of u."""
    report = admissibility_test(u.base, u, L)
    if report.verdict != "certified-negative-slope":
        raise NotAdmissible(f"admissibility test verdict: {report.verdict}")
    v = class_vector(u)
    sols, patterns = [], []
    for ss, M in zip(atlas.strips, atlas.matrices):
        t = np.linalg.solve(M, v)
        patterns.append((tuple(a.label for a in ss.arcs), tuple(float(x) for x in t)))
        if np.all(t >= -tol * np.abs(t).max()):
            t = np.where(t > tol * np.abs(t).max(), t, 0.0)
            sols.append((ss, t / t.sum()))
    cands = tuple((tuple(a.label for a in ss.arcs), tuple(float(x) for x in t)) for ss, t in sols)
    if not sols:
        raise NoPositiveSolution("no simplex contains the class (admissible by the word test, "
                                 "so the arc enumeration bound is too small)", candidates=patterns)
    supports = {frozenset(a.label for a, x in zip(ss.arcs, t) if x > 0) for ss, t in sols}
    if len(supports) > 1:
        raise NoPositiveSolution("several distinct positive solutions", candidates=cands)
    ss, t = sols[0]
    keep = [i for i in range(len(t)) if t[i] > 0]
    arcs = tuple(ss.arcs[i] for i in keep)
    w = t[keep]
    res = float(np.linalg.norm(projectivize(atlas.matrices[atlas.strips.index(ss)] @ t) - projectivize(v)))
    return InversionResult(arcs, tuple(float(x) for x in w), res, cands)

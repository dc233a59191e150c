"""Convex-cocompact rank-2 Fuchsian groups with ping-pong certificates.

Two surfaces are supported: the pair of pants (built by reflecting a
right-angled hexagon in its seams) and the one-holed torus (built from trace
coordinates, certified by tilted lines through the crossing point of the
generator axes, with isometric circles as a fallback).
A certificate is four pairwise disjoint open half-planes D[x], one per letter
x in {a, A, b, B}, with g_x mapping the complement of D[-x] onto the closure
of D[x].
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import hyperbolic as hyp
from .errors import NotPingPong
from .lie import GroupElement, classify, IsometryClass
from .reps import Representation
from .words import Word, cyclically_reduced_words


@dataclass(frozen=True)
class HalfPlane:
    """Open half-plane to the left of an oriented geodesic."""

    geo: tuple

    def contains(self, z) -> np.ndarray:
        return hyp.signed_side(self.geo, z) > 0

    def depth(self, z):
        return hyp.signed_side(self.geo, z)

    @classmethod
    def away_from(cls, geo, z) -> HalfPlane:
        """The side of geo not containing z."""
        if hyp.signed_side(geo, z) > 0:
            geo = (geo[1], geo[0])
        return cls(tuple(geo))


@dataclass(frozen=True)
class PingPongCertificate:
    halfplanes: dict  # letter (+1, -1, +2, -2) -> HalfPlane
    inside: complex  # a point outside all four half-planes
    margin: float  # least distance between two boundary geodesics

    def to_json(self):
        names = {1: "a", -1: "A", 2: "b", -2: "B"}
        return {
            "halfplanes": {names[k]: [_json_end(x) for x in h.geo] for k, h in self.halfplanes.items()},
            "margin": self.margin,
        }


def _json_end(x):
    return "inf" if np.isinf(x) else float(x)


@dataclass(frozen=True)
class HexagonData:
    """Right-angled hexagon of the pants: boundary axes and seams."""

    axes: dict  # 'A', 'B', 'C' -> geodesic
    seams: dict  # 'AB', 'BC', 'CA' -> geodesic
    seam_lengths: dict


@dataclass(frozen=True)
class SchottkySurface:
    kind: str
    lengths: tuple
    rep: Representation
    certificate: PingPongCertificate
    boundary_words: tuple
    hexagon: HexagonData | None = field(default=None)

    def to_json(self):
        return {
            "kind": self.kind,
            "lengths": list(self.lengths),
            "representation": self.rep.to_json(),
            "certificate": self.certificate.to_json(),
            "boundary_words": [str(w) for w in self.boundary_words],
        }


def _geodesic_distance(g1, g2):
    """Distance between two geodesics (0 if they meet or share an endpoint)."""
    m = hyp.standardizer(g1)
    x, y = hyp.move_geodesic(m, g2)
    if np.isinf(x) or np.isinf(y) or x == 0 or y == 0 or (x < 0) != (y < 0):
        return 0.0
    p, q = hyp.common_perpendicular(g1, g2)
    return float(hyp.dist(p, q))


def _halfplanes_disjoint(h1: HalfPlane, h2: HalfPlane) -> bool:
    """Two half-planes with disjoint boundary geodesics are disjoint iff
    neither boundary lies inside the other half-plane."""
    if _geodesic_distance(h1.geo, h2.geo) <= 0:
        return False
    f1, f2 = hyp.common_perpendicular(h1.geo, h2.geo)
    return not h1.contains(f2) and not h2.contains(f1)


def verify_certificate(rep: Representation, halfplanes: dict, inside: complex, tol: float = 1e-9) -> float:
    """Check the ping-pong conditions; return the margin or raise NotPingPong."""
    keys = list(halfplanes)
    for k1, k2 in itertools.combinations(keys, 2):
        if not _halfplanes_disjoint(halfplanes[k1], halfplanes[k2]):
            raise NotPingPong(f"half-planes {k1} and {k2} overlap")
    for x in keys:
        if any(halfplanes[k].contains(inside) for k in keys):
            raise NotPingPong("reference point lies in a half-plane")
        g = rep.matrix(Word((x,)))
        src, dst = halfplanes[-x], halfplanes[x]
        if not hyp.same_geodesic(hyp.move_geodesic(g, src.geo), dst.geo, tol):
            raise NotPingPong(f"generator {x} does not pair its sides")
        if not dst.contains(hyp.mobius(g, inside)):
            raise NotPingPong(f"generator {x} does not map inward")
    return min(_geodesic_distance(halfplanes[k1].geo, halfplanes[k2].geo)
               for k1, k2 in itertools.combinations(keys, 2))


# ---------------------------------------------------------------------------
# Pair of pants

def hexagon_seam(alpha, beta, gamma):
    """Length of the seam between sides alpha, beta (opposite to gamma)."""
    c = (math.cosh(gamma) + math.cosh(alpha) * math.cosh(beta)) / (math.sinh(alpha) * math.sinh(beta))
    return math.acosh(c)


def _perpendicular_at(z, along):
    """Geodesic through z perpendicular to the direction ``along``."""
    return hyp.geodesic_through(z, 1j * along)


def pants_hexagon(lengths) -> HexagonData:
    la, lb, lc = lengths
    al, be, ga = la / 2, lb / 2, lc / 2
    d_ab = hexagon_seam(al, be, ga)
    d_ca = hexagon_seam(ga, al, be)
    axis_a = (0.0, np.inf)
    seam_ab = (-1.0, 1.0)
    # B is perpendicular to the unit circle at distance d_ab from i, to the right
    qb = complex(hyp.exp_map(1j, d_ab))
    axis_b = _perpendicular_at(qb, -hyp.log_map(qb, 1j))
    # CA seam is perpendicular to A at height e^alpha
    top = 1j * math.exp(al)
    seam_ca = (-math.exp(al), math.exp(al))
    qc = complex(hyp.exp_map(top, d_ca * top.imag))
    axis_c = _perpendicular_at(qc, -hyp.log_map(qc, top))
    fb, fc = hyp.common_perpendicular(axis_b, axis_c)
    seam_bc = hyp.geodesic_through(fb, hyp.log_map(fb, fc))
    return HexagonData(
        axes={"A": axis_a, "B": axis_b, "C": axis_c},
        seams={"AB": seam_ab, "BC": seam_bc, "CA": seam_ca},
        seam_lengths={"AB": d_ab, "BC": float(hyp.dist(fb, fc)), "CA": d_ca},
    )


def pants(lengths=(2.0, 2.0, 2.0)) -> SchottkySurface:
    """Pair of pants with boundary lengths (l_a, l_b, l_ab)."""
    if min(lengths) <= 0:
        raise NotPingPong("boundary lengths must be positive")
    hexa = pants_hexagon(lengths)
    r_ab = hyp.reflection_matrix(hexa.seams["AB"])
    r_bc = hyp.reflection_matrix(hexa.seams["BC"])
    r_ca = hyp.reflection_matrix(hexa.seams["CA"])
    a = GroupElement.from_matrix(r_ca @ r_ab)
    b = GroupElement.from_matrix(r_ab @ r_bc)
    rep = Representation([a, b])
    # reference point: a hexagon interior point
    feet = [hyp.project_to_geodesic(hexa.axes[k], 1j) for k in "ABC"]
    inside = complex(hyp.from_hyperboloid(hyp.normalize_hyperboloid(
        sum(hyp.to_hyperboloid(f) for f in feet))))

    def refl(geo):
        return hyp.move_geodesic(r_ab, geo[::-1])  # z -> R conj(z) flips orientation

    hp = {
        1: HalfPlane.away_from(hexa.seams["CA"], inside),
        -1: HalfPlane.away_from(refl(hexa.seams["CA"]), inside),
        2: HalfPlane.away_from(refl(hexa.seams["BC"]), inside),
        -2: HalfPlane.away_from(hexa.seams["BC"], inside),
    }
    margin = verify_certificate(rep, hp, inside)
    cert = PingPongCertificate(hp, inside, margin)
    return SchottkySurface("pants", tuple(lengths), rep, cert,
                           (Word.parse("a"), Word.parse("b"), Word.parse("ab")), hexa)


# ---------------------------------------------------------------------------
# One-holed torus and generic pairs

def isometric_circle(m):
    """Geodesic bounded by the isometric circle |cz + d| = 1 of m."""
    c, d = m[1, 0], m[1, 1]
    if abs(c) < 1e-14:
        return None
    return (-d / c - 1 / abs(c), -d / c + 1 / abs(c))


def _isometric_certificate(rep: Representation):
    hp = {}
    top = 0.0
    for k in (1, 2):
        g = rep.generators[k - 1].matrix
        for sign in (1, -1):
            # D[x] is the disk bounded by the isometric circle of g_x^{-1}
            m = g if sign > 0 else hyp.inverse(g)
            circ = isometric_circle(hyp.inverse(m))
            if circ is None:
                return None
            lo, hi = circ
            hp[sign * k] = HalfPlane((hi, lo))  # left of (hi -> lo) is the disk
            top = max(top, hi - lo)
    inside = 1j * (2 * top + 1)
    try:
        margin = verify_certificate(rep, hp, inside)
    except NotPingPong:
        return None
    return PingPongCertificate(hp, inside, margin)


def _conjugate(rep: Representation, h: GroupElement) -> Representation:
    return Representation([h @ g @ h.inv() for g in rep.generators])


def axis_endpoints(m):
    """(repelling, attracting) fixed points of a hyperbolic matrix."""
    a, b, c, d = np.asarray(m, dtype=float).ravel()
    if a + d < 0:
        a, b, c, d = -a, -b, -c, -d
    if abs(c) < 1e-14:
        fixed = b / (d - a)
        return (fixed, np.inf) if a > d else (np.inf, fixed)
    disc = math.sqrt((d - a) ** 2 + 4 * b * c)
    r1, r2 = (a - d - disc) / (2 * c), (a - d + disc) / (2 * c)
    # attracting point has |derivative| = 1/|cz + d|^2 < 1
    if abs(c * r1 + d) > 1:
        return (r2, r1)
    return (r1, r2)


def _crossing(g1, g2):
    m = hyp.standardizer(g1)
    u, v = hyp.move_geodesic(m, g2)
    if np.isinf(u) or np.isinf(v) or u * v >= 0:
        return None
    return complex(hyp.mobius(hyp.inverse(m), 1j * math.sqrt(-u * v)))


def _tilted_certificate(rep: Representation, grid: int = 13):
    """Lines L, g(L) crossing each generator axis on either side of the axes'
    intersection point, with tilt angles found by grid search."""
    mats = [g.matrix for g in rep.generators]
    axes = [axis_endpoints(m) for m in mats]
    centre = _crossing(*axes)
    if centre is None:
        return None
    lines = []
    for m, ax in zip(mats, axes):
        ell = 2 * math.acosh(abs(np.trace(m)) / 2)
        fwd = hyp.unit_tangent(centre, _toward(ax[1], centre))
        base = complex(hyp.exp_map(centre, -0.5 * ell * fwd))
        lines.append((base, complex(hyp.unit_tangent(base, centre))))
    angles = np.linspace(0.1, math.pi - 0.1, grid)
    best = None
    for ta, tb in itertools.product(angles, angles):
        hp = {}
        for k, (base, t), th in ((1, lines[0], ta), (2, lines[1], tb)):
            L = hyp.geodesic_through(base, t * complex(math.cos(th), math.sin(th)))
            hp[-k] = HalfPlane.away_from(L, centre)
            hp[k] = HalfPlane.away_from(hyp.move_geodesic(mats[k - 1], L), centre)
        try:
            margin = verify_certificate(rep, hp, centre)
        except NotPingPong:
            continue
        if best is None or margin > best.margin:
            best = PingPongCertificate(hp, centre, margin)
    return best


def _toward(end, z):
    """A point of the half-plane far along the direction of an ideal endpoint."""
    if np.isinf(end):
        return z.real + 1j * (abs(z) + 1) * 1e6
    return end + 1e-9j


def certify(rep: Representation, grid: int = 12):
    """Find a ping-pong certificate for a rank-2 representation.

    Tries tilted lines through the crossing point of the generator axes first,
    then isometric circles after conjugating by s_chart(p) over a grid of p.
    Returns (possibly conjugated representation, certificate).
    """
    from .ads import s_chart
    from .lie import HPoint

    for k, g in enumerate(rep.generators):
        if classify(g) is not IsometryClass.HYPERBOLIC:
            raise NotPingPong(f"generator {k} is not hyperbolic")
    cert = _tilted_certificate(rep)
    if cert is not None:
        return rep, cert
    best = None
    for r in np.linspace(0.0, 3.0, grid):
        for th in np.linspace(0, 2 * math.pi, 2 * grid, endpoint=False):
            z = complex(hyp.exp_map(1j, r * complex(math.cos(th), math.sin(th))))
            h = s_chart(HPoint.from_complex(z))
            conj = _conjugate(rep, h.inv())
            cert = _isometric_certificate(conj)
            if cert is not None and (best is None or cert.margin > best[1].margin):
                best = (conj, cert)
            if r == 0.0:
                break
    if best is None:
        raise NotPingPong("no ping-pong certificate found")
    return best


def torus_from_traces(x, y, z) -> Representation:
    """a, b with tr a = x, tr b = y, tr ab = z (all > 2)."""
    lam = 0.5 * (x + math.sqrt(x * x - 4))
    p = (z - y / lam) / (lam - 1 / lam)
    s = y - p
    a = GroupElement(lam, 0.0, 0.0, 1 / lam)
    b = GroupElement(p, 1.0, p * s - 1, s)
    return Representation([a, b])


def one_holed_torus(lengths=(2.0, 2.0, 2.0)) -> SchottkySurface:
    """One-holed torus with translation lengths (l_a, l_b, l_ab)."""
    x, y, z = (2 * math.cosh(l / 2) for l in lengths)
    if x * x + y * y + z * z - x * y * z >= 0:
        raise NotPingPong("trace triple does not give a one-holed torus with a funnel")
    rep, cert = certify(torus_from_traces(x, y, z))
    return SchottkySurface("torus", tuple(lengths), rep, cert,
                           (Word.parse("a b A B"),))


def schottky_fuchsian(kind: str = "pants", lengths=(2.0, 2.0, 2.0), generators=None) -> SchottkySurface:
    """Rank-2 convex-cocompact Fuchsian group with a ping-pong certificate."""
    if kind == "pants":
        surf = pants(lengths)
    elif kind == "torus":
        surf = one_holed_torus(lengths)
    elif kind == "generators":
        rep, cert = certify(Representation(generators))
        lens = tuple(2 * math.acosh(abs(rep(Word.parse(w)).trace) / 2) for w in ("a", "b", "ab"))
        surf = SchottkySurface("generators", lens, rep, cert, ())
    else:
        raise ValueError(f"unknown surface kind {kind!r}")
    check_hyperbolic(surf.rep, 6)
    return surf


def check_hyperbolic(rep: Representation, max_len: int):
    for w in cyclically_reduced_words(rep.rank, max_len):
        if classify(rep(w)) is not IsometryClass.HYPERBOLIC:
            raise NotPingPong(f"word {w} is not hyperbolic")

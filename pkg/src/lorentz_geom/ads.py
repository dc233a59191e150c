"""PSL(2,R) as the interior of the quadric ad = bc in RP^3.

Lorentzian "distance" in its trace and cross-ratio forms, classification of
projective lines, the distinguished subsets S, J, K, A, C, T, the rescaled
flat limit near the identity, and data for the two overview figures.
"""

from __future__ import annotations

import cmath
import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import hyperbolic as hyp
from .errors import SamePoint
from .lie import (
    AlgebraElement,
    GroupElement,
    HPoint,
    IsometryClass,
    classify,
    exp_alg,
)

ZERO_TOL = 1e-10
K0 = GroupElement(0.0, -1.0, 1.0, 0.0)


@dataclass(frozen=True)
class ProjPoint:
    coords: tuple  # (a, b, c, d), unit norm, first nonzero entry positive

    @classmethod
    def from_vector(cls, v) -> ProjPoint:
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        nz = np.flatnonzero(np.abs(v) > 1e-15)
        if nz.size and v[nz[0]] < 0:
            v = -v
        return cls(tuple(float(x) for x in v))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coords)


class Kind(str, enum.Enum):
    REAL = "real"
    IMAGINARY = "imaginary"
    ZERO = "zero"


@dataclass(frozen=True)
class LorentzDistance:
    """delta as (kind, modulus); imaginary values live in [0, pi/2]."""

    kind: Kind
    value: float

    def as_complex(self) -> complex:
        return 1j * self.value if self.kind is Kind.IMAGINARY else complex(self.value)

    def to_json(self):
        return {"kind": self.kind.value, "value": self.value}


def _canonical_imaginary(phi: float) -> float:
    phi = math.fmod(abs(phi), math.pi)
    return min(phi, math.pi - phi)


def same_delta(x: LorentzDistance, y: LorentzDistance, tol: float) -> bool:
    """Kind equality plus value agreement (imaginary values mod pi and sign)."""
    if x.kind is not y.kind:
        return False
    if x.kind is Kind.IMAGINARY:
        d = abs(_canonical_imaginary(x.value) - _canonical_imaginary(y.value))
        return d <= tol
    return abs(x.value - y.value) <= tol


class LineClass(str, enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def embed(g: GroupElement) -> ProjPoint:
    return ProjPoint.from_vector([g.a, g.b, g.c, g.d])


def on_boundary(p: ProjPoint, tol: float = 1e-10) -> bool:
    a, b, c, d = p.coords
    return abs(a * d - b * c) < tol


def delta_trace(a: GroupElement, b: GroupElement, tol: float = ZERO_TOL) -> LorentzDistance:
    """arccosh(|tr(a^-1 b)| / 2) with arccosh(t) = i arccos(t) below 1."""
    m = a.inv() @ b
    t = 0.5 * abs(m.trace)
    if abs(t - 1.0) <= tol:
        return LorentzDistance(Kind.ZERO, 0.0)
    # tr^2 - 4 = (a - d)^2 + 4bc is free of cancellation near the identity,
    # where arccosh(1 + x) would lose half the digits
    q = (m.a - m.d) ** 2 + 4 * m.b * m.c
    if t > 1.0:
        return LorentzDistance(Kind.REAL, math.asinh(0.5 * math.sqrt(max(q, 0.0))))
    if t < 0.5:
        return LorentzDistance(Kind.IMAGINARY, _canonical_imaginary(math.acos(t)))
    return LorentzDistance(Kind.IMAGINARY, math.asin(min(1.0, 0.5 * math.sqrt(max(-q, 0.0)))))


def _line_quadratic(a: GroupElement, b: GroupElement):
    """Coefficients of s -> det(A + s B) along the projective line."""
    A = embed(a).vector
    B = embed(b).vector
    if np.allclose(A, B, atol=1e-13, rtol=0):
        raise SamePoint("the two points coincide; no line through them")
    alpha = A[0] * A[3] - A[1] * A[2]
    gamma = B[0] * B[3] - B[1] * B[2]
    beta = A[0] * B[3] + A[3] * B[0] - A[1] * B[2] - A[2] * B[1]
    return alpha, beta, gamma


def _discriminant(alpha, beta, gamma):
    """Discriminant scaled so it equals t^2 - 1 for t = |tr(a^-1 b)|/2."""
    return beta * beta / (4.0 * alpha * gamma) - 1.0


def delta_crossratio(a: GroupElement, b: GroupElement, tol: float = ZERO_TOL) -> LorentzDistance:
    """Half the log of the cross-ratio [a':a:b:b'] of the quadric intersections.

    The line is parametrized as A + sB, so a sits at s = 0 and b at s = inf;
    with the roots s1, s2 standing for a', b' the cross-ratio is s1/s2.
    """
    alpha, beta, gamma = _line_quadratic(a, b)
    disc = _discriminant(alpha, beta, gamma)
    if abs(disc) <= 2 * tol:
        return LorentzDistance(Kind.ZERO, 0.0)
    if disc > 0:
        # stable real roots of gamma s^2 + beta s + alpha
        q = -0.5 * (beta + math.copysign(math.sqrt(beta * beta - 4 * alpha * gamma), beta))
        s1, s2 = q / gamma, alpha / q
        ratio = s1 / s2 if abs(s1) > abs(s2) else s2 / s1
        return LorentzDistance(Kind.REAL, 0.5 * math.log(ratio))
    root = (-beta + cmath.sqrt(beta * beta - 4 * alpha * gamma)) / (2 * gamma)
    cr = root / root.conjugate()
    return LorentzDistance(Kind.IMAGINARY, _canonical_imaginary(0.5 * cmath.phase(cr)))


def classify_line(a: GroupElement, b: GroupElement, tol: float = ZERO_TOL) -> LineClass:
    """Two real quadric intersections: spacelike; none: timelike; one: lightlike."""
    disc = _discriminant(*_line_quadratic(a, b))
    if abs(disc) <= 2 * tol:
        return LineClass.LIGHTLIKE
    return LineClass.SPACELIKE if disc > 0 else LineClass.TIMELIKE


@dataclass(frozen=True)
class SubsetFlags:
    in_S: bool
    in_J: bool
    in_K: bool
    in_A: bool
    in_C: bool
    in_T: bool

    def to_json(self):
        return {k: v for k, v in self.__dict__.items()}


def subset_membership(g: GroupElement, tol: float = 1e-10) -> SubsetFlags:
    a, b, c, d = g.a, g.b, g.c, g.d
    return SubsetFlags(
        in_S=abs(b - c) <= tol,
        in_J=abs(a + d) <= tol,
        in_K=abs(a - d) <= tol and abs(b + c) <= tol,
        in_A=abs(b) <= tol and abs(c) <= tol,
        in_C=classify(g, tol) in (IsometryClass.PARABOLIC, IsometryClass.IDENTITY),
        in_T=abs(b) <= tol and abs(a - d) <= tol,
    )


def s_chart(p: HPoint) -> GroupElement:
    """The symmetric (transvection) element taking i to p."""
    v = complex(hyp.log_map(1j, p.z))
    # symmetric traceless [[a, b], [b, -a]] has Killing value 2b + 2ai at i
    return exp_alg(AlgebraElement(0.5 * v.imag, 0.5 * v.real, 0.5 * v.real))


def j_swap(g: GroupElement) -> GroupElement:
    return K0 @ g


@dataclass(frozen=True)
class FlatLimitReport:
    scaled: complex
    predicted: complex
    error: float
    t: float


def rescaled_limit(x: AlgebraElement, y: AlgebraElement, t: float) -> FlatLimitReport:
    """Compare delta(exp tX, exp tY)/t with sqrt(-det(Y - X))."""
    if not 0 < t <= 0.1:
        raise ValueError("t must lie in (0, 0.1]")
    d = delta_trace(exp_alg(t * x), exp_alg(t * y))
    scaled = d.as_complex() / t
    q = -(y - x).det
    predicted = complex(math.sqrt(q)) if q >= 0 else 1j * math.sqrt(-q)
    return FlatLimitReport(scaled, predicted, abs(scaled - predicted), t)


# ---------------------------------------------------------------------------
# Figure data

FIGURE_COLUMNS = (
    "a", "b", "c", "d", "x", "y", "z", "class",
    "in_S", "in_J", "in_K", "in_A", "in_C", "in_T", "at_infinity",
)


def chart_coordinates(g: GroupElement):
    """Affine chart with the identity at the origin and J at infinity.

    Returns ((x, y, z), at_infinity).  For traceless matrices the unit
    direction of the point at infinity is returned.
    """
    a, b, c, d = g.a, g.b, g.c, g.d
    v = np.array([a - d, b + c, b - c])
    tr = a + d
    if abs(tr) <= 1e-12:
        return tuple(v / np.linalg.norm(v)), True
    return tuple(v / tr), False


def sign_matrices():
    """All matrices with entries in {-1, 0, 1} and positive determinant,
    deduplicated projectively, in a deterministic order."""
    seen = []
    for entries in itertools.product((-1, 0, 1), repeat=4):
        a, b, c, d = entries
        if a * d - b * c <= 0:
            continue
        g = GroupElement(a, b, c, d)
        if any(g.isclose(h, 1e-12) for h in seen):
            continue
        seen.append(g)
    return seen


def figure_data():
    """Rows of the Figure-1 style point cloud, one per projective class."""
    rows = []
    for g in sign_matrices():
        (x, y, z), at_inf = chart_coordinates(g)
        flags = subset_membership(g)
        rows.append({
            "a": g.a, "b": g.b, "c": g.c, "d": g.d,
            "x": x, "y": y, "z": z,
            "class": classify(g).value,
            **flags.to_json(),
            "at_infinity": at_inf,
        })
    return rows


def quadric_samples(n: int = 24, height: float = 2.0):
    """Points of the one-sheeted hyperboloid x^2 + y^2 - z^2 = 1 (the chart
    image of the boundary quadric)."""
    pts = []
    for zz in np.linspace(-height, height, n):
        r = math.sqrt(1 + zz * zz)
        for th in np.linspace(0, 2 * math.pi, n, endpoint=False):
            pts.append((r * math.cos(th), r * math.sin(th), float(zz)))
    return pts


def cone_samples(n: int = 24, height: float = 2.0):
    """Points of the parabolic cone x^2 + y^2 = z^2 with vertex at Id."""
    pts = []
    for zz in np.linspace(-height, height, n):
        for th in np.linspace(0, 2 * math.pi, n, endpoint=False):
            pts.append((abs(zz) * math.cos(th), abs(zz) * math.sin(th), float(zz)))
    return pts


def figure_svg(rows, size: int = 480, view=(0.6, 0.35)) -> str:
    """Orthographic projection of the point cloud with quadric and cone."""
    az, el = view
    ca, sa, ce, se = math.cos(az), math.sin(az), math.cos(el), math.sin(el)

    def project(p):
        x, y, z = p
        u = ca * x - sa * y
        w = (sa * x + ca * y) * se + z * ce
        return size / 2 + u * size / 6, size / 2 - w * size / 6

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
        "<style>.quadric{fill:#bbb}.cone{fill:#e0a040}.elliptic{stroke:#1f4e9a}"
        ".parabolic{stroke:#c07000}.hyperbolic{stroke:#333}.identity{stroke:#c00}"
        ".at_infinity{stroke-dasharray:2,2}</style>",
    ]
    for cls, pts in (("quadric", quadric_samples()), ("cone", cone_samples())):
        for p in pts:
            u, w = project(p)
            out.append(f'<circle class="{cls}" cx="{u:.2f}" cy="{w:.2f}" r="0.8"/>')
    for row in rows:
        p = (row["x"], row["y"], row["z"])
        if row["at_infinity"]:
            p = tuple(2.5 * c for c in p)
        u, w = project(p)
        classes = [row["class"]] + [k for k in ("in_S", "in_J", "in_K", "in_A", "in_C", "in_T") if row[k]]
        if row["at_infinity"]:
            classes.append("at_infinity")
        out.append(
            f'<circle class="{" ".join(classes)}" cx="{u:.2f}" cy="{w:.2f}" r="4" fill="none" stroke-width="1.5"/>'
        )
    out.append("</svg>")
    return "\n".join(out)

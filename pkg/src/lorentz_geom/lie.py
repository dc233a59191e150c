"""PSL(2,R), its Lie algebra, the upper half-plane and Killing fields."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import hyperbolic as hyp
from .errors import NoPrincipalLog

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class GroupElement:
    """A projective 2x2 matrix of positive determinant.

    Stored with determinant 1 and trace >= 0; when the trace vanishes the
    representative with c > 0 is used (b > 0 if c = 0 as well).
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = (float(x) for x in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if not det > 0:
            raise ValueError(f"determinant must be positive, got {det}")
        s = math.sqrt(det)
        self._set(a / s, b / s, c / s, d / s)

    def _set(self, a, b, c, d):
        tr = a + d
        flip = tr < 0 if abs(tr) > 1e-15 else (c < 0 if c != 0 else b < 0)
        if flip:
            a, b, c, d = -a, -b, -c, -d
        for name, val in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, float(val) + 0.0)

    @classmethod
    def _unimodular(cls, m) -> GroupElement:
        """Wrap a product of det-1 matrices without rescaling.  For large
        entries ad - bc is pure cancellation noise, so dividing by its root
        would destroy an otherwise accurate matrix."""
        g = object.__new__(cls)
        g._set(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
        return g

    @classmethod
    def from_matrix(cls, m) -> GroupElement:
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> GroupElement:
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    def inv(self) -> GroupElement:
        return GroupElement._unimodular(np.array([[self.d, -self.b], [-self.c, self.a]]))

    def __matmul__(self, other: GroupElement) -> GroupElement:
        return GroupElement._unimodular(self.matrix @ other.matrix)

    __mul__ = __matmul__

    def __pow__(self, n: int) -> GroupElement:
        if n < 0:
            return self.inv() ** (-n)
        return GroupElement._unimodular(np.linalg.matrix_power(self.matrix, n))

    def isclose(self, other: GroupElement, tol: float = DEFAULT_TOL) -> bool:
        """Projective comparison, robust to the trace-zero tie-break."""
        m, n = self.matrix, other.matrix
        return bool(min(np.abs(m - n).max(), np.abs(m + n).max()) <= tol)

    def to_json(self):
        return self.matrix.tolist()


@dataclass(frozen=True)
class AlgebraElement:
    """Traceless matrix [[a, b], [c, -a]]; also a Killing field on H^2."""

    a: float
    b: float
    c: float

    @classmethod
    def from_matrix(cls, m) -> AlgebraElement:
        m = np.asarray(m, dtype=float)
        half = 0.5 * (m[0, 0] - m[1, 1])
        return cls(half, m[0, 1], m[1, 0])

    @classmethod
    def zero(cls) -> AlgebraElement:
        return cls(0.0, 0.0, 0.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, -self.a]])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @property
    def det(self) -> float:
        return -self.a * self.a - self.b * self.c

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self.a + other.a, self.b + other.b, self.c + other.c)

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self.a - other.a, self.b - other.b, self.c - other.c)

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(-self.a, -self.b, -self.c)

    def __mul__(self, s: float) -> AlgebraElement:
        return AlgebraElement(s * self.a, s * self.b, s * self.c)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def isclose(self, other: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.abs(self.vector - other.vector).max() <= tol)

    def field(self, z):
        """Killing field value(s) at complex point(s) z."""
        return -self.c * z * z + 2 * self.a * z + self.b

    def to_json(self):
        return self.matrix.tolist()


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"HPoint needs y > 0, got {self.y}")

    @classmethod
    def from_complex(cls, z) -> HPoint:
        return cls(float(np.real(z)), float(np.imag(z)))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def to_json(self):
        return [self.x, self.y]


BASEPOINT = HPoint(0.0, 1.0)


@dataclass(frozen=True)
class TangentVector:
    base: HPoint
    vx: float
    vy: float

    @property
    def v(self) -> complex:
        return complex(self.vx, self.vy)

    def norm(self) -> float:
        return math.hypot(self.vx, self.vy) / self.base.y


class IsometryClass(str, enum.Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"
    IDENTITY = "identity"


def moebius_apply(g: GroupElement, z: HPoint) -> HPoint:
    return HPoint.from_complex(hyp.mobius(g.matrix, z.z))


def hyp_dist(p: HPoint, q: HPoint) -> float:
    return float(hyp.dist(p.z, q.z))


def classify(g: GroupElement, tol: float = 1e-10) -> IsometryClass:
    if g.isclose(GroupElement.identity(), tol):
        return IsometryClass.IDENTITY
    t = abs(g.trace)
    if abs(t - 2.0) <= tol:
        return IsometryClass.PARABOLIC
    return IsometryClass.ELLIPTIC if t < 2.0 else IsometryClass.HYPERBOLIC


def translation_length(g: GroupElement) -> float:
    """2 arccosh(|tr|/2) for hyperbolic elements, 0 for everything else."""
    if classify(g) is not IsometryClass.HYPERBOLIC:
        return 0.0
    return 2.0 * math.acosh(abs(g.trace) / 2.0)


def mu(g: GroupElement) -> float:
    """Displacement of the basepoint i: cosh mu = |g|_F^2 / 2 for det g = 1.
    Exact for large displacements, where g.i has a tiny imaginary part."""
    return float(math.acosh(max(1.0, 0.5 * float(np.sum(g.matrix ** 2)))))


def _cosh_sinhc(q: float):
    """(cosh s, sinh(s)/s) for s = sqrt(q), continued to q < 0."""
    if abs(q) < 1e-8:
        return 1.0 + q / 2.0 + q * q / 24.0, 1.0 + q / 6.0 + q * q / 120.0
    if q > 0:
        s = math.sqrt(q)
        return math.cosh(s), math.sinh(s) / s
    w = math.sqrt(-q)
    return math.cos(w), math.sin(w) / w


def exp_alg(x: AlgebraElement) -> GroupElement:
    ch, shc = _cosh_sinhc(-x.det)
    return GroupElement.from_matrix(ch * np.eye(2) + shc * x.matrix)


def log_grp(g: GroupElement) -> AlgebraElement:
    """Principal logarithm; the inverse of :func:`exp_alg` on its image."""
    t = 0.5 * g.trace
    if abs(t) < 1e-14:
        raise NoPrincipalLog("rotation by pi has no principal logarithm")
    if t > 1.0:
        s = math.acosh(t)
        factor = s / math.sinh(s) if s > 1e-8 else 1.0
    elif t < 1.0:
        w = math.acos(t)
        factor = w / math.sin(w) if w > 1e-8 else 1.0
    else:
        factor = 1.0
    return AlgebraElement.from_matrix(factor * (g.matrix - t * np.eye(2)))


def adjoint(g: GroupElement, x: AlgebraElement) -> AlgebraElement:
    m = g.matrix
    return AlgebraElement.from_matrix(m @ x.matrix @ hyp.inverse(m))


def killing_eval(x: AlgebraElement, p: HPoint) -> TangentVector:
    v = complex(x.field(p.z))
    return TangentVector(p, v.real, v.imag)


def pushforward(g: GroupElement, v: TangentVector) -> TangentVector:
    base = moebius_apply(g, v.base)
    w = complex(hyp.push_vector(g.matrix, v.base.z, v.v))
    return TangentVector(base, w.real, w.imag)


def rotation(angle: float) -> GroupElement:
    """Counterclockwise rotation about i by ``angle``."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return GroupElement(c, s, -s, c)


def hyperbolic_diag(length: float) -> GroupElement:
    """Translation by ``length`` along the imaginary axis."""
    e = math.exp(length / 2)
    return GroupElement(e, 0.0, 0.0, 1.0 / e)

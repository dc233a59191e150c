"""Equivariant vector fields and their lipschitz constants.

A field is stored as a vectorized callable on complex points returning
tangent vectors in the half-plane chart.  The lipschitz quantity of a pair is
the first variation of d(exp_p(tY(p)), exp_q(tY(q))) at t = 0 divided by
d(p, q); Killing fields give 0 and c < 0 means every distance shrinks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import hyperbolic as hyp
from ..errors import CoincidentPoints
from ..lie import AlgebraElement, HPoint
from ..reps import Cocycle, Representation, coboundary


def _z(p):
    if isinstance(p, HPoint):
        return p.z
    return np.asarray(p, dtype=complex)


def geodesic_frames(p, q):
    """Unit tangents e_p at p towards q and e_q at q pointing away from p."""
    return hyp.unit_tangent(p, q), -hyp.unit_tangent(q, p)


def first_variation(p, q, Yp, Yq):
    """(<Y(q), e_q> - <Y(p), e_p>) / d(p, q), vectorized."""
    p, q = np.asarray(p, dtype=complex), np.asarray(q, dtype=complex)
    d = hyp.dist(p, q)
    ep, eq = geodesic_frames(p, q)
    return (hyp.inner(q, Yq, eq) - hyp.inner(p, Yp, ep)) / d


@dataclass
class EquivariantField:
    """A (j, u)-equivariant vector field with a lipschitz bound c."""

    j: Representation
    u: Cocycle
    kind: str
    evaluate: Callable = field(repr=False)
    c: float = float("nan")
    data: dict = field(default_factory=dict, repr=False)

    def __call__(self, z):
        return self.evaluate(np.asarray(z, dtype=complex))


def field_lipschitz_pair(Y: EquivariantField, p, q) -> float:
    p, q = _z(p), _z(q)
    if np.any(hyp.dist(p, q) <= 1e-14):
        raise CoincidentPoints("the two points coincide")
    out = first_variation(p, q, Y(np.atleast_1d(p)), Y(np.atleast_1d(q)))
    return float(out[0]) if np.ndim(p) == 0 else out


def flow_distance(Y: EquivariantField, p, q, t):
    """d(exp_p(t Y(p)), exp_q(t Y(q))), for finite-difference checks."""
    p, q = np.atleast_1d(_z(p)), np.atleast_1d(_z(q))
    return hyp.dist(hyp.exp_map(p, t * Y(p)), hyp.exp_map(q, t * Y(q)))


def killing_field(j: Representation, X: AlgebraElement) -> EquivariantField:
    """The Killing field of X, equivariant for the coboundary of X."""
    return EquivariantField(j, coboundary(j, X), "killing", lambda z: X.field(z), 0.0, {"X": X})


def radial_field(j: Representation, p0, squared: bool = True) -> EquivariantField:
    """-grad of d(., p0)^2 / 2 (lipschitz -1 or less), or the unit field
    -grad d(., p0) when ``squared`` is False.  Not equivariant unless j is
    trivial; used as a model case for the solvers."""
    p0 = complex(_z(p0))

    def ev(z):
        v = hyp.log_map(z, p0)
        if squared:
            return v
        n = hyp.vnorm(z, v)
        return np.where(n > 0, v / np.where(n > 0, n, 1), 0)
    u = Cocycle(j, [AlgebraElement.zero()] * j.rank)
    return EquivariantField(j, u, "radial", ev, -1.0 if squared else 0.0, {"p0": p0})


def sum_field(Y1: EquivariantField, Y2: EquivariantField) -> EquivariantField:
    return EquivariantField(Y1.j, Y1.u + Y2.u, "sum", lambda z: Y1(z) + Y2(z),
                            Y1.c + Y2.c if np.isfinite(Y1.c + Y2.c) else float("nan"))


def sampled_field_bound(Y: EquivariantField, p, q) -> float:
    """max of the pair lipschitz quantity over sampled pairs."""
    return float(np.max(first_variation(p, q, Y(p), Y(q))))

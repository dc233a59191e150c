"""Representations, j-cocycles and the three group structures on G x G.

G1 = G x G acting on G by (g, h).x = g x h^-1, G2 = G x| G acting by
(alpha, a).x = alpha a x a^-1, and the rescaled G' = g x| G acting on g by
(A, a).X = A + Ad(a) X.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import hyperbolic as hyp
from .errors import BadIndex
from .lie import AlgebraElement, GroupElement, adjoint, exp_alg, log_grp
from .words import Word


@dataclass(frozen=True)
class Representation:
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))

    @property
    def rank(self) -> int:
        return len(self.generators)

    def __call__(self, w: Word) -> GroupElement:
        return eval_rep(self, w)

    def matrix(self, w: Word) -> np.ndarray:
        """det-1 matrix of w (sign is whatever the product gives)."""
        m = np.eye(2)
        for x in w.letters:
            k = abs(x) - 1
            if k >= self.rank:
                raise BadIndex(f"generator {k} out of range for rank {self.rank}")
            g = self.generators[k].matrix
            m = m @ (g if x > 0 else hyp.inverse(g))
        return m

    def to_json(self):
        return {"rank": self.rank, "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, obj) -> Representation:
        gens = tuple(GroupElement.from_matrix(m) for m in obj["generators"])
        if "rank" in obj and obj["rank"] != len(gens):
            raise ValueError("rank does not match the number of generators")
        return cls(gens)


def eval_rep(rep: Representation, w: Word) -> GroupElement:
    return GroupElement.from_matrix(rep.matrix(w))


@dataclass(frozen=True)
class Cocycle:
    """Generator values of a j-cocycle; words are evaluated by the cocycle law."""

    base: Representation
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != self.base.rank:
            raise ValueError("cocycle and base representation ranks differ")

    @property
    def rank(self) -> int:
        return self.base.rank

    def __call__(self, w: Word) -> AlgebraElement:
        return eval_cocycle(self, w)

    def __add__(self, other: Cocycle) -> Cocycle:
        return Cocycle(self.base, [x + y for x, y in zip(self.values, other.values)])

    def __neg__(self) -> Cocycle:
        return Cocycle(self.base, [-x for x in self.values])

    def __mul__(self, s: float) -> Cocycle:
        return Cocycle(self.base, [s * x for x in self.values])

    __rmul__ = __mul__

    def to_json(self):
        return {"rank": self.rank, "base": self.base.to_json(),
                "values": [x.to_json() for x in self.values]}

    @classmethod
    def from_json(cls, obj) -> Cocycle:
        base = Representation.from_json(obj["base"])
        return cls(base, [AlgebraElement.from_matrix(m) for m in obj["values"]])


def cocycle_matrices(u: Cocycle, w: Word):
    """(u(w), j(w)) as matrices, accumulated with the G' product law."""
    U = np.zeros((2, 2))
    J = np.eye(2)
    for x in w.letters:
        k = abs(x) - 1
        if k >= u.rank:
            raise BadIndex(f"generator {k} out of range for rank {u.rank}")
        g = u.base.generators[k].matrix
        X = u.values[k].matrix
        if x < 0:
            g = hyp.inverse(g)
            X = -g @ X @ hyp.inverse(g)  # u(g^-1) = -Ad(g^-1) u(g)
        U = U + J @ X @ hyp.inverse(J)
        J = J @ g
    return U, J


def eval_cocycle(u: Cocycle, w: Word) -> AlgebraElement:
    return AlgebraElement.from_matrix(cocycle_matrices(u, w)[0])


def zero_cocycle(j: Representation) -> Cocycle:
    return Cocycle(j, [AlgebraElement.zero()] * j.rank)


def coboundary(j: Representation, x: AlgebraElement) -> Cocycle:
    """u(g) = X - Ad(j(g)) X."""
    return Cocycle(j, [x - adjoint(g, x) for g in j.generators])


# ---------------------------------------------------------------------------
# Group structures

def semidirect_mul(p, q):
    """(alpha, a)(beta, b) = (alpha a beta a^-1, ab) in G2."""
    (al, a), (be, b) = p, q
    return (al @ a @ be @ a.inv(), a @ b)


def direct_mul(p, q):
    """Componentwise product in G1 = G x G."""
    return (p[0] @ q[0], p[1] @ q[1])


def phi(p):
    """Isomorphism G2 -> G1, (alpha, a) -> (alpha a, a)."""
    al, a = p
    return (al @ a, a)


def act1(p, x: GroupElement) -> GroupElement:
    g, h = p
    return g @ x @ h.inv()


def act2(p, x: GroupElement) -> GroupElement:
    al, a = p
    return al @ a @ x @ a.inv()


def affine_mul(p, q):
    """(A, a)(B, b) = (A + Ad(a) B, ab) in G'."""
    (A, a), (B, b) = p, q
    return (A + adjoint(a, B), a @ b)


def act_affine(p, x: AlgebraElement) -> AlgebraElement:
    A, a = p
    return A + adjoint(a, x)


# ---------------------------------------------------------------------------
# Derivative cocycles of smooth families

def _difference_quotient(family, j: Representation, h: float):
    rep = family(h)
    return [log_grp(g @ g0.inv()) * (1.0 / h) for g, g0 in zip(rep.generators, j.generators)]


def derivative_cocycle(family: Callable[[float], Representation], h: float = 1e-3) -> Cocycle:
    """u(gen) = d/dt log(rho_t(gen) j(gen)^-1) at 0, Richardson on steps h, h/2."""
    j = family(0.0)
    d1 = _difference_quotient(family, j, h)
    d2 = _difference_quotient(family, j, h / 2)
    return Cocycle(j, [2.0 * y - x for x, y in zip(d1, d2)])


def conjugation_family(j: Representation, x: AlgebraElement):
    """t -> exp(tX) j exp(-tX)."""
    def family(t):
        g = exp_alg(t * x)
        return Representation([g @ h @ g.inv() for h in j.generators])
    return family


def word_table(rep: Representation, max_len: int):
    """Identity plus all reduced words up to max_len, with det-1 matrices.

    Built breadth first so each matrix costs one product."""
    words = [Word()]
    mats = [np.eye(2)]
    gens = {}
    for k, g in enumerate(rep.generators):
        gens[k + 1] = g.matrix
        gens[-(k + 1)] = hyp.inverse(g.matrix)
    frontier = [(Word(), np.eye(2))]
    for _ in range(max_len):
        nxt = []
        for w, m in frontier:
            last = w.letters[-1] if w.letters else 0
            for x in sorted(gens, key=lambda x: (abs(x), x < 0)):
                if x == -last:
                    continue
                nxt.append((Word(w.letters + (x,)), m @ gens[x]))
        words.extend(w for w, _ in nxt)
        mats.extend(m for _, m in nxt)
        frontier = nxt
    return words, np.array(mats)


def cocycle_table(u: Cocycle, max_len: int):
    """Words up to max_len with stacked matrices (U, J) = (u(w), j(w)).

    Same word order as :func:`word_table`."""
    words = [Word()]
    Us, Js = [np.zeros((1, 2, 2))], [np.eye(2)[None]]
    gens = {}
    for k, (g, X) in enumerate(zip(u.base.generators, u.values)):
        gi = hyp.inverse(g.matrix)
        gens[k + 1] = (g.matrix, X.matrix)
        gens[-(k + 1)] = (gi, -gi @ X.matrix @ g.matrix)
    order = sorted(gens, key=lambda x: (abs(x), x < 0))
    fw, fU, fJ = [Word()], Us[0], Js[0]
    for _ in range(max_len):
        nw, nU, nJ = [], [], []
        for x in order:
            keep = [i for i, w in enumerate(fw) if not w.letters or w.letters[-1] != -x]
            g, X = gens[x]
            J = fJ[keep]
            nU.append(fU[keep] + J @ X @ hyp.inverse(J))
            nJ.append(J @ g)
            nw.extend(Word(fw[i].letters + (x,)) for i in keep)
        # restore the per-prefix order of word_table
        U, J = np.concatenate(nU), np.concatenate(nJ)
        perm = sorted(range(len(nw)), key=lambda i: _prefix_key(nw[i], order))
        fw = [nw[i] for i in perm]
        fU, fJ = U[perm], J[perm]
        words.extend(fw)
        Us.append(fU)
        Js.append(fJ)
    return words, np.concatenate(Us), np.concatenate(Js)


def _prefix_key(w: Word, order):
    pos = {x: i for i, x in enumerate(order)}
    return [pos[x] for x in w.letters]

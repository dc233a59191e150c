"""Piecewise-Killing equivariant fields on the pants mesh, optimized by LP.

Each vertex v carries a Killing field K_v; inside a triangle the field is the
hyperboloid-barycentric blend sum mu_i(p) K_i(p).  Vertices on a paired side
are tied, K_{g^-1 v} = Ad(g^-1)(K_v - u(g)), so the blend extends to a
(j, u)-equivariant field.  In a funnel the field is the blend at the foot
point plus kappa times -grad cosh(dist to the axis).  The lipschitz
constraints are linear in the free vertex fields, and scipy's HiGHS solver
minimizes the sampled constant c.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .. import hyperbolic as hyp
from ..errors import Infeasible
from ..lie import AlgebraElement, GroupElement, adjoint
from ..reps import Cocycle
from .domain import LETTER_ORDER, PantsDomain
from .fields import EquivariantField, first_variation, geodesic_frames


def killing_basis(z):
    """Values at z of the Killing fields of the basis (a, b, c) -> [[a, b], [c, -a]]."""
    z = np.asarray(z, dtype=complex)
    return np.stack([2 * z, np.ones_like(z), -z * z], axis=-1)


def ad_matrix(g) -> np.ndarray:
    """3x3 matrix of Ad(g) in (a, b, c) coordinates."""
    G = GroupElement.from_matrix(g)
    cols = [adjoint(G, AlgebraElement(*e)).vector for e in np.eye(3)]
    return np.array(cols).T


class VertexMap:
    """K_v = M_v theta_free + k_v for every vertex."""

    def __init__(self, dom: PantsDomain, u: Cocycle):
        nv = len(dom.vz)
        self.M = np.zeros((nv, 3, 3))
        self.k = np.zeros((nv, 3))
        self.src = np.where(dom.tie[:, 0] < 0, np.arange(nv), dom.tie[:, 0])
        for v in range(nv):
            s, letter = dom.tie[v]
            if s < 0:
                self.M[v] = np.eye(3)
            else:
                g = dom.mats[letter]
                Ad = ad_matrix(hyp.inverse(g))
                self.M[v] = Ad
                self.k[v] = -Ad @ u.values[letter - 1].vector
        self.col = dom.free_index[self.src]

    def values(self, theta_free):
        """(nv, 3) vertex fields for free parameters of shape (nfree, 3)."""
        return np.einsum("vij,vj->vi", self.M, theta_free[self.col]) + self.k


class FieldOperator:
    """Y(z) = A(z) theta + b(z) for theta = (free vertex fields, kappa)."""

    def __init__(self, dom: PantsDomain, u: Cocycle):
        self.dom = dom
        self.u = u
        self.vm = VertexMap(dom, u)
        self.nfree = len(dom.free)
        self.ntheta = 3 * self.nfree + 1

    def locate(self, z):
        """Reduce z and return everything needed to evaluate the field there."""
        dom = self.dom
        zr, steps = dom.reduce(z)
        J, U = dom.accumulate_cocycle(len(zr), steps, self.u)
        label, foot, s, normal = dom.funnel_split(zr)
        where = np.where(label >= 0, foot, zr)
        verts, mu = dom.barycentric(where)
        push = 1.0 / (J[:, 1, 0] * zr + J[:, 1, 1]) ** 2
        return dict(z=np.asarray(z, dtype=complex), zr=zr, J=J, U=U, s=s, normal=normal,
                    verts=verts, mu=mu, push=push)

    def const(self, loc):
        U = loc["U"]
        z = loc["z"]
        return -U[:, 1, 0] * z * z + 2 * U[:, 0, 0] * z + U[:, 0, 1]

    def matrix(self, loc):
        """Sparse complex matrix A with Y = A theta + b."""
        n = len(loc["zr"])
        e = killing_basis(loc["zr"]) * loc["push"][:, None]  # (n, 3)
        rows, cols, vals = [], [], []
        bconst = np.zeros(n, dtype=complex)
        for i in range(3):
            v = loc["verts"][:, i]
            w = loc["mu"][:, i][:, None] * e  # (n, 3)
            # w . (M_v theta_src + k_v)
            coef = np.einsum("nj,njk->nk", w, self.vm.M[v])  # (n, 3)
            bconst += np.einsum("nj,nj->n", w, self.vm.k[v])
            col = self.vm.col[v]
            for k in range(3):
                rows.append(np.arange(n))
                cols.append(3 * col + k)
                vals.append(coef[:, k])
        kap = -np.sinh(loc["s"]) * loc["normal"] * loc["push"]
        rows.append(np.arange(n))
        cols.append(np.full(n, self.ntheta - 1))
        vals.append(kap)
        A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(n, self.ntheta))
        return A, bconst + self.const(loc)

    def evaluator(self, theta):
        theta = np.asarray(theta, dtype=float)
        K = self.vm.values(theta[:-1].reshape(-1, 3))
        kappa = theta[-1]

        def ev(z):
            z = np.atleast_1d(np.asarray(z, dtype=complex))
            loc = self.locate(z)
            zr = loc["zr"]
            Kv = K[loc["verts"]]  # (n, 3, 3)
            Kmix = np.einsum("ni,nij->nj", loc["mu"], Kv)
            val = np.einsum("nj,nj->n", killing_basis(zr), Kmix)
            val = val - kappa * np.sinh(loc["s"]) * loc["normal"]
            return val * loc["push"] + self.const(loc)
        return ev


def pair_rows(op: FieldOperator, p, q):
    """Linear form (G, g) with lipschitz(p, q) = G theta + g."""
    Ap, bp = op.matrix(op.locate(p))
    Aq, bq = op.matrix(op.locate(q))
    ep, eq = geodesic_frames(p, q)
    d = hyp.dist(p, q)
    wp = np.conj(ep) / (p.imag ** 2 * d)
    wq = np.conj(eq) / (q.imag ** 2 * d)
    G = (sp.diags(wq) @ Aq - sp.diags(wp) @ Ap)
    g = (wq * bq - wp * bp).real
    return G.real.tocsr(), g


def _ring(p, r, n_dir, phase=0.0):
    """Pairs (p, exp_p(r e)) for n_dir unit directions e."""
    P, Q = [], []
    for k in range(n_dir):
        e = np.exp(1j * (phase + np.pi * k / n_dir)) * p.imag
        P.append(p)
        Q.append(hyp.exp_map(p, r * e))
    return np.concatenate(P), np.concatenate(Q)


def funnel_points(dom: PantsDomain, rng, n, depth):
    """Random points in the funnels of the domain, at distance <= depth."""
    out = []
    for name in ("A", "C", "B", "r(C)"):
        side = next(s for s in dom.sides if s.name == name)
        b = hyp.geodesic_point(side.start, side.end, rng.uniform(0, 1, n))
        nrm = 1j * hyp.unit_tangent(b, side.end)
        nrm = np.where(hyp.inner(b, nrm, -hyp.unit_tangent(b, dom.center)) > 0, nrm, -nrm)
        out.append(hyp.exp_map(b, rng.uniform(0.0, depth, n) * nrm))
    return np.concatenate(out)


def training_pairs(dom: PantsDomain, rng, n_random: int = 3000, funnel_depth: float = 2.0):
    """Mesh edges, short pairs in several directions at points of every
    triangle, random short pairs and funnel pairs."""
    vz = dom.vz
    e = dom.edges()
    P, Q = [vz[e[:, 0]]], [vz[e[:, 1]]]
    tri = vz[dom.simplices]
    Pt = hyp.to_hyperboloid(tri)
    for wts in ([1, 1, 1], [4, 1, 1], [1, 4, 1], [1, 1, 4]):
        c = hyp.from_hyperboloid(hyp.normalize_hyperboloid(np.einsum("i,nij->nj", np.array(wts, float), Pt)))
        a, b = _ring(c, 0.5 * dom.h, 4)
        P.append(a)
        Q.append(b)
    a, b = _ring(vz, 0.5 * dom.h, 4, 0.3)
    P.append(a)
    Q.append(b)
    p = dom.sample_points(n_random, rng)
    P.append(p)
    Q.append(hyp.exp_map(p, rng.uniform(0.05, 0.4, n_random) * p.imag
                         * np.exp(2j * np.pi * rng.uniform(size=n_random))))
    pf = funnel_points(dom, rng, n_random // 8, funnel_depth)
    P.append(pf)
    Q.append(hyp.exp_map(pf, rng.uniform(0.05, 0.4, len(pf)) * pf.imag
                         * np.exp(2j * np.pi * rng.uniform(size=len(pf)))))
    P, Q = np.concatenate(P), np.concatenate(Q)
    keep = hyp.dist(P, Q) > 1e-6
    return P[keep], Q[keep]


def test_pairs(dom: PantsDomain, rng, n: int, funnel_depth: float = 2.0):
    """Fresh random short pairs in the core, its collar and the funnels."""
    p = np.concatenate([dom.sample_points(n, rng), funnel_points(dom, rng, n // 8, funnel_depth)])
    p = hyp.exp_map(p, rng.uniform(0, 0.3, len(p)) * p.imag * np.exp(2j * np.pi * rng.uniform(size=len(p))))
    q = hyp.exp_map(p, rng.uniform(0.01, 0.4, len(p)) * p.imag * np.exp(2j * np.pi * rng.uniform(size=len(p))))
    return p, q


def _smoothness_rows(dom: PantsDomain, op: FieldOperator):
    """Rows D theta + d giving, per edge and coordinate, K_v - K_w in the
    Killing coordinates centered at the domain center."""
    e = dom.edges()
    Ad = ad_matrix(dom.center_map)
    vm = op.vm
    rows, cols, vals, const = [], [], [], []
    r = 0
    for v, w in e:
        for k in range(3):
            for vert, sgn in ((v, 1.0), (w, -1.0)):
                coef = sgn * (Ad @ vm.M[vert])[k]
                for j in range(3):
                    rows.append(r)
                    cols.append(3 * vm.col[vert] + j)
                    vals.append(coef[j])
            const.append((Ad @ (vm.k[v] - vm.k[w]))[k])
            r += 1
    D = sp.csr_matrix((vals, (rows, cols)), shape=(r, op.ntheta))
    return D, np.array(const)


def optimize_field(dom: PantsDomain, u: Cocycle, seed: int = 0, n_random: int = 3000,
                   margin: float = 0.5, rounds: int = 6, n_test: int = 6000,
                   kappa_max: float = 20.0):
    """Piecewise-Killing field with a negative sampled lipschitz constant.

    Stage 1 minimizes c over the training pairs.  Stage 2 keeps
    c <= margin * c_min and minimizes the L1 jump of vertex fields across
    edges.  Fresh test pairs violating the target are added and the stage 2
    problem is re-solved (cutting planes).  Returns (theta, c_target, op, log)."""
    rng = np.random.default_rng(seed)
    op = FieldOperator(dom, u)
    n = op.ntheta
    scale = max(np.linalg.norm([x.vector for x in u.values]), 1e-12)
    p, q = training_pairs(dom, rng, n_random)
    G, g = pair_rows(op, p, q)
    box = [(-100 * scale, 100 * scale)] * (n - 1) + [(0.0, kappa_max * scale)]
    # stage 1
    A = sp.hstack([G, -np.ones((G.shape[0], 1))]).tocsr()
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=A, b_ub=-g, bounds=box + [(None, None)], method="highs")
    if res.status != 0:
        raise Infeasible(f"lipschitz LP failed: {res.message}")
    c_min = float(res.x[-1])
    if c_min >= 0:
        raise Infeasible(f"no field with negative lipschitz constant on the mesh (c = {c_min:.3g})")
    target = margin * c_min
    # stage 2: variables (theta, s) with |D theta + d| <= s
    Dm, dv = _smoothness_rows(dom, op)
    m = Dm.shape[0]
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    I = sp.identity(m, format="csr")
    log = [{"round": 0, "pairs": len(g), "c_min": c_min}]
    for rnd in range(rounds):
        A = sp.vstack([sp.hstack([G, sp.csr_matrix((G.shape[0], m))]),
                       sp.hstack([Dm, -I]), sp.hstack([-Dm, -I])]).tocsr()
        b = np.concatenate([target - g, -dv, dv])
        res = linprog(cost, A_ub=A, b_ub=b, bounds=box + [(0, None)] * m, method="highs")
        if res.status != 0:
            raise Infeasible(f"smoothing LP failed: {res.message}")
        theta = res.x[:n]
        tp, tq = test_pairs(dom, rng, n_test)
        Gt, gt = pair_rows(op, tp, tq)
        Lt = Gt @ theta + gt
        worst = float(Lt.max())
        log.append({"round": rnd + 1, "pairs": len(g), "test_max": worst})
        bad = np.flatnonzero(Lt > 0.5 * target)
        if len(bad) == 0:
            break
        G = sp.vstack([G, Gt[bad]]).tocsr()
        g = np.concatenate([g, gt[bad]])
    return theta, target, op, log


def mesh_field(dom: PantsDomain, u: Cocycle, seed: int = 0, **kw) -> EquivariantField:
    theta, target, op, log = optimize_field(dom, u, seed, **kw)
    ev = op.evaluator(theta)
    c = max(target, log[-1]["test_max"])
    return EquivariantField(u.base, u, "piecewise_killing", ev, c,
                            {"theta": theta, "operator": op, "log": log})

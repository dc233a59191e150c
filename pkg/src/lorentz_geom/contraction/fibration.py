"""Fibrations of G and of its Lie algebra given by contracting equivariant
maps and fields.

For a C-Lipschitz map f with C < 1, g^-1 o f has exactly one fixed point,
and g -> that point is a fibration of G whose fibers {g : g p = f(p)} are
permuted equivariantly.  For a field Y with lipschitz constant c < 0, the
field Y - X has exactly one zero, giving the infinitesimal analogue on the
Lie algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import hyperbolic as hyp
from ..errors import MaxIterations, NoContraction
from ..lie import AlgebraElement, GroupElement
from .fields import EquivariantField
from .maps import EquivariantMap

TOL = 1e-10
MAX_ITER = 10_000


@dataclass
class FibrationHandle:
    """A macro (map) or micro (field) fibration with solver settings."""

    source: object
    tol: float = TOL
    max_iter: int = MAX_ITER
    kind: str = field(init=False)

    def __post_init__(self):
        if isinstance(self.source, EquivariantMap):
            if not self.source.C < 1:
                raise NoContraction(f"map bound C = {self.source.C:.6g} is not < 1")
            self.kind = "macro"
        elif isinstance(self.source, EquivariantField):
            if not self.source.c < 0:
                raise NoContraction(f"field bound c = {self.source.c:.6g} is not < 0")
            self.kind = "micro"
        else:
            raise TypeError("fibrations are built from an EquivariantMap or EquivariantField")


def _mats(g):
    if isinstance(g, GroupElement):
        return g.matrix[None]
    g = np.asarray(g, dtype=float)
    return g[None] if g.ndim == 2 else g


def _algs(X):
    if isinstance(X, AlgebraElement):
        return X.vector[None]
    X = np.asarray(X, dtype=float)
    return X[None] if X.ndim == 1 else X


def killing_values(V, z):
    """Values at z of the Killing fields with coordinates V (n, 3)."""
    return V[:, 1] + 2 * V[:, 0] * z - V[:, 2] * z * z


# ---------------------------------------------------------------------------
# Macro

def _newton_fixed(F, p, tol, max_iter):
    """Newton's method for F(p) = p in the chart (x, log y); returns (p, steps)."""
    steps = []
    for _ in range(max_iter):
        r = F(p)
        step = hyp.dist(p, r)
        steps.append(step)
        if np.all(step < tol):
            return p, steps
        x, y = p.real, np.log(p.imag)
        h = 1e-7
        res = np.stack([r.real - x, np.log(r.imag) - y], axis=-1)
        J = np.empty(p.shape + (2, 2))
        for k, q in enumerate((p + h, p.real + 1j * p.imag * np.exp(h))):
            rq = F(q)
            xq, yq = q.real, np.log(q.imag)
            rr = np.stack([rq.real - xq, np.log(rq.imag) - yq], axis=-1)
            J[..., k] = (rr - res) / h
        d = np.linalg.solve(J, -res[..., None])[..., 0]
        p = (x + d[..., 0]) + 1j * np.exp(y + d[..., 1])
    raise MaxIterations("Newton fixed-point iteration did not converge")


def _chart_noise(z):
    """Hyperbolic size of a few roundoffs at z in the upper half-plane chart;
    far from i a step can never drop below it."""
    return 100 * np.finfo(float).eps * (1 + np.abs(z) ** 2) / z.imag


def fixed_points(G, f: EquivariantMap, tol: float = TOL, max_iter: int = MAX_ITER,
                 start=1j, method: str = "banach", history: bool = False):
    """Fixed points of g^-1 o f for a stack of group elements."""
    if not f.C < 1:
        raise NoContraction(f"map bound C = {f.C:.6g} is not < 1")
    G = _mats(G)
    Gi = hyp.inverse(G)
    p = np.broadcast_to(np.asarray(start, dtype=complex), G.shape[:1]).copy()

    def F(z):
        return hyp.mobius(Gi, f.evaluate(z))
    if method == "newton":
        p, steps = _newton_fixed(F, p, tol, min(max_iter, 100))
        return (p, np.array(steps)) if history else p
    if method != "banach":
        raise ValueError(f"unknown method {method!r}")
    active = np.arange(len(p))
    best = np.full(len(p), np.inf)
    stall = np.zeros(len(p), dtype=int)
    hist = []
    for _ in range(max_iter):
        new = hyp.mobius(Gi[active], f.evaluate(p[active]))
        step = hyp.dist(new, p[active])
        p[active] = new
        if history:
            hist.append(float(step.max()))
        # a step stuck below the roundoff floor for 20 rounds counts as converged
        better = step < best[active]
        best[active] = np.minimum(best[active], step)
        stall[active] = np.where(better, 0, stall[active] + 1)
        noisy = (step < _chart_noise(p[active])) & (stall[active] >= 20)
        active = active[(step >= tol) & ~noisy]
        if len(active) == 0:
            return (p, np.array(hist)) if history else p
    raise MaxIterations(f"{len(active)} fixed-point iterations did not converge")


def fixed_point(g, f: EquivariantMap, tol: float = TOL, max_iter: int = MAX_ITER, **kw) -> complex:
    """The unique fixed point of g^-1 o f (Banach iteration from i)."""
    out = fixed_points(g, f, tol, max_iter, **kw)
    if isinstance(out, tuple):
        return complex(out[0][0]), out[1]
    return complex(out[0])


def project_macro(F: FibrationHandle, g, **kw):
    """pi(g) = fixed point of g^-1 o f, for one element or a stack."""
    if F.kind != "macro":
        raise TypeError("macro projection needs a map fibration")
    out = fixed_points(g, F.source, F.tol, F.max_iter, **kw)
    return complex(out[0]) if isinstance(g, GroupElement) or np.ndim(g) == 2 else out


def macro_member(F: FibrationHandle, g, p, tol: float = 1e-8):
    """Residual d(g p, f(p)) and whether g lies in the fiber over p."""
    G = _mats(g)
    p = np.broadcast_to(np.asarray(p, dtype=complex), G.shape[:1])
    res = hyp.dist(hyp.mobius(G, p), F.source.evaluate(p))
    return res, res < tol


def element_through(p, q) -> np.ndarray:
    """An isometry taking p to q (the transvection along [p, q])."""
    return hyp._to_i(q) @ hyp.inverse(hyp._to_i(p))


# ---------------------------------------------------------------------------
# Micro

def zeros_of_field(X, Y: EquivariantField, tol: float = TOL, max_iter: int = MAX_ITER,
                   start=1j, newton: bool = True, check_ball: bool = True,
                   history: bool = False):
    """Zeros of Y - X by the damped flow p <- exp_p(eta (Y - X)(p)).

    eta = min(0.5, |c| / (2 |V|)), halved (and the step rejected) when the
    residual grows, grown again by 1.2 after accepted steps.  Each iteration
    first tries a damped Newton step (full, half, quarter), kept only when
    it lowers the residual by 10%; the flow step is the fallback.  Fields
    with a large rotational part make the plain flow spiral, which Newton
    avoids.  Returns (zeros, start residual radii)."""
    if not Y.c < 0:
        raise NoContraction(f"field bound c = {Y.c:.6g} is not < 0")
    V = _algs(X)
    n = len(V)
    p = np.broadcast_to(np.asarray(start, dtype=complex), (n,)).copy()
    c = abs(Y.c)

    def field_at(z, idx):
        return Y(z) - killing_values(V[idx], z)

    def scale(z, idx):
        # residuals are relative to |X(p)|: far from i both terms are large
        return 1.0 + hyp.vnorm(z, killing_values(V[idx], z))

    v = field_at(p, np.arange(n))
    norm = hyp.vnorm(p, v)
    p0, radius = p.copy(), norm / c
    eta = np.minimum(0.5, 0.5 * c / np.maximum(norm, 1e-300))
    active = np.flatnonzero(norm >= tol * scale(p, np.arange(n)))
    iters = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        if len(active) == 0:
            break
        a = active
        moved = np.zeros(len(a), dtype=bool)
        if newton:
            d = _newton_direction(lambda z, i=a: field_at(z, i), p[a])
            for frac in (1.0, 0.5, 0.25):
                todo = ~moved
                if not np.any(todo):
                    break
                q = p[a[todo]] + frac * d[todo]
                q = np.where(q.imag > 0, q, p[a[todo]])
                nq = hyp.vnorm(q, field_at(q, a[todo]))
                ok = nq < 0.9 * norm[a[todo]]
                idx = a[todo][ok]
                p[idx], norm[idx] = q[ok], nq[ok]
                moved[np.flatnonzero(todo)[ok]] = True
        b = a[~moved]
        if len(b):
            q = hyp.exp_map(p[b], eta[b] * field_at(p[b], b))
            nq = hyp.vnorm(q, field_at(q, b))
            ok = nq < norm[b]
            p[b[ok]], norm[b[ok]] = q[ok], nq[ok]
            eta[b[ok]] = np.minimum(eta[b[ok]] * 1.2, 0.5)
            eta[b[~ok]] *= 0.5
        iters[a] += 1
        active = a[norm[a] >= tol * scale(p[a], a)]
    else:
        raise MaxIterations(f"{len(active)} zero searches did not converge")
    if check_ball:
        far = hyp.dist(p0, p) > radius * (1 + 1e-9) + 1e-12
        if np.any(far):
            raise AssertionError("zero found outside the ball of radius |V(start)| / |c|")
    if history:
        return p, radius, iters
    return p, radius


def _newton_direction(V, p):
    """Newton step for V(p) = 0 in the half-plane chart (finite-difference Jacobian)."""
    h = 1e-7 * p.imag
    v = V(p)
    dx = (V(p + h) - v) / h
    dy = (V(p + 1j * h) - v) / h
    J = np.stack([np.stack([dx.real, dy.real], -1), np.stack([dx.imag, dy.imag], -1)], -2)
    rhs = np.stack([-v.real, -v.imag], -1)[..., None]
    det = np.linalg.det(J)
    J[np.abs(det) < 1e-300] = np.eye(2)
    d = np.linalg.solve(J, rhs)[..., 0]
    return d[:, 0] + 1j * d[:, 1]


def zero_of_field(X, Y: EquivariantField, tol: float = TOL, max_iter: int = MAX_ITER, **kw) -> complex:
    return complex(zeros_of_field(X, Y, tol, max_iter, **kw)[0][0])


def project_micro(F: FibrationHandle, X, **kw):
    """pi'(X) = zero of Y - X, for one element or a stack of (a, b, c) rows."""
    if F.kind != "micro":
        raise TypeError("micro projection needs a field fibration")
    p, _ = zeros_of_field(X, F.source, F.tol, F.max_iter, **kw)
    return complex(p[0]) if isinstance(X, AlgebraElement) or np.ndim(X) == 1 else p


def micro_member(F: FibrationHandle, X, p, tol: float = 1e-8):
    """Residual |X(p) - Y(p)| / (1 + |X(p)|) and whether X lies in the fiber over p."""
    V = _algs(X)
    p = np.broadcast_to(np.asarray(p, dtype=complex), (len(V),))
    xv = killing_values(V, p)
    res = hyp.vnorm(p, xv - F.source(p)) / (1 + hyp.vnorm(p, xv))
    return res, res < tol


def elliptic_generator(p) -> np.ndarray:
    """(a, b, c) of the unit-speed rotation field vanishing at p."""
    p = complex(p)
    m = hyp._to_i(p)
    R = np.array([[0.0, 0.5], [-0.5, 0.0]])
    M = m @ R @ hyp.inverse(m)
    return np.array([M[0, 0], M[0, 1], M[1, 0]])


def micro_fiber(X, p, ts) -> np.ndarray:
    """Points X + t E_p of the fiber through X over p."""
    X = _algs(X)[0]
    E = elliptic_generator(p)
    return X[None] + np.asarray(ts, dtype=float)[:, None] * E[None]


def collinearity(P) -> float:
    """Smallest singular value of three centered points of R^3 (0 iff collinear)."""
    P = np.asarray(P, dtype=float)
    Q = P - P.mean(axis=0)
    s = np.linalg.svd(Q, compute_uv=False)
    return float(s[1] / max(s[0], 1e-300))


# ---------------------------------------------------------------------------
# From the macro to the micro fibration

@dataclass(frozen=True)
class TransitionReport:
    ts: tuple
    displacement_gap: tuple  # max |(f_t(p) - p)/t - Y(p)|
    fiber_gap: tuple  # d(pi_t(exp tX), pi'(X))
    decreasing: bool
    rate_bound: float  # max fiber_gap / t

    def to_json(self):
        return {"t": list(self.ts), "displacement_gap": list(self.displacement_gap),
                "fiber_gap": list(self.fiber_gap), "decreasing": self.decreasing,
                "rate_bound": self.rate_bound}

    def rows(self):
        return [{"t": t, "displacement_gap": a, "fiber_gap": b}
                for t, a, b in zip(self.ts, self.displacement_gap, self.fiber_gap)]


def transition_fiber_check(maps, Y: EquivariantField, X, ts, points) -> TransitionReport:
    """Compare the t-family of maps with the field Y.

    ``maps(t)`` returns the (j, rho_t)-equivariant map f_t with its measured
    bound; the fixed points use Newton's method since C_t = 1 - O(t).  Reports
    max_p |(f_t(p) - p)/t - Y(p)| over the sample points and
    d(pi_t(exp(t X)), pi'(X)) for each t."""
    from ..lie import exp_alg
    X = X if isinstance(X, AlgebraElement) else AlgebraElement(*np.asarray(X, dtype=float))
    points = np.asarray(points, dtype=complex)
    target = zero_of_field(X, Y)
    Yp = Y(points)
    disp, fib = [], []
    for t in ts:
        f = maps(t)
        d = (f.evaluate(points) - points) / t - Yp
        disp.append(float(np.max(hyp.vnorm(points, d))))
        g = exp_alg(X * t).matrix
        p = fixed_point(g, f, method="newton", start=target)
        fib.append(float(hyp.dist(p, target)))
    dec = all(a >= b for a, b in zip(disp, disp[1:])) and all(a >= b for a, b in zip(fib, fib[1:]))
    rate = max(b / t for b, t in zip(fib, ts))
    return TransitionReport(tuple(ts), tuple(disp), tuple(fib), dec, rate)

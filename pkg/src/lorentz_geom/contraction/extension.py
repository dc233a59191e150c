"""One-point Lipschitz extension and the comparison inequality behind it."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .. import hyperbolic as hyp
from ..errors import Infeasible


def _ratios(q, targets, weights):
    return hyp.dist(q, targets) / weights


def kirszbraun_extend_point(constraints, p, C0: float, eps: float = 1e-12,
                            n_sub: int = 400):
    """Image q of p minimizing max_i d(q, q_i) / max(d(p, p_i), eps).

    The objective is geodesically convex; geodesic subgradient steps towards
    the worst target give a start that Nelder-Mead refines in the chart
    (x, log y).  Returns (q, achieved max ratio).  Raises Infeasible when the
    constraints themselves are not C0-Lipschitz."""
    if C0 < 1:
        raise ValueError("extension needs C0 >= 1")
    src = np.array([complex(a) for a, _ in constraints])
    dst = np.array([complex(b) for _, b in constraints])
    if len(src) == 0:
        raise ValueError("need at least one constraint")
    for i in range(len(src)):
        for k in range(i + 1, len(src)):
            if hyp.dist(dst[i], dst[k]) > C0 * hyp.dist(src[i], src[k]) + 1e-9:
                raise Infeasible(f"constraints {i} and {k} already violate C0 = {C0}")
    p = complex(p)
    w = np.maximum(hyp.dist(p, src), eps)
    q = dst[int(np.argmin(w))]
    best, best_val = q, float(np.max(_ratios(q, dst, w)))
    step = max(float(np.max(hyp.dist(q, dst))), 1e-3) / 2
    for k in range(n_sub):
        r = _ratios(q, dst, w)
        i = int(np.argmax(r))
        if hyp.dist(q, dst[i]) < 1e-15:
            break
        q = complex(hyp.exp_map(q, step / np.sqrt(k + 1) * q.imag * hyp.unit_tangent(q, dst[i]) / q.imag))
        val = float(np.max(_ratios(q, dst, w)))
        if val < best_val:
            best, best_val = q, val

    def obj(x):
        return float(np.max(_ratios(x[0] + 1j * np.exp(x[1]), dst, w)))
    res = minimize(obj, [best.real, np.log(best.imag)], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    if res.fun < best_val:
        best, best_val = res.x[0] + 1j * np.exp(res.x[1]), float(res.fun)
    return complex(best), best_val


def toponogov_sides(p, v, v2, r: float, C0: float):
    """(d(exp_p(C0 r v), exp_p(C0 r v')), C0 d(exp_p(r v), exp_p(r v')))."""
    p = complex(p)
    a = hyp.dist(hyp.exp_map(p, C0 * r * v), hyp.exp_map(p, C0 * r * v2))
    b = C0 * hyp.dist(hyp.exp_map(p, r * v), hyp.exp_map(p, r * v2))
    return float(a), float(b)


def toponogov_check(p, v, v2, r: float, C0: float) -> bool:
    """Strict inequality d(exp_p(C0 r v), exp_p(C0 r v')) > C0 d(exp_p(r v), exp_p(r v'))."""
    a, b = toponogov_sides(p, v, v2, r, C0)
    return a > b

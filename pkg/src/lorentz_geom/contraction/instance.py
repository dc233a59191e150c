"""The strip-deformation instance used by the fibration pipelines.

A pair of pants, one filling arc system of its atlas and positive weights
give a macroscopic family rho_t (strips of widths t * weights), its
derivative cocycle u, a piecewise-Killing field Y with c < 0 and, for each
t, the mesh map f_t whose t-derivative is Y.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..schottky import pants
from ..strips import StripAtlas, SurfaceModel, macro_family, strip_cocycle
from .domain import PantsDomain
from .maps import EquivariantMap, field_map, measure_bound
from .meshfield import mesh_field


@dataclass(frozen=True)
class StripInstanceConfig:
    lengths: tuple = (2.0, 3.0, 2.5)
    system: int = 1  # index into the atlas' filling triangles
    weights: tuple = (0.3, 0.4, 0.3)
    mesh: float = 0.3
    seed: int = 0
    lp_samples: int = 3000
    bound_samples: int = 4000

    def to_json(self):
        return asdict(self)


@dataclass
class StripInstance:
    config: StripInstanceConfig
    surface: object
    atlas: StripAtlas
    strips: object
    domain: PantsDomain
    cocycle: object
    field: object
    family: object = field(repr=False)

    def rho(self, t: float):
        return self.family(t)

    def macro_map(self, t: float = 1.0, measure: bool = True, n: int | None = None) -> EquivariantMap:
        f = field_map(self.domain, self.field, t, self.family(t))
        if measure:
            measure_bound(f, self.domain, n or self.config.bound_samples, self.config.seed)
        return f


def build_strip_instance(cfg: StripInstanceConfig = StripInstanceConfig()) -> StripInstance:
    surf = pants(cfg.lengths)
    atlas = StripAtlas(SurfaceModel(surf))
    ss = atlas.strips[cfg.system]
    w = np.asarray(cfg.weights, dtype=float)
    u = strip_cocycle(ss, w)
    dom = PantsDomain(surf, cfg.mesh)
    Y = mesh_field(dom, u, cfg.seed, n_random=cfg.lp_samples)
    return StripInstance(cfg, surf, atlas, ss, dom, u, Y, macro_family(ss, w))


def derivative_gap(family, u, h: float = 1e-3) -> float:
    """max over generators of |derivative_cocycle(family) - u| (matrix max-norm)."""
    from ..reps import derivative_cocycle
    d = derivative_cocycle(family, h)
    return float(max(np.abs(x.matrix - y.matrix).max() for x, y in zip(d.values, u.values)))


def fibration_suite(inst: StripInstance, mode: str = "macro", n: int = 1000, seed: int = 0,
                    t: float = 1.0, n_equiv: int = 50) -> dict:
    """Sampled checks of a fibration: membership of n projected elements,
    exclusivity against other fibers, equivariance, and the measured
    contraction rate (macro) or ball radii (micro)."""
    from .. import hyperbolic as hyp
    from ..reps import cocycle_matrices
    from ..words import Word
    from .fibration import (FibrationHandle, elliptic_generator, fixed_point, macro_member,
                            micro_member, project_macro, zeros_of_field)
    from .maps import exp_many
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(n, 3)) * 0.7
    words = [Word((x, y)) for x in (1, 2, -1, -2) for y in (1, 2, -1, -2) if x != -y]
    pick = [words[k] for k in rng.integers(0, len(words), n_equiv)]
    j = inst.surface.rep
    perm = rng.permutation(n)
    if mode == "macro":
        f = inst.macro_map(t)
        F = FibrationHandle(f)
        rho = inst.rho(t)
        G = exp_many(V)
        P = project_macro(F, G)
        res, ok = macro_member(F, G, P)
        far = hyp.dist(P, P[perm]) > 1e-6
        res2, ok2 = macro_member(F, G, P[perm])
        Jm = np.array([j.matrix(w) for w in pick])
        G2 = np.array([rho.matrix(w) for w in pick]) @ G[:n_equiv] @ hyp.inverse(Jm)
        eq = hyp.dist(project_macro(F, G2), hyp.mobius(Jm, P[:n_equiv]))
        _, hist = fixed_point(G[0], f, history=True)
        keep = hist[1:] > 1e-8
        rate = float((hist[1:] / hist[:-1])[keep].max()) if np.any(keep) else 0.0
        return {"mode": mode, "t": t, "C": f.C, "samples": n,
                "membership_max": float(res.max()), "all_members": bool(ok.all()),
                "exclusive": bool(not np.any(ok2[far])),
                "exclusive_min_residual": float(res2[far].min()) if np.any(far) else None,
                "equivariance_max": float(eq.max()), "contraction_rate": rate}
    if mode != "micro":
        raise ValueError(f"unknown fibration mode {mode!r}")
    Y = inst.field
    F = FibrationHandle(Y)
    P, radius = zeros_of_field(V, Y, check_ball=False)
    slack = hyp.dist(1j, P) - radius
    res, ok = micro_member(F, V, P)
    far = hyp.dist(P, P[perm]) > 1e-6
    res2, ok2 = micro_member(F, V, P[perm])
    X2 = []
    for k, w in enumerate(pick):
        U, J = cocycle_matrices(inst.cocycle, w)
        X = np.array([[V[k, 0], V[k, 1]], [V[k, 2], -V[k, 0]]])
        M = U + J @ X @ hyp.inverse(J)
        X2.append([M[0, 0], M[0, 1], M[1, 0]])
    Jm = np.array([j.matrix(w) for w in pick])
    P2, _ = zeros_of_field(np.array(X2), Y)
    eq = hyp.dist(P2, hyp.mobius(Jm, P[:n_equiv]))
    E = np.array([elliptic_generator(p) for p in P[:10]])
    line_res, _ = micro_member(F, V[:10] + 1.7 * E, P[:10])
    return {"mode": mode, "c": Y.c, "samples": n,
            "membership_max": float(res.max()), "all_members": bool(ok.all()),
            "exclusive": bool(not np.any(ok2[far])),
            "equivariance_max": float(eq.max()), "fiber_line_residual": float(line_res.max()),
            "ball_radius_max": float(radius.max()), "ball_slack_max": float(slack.max()),
            "within_ball": bool(np.all(slack <= 1e-9 * (1 + radius)))}

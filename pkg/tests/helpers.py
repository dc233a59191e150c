"""Random generators shared by the test modules."""

import numpy as np

from lorentz_geom.lie import AlgebraElement, GroupElement, HPoint, exp_alg, rotation


def random_group(rng, scale=1.0) -> GroupElement:
    """exp of a Gaussian algebra element times a uniform rotation."""
    x = random_algebra(rng, scale)
    return exp_alg(x) @ rotation(rng.uniform(0, 2 * np.pi))


def random_algebra(rng, scale=1.0) -> AlgebraElement:
    return AlgebraElement(*(rng.normal(size=3) * scale))


def random_point(rng) -> HPoint:
    return HPoint(rng.normal(), float(np.exp(rng.normal())))


def group_from(vals) -> GroupElement:
    """Group element from four floats (used by hypothesis strategies)."""
    m = np.array(vals, dtype=float).reshape(2, 2)
    if np.linalg.det(m) < 0:
        m[0] = -m[0]
    if np.linalg.det(m) < 1e-2:
        m = m + 2 * np.sign(np.trace(m) or 1.0) * np.eye(2)
    if np.linalg.det(m) < 1e-2:
        m = np.eye(2)
    return GroupElement.from_matrix(m)

"""Vectorized primitives on the upper half-plane.

Points are complex numbers (or complex arrays) with positive imaginary part,
tangent vectors are complex numbers in the same chart.  Matrices are real
arrays of shape (..., 2, 2) with determinant 1.  Everything here is
batch-friendly; the typed wrappers live in :mod:`lorentz_geom.lie`.
"""

import numpy as np

BASEPOINT = 1j


def mobius(m, z):
    """Apply (a z + b) / (c z + d) with broadcasting over leading axes."""
    m = np.asarray(m, dtype=float)
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    return (a * z + b) / (c * z + d)


def mobius_derivative(m, z):
    """Complex derivative of z -> m.z, i.e. 1 / (c z + d)^2 for det 1."""
    m = np.asarray(m, dtype=float)
    c, d = m[..., 1, 0], m[..., 1, 1]
    return 1.0 / (c * z + d) ** 2


def push_vector(m, z, v):
    """Differential of the Moebius map at z applied to the tangent vector v."""
    return mobius_derivative(m, z) * v


def dist(p, q):
    """Hyperbolic distance, stable for nearby points."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    return 2.0 * np.arcsinh(np.abs(p - q) / (2.0 * np.sqrt(p.imag * q.imag)))


def vnorm(z, v):
    """Hyperbolic norm of the tangent vector v at z."""
    return np.abs(v) / np.imag(z)


def inner(z, v, w):
    """Hyperbolic inner product of two tangent vectors at z."""
    return (np.real(v) * np.real(w) + np.imag(v) * np.imag(w)) / np.imag(z) ** 2


def _to_i(z):
    """Affine matrix taking i to z (z -> y w + x)."""
    z = np.asarray(z, dtype=complex)
    s = np.sqrt(z.imag)
    m = np.zeros(z.shape + (2, 2))
    m[..., 0, 0] = s
    m[..., 0, 1] = z.real / s
    m[..., 1, 1] = 1.0 / s
    return m


def exp_map(z, v):
    """Riemannian exponential exp_z(v)."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    w = v / z.imag  # vector pulled back to i by the affine chart map
    r = np.abs(w)
    theta = 0.5 * (np.angle(w) - 0.5 * np.pi)
    c, s = np.cos(theta), np.sin(theta)
    up = 1j * np.exp(r)
    at_i = (c * up + s) / (-s * up + c)
    return z.real + z.imag * at_i


def log_map(z, q):
    """Inverse of :func:`exp_map`: the tangent vector at z pointing to q."""
    z = np.asarray(z, dtype=complex)
    q = np.asarray(q, dtype=complex)
    w = (q - z.real) / z.imag  # q seen from i
    r = dist(1j, w)
    # Rotation about i taking w to the imaginary axis above i.
    # Unit direction at i of the geodesic to w: derivative of Cayley picture.
    # In the disk model centred at i the direction is arg((w - i)/(w + i)),
    # and the disk chart has derivative -2i/(z+i)^2 = -i/2 at z = i.
    u = (w - 1j) / (w + 1j)
    direction = np.exp(1j * np.angle(u)) * 1j * np.ones_like(r)
    direction = np.where(np.abs(u) > 0, direction, 0)
    return z.imag * r * direction


def geodesic_point(p, q, t):
    """Point at fraction t of the way from p to q along the geodesic."""
    return exp_map(p, t * log_map(p, q))


def unit_tangent(p, q):
    """Unit tangent at p of the geodesic towards q."""
    v = log_map(p, q)
    return v / vnorm(p, v)


# ----------------------------------------------------------------------------
# Geodesics as pairs of ideal endpoints.  ``np.inf`` stands for the point at
# infinity; a geodesic is oriented from its first to its second endpoint.


def _is_inf(x):
    return np.isinf(x)


def mobius_real(m, x):
    """Action on the boundary R u {inf}."""
    a, b, c, d = m[0][0], m[0][1], m[1][0], m[1][1]
    if np.isinf(x):
        return np.inf if abs(c) <= 1e-13 * abs(a) else a / c
    num, den = a * x + b, c * x + d
    if abs(den) <= 1e-13 * abs(num):
        return np.inf
    return num / den


def move_geodesic(m, geo):
    return (mobius_real(m, geo[0]), mobius_real(m, geo[1]))


def standardizer(geo):
    """Matrix taking the oriented geodesic geo to (0, inf)."""
    u, v = geo
    if np.isinf(v):
        m = np.array([[1.0, -u], [0.0, 1.0]])
    elif np.isinf(u):
        m = np.array([[0.0, -1.0], [1.0, -v]])
    else:
        # z -> (z - u) / (z - v), sign chosen so det > 0
        m = np.array([[1.0, -u], [1.0, -v]])
        if u - v < 0:
            m = np.array([[-1.0, u], [1.0, -v]])
    return m / np.sqrt(np.linalg.det(m))


def inverse(m):
    m = np.asarray(m, dtype=float)
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    out[..., 1, 1] = m[..., 0, 0]
    return out


def signed_side(geo, z):
    """Positive on the left of the oriented geodesic, negative on the right.

    Returns the signed hyperbolic distance to the geodesic.
    """
    w = mobius(standardizer(geo), np.asarray(z, dtype=complex))
    # after standardizing, the geodesic is the positive imaginary axis oriented
    # upwards; the left side is Re w < 0.
    return -np.arcsinh(w.real / w.imag)


def project_to_geodesic(geo, z):
    """Nearest point projection of z onto the geodesic."""
    m = standardizer(geo)
    w = mobius(m, np.asarray(z, dtype=complex))
    foot = 1j * np.abs(w)
    return mobius(inverse(m), foot)


def geodesic_through(z, v):
    """Endpoints of the geodesic through z with tangent direction v."""
    m = _to_i(np.asarray(z, dtype=complex))
    w = complex(v) / complex(z).imag
    theta = 0.5 * (np.angle(w) - 0.5 * np.pi)
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, s], [-s, c]])
    full = m @ rot
    return (mobius_real(full, 0.0), mobius_real(full, np.inf))


def crosses(g1, g2):
    """True when two geodesics meet in the interior (endpoints interleave)."""
    m = standardizer(g1)
    x, y = move_geodesic(m, g2)
    if np.isinf(x) or np.isinf(y) or x == 0 or y == 0:
        return False
    return (x < 0) != (y < 0)


def same_geodesic(g1, g2, tol=1e-9):
    """Unoriented equality of geodesics."""
    def close(a, b):
        if np.isinf(a) or np.isinf(b):
            return np.isinf(a) and np.isinf(b) or (
                (np.isinf(a) and abs(b) > 1 / tol) or (np.isinf(b) and abs(a) > 1 / tol))
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
    return (close(g1[0], g2[0]) and close(g1[1], g2[1])) or (
        close(g1[0], g2[1]) and close(g1[1], g2[0]))


def common_perpendicular(g1, g2):
    """Feet (p1, p2) of the common perpendicular of two disjoint geodesics."""
    m = standardizer(g1)
    x, y = move_geodesic(m, g2)
    if np.isinf(x) or np.isinf(y) or (x < 0) != (y < 0):
        raise ValueError("geodesics are not ultraparallel")
    r = np.sqrt(x * y)
    c = 0.5 * (x + y)
    rad = 0.5 * abs(y - x)
    # intersection of |w| = r with the circle |w - c| = rad
    re = (r * r + c * c - rad * rad) / (2 * c)
    foot2 = complex(re, np.sqrt(max(r * r - re * re, 0.0)))
    minv = inverse(m)
    return complex(mobius(minv, 1j * r)), complex(mobius(minv, foot2))


def perpendicular_geodesic(p, q):
    """Geodesic through p orthogonal to the geodesic from p to q."""
    v = log_map(p, q)
    return geodesic_through(p, 1j * v)


def reflection_matrix(geo):
    """Real matrix R with det -1 such that z -> R.conj(z) is the reflection."""
    m = standardizer(geo)
    r0 = np.array([[-1.0, 0.0], [0.0, 1.0]])
    return inverse(m) @ r0 @ m


def reflect(geo, z):
    r = reflection_matrix(geo)
    return mobius(r, np.conj(np.asarray(z, dtype=complex)))


def translation_along(geo, length):
    """Hyperbolic translation by ``length`` along the oriented geodesic."""
    m = standardizer(geo)
    e = np.exp(0.5 * length)
    return inverse(m) @ np.diag([e, 1.0 / e]) @ m


def translation_generator(geo):
    """Traceless matrix of the unit-speed infinitesimal translation along geo."""
    m = standardizer(geo)
    return inverse(m) @ np.diag([0.5, -0.5]) @ m


# ----------------------------------------------------------------------------
# Hyperboloid model, used for isometry-invariant barycentric interpolation.


def to_hyperboloid(z):
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    r2 = x * x + y * y
    return np.stack([(r2 + 1) / (2 * y), (r2 - 1) / (2 * y), x / y], axis=-1)


def from_hyperboloid(v):
    v = np.asarray(v, dtype=float)
    y = 1.0 / (v[..., 0] - v[..., 1])
    return v[..., 2] * y + 1j * y


def minkowski(u, v):
    return -u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]


def normalize_hyperboloid(s):
    return s / np.sqrt(-minkowski(s, s))[..., None]


def tangent_to_ambient(z, v):
    """Differential of :func:`to_hyperboloid` at z applied to v."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    x, y = z.real, z.imag
    dx, dy = v.real, v.imag
    r2 = x * x + y * y
    # d/dx, d/dy of the three components
    a0 = (2 * x * dx) / (2 * y) + ((2 * y) * (2 * y) - 2 * (r2 + 1)) * dy / (4 * y * y)
    a1 = (2 * x * dx) / (2 * y) + ((2 * y) * (2 * y) - 2 * (r2 - 1)) * dy / (4 * y * y)
    a2 = dx / y - x * dy / (y * y)
    return np.stack([a0, a1, a2], axis=-1)


def ambient_to_tangent(p, w):
    """Differential of :func:`from_hyperboloid` at the hyperboloid point p."""
    p = np.asarray(p, dtype=float)
    w = np.asarray(w, dtype=float)
    den = p[..., 0] - p[..., 1]
    dden = w[..., 0] - w[..., 1]
    dy = -dden / den ** 2
    dx = w[..., 2] / den - p[..., 2] * dden / den ** 2
    return dx + 1j * dy


# ----------------------------------------------------------------------------
# Batch operations on geodesics.  Ideal points are stored as angles on the
# circle RP^1: x -> 2 arctan(x), inf -> pi, so Moebius maps act linearly on
# homogeneous vectors and interleaving is a cyclic-order test.


def ideal_angle(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.isinf(x), np.pi, np.mod(2 * np.arctan(np.where(np.isinf(x), 0, x)), 2 * np.pi))


def angle_to_real(theta):
    theta = np.mod(np.asarray(theta, dtype=float), 2 * np.pi)
    return np.where(np.abs(theta - np.pi) < 1e-15, np.inf, np.tan(theta / 2))


def move_angles(m, theta):
    """Action of matrices m (..., 2, 2) on ideal points given as angles."""
    theta = np.asarray(theta, dtype=float)
    v0, v1 = np.sin(theta / 2), np.cos(theta / 2)
    w0 = m[..., 0, 0] * v0 + m[..., 0, 1] * v1
    w1 = m[..., 1, 0] * v0 + m[..., 1, 1] * v1
    return np.mod(2 * np.arctan2(w0, w1), 2 * np.pi)


def _in_open_arc(x, a1, a2, tol):
    span = np.mod(a2 - a1, 2 * np.pi)
    off = np.mod(x - a1, 2 * np.pi)
    return (off > tol) & (off < span - tol)


def angles_cross(a, b, tol=1e-12):
    """Geodesics with endpoint angles a = (a1, a2) and b (..., 2) cross."""
    a1, a2 = a[..., 0], a[..., 1]
    b1, b2 = b[..., 0], b[..., 1]
    return _in_open_arc(b1, a1, a2, tol) != _in_open_arc(b2, a1, a2, tol)


def _circ_close(x, y, tol):
    d = np.abs(np.mod(x - y + np.pi, 2 * np.pi) - np.pi)
    return d <= tol


def angles_equal(a, b, tol=1e-9):
    """Unoriented equality of geodesics given by endpoint angles."""
    a1, a2 = a[..., 0], a[..., 1]
    b1, b2 = b[..., 0], b[..., 1]
    return (_circ_close(a1, b1, tol) & _circ_close(a2, b2, tol)) | (
        _circ_close(a1, b2, tol) & _circ_close(a2, b1, tol))


def geo_angles(geo):
    return np.array([ideal_angle(geo[0]), ideal_angle(geo[1])], dtype=float)


def angles_geo(theta):
    return (float(angle_to_real(theta[0])), float(angle_to_real(theta[1])))

"""Slow, independent reference implementations used to validate the package.

Everything here is deliberately written with a different algorithm than the
library (gift wrapping instead of monotone chain, rejection sampling instead
of clipping, pattern search instead of Newton) so agreement is meaningful.
"""
import numpy as np
from scipy.spatial import cKDTree


def gift_wrap_hull(points):
    """Convex hull, CCW, by Jarvis march. O(n*h), fine for test sizes."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) < 3:
        raise ValueError("need at least 3 distinct points")
    start = min(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1]))
    hull = [start]
    while True:
        cur = hull[-1]
        cand = (cur + 1) % len(pts)
        for j in range(len(pts)):
            if j == cur:
                continue
            a = pts[cand] - pts[cur]
            b = pts[j] - pts[cur]
            d = a[0] * b[1] - a[1] * b[0]
            if d < 0 or (d == 0 and
                         np.linalg.norm(pts[j] - pts[cur]) >
                         np.linalg.norm(pts[cand] - pts[cur])):
                cand = j
        if cand == start:
            break
        hull.append(cand)
    return pts[hull]


def contains(vertices, points):
    """Membership for a CCW convex polygon, vectorized over points."""
    v = np.asarray(vertices, dtype=float)
    p = np.atleast_2d(points)
    e = np.roll(v, -1, axis=0) - v
    rel = p[:, None, :] - v[None, :, :]
    cross = e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]
    return (cross >= -1e-12).all(axis=1)


def mc_area(vertices, rng, n=200_000):
    v = np.asarray(vertices, dtype=float)
    lo, hi = v.min(axis=0), v.max(axis=0)
    pts = rng.random((n, 2)) * (hi - lo) + lo
    frac = contains(v, pts).mean()
    return frac * np.prod(hi - lo)


def mc_centroid(vertices, rng, n=200_000):
    v = np.asarray(vertices, dtype=float)
    lo, hi = v.min(axis=0), v.max(axis=0)
    pts = rng.random((n, 2)) * (hi - lo) + lo
    inside = contains(v, pts)
    return pts[inside].mean(axis=0)


def mc_intersection_area(verts_a, verts_b, rng, n=400_000):
    """Rejection estimate of |A for B|, sampling the bounding box of A."""
    a = np.asarray(verts_a, dtype=float)
    lo, hi = a.min(axis=0), a.max(axis=0)
    pts = rng.random((n, 2)) * (hi - lo) + lo
    both = contains(a, pts) & contains(verts_b, pts)
    return both.mean() * np.prod(hi - lo)


def boundary_points(vertices, per_edge=400):
    v = np.asarray(vertices, dtype=float)
    nxt = np.roll(v, -1, axis=0)
    ts = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    return (v[:, None, :] + ts[None, :, None] * (nxt - v)[:, None, :]).reshape(-1, 2)


def dense_hausdorff(verts_a, verts_b, per_edge=2000):
    """Hausdorff distance via dense boundary sampling.

    For convex bodies the sup is attained on the boundaries, and interior
    points of one body inside the other contribute zero.
    """
    pa = boundary_points(verts_a, per_edge)
    pb = boundary_points(verts_b, per_edge)

    def sup_dist(pts, other_pts, other_verts):
        d, _ = cKDTree(other_pts).query(pts)
        d[contains(other_verts, pts)] = 0.0
        return d.max()

    return max(sup_dist(pa, pb, verts_b), sup_dist(pb, pa, verts_a))


def ellipse_in_polygon(center, mat, vertices, tol=0.0):
    """Is {center + mat u : |u|<=1} inside the polygon (slack >= tol per edge)?"""
    v = np.asarray(vertices, dtype=float)
    nxt = np.roll(v, -1, axis=0)
    edge = nxt - v
    nrm = np.stack([edge[:, 1], -edge[:, 0]], axis=1)
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    off = (nrm * v).sum(axis=1)
    # support of the ellipse in direction n is n.c + |mat^T n|
    reach = nrm @ center + np.linalg.norm(nrm @ mat, axis=1)
    return bool((off - reach >= tol - 1e-12).all())


def pattern_search_max_ellipse(vertices, iters=220, seed=0):
    """Max-area inscribed ellipse by random-direction search over (c, A).

    A is symmetric positive definite, parametrized by (a11, a12, a22).
    Coordinate moves alone stall on this problem (growing the ellipse needs
    correlated center/shape steps), so each round probes random directions
    in R^5 and the step shrinks only when none of them improve.
    """
    v = np.asarray(vertices, dtype=float)
    rng = np.random.default_rng(seed)
    c = v.mean(axis=0)
    nxt = np.roll(v, -1, axis=0)
    nrm = np.stack([(nxt - v)[:, 1], -(nxt - v)[:, 0]], axis=1)
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    r0 = 0.8 * ((nrm * v).sum(axis=1) - nrm @ c).min()
    x = np.array([c[0], c[1], r0, 0.0, r0])

    def ok(p):
        mat = np.array([[p[2], p[3]], [p[3], p[4]]])
        w = np.linalg.eigvalsh(mat)
        if w[0] <= 0:
            return False
        return ellipse_in_polygon(p[:2], mat, v)

    def vol(p):
        return p[2] * p[4] - p[3] * p[3]

    if not ok(x):
        raise RuntimeError("pattern search seed infeasible")
    step = r0
    for _ in range(iters):
        dirs = rng.normal(size=(48, 5))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        improved = False
        for d in dirs:
            y = x + step * d
            if ok(y) and vol(y) > vol(x):
                x, improved = y, True
        if not improved:
            step *= 0.5
            if step < 1e-9:
                break
    return x[:2], np.array([[x[2], x[3]], [x[3], x[4]]])


def quad_power_ratio(f, g, lo, hi, k, n=2_000_001):
    """Trapezoid evaluation of int f^k g / int f^k on a dense grid."""
    xs = np.linspace(lo, hi, n)
    fs = np.asarray(f(xs), dtype=float)
    gs = np.asarray(g(xs), dtype=float)
    # factor out the max so f^k stays representable for large k
    logf = np.full_like(fs, -np.inf)
    np.log(fs, out=logf, where=fs > 0)
    w = np.exp(k * (logf - logf.max()))
    num = np.trapezoid(w * gs, xs)
    den = np.trapezoid(w, xs)
    return num / den


def sqp_max_ellipse(vertices):
    """Max-area inscribed ellipse via SLSQP on log det with edge slacks.

    Independent route from the shipped barrier-Newton solver: same program,
    different algorithm and implementation (scipy's SQP).
    """
    from scipy.optimize import minimize

    v = np.asarray(vertices, dtype=float)
    nxt = np.roll(v, -1, axis=0)
    nrm = np.stack([(nxt - v)[:, 1], -(nxt - v)[:, 0]], axis=1)
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    off = (nrm * v).sum(axis=1)
    c0 = v.mean(axis=0)
    r0 = 0.5 * (off - nrm @ c0).min()
    x0 = np.array([c0[0], c0[1], r0, 0.0, r0])

    def neg_logdet(p):
        det = p[2] * p[4] - p[3] * p[3]
        return np.inf if det <= 0 else -np.log(det)

    def slacks(p):
        mat = np.array([[p[2], p[3]], [p[3], p[4]]])
        return off - nrm @ p[:2] - np.linalg.norm(nrm @ mat, axis=1)

    out = minimize(neg_logdet, x0, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": slacks}],
                   options={"maxiter": 400, "ftol": 1e-14})
    p = out.x
    return p[:2], np.array([[p[2], p[3]], [p[3], p[4]]])

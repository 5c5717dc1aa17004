"""Exact rational linear algebra and small polytope primitives.

Everything here operates on tuples of ``fractions.Fraction``.  Predicates
(rank, containment, intersection) are exact; only volumes take a square
root and come back as floats.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def vec(xs) -> Vec:
    return tuple(frac(x) for x in xs)


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vscale(a: Vec, s: Fraction) -> Vec:
    return tuple(x * s for x in a)


def vdot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def dist2(a: Vec, b: Vec) -> Fraction:
    d = vsub(a, b)
    return vdot(d, d)


def dist(a: Vec, b: Vec) -> float:
    return math.sqrt(float(dist2(a, b)))


def is_zero_vec(a: Vec) -> bool:
    return all(x == 0 for x in a)


# ---------------------------------------------------------------------------
# exact dense linear algebra
# ---------------------------------------------------------------------------


def det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-free Gaussian elimination (Bareiss)."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    m = [list(r) for r in rows]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            m[i][k] = Fraction(0)
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rank(rows: Iterable[Sequence[Fraction]]) -> int:
    m = [list(r) for r in rows]
    if not m:
        return 0
    cols = len(m[0])
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / pv
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def solve_linear(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Solve A x = b exactly.

    Returns ``(particular, nullspace_basis)`` or ``None`` if inconsistent.
    """
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    nrows = len(m)
    ncols = len(rows[0]) if nrows else len(rhs) * 0
    if nrows == 0:
        return tuple(), []
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [a / pv for a in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if m[i][ncols] != 0:
            return None
    free = [c for c in range(ncols) if c not in pivots]
    particular = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        particular[c] = m[i][ncols]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -m[i][fcol]
        basis.append(tuple(v))
    return tuple(particular), basis


def nullspace(rows: Sequence[Sequence[Fraction]]) -> list[Vec]:
    if not rows:
        return []
    sol = solve_linear(rows, [Fraction(0)] * len(rows))
    assert sol is not None
    return sol[1]


def independent_columns(cols: Sequence[Vec], target_rank: int | None = None) -> list[int]:
    """Indices of a maximal (or target-rank) independent subset, greedy lowest-first."""
    chosen: list[int] = []
    for i, c in enumerate(cols):
        if target_rank is not None and len(chosen) == target_rank:
            break
        trial = [cols[j] for j in chosen] + [c]
        if rank(list(zip(*trial))) == len(trial):
            chosen.append(i)
    return chosen


def gram_volume(edges: Sequence[Vec]) -> float:
    """k-volume of the parallelepiped-spanned simplex: sqrt(det(E^T E)) / k!."""
    k = len(edges)
    if k == 0:
        return 1.0
    g = [[vdot(a, b) for b in edges] for a in edges]
    d = det(g)
    if d <= 0:
        return 0.0
    return math.sqrt(float(d)) / math.factorial(k)


def squared_gram(edges: Sequence[Vec]) -> Fraction:
    if not edges:
        return Fraction(1)
    g = [[vdot(a, b) for b in edges] for a in edges]
    return det(g)


# ---------------------------------------------------------------------------
# affine subspaces
# ---------------------------------------------------------------------------


def affine_intersection(base1: Vec, dirs1: Sequence[Vec], base2: Vec, dirs2: Sequence[Vec]):
    """Intersection of two affine subspaces, as ``(base, dirs)`` or None.

    Solves base1 + D1 a = base2 + D2 b exactly.
    """
    n = len(base1)
    cols = [list(d) for d in dirs1] + [[-x for x in d] for d in dirs2]
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(n)]
    rhs = list(vsub(base2, base1))
    if not cols:
        return (base1, []) if base1 == base2 else None
    sol = solve_linear(rows, rhs)
    if sol is None:
        return None
    particular, basis = sol
    a = particular[: len(dirs1)]
    point = base1
    for coef, d in zip(a, dirs1):
        point = vadd(point, vscale(d, coef))
    dirs = []
    for v in basis:
        a = v[: len(dirs1)]
        direction = tuple(Fraction(0) for _ in range(n))
        for coef, d in zip(a, dirs1):
            direction = vadd(direction, vscale(d, coef))
        if not is_zero_vec(direction):
            dirs.append(direction)
    # prune to an independent spanning set
    if dirs:
        keep = independent_columns(dirs)
        dirs = [dirs[i] for i in keep]
    return point, dirs


def barycentric(vertices: Sequence[Vec], point: Vec):
    """Barycentric coordinates of ``point`` w.r.t. a nondegenerate simplex.

    Returns None when the point is outside the simplex's affine hull.
    """
    v0 = vertices[0]
    edges = [vsub(v, v0) for v in vertices[1:]]
    n = len(point)
    rows = [[e[i] for e in edges] for i in range(n)]
    sol = solve_linear(rows, list(vsub(point, v0))) if edges else ((), [])
    if sol is None:
        return None
    coeffs = sol[0]
    lam = [Fraction(1) - sum(coeffs, Fraction(0))] + list(coeffs)
    return tuple(lam)


# ---------------------------------------------------------------------------
# simplex / plane sections
# ---------------------------------------------------------------------------


def simplex_plane_section_vertices(vertices: Sequence[Vec], base: Vec, dirs: Sequence[Vec]):
    """Vertices of (simplex ∩ affine plane), assuming transversality.

    Under transversality the section's vertices are exactly the points where
    the plane meets the (N - m)-dimensional faces of the simplex.  Returns a
    list of exact points (possibly empty), or raises ValueError when a
    degenerate (non-transverse) contact is detected.
    """
    n = len(vertices[0])
    m = len(dirs)
    k = len(vertices) - 1
    face_dim = n - m
    if face_dim > k:
        return []
    out: list[Vec] = []
    for face in combinations(range(k + 1), face_dim + 1):
        fverts = [vertices[i] for i in face]
        fdirs = [vsub(v, fverts[0]) for v in fverts[1:]]
        hit = affine_intersection(fverts[0], fdirs, base, list(dirs))
        if hit is None:
            continue
        point, idirs = hit
        if idirs:
            raise ValueError("non-transverse contact: face meets plane in positive dimension")
        lam = barycentric(fverts, point)
        if lam is None:
            continue
        if any(l == 0 for l in lam):
            raise ValueError("non-transverse contact: plane through a face boundary")
        if all(l > 0 for l in lam):
            if point not in out:
                out.append(point)
    return out


def order_coplanar_polygon(points: Sequence[Vec]) -> list[Vec]:
    """Order >= 3 coplanar points in convex position around their centroid."""
    n = len(points)
    centroid = tuple(sum((p[i] for p in points), Fraction(0)) / n for i in range(len(points[0])))
    u = vsub(points[0], centroid)
    v = None
    for p in points[1:]:
        w = vsub(p, centroid)
        if rank([u, w]) == 2:
            v = w
            break
    if v is None:
        raise ValueError("points are collinear")
    # exact 2d coordinates in the (u, v) frame
    rows_all = [[u[i], v[i]] for i in range(len(u))]
    keep = independent_columns([tuple(r) for r in zip(*rows_all)])  # independent rows
    rows2 = [rows_all[i] for i in keep[:2]]

    def coords(p: Vec):
        rhs = [vsub(p, centroid)[i] for i in keep[:2]]
        sol = solve_linear(rows2, rhs)
        assert sol is not None and not sol[1]
        return sol[0]

    pts2 = [(coords(p), p) for p in points]

    def half(c):  # 0 for upper half plane (y > 0 or y == 0, x > 0), 1 for lower
        x, y = c
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    def cmp_angle(a, b):
        ha, hb = half(a[0]), half(b[0])
        if ha != hb:
            return -1 if ha < hb else 1
        cross = a[0][0] * b[0][1] - a[0][1] * b[0][0]
        if cross > 0:
            return -1
        if cross < 0:
            return 1
        return 0

    import functools

    pts2.sort(key=functools.cmp_to_key(cmp_angle))
    return [p for _, p in pts2]


# ---------------------------------------------------------------------------
# convex polygon clipping (Sutherland-Hodgman, exact, ambient-dimension free)
# ---------------------------------------------------------------------------


def clip_polygon_halfspace(poly: Sequence[Vec], normal: Vec, offset: Fraction) -> list[Vec]:
    """Clip an ordered convex polygon against {x : normal . x <= offset}."""
    if not poly:
        return []
    out: list[Vec] = []
    vals = [vdot(p, normal) - offset for p in poly]
    npts = len(poly)
    for i in range(npts):
        cur, nxt = poly[i], poly[(i + 1) % npts]
        vc, vn = vals[i], vals[(i + 1) % npts]
        if vc <= 0:
            out.append(cur)
        if (vc < 0 < vn) or (vn < 0 < vc):
            t = vc / (vc - vn)
            out.append(vadd(cur, vscale(vsub(nxt, cur), t)))
    dedup: list[Vec] = []
    for p in out:
        if not dedup or p != dedup[-1]:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def polygon_area2(poly: Sequence[Vec]) -> Fraction:
    """Squared area of a planar polygon given in order (any ambient dim).

    Uses the fan decomposition; exact.  Returns 0 for degenerate polygons.
    """
    if len(poly) < 3:
        return Fraction(0)
    total = Fraction(0)
    # squared area is not additive; instead accumulate the (signed) area
    # vector via cross products in a 2d frame of the supporting plane
    p0 = poly[0]
    u = None
    for p in poly[1:]:
        if p != p0:
            u = vsub(p, p0)
            break
    if u is None:
        return Fraction(0)
    v = None
    for p in poly[2:]:
        w = vsub(p, p0)
        if rank([u, w]) == 2:
            v = w
            break
    if v is None:
        return Fraction(0)
    rows_all = [[u[i], v[i]] for i in range(len(u))]
    keep = independent_columns([tuple(r) for r in zip(*rows_all)])
    rows2 = [rows_all[i] for i in keep[:2]]
    coords = []
    for p in poly:
        rhs = [vsub(p, p0)[i] for i in keep[:2]]
        sol = solve_linear(rows2, rhs)
        if sol is None:
            return Fraction(0)
        coords.append(sol[0])
    signed2 = Fraction(0)
    for i in range(len(coords)):
        x1, y1 = coords[i]
        x2, y2 = coords[(i + 1) % len(coords)]
        signed2 += x1 * y2 - x2 * y1
    # signed2 is twice the area in (u, v)-coordinates; convert via the Gram
    # determinant of the frame to an ambient-area statement: area^2 =
    # (signed2 / 2)^2 * gram(u, v) / (det of the coordinate rows)^2
    g = squared_gram([u, v])
    d = rows2[0][0] * rows2[1][1] - rows2[0][1] * rows2[1][0]
    return (signed2 / 2) ** 2 * g / (d * d)


def fan_triangles(poly: Sequence[Vec]) -> list[tuple[Vec, Vec, Vec]]:
    """Fan triangulation of an ordered convex polygon."""
    return [(poly[0], poly[i], poly[i + 1]) for i in range(1, len(poly) - 1)]

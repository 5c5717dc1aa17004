"""Transversality tests, slices by oriented affine planes, slice-mass
profiles over coordinate projections, and the cubical-grid deformation
sampler.

Orientation convention for a slice ``sigma ∩ P``: write L for the plane P
(with the orientation of its direction list) and M for the oriented affine
hull of sigma.  A basis w of L ∩ M is correctly oriented when, completing it
to ``[u, w]`` correctly oriented in L and ``[v, w]`` correctly oriented in M,
the concatenation ``[u, v, w]`` is positively oriented in R^N.  With this
convention the boundary of a slice equals the slice of the boundary, with
sign +, which the test suite checks exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import geometry as geo
from .chains import Chain, Simplex
from .errors import ChainStructureError, TransversalityError, UnsupportedInstanceError
from .geometry import Vec, frac, vec
from .groups import GroupDescriptor, GroupElement
from .zerochains import ZeroChain


@dataclass(frozen=True)
class OrientedAffinePlane:
    """An oriented m-dimensional affine subspace: base point plus an ordered
    list of linearly independent direction vectors."""

    base: Vec
    dirs: tuple[Vec, ...]

    def __post_init__(self):
        object.__setattr__(self, "base", vec(self.base))
        object.__setattr__(self, "dirs", tuple(vec(d) for d in self.dirs))
        if self.dirs and geo.rank(self.dirs) < len(self.dirs):
            raise ChainStructureError("plane directions must be linearly independent")
        if len(self.dirs) >= len(self.base) + 1:
            raise ChainStructureError("plane dimension must be < ambient (use the chain itself)")

    @property
    def m(self) -> int:
        return len(self.dirs)

    @property
    def ambient(self) -> int:
        return len(self.base)


@dataclass(frozen=True)
class CoordinateProjection:
    """Projection onto the coordinate k-plane spanned by ``indices``."""

    indices: tuple[int, ...]
    ambient: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if list(idx) != sorted(set(idx)):
            raise ChainStructureError("projection indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.ambient):
            raise ChainStructureError("projection index out of range")
        object.__setattr__(self, "indices", idx)

    @property
    def k(self) -> int:
        return len(self.indices)

    def project(self, p: Vec) -> Vec:
        return tuple(p[i] for i in self.indices)

    def fiber_plane(self, x) -> OrientedAffinePlane:
        """The fiber over x, oriented so that (plane, fiber) is standard.

        The fiber directions are the complementary coordinate vectors in
        ascending order, with the first one negated when the permutation
        (indices, complement) is odd.
        """
        x = vec(x)
        n = self.ambient
        complement = [j for j in range(n) if j not in self.indices]
        base = [Fraction(0)] * n
        for i, xi in zip(self.indices, x):
            base[i] = xi
        perm = list(self.indices) + complement
        inversions = sum(
            1
            for a in range(len(perm))
            for b in range(a + 1, len(perm))
            if perm[a] > perm[b]
        )
        dirs = []
        for j in complement:
            e = [Fraction(0)] * n
            e[j] = Fraction(1)
            dirs.append(tuple(e))
        if inversions % 2 == 1 and dirs:
            dirs[0] = tuple(-c for c in dirs[0])
        return OrientedAffinePlane(tuple(base), tuple(dirs))


# ---------------------------------------------------------------------------
# transversality
# ---------------------------------------------------------------------------


def _affine_lambda_on(section_base, section_dirs, face_vertices):
    """Barycentric coordinates of points of an affine subspace S contained in
    aff(face), as affine functions of the S parameters."""
    lam0 = geo.barycentric(face_vertices, section_base)
    assert lam0 is not None
    deltas = []
    for d in section_dirs:
        lam = geo.barycentric(face_vertices, geo.vadd(section_base, d))
        assert lam is not None
        deltas.append(tuple(a - b for a, b in zip(lam, lam0)))
    return lam0, deltas


def _meets_relative_interior(base, dirs, face_vertices) -> bool:
    """Does the affine subspace (base, dirs), contained in aff(face), meet the
    relative interior of the face?  Exact, for subspace dimension <= 2."""
    lam0, deltas = _affine_lambda_on(base, dirs, face_vertices)
    d = len(dirs)
    nlam = len(lam0)
    if d == 0:
        return all(l > 0 for l in lam0)
    if d == 1:
        lo, hi = None, None  # open interval (lo, hi), None = unbounded
        for i in range(nlam):
            a, b = deltas[0][i], lam0[i]
            if a == 0:
                if b <= 0:
                    return False
            elif a > 0:
                t = -b / a  # need t > -b/a
                lo = t if lo is None else max(lo, t)
            else:
                t = -b / a
                hi = t if hi is None else min(hi, t)
        return lo is None or hi is None or lo < hi
    if d == 2:
        # constraints lam_i(mu) >= 0 cut a bounded convex polygon; the
        # relative interior is hit iff that polygon has positive area, i.e.
        # has three affinely independent vertices
        def lam_at(mu):
            return [
                lam0[i] + deltas[0][i] * mu[0] + deltas[1][i] * mu[1]
                for i in range(nlam)
            ]

        candidates = []
        for i, j in itertools.combinations(range(nlam), 2):
            rows = [
                [deltas[0][i], deltas[1][i]],
                [deltas[0][j], deltas[1][j]],
            ]
            sol = geo.solve_linear(rows, [-lam0[i], -lam0[j]])
            if sol is None or sol[1]:
                continue
            mu = sol[0]
            if all(v >= 0 for v in lam_at(mu)):
                candidates.append(mu)
        if len(candidates) < 3:
            return False
        for a, b, c in itertools.combinations(candidates, 3):
            area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if area2 != 0:
                return True
        return False
    raise UnsupportedInstanceError(
        "relative-interior test beyond 2-dimensional contacts is not implemented"
    )


def _simplex_transverse(s: Simplex, plane: OrientedAffinePlane) -> bool:
    n = s.ambient
    m = plane.m
    for size in range(1, len(s.vertices) + 1):
        j = size - 1
        bound = j + m - n
        for face in itertools.combinations(s.vertices, size):
            fdirs = [geo.vsub(v, face[0]) for v in face[1:]]
            hit = geo.affine_intersection(face[0], fdirs, plane.base, list(plane.dirs))
            if hit is None:
                continue
            base, idirs = hit
            if len(idirs) <= bound:
                continue
            if _meets_relative_interior(base, idirs, list(face)):
                return False
    return True


def is_transverse(a: Chain, plane: OrientedAffinePlane) -> bool:
    """Exact transversality: every j-face of every simplex of the canonical
    form meets the plane in dimension <= j + m - N."""
    if plane.ambient != a.ambient:
        raise ChainStructureError("plane and chain live in different ambient spaces")
    return all(_simplex_transverse(s, plane) for _, s in a.terms)


# ---------------------------------------------------------------------------
# the orientation convention
# ---------------------------------------------------------------------------


def _coords_in_basis(basis: Sequence[Vec], vectors: Sequence[Vec]):
    """Coefficient matrix (as rows per vector) of vectors in the given basis."""
    n = len(basis[0])
    rows = [[b[i] for b in basis] for i in range(n)]
    out = []
    for v in vectors:
        sol = geo.solve_linear(rows, list(v))
        if sol is None:
            return None
        out.append(sol[0])
    return out


def _complete(basis_cols: Sequence[Vec], existing: Sequence[Vec], count: int) -> list[Vec]:
    """Greedy lowest-index choice of ``count`` columns extending ``existing``
    to an independent family."""
    chosen: list[Vec] = []
    current = list(existing)
    for c in basis_cols:
        if len(chosen) == count:
            break
        if geo.rank(current + [c]) == len(current) + 1:
            chosen.append(c)
            current.append(c)
    if len(chosen) != count:
        raise ChainStructureError("could not complete basis")
    return chosen


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def convention_sign(candidate_edges: Sequence[Vec], simplex: Simplex, plane: OrientedAffinePlane) -> int:
    """+1 if the candidate orientation of the section agrees with the slice
    convention, -1 if it is reversed."""
    w = list(candidate_edges)
    e = simplex.edge_vectors
    d = list(plane.dirs)
    u = _complete(d, w, len(d) - len(w))
    v = _complete(e, w, len(e) - len(w))
    s_l = 1
    if d:
        coords = _coords_in_basis(d, u + w)
        s_l = _sign(geo.det(coords))
    s_m = 1
    if e:
        coords = _coords_in_basis(e, v + w)
        s_m = _sign(geo.det(coords))
    full = u + v + w
    n = len(simplex.vertices[0])
    mat = [[col[i] for col in full] for i in range(n)]
    s_n = _sign(geo.det(mat))
    if 0 in (s_l, s_m, s_n):
        raise TransversalityError("degenerate orientation data in slice")
    return s_l * s_m * s_n


# ---------------------------------------------------------------------------
# slicing
# ---------------------------------------------------------------------------


def slice_by_plane(a: Chain, plane: OrientedAffinePlane, check: bool = True) -> Chain:
    """The slice of a transverse chain by an oriented plane: per-simplex
    intersection polytopes, triangulated and oriented by the convention.

    The slice of a k-chain by an m-plane has dimension k + m - N; planes of
    lower dimension than N - k give the zero chain.
    """
    if plane.ambient != a.ambient:
        raise ChainStructureError("plane and chain live in different ambient spaces")
    c = a.k + plane.m - a.ambient
    if check and not is_transverse(a, plane):
        raise TransversalityError(
            "chain is not transverse to the plane; perturb the plane "
            "(almost every translate works)"
        )
    if c < 0 or a.is_zero:
        return Chain(a.descriptor, max(c, 0), a.ambient)
    out = []
    for g, s in a.terms:
        try:
            verts = geo.simplex_plane_section_vertices(
                s.vertices, plane.base, list(plane.dirs)
            )
        except ValueError as exc:
            raise TransversalityError(str(exc)) from exc
        if not verts:
            continue
        if c == 0:
            if len(verts) != 1:
                raise TransversalityError("0-dimensional section with several points")
            sign = convention_sign([], s, plane)
            out.append((g if sign > 0 else -g, Simplex((verts[0],))))
        elif c == 1:
            if len(verts) != 2:
                raise TransversalityError("1-dimensional section without two endpoints")
            seg = Simplex(tuple(sorted(verts)))
            sign = convention_sign(seg.edge_vectors, s, plane)
            out.append((g if sign > 0 else -g, seg))
        elif c == 2:
            ordered = geo.order_coplanar_polygon(verts)
            for tri in geo.fan_triangles(ordered):
                simplex = Simplex(tri)
                if simplex.is_degenerate:
                    continue
                sign = convention_sign(simplex.edge_vectors, s, plane)
                out.append((g if sign > 0 else -g, simplex))
        else:
            raise UnsupportedInstanceError(
                f"slices of dimension {c} are beyond desk scale (max 2)"
            )
    return Chain(a.descriptor, c, a.ambient, out, validate=False)


def slice_fiber(a: Chain, projection: CoordinateProjection, x) -> Chain:
    """Slice by the oriented fiber of a coordinate projection over x."""
    return slice_by_plane(a, projection.fiber_plane(x))


# ---------------------------------------------------------------------------
# slice-mass profiles
# ---------------------------------------------------------------------------


@dataclass
class SliceMassProfile:
    estimate: float
    chain_mass: float
    rows: list[tuple[Vec, float, int]]

    @property
    def margin(self) -> float:
        return self.chain_mass - self.estimate


def _projected_contains(s: Simplex, projection: CoordinateProjection, x: Vec):
    """Does the open projected simplex contain x?  Exact; returns False for
    projections that collapse the simplex (measure-zero fibers)."""
    verts = [projection.project(v) for v in s.vertices]
    edges = [geo.vsub(v, verts[0]) for v in verts[1:]]
    if geo.rank(edges) < len(edges):
        return False
    lam = geo.barycentric(verts, x)
    if lam is None:
        return False
    return all(l > 0 for l in lam)


def slice_mass_profile(
    a: Chain, projection: CoordinateProjection, samples: int = 1024
) -> SliceMassProfile:
    """Midpoint-quadrature estimate of the integral of fiber slice masses
    over a bounding box of the projected support.

    For a transverse fiber the slice of each simplex is a single atom of
    norm |g|, present iff x lies in the open projected simplex, so masses
    and atom counts need no linear solves.
    """
    if projection.k != a.k:
        raise ChainStructureError("profile needs dim L = k")
    if a.is_zero:
        return SliceMassProfile(0.0, 0.0, [])
    pts = [projection.project(v) for v in a.support_vertices()]
    lo = tuple(min(p[i] for p in pts) for i in range(projection.k))
    hi = tuple(max(p[i] for p in pts) for i in range(projection.k))
    widths = tuple(h - l for l, h in zip(lo, hi))
    volume = 1
    for w in widths:
        volume *= w
    if volume == 0:
        return SliceMassProfile(0.0, a.mass(), [])
    per_axis = max(1, round(samples ** (1.0 / projection.k)))
    grids = [
        [l + w * Fraction(2 * j + 1, 2 * per_axis) for j in range(per_axis)]
        for l, w in zip(lo, widths)
    ]
    rows = []
    values = []
    for x in itertools.product(*grids):
        m = 0.0
        count = 0
        for g, s in a.terms:
            if _projected_contains(s, projection, x):
                m += g.norm
                count += 1
        rows.append((x, m, count))
        values.append(m)
    estimate = math.fsum(values) / len(values) * float(volume)
    return SliceMassProfile(estimate, a.mass(), rows)


# ---------------------------------------------------------------------------
# the cubical deformation sampler
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """A cubical grid of side eps, with a translation offset applied to the
    chain before sampling."""

    eps: Fraction
    offset: Vec

    def __post_init__(self):
        object.__setattr__(self, "eps", frac(self.eps))
        object.__setattr__(self, "offset", vec(self.offset))
        if self.eps <= 0:
            raise ChainStructureError("grid side must be positive")


def grid_cube_chain(
    descriptor: GroupDescriptor,
    eps,
    axes: tuple[int, ...],
    corner: tuple[int, ...],
    coeff: GroupElement,
    ambient: int,
) -> Chain:
    """The standard-oriented k-cube of the grid as a chain (fixed
    triangulation: fan in the ascending axis pair for k = 2)."""
    eps = frac(eps)
    base = tuple(eps * c for c in vec(corner))
    k = len(axes)

    def shift(p, axis, amount):
        q = list(p)
        q[axis] += eps * amount
        return tuple(q)

    if k == 0:
        return Chain(descriptor, 0, ambient, [(coeff, Simplex((base,)))])
    if k == 1:
        (i,) = axes
        return Chain(
            descriptor, 1, ambient, [(coeff, Simplex((base, shift(base, i, 1))))]
        )
    if k == 2:
        i, j = sorted(axes)
        a = base
        b = shift(base, i, 1)
        c = shift(b, j, 1)
        d = shift(base, j, 1)
        return Chain(
            descriptor,
            2,
            ambient,
            [(coeff, Simplex((a, b, c))), (coeff, Simplex((a, c, d)))],
        )
    raise UnsupportedInstanceError("grid cubes beyond dimension 2 are not supported")


def _fiber_dirs(axes: tuple[int, ...], ambient: int) -> tuple[Vec, ...]:
    complement = [j for j in range(ambient) if j not in axes]
    perm = list(axes) + complement
    inversions = sum(
        1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b]
    )
    dirs = []
    for j in complement:
        e = [Fraction(0)] * ambient
        e[j] = Fraction(1)
        dirs.append(tuple(e))
    if inversions % 2 == 1 and dirs:
        dirs[0] = tuple(-x for x in dirs[0])
    return tuple(dirs)


def _reference_sign(axes: tuple[int, ...], fiber_dirs: Sequence[Vec], ambient: int) -> int:
    """Sign making the ascending-oriented grid cube a fixed point of the
    sampler: the convention sign of slicing the cube by its own dual plane."""
    cube_edges = []
    for i in axes:
        e = [Fraction(0)] * ambient
        e[i] = Fraction(1)
        cube_edges.append(tuple(e))
    cols = list(fiber_dirs) + cube_edges
    mat = [[col[i] for col in cols] for i in range(ambient)]
    return _sign(geo.det(mat))


def deformation_sample(a: Chain, grid: GridSpec) -> Chain:
    """Cubical approximation of (the offset translate of) a chain.

    For every grid k-cube Q near the support, the translated chain is sliced
    by the (N-k)-plane through the dual cube Q*, restricted to Q*, and the
    coefficient sum is attached to the standard-oriented [Q].  Grid-aligned
    cube chains are exact fixed points for generic offsets.  Non-generic
    offsets raise TransversalityError; re-randomize and retry.
    """
    n = a.ambient
    k = a.k
    eps = grid.eps
    b = a.translate(grid.offset)
    if b.is_zero:
        return Chain(a.descriptor, k, n)
    if k == 0:
        # 0-cubes are lattice vertices; atoms snap to the nearest one
        out = []
        for g, s in b.terms:
            p = s.vertices[0]
            idx = tuple(-(-(2 * x - eps) // (2 * eps)) for x in p)  # ceil((x - eps/2)/eps)
            out.append((g, Simplex((tuple(eps * i for i in idx),))))
        return Chain(a.descriptor, 0, n, out, validate=False)

    verts = b.support_vertices()
    lo = [min(v[i] for v in verts) for i in range(n)]
    hi = [max(v[i] for v in verts) for i in range(n)]
    out_terms = []
    for axes in itertools.combinations(range(n), k):
        fiber = _fiber_dirs(axes, n)
        ref_sign = _reference_sign(axes, fiber, n)
        complement = [j for j in range(n) if j not in axes]
        ranges = []
        for i in axes:
            first = math.ceil(lo[i] / eps - Fraction(1, 2))
            last = math.floor(hi[i] / eps - Fraction(1, 2))
            ranges.append(range(first, last + 1))
        per_term_sign = {}
        for ti, (_, s) in enumerate(b.terms):
            cols = list(fiber) + s.edge_vectors
            mat = [[col[i] for col in cols] for i in range(n)]
            per_term_sign[ti] = _sign(geo.det(mat))
        bins: dict[tuple[int, ...], GroupElement] = {}
        for pos in itertools.product(*ranges):
            center = {i: eps * (p + Fraction(1, 2)) for i, p in zip(axes, pos)}
            base = [Fraction(0)] * n
            for i, v in center.items():
                base[i] = v
            plane_base = tuple(base)
            for ti, (g, s) in enumerate(b.terms):
                sgn = per_term_sign[ti]
                if sgn == 0:
                    # simplex parallel to the dual plane family: it can never
                    # cross transversally, and a generic offset keeps it off
                    # the planes entirely
                    continue
                try:
                    pts = geo.simplex_plane_section_vertices(
                        s.vertices, plane_base, list(fiber)
                    )
                except ValueError as exc:
                    raise TransversalityError(str(exc)) from exc
                if not pts:
                    continue
                if len(pts) != 1:
                    raise TransversalityError("thick section in deformation sampling")
                pt = pts[0]
                cube_key = {}
                for j in complement:
                    cube_key[j] = -(-(2 * pt[j] - eps) // (2 * eps))
                full_key = []
                ai = 0
                for axis in range(n):
                    if axis in axes:
                        full_key.append(pos[ai])
                        ai += 1
                    else:
                        full_key.append(cube_key[axis])
                key = (axes, tuple(full_key))
                contribution = g if sgn > 0 else -g
                bins[key] = bins[key] + contribution if key in bins else contribution
        for (axs, corner), total in bins.items():
            if total.is_zero:
                continue
            coeff = total if ref_sign > 0 else -total
            cube = grid_cube_chain(a.descriptor, eps, axs, corner, coeff, n)
            out_terms.extend(cube.terms)
    return Chain(a.descriptor, k, n, out_terms, validate=False)

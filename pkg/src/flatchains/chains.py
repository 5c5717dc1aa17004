"""Polyhedral k-chains in R^N with coefficients in a normed abelian group.

A chain is a formal sum of (coefficient, oriented simplex) terms.  All
vertex data is exact rational; canonicalization

* drops zero coefficients and degenerate simplices,
* merges terms with identical support (orientation handled by permutation
  parity),
* resolves 1-dimensional overlaps exactly (collinear segments are split at
  shared breakpoints and recombined),
* rejects partially overlapping interiors for k >= 2 rather than refining.

Masses and diameters are floating point on top of exact Gram determinants;
all combinatorial predicates are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import geometry as geo
from .errors import ChainStructureError, GroupMismatchError, UnsupportedInstanceError
from .geometry import Vec, frac, vec
from .groups import GroupDescriptor, GroupElement


@dataclass(frozen=True)
class Simplex:
    """An oriented k-simplex: ordered vertices with exact rational coordinates."""

    vertices: tuple[Vec, ...]

    def __post_init__(self):
        verts = tuple(vec(v) for v in self.vertices)
        if not verts:
            raise ChainStructureError("a simplex needs at least one vertex")
        n = len(verts[0])
        if any(len(v) != n for v in verts):
            raise ChainStructureError("vertices must share one ambient dimension")
        if len(verts) - 1 > n:
            raise ChainStructureError(f"a {len(verts)-1}-simplex cannot live in R^{n}")
        object.__setattr__(self, "vertices", verts)

    @property
    def k(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient(self) -> int:
        return len(self.vertices[0])

    @property
    def edge_vectors(self) -> list[Vec]:
        v0 = self.vertices[0]
        return [geo.vsub(v, v0) for v in self.vertices[1:]]

    @property
    def is_degenerate(self) -> bool:
        if len(set(self.vertices)) != len(self.vertices):
            return True
        return geo.rank(self.edge_vectors) < self.k

    def volume(self) -> float:
        return geo.gram_volume(self.edge_vectors)

    def faces(self) -> list["Simplex"]:
        """Boundary faces with alternating-sign order baked in by position i."""
        return [
            Simplex(self.vertices[:i] + self.vertices[i + 1 :])
            for i in range(len(self.vertices))
        ]


def _sort_parity(vertices: tuple[Vec, ...]) -> tuple[tuple[Vec, ...], int]:
    """Lexicographically sorted vertices and the sign of the sorting permutation."""
    indexed = sorted(range(len(vertices)), key=lambda i: vertices[i])
    perm = list(indexed)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        cycle = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            cycle += 1
        if cycle % 2 == 0:
            sign = -sign
    return tuple(vertices[i] for i in indexed), sign


@dataclass(frozen=True)
class AffineMap:
    """x -> M x + c with exact rational entries; M is given by rows."""

    matrix: tuple[Vec, ...]
    offset: Vec

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(vec(r) for r in self.matrix))
        object.__setattr__(self, "offset", vec(self.offset))

    def __call__(self, point: Vec) -> Vec:
        return tuple(
            geo.vdot(row, point) + off for row, off in zip(self.matrix, self.offset)
        )

    @staticmethod
    def translation(y) -> "AffineMap":
        y = vec(y)
        n = len(y)
        eye = tuple(
            tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
            for i in range(n)
        )
        return AffineMap(eye, y)

    @staticmethod
    def dilation(r, n: int) -> "AffineMap":
        r = frac(r)
        rows = tuple(
            tuple(r if i == j else Fraction(0) for j in range(n)) for i in range(n)
        )
        return AffineMap(rows, tuple(Fraction(0) for _ in range(n)))

    @staticmethod
    def coordinate_projection(indices: Sequence[int], n: int) -> "AffineMap":
        rows = tuple(
            tuple(Fraction(1) if j == idx else Fraction(0) for j in range(n))
            for idx in indices
        )
        return AffineMap(rows, tuple(Fraction(0) for _ in indices))


# ---------------------------------------------------------------------------
# regions for restriction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned box; per-side openness supports half-open dyadic cubes.

    ``lo_open[i]`` / ``hi_open[i]`` control strictness of each face.  The
    dyadic convention used throughout (matching the half-open cube
    (0, 2^-n]^N) is lo_open=True, hi_open=False.
    """

    lo: Vec
    hi: Vec
    lo_open: tuple[bool, ...] | None = None
    hi_open: tuple[bool, ...] | None = None

    def __post_init__(self):
        lo, hi = vec(self.lo), vec(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        n = len(lo)
        object.__setattr__(self, "lo_open", tuple(self.lo_open or (False,) * n))
        object.__setattr__(self, "hi_open", tuple(self.hi_open or (False,) * n))

    @staticmethod
    def dyadic(lo, hi) -> "Box":
        lo, hi = vec(lo), vec(hi)
        n = len(lo)
        return Box(lo, hi, lo_open=(True,) * n, hi_open=(False,) * n)

    def contains(self, p: Vec) -> bool:
        for x, a, b, ao, bo in zip(p, self.lo, self.hi, self.lo_open, self.hi_open):
            if ao and not a < x:
                return False
            if not ao and not a <= x:
                return False
            if bo and not x < b:
                return False
            if not bo and not x <= b:
                return False
        return True

    def halfspace_constraints(self) -> list[tuple[Vec, Fraction]]:
        """(normal, offset) pairs with the box = {x : normal.x <= offset}."""
        n = len(self.lo)
        out = []
        for i in range(n):
            e = tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))
            out.append((e, self.hi[i]))
            out.append((tuple(-x for x in e), -self.lo[i]))
        return out


@dataclass(frozen=True)
class HalfSpace:
    """{x : normal . x OP offset} with OP in le, lt, ge, gt."""

    normal: Vec
    offset: Fraction
    op: str = "le"

    def __post_init__(self):
        object.__setattr__(self, "normal", vec(self.normal))
        object.__setattr__(self, "offset", frac(self.offset))
        if self.op not in ("le", "lt", "ge", "gt"):
            raise ChainStructureError(f"unknown half-space op {self.op!r}")
        if geo.is_zero_vec(self.normal):
            raise ChainStructureError("half-space normal must be nonzero")

    def contains(self, p: Vec) -> bool:
        v = geo.vdot(self.normal, p)
        return {
            "le": v <= self.offset,
            "lt": v < self.offset,
            "ge": v >= self.offset,
            "gt": v > self.offset,
        }[self.op]

    def complement(self) -> "HalfSpace":
        flip = {"le": "gt", "lt": "ge", "ge": "lt", "gt": "le"}
        return HalfSpace(self.normal, self.offset, flip[self.op])

    def halfspace_constraints(self) -> list[tuple[Vec, Fraction]]:
        if self.op in ("le", "lt"):
            return [(self.normal, self.offset)]
        return [(tuple(-x for x in self.normal), -self.offset)]


@dataclass(frozen=True)
class RegionSet:
    """Finite union of boxes and half-spaces.

    An empty primitive list encodes the empty region.  For restriction of
    chains of dimension >= 1 the primitives are assumed pairwise
    interior-disjoint (all uses in this package satisfy that: single boxes,
    single half-spaces, collections of disjoint dyadic cubes).
    """

    primitives: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))

    def contains(self, p: Vec) -> bool:
        return any(prim.contains(p) for prim in self.primitives)


# ---------------------------------------------------------------------------
# chains
# ---------------------------------------------------------------------------


class Chain:
    """A canonicalized polyhedral k-chain in R^N."""

    __slots__ = ("descriptor", "k", "ambient", "terms")

    def __init__(
        self,
        descriptor: GroupDescriptor,
        k: int,
        ambient: int,
        terms: Iterable[tuple[GroupElement, Simplex]] = (),
        validate: bool = True,
    ):
        self.descriptor = descriptor
        self.k = k
        self.ambient = ambient
        cleaned = []
        for g, s in terms:
            if g.descriptor != descriptor:
                raise GroupMismatchError("term coefficient from a different group")
            if s.k != k or s.ambient != ambient:
                raise ChainStructureError(
                    f"term of dimension {s.k} in R^{s.ambient} inside a "
                    f"{k}-chain in R^{ambient}"
                )
            if g.is_zero or s.is_degenerate:
                continue
            cleaned.append((g, s))
        self.terms = self._canonicalize(cleaned, validate)

    # -- canonical form ------------------------------------------------------

    def _canonicalize(self, terms, validate):
        merged: dict[tuple, GroupElement] = {}
        for g, s in terms:
            sorted_verts, sign = _sort_parity(s.vertices)
            coeff = g if sign > 0 else -g
            if sorted_verts in merged:
                merged[sorted_verts] = merged[sorted_verts] + coeff
            else:
                merged[sorted_verts] = coeff
        out = [
            (g, Simplex(v)) for v, g in merged.items() if not g.is_zero
        ]
        if self.k == 1:
            out = _resolve_segment_overlaps(out)
        elif self.k >= 2 and validate:
            _validate_disjoint_interiors(out, self.k)
        out.sort(key=lambda t: t[1].vertices)
        return tuple(out)

    # -- basic structure -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        if self.descriptor != other.descriptor or self.ambient != other.ambient:
            return False
        if self.is_zero and other.is_zero:
            return True
        return self.k == other.k and self.terms == other.terms

    def __hash__(self):
        return hash((self.descriptor, self.ambient, self.k, self.terms))

    def _check_compatible(self, other: "Chain"):
        if self.descriptor != other.descriptor:
            raise GroupMismatchError("chains over different groups")
        if self.k != other.k or self.ambient != other.ambient:
            raise ChainStructureError(
                f"cannot combine a {self.k}-chain in R^{self.ambient} with a "
                f"{other.k}-chain in R^{other.ambient}"
            )

    def __add__(self, other: "Chain") -> "Chain":
        if other.is_zero:
            return Chain(self.descriptor, self.k, self.ambient, self.terms, validate=False)
        if self.is_zero:
            return Chain(other.descriptor, other.k, other.ambient, other.terms, validate=False)
        self._check_compatible(other)
        return Chain(
            self.descriptor, self.k, self.ambient, self.terms + other.terms, validate=False
        )

    def __neg__(self) -> "Chain":
        return Chain(
            self.descriptor,
            self.k,
            self.ambient,
            [(-g, s) for g, s in self.terms],
            validate=False,
        )

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __repr__(self):
        return f"<{self.k}-chain in R^{self.ambient}, {len(self.terms)} terms>"

    # -- main operations -------------------------------------------------------

    def boundary(self) -> "Chain":
        """Alternating-sign simplicial boundary; the boundary of a 0-chain is 0."""
        if self.k == 0:
            return Chain(self.descriptor, 0, self.ambient)
        out = []
        for g, s in self.terms:
            for i, face in enumerate(s.faces()):
                out.append((g if i % 2 == 0 else -g, face))
        return Chain(self.descriptor, self.k - 1, self.ambient, out, validate=False)

    def mass(self) -> float:
        """Sum of |g_i| * vol_k(sigma_i); exact for canonical (non-overlapping)
        chains, an upper bound termwise otherwise."""
        return math.fsum(g.norm * s.volume() for g, s in self.terms)

    def pushforward(self, f: AffineMap) -> "Chain":
        """Image chain under an affine map; degenerate images are dropped."""
        m = len(f.offset)
        out = []
        for g, s in self.terms:
            out.append((g, Simplex(tuple(f(v) for v in s.vertices))))
        return Chain(self.descriptor, self.k, m, out)

    def translate(self, y) -> "Chain":
        return self.pushforward(AffineMap.translation(y))

    def dilate(self, r) -> "Chain":
        return self.pushforward(AffineMap.dilation(r, self.ambient))

    def restrict(self, region: RegionSet) -> "Chain":
        """The portion of the chain inside the region.

        Atoms of 0-chains are kept iff they lie in the region (exact,
        honouring half-open faces).  Higher-dimensional simplices are clipped
        against each primitive; the union's primitives must have disjoint
        interiors for the result to be correct.
        """
        if self.is_zero or not region.primitives:
            return Chain(self.descriptor, self.k, self.ambient)
        if self.k == 0:
            kept = [
                (g, s) for g, s in self.terms if region.contains(s.vertices[0])
            ]
            return Chain(self.descriptor, 0, self.ambient, kept, validate=False)
        out = []
        for prim in region.primitives:
            constraints = prim.halfspace_constraints()
            for g, s in self.terms:
                out.extend((g, piece) for piece in _clip_simplex(s, constraints))
        return Chain(self.descriptor, self.k, self.ambient, out, validate=False)

    def support_vertices(self) -> list[Vec]:
        seen = []
        for _, s in self.terms:
            for v in s.vertices:
                if v not in seen:
                    seen.append(v)
        return sorted(seen)

    def support_diameter(self) -> tuple[list[Vec], float]:
        """Support vertex set and its diameter (equals diam spt for polyhedral chains)."""
        verts = self.support_vertices()
        best = Fraction(0)
        for i in range(len(verts)):
            for j in range(i + 1, len(verts)):
                d = geo.dist2(verts[i], verts[j])
                if d > best:
                    best = d
        return verts, math.sqrt(float(best))


def zero_chain(descriptor: GroupDescriptor, k: int, ambient: int) -> Chain:
    return Chain(descriptor, k, ambient)


def add_chains(a: Chain, b: Chain) -> Chain:
    return a + b


# ---------------------------------------------------------------------------
# 1-dimensional overlap resolution
# ---------------------------------------------------------------------------


def _line_key(a: Vec, b: Vec):
    """Canonical (direction, base point) pair for the line through a, b."""
    d = geo.vsub(b, a)
    # primitive integer direction with positive leading entry
    denom_lcm = 1
    for x in d:
        denom_lcm = denom_lcm * x.denominator // math.gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in d]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    direction = tuple(Fraction(x) for x in ints)
    t = geo.vdot(a, direction) / geo.vdot(direction, direction)
    base = geo.vsub(a, geo.vscale(direction, t))
    return (direction, base)


def _resolve_segment_overlaps(terms):
    by_line: dict[tuple, list] = {}
    for g, s in terms:
        a, b = s.vertices
        key = _line_key(a, b)
        by_line.setdefault(key, []).append((g, a, b))
    out = []
    for (direction, base), segs in by_line.items():
        dd = geo.vdot(direction, direction)

        def param(p):
            return geo.vdot(geo.vsub(p, base), direction) / dd

        events = []
        breakpoints = set()
        for g, a, b in segs:
            ta, tb = param(a), param(b)
            if ta > tb:
                ta, tb, g = tb, ta, -g
            events.append((ta, tb, g))
            breakpoints.add(ta)
            breakpoints.add(tb)
        cuts = sorted(breakpoints)
        pieces = []
        for lo, hi in zip(cuts, cuts[1:]):
            total = None
            for ta, tb, g in events:
                if ta <= lo and hi <= tb:
                    total = g if total is None else total + g
            if total is not None and not total.is_zero:
                pieces.append([lo, hi, total])
        # merge adjacent pieces with equal coefficients
        merged = []
        for piece in pieces:
            if merged and merged[-1][1] == piece[0] and merged[-1][2] == piece[2]:
                merged[-1][1] = piece[1]
            else:
                merged.append(piece)
        for lo, hi, gsum in merged:
            p = geo.vadd(base, geo.vscale(direction, lo))
            q = geo.vadd(base, geo.vscale(direction, hi))
            out.append((gsum, Simplex((p, q))))
    return out


# ---------------------------------------------------------------------------
# interior-disjointness validation for k >= 2
# ---------------------------------------------------------------------------


def _same_affine_hull(s: Simplex, t: Simplex) -> bool:
    verts = s.vertices
    v0 = verts[0]
    edges = [geo.vsub(v, v0) for v in verts[1:]]
    for w in t.vertices:
        if geo.rank(edges + [geo.vsub(w, v0)]) > len(edges):
            return False
    return True


def _validate_disjoint_interiors(terms, k):
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            s, t = terms[i][1], terms[j][1]
            if not _same_affine_hull(s, t):
                continue
            if k != 2:
                raise UnsupportedInstanceError(
                    "interior-disjointness validation for coplanar simplices is "
                    f"only implemented for k = 2, got k = {k}"
                )
            if _triangles_overlap(s, t):
                raise ChainStructureError(
                    f"simplices {i} and {j} have overlapping interiors"
                )


def _triangles_overlap(s: Simplex, t: Simplex) -> bool:
    """Exact k=2 test: do two coplanar triangles share interior area?"""
    v0 = s.vertices[0]
    e1, e2 = s.edge_vectors
    rows_all = [[e1[i], e2[i]] for i in range(len(v0))]
    keep = geo.independent_columns([tuple(r) for r in zip(*rows_all)])
    rows2 = [rows_all[i] for i in keep[:2]]

    def coords2(p):
        rhs = [geo.vsub(p, v0)[i] for i in keep[:2]]
        sol = geo.solve_linear(rows2, rhs)
        assert sol is not None
        return sol[0]

    tri = [coords2(p) for p in t.vertices]
    # clip against alpha >= 0, beta >= 0, alpha + beta <= 1
    poly = [tuple(c) for c in tri]
    for normal, offset in (
        ((Fraction(-1), Fraction(0)), Fraction(0)),
        ((Fraction(0), Fraction(-1)), Fraction(0)),
        ((Fraction(1), Fraction(1)), Fraction(1)),
    ):
        poly = geo.clip_polygon_halfspace(poly, normal, offset)
        if not poly:
            return False
    if len(poly) < 3:
        return False
    area2 = Fraction(0)
    for idx in range(len(poly)):
        x1, y1 = poly[idx]
        x2, y2 = poly[(idx + 1) % len(poly)]
        area2 += x1 * y2 - x2 * y1
    return area2 != 0


# ---------------------------------------------------------------------------
# clipping of simplices against convex constraint lists
# ---------------------------------------------------------------------------


def _clip_simplex(s: Simplex, constraints) -> list[Simplex]:
    if s.k == 1:
        return _clip_segment(s, constraints)
    if s.k == 2:
        return _clip_triangle(s, constraints)
    raise UnsupportedInstanceError(
        f"restriction of {s.k}-dimensional simplices is not implemented (desk scale is k <= 2)"
    )


def _clip_segment(s: Simplex, constraints) -> list[Simplex]:
    a, b = s.vertices
    d = geo.vsub(b, a)
    lo, hi = Fraction(0), Fraction(1)
    for normal, offset in constraints:
        nd = geo.vdot(normal, d)
        na = geo.vdot(normal, a)
        if nd == 0:
            if na > offset:
                return []
            continue
        t = (offset - na) / nd
        if nd > 0:
            hi = min(hi, t)
        else:
            lo = max(lo, t)
        if lo >= hi:
            return []
    p = geo.vadd(a, geo.vscale(d, lo))
    q = geo.vadd(a, geo.vscale(d, hi))
    if p == q:
        return []
    return [Simplex((p, q))]


def _clip_triangle(s: Simplex, constraints) -> list[Simplex]:
    poly = list(s.vertices)
    for normal, offset in constraints:
        poly = geo.clip_polygon_halfspace(poly, normal, offset)
        if len(poly) < 3:
            return []
    return [Simplex(tri) for tri in geo.fan_triangles(poly)]

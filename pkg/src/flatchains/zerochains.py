"""0-chains, the coefficient-sum homomorphism, cone bounds, canonical
representations, and the correspondence with group-valued measures on
half-open dyadic cubes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import geometry as geo
from .chains import Box, Chain, RegionSet, Simplex
from .errors import ChainStructureError, GroupMismatchError
from .geometry import Vec, vec
from .groups import GroupDescriptor, GroupElement


class ZeroChain:
    """A finite atomic 0-chain: list of (coefficient, point) with distinct
    points and no zero coefficients (canonical on construction)."""

    __slots__ = ("descriptor", "ambient", "atoms")

    def __init__(
        self,
        descriptor: GroupDescriptor,
        ambient: int,
        atoms: Iterable[tuple[GroupElement, Vec]] = (),
    ):
        self.descriptor = descriptor
        self.ambient = ambient
        merged: dict[Vec, GroupElement] = {}
        for g, p in atoms:
            if g.descriptor != descriptor:
                raise GroupMismatchError("atom coefficient from a different group")
            p = vec(p)
            if len(p) != ambient:
                raise ChainStructureError("atom in wrong ambient dimension")
            merged[p] = merged[p] + g if p in merged else g
        self.atoms = tuple(
            (g, p) for p, g in sorted(merged.items()) if not g.is_zero
        )

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    def __eq__(self, other):
        if not isinstance(other, ZeroChain):
            return NotImplemented
        return (
            self.descriptor == other.descriptor
            and self.ambient == other.ambient
            and self.atoms == other.atoms
        )

    def __hash__(self):
        return hash((self.descriptor, self.ambient, self.atoms))

    def __add__(self, other: "ZeroChain") -> "ZeroChain":
        if self.descriptor != other.descriptor or self.ambient != other.ambient:
            raise GroupMismatchError("incompatible 0-chains")
        return ZeroChain(self.descriptor, self.ambient, self.atoms + other.atoms)

    def __neg__(self) -> "ZeroChain":
        return ZeroChain(self.descriptor, self.ambient, [(-g, p) for g, p in self.atoms])

    def __sub__(self, other: "ZeroChain") -> "ZeroChain":
        return self + (-other)

    def __repr__(self):
        return f"<0-chain in R^{self.ambient}, {len(self.atoms)} atoms>"

    def mass(self) -> float:
        return math.fsum(g.norm for g, _ in self.atoms)

    def to_chain(self) -> Chain:
        return Chain(
            self.descriptor,
            0,
            self.ambient,
            [(g, Simplex((p,))) for g, p in self.atoms],
        )

    @staticmethod
    def from_chain(chain: Chain) -> "ZeroChain":
        if chain.k != 0:
            raise ChainStructureError("not a 0-chain")
        return ZeroChain(
            chain.descriptor,
            chain.ambient,
            [(g, s.vertices[0]) for g, s in chain.terms],
        )

    def restrict(self, region: RegionSet) -> "ZeroChain":
        return ZeroChain(
            self.descriptor,
            self.ambient,
            [(g, p) for g, p in self.atoms if region.contains(p)],
        )

    def support_diameter(self) -> float:
        pts = [p for _, p in self.atoms]
        best = Fraction(0)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d = geo.dist2(pts[i], pts[j])
                if d > best:
                    best = d
        return math.sqrt(float(best))


def chi(a: ZeroChain) -> GroupElement:
    """Sum of the coefficients (the flat-continuous augmentation of 0-chains)."""
    total = a.descriptor.zero()
    for g, _ in a.atoms:
        total = total + g
    return total


def cone_flat_bound(a: ZeroChain, vertex) -> tuple[float, Chain]:
    """Cone a 0-chain to a vertex and return a flat-norm upper bound.

    The cone ``C = sum g_i [x, x_i]`` satisfies ``boundary(C) = A - chi(A)[x]``
    (checked exactly), so ``|chi(A)| + M(C)`` bounds the flat norm from above.
    """
    x = vec(vertex)
    segments = []
    for g, p in a.atoms:
        segments.append((g, Simplex((x, p))))
    cone = Chain(a.descriptor, 1, a.ambient, segments)
    total = chi(a)
    expected = a - ZeroChain(a.descriptor, a.ambient, [(total, x)])
    actual = ZeroChain.from_chain(cone.boundary())
    if actual != expected:
        raise ChainStructureError("cone boundary identity failed")
    bound = total.norm + cone.mass()
    return bound, cone


@dataclass(frozen=True)
class CanonicalRep:
    """Atoms ordered by nonincreasing coefficient norm, ties broken by the
    lexicographic order of the points."""

    atoms: tuple[tuple[GroupElement, Vec], ...]


def canonical_representation(a: ZeroChain) -> CanonicalRep:
    """Greedy extraction: repeatedly take the atom of maximal norm,
    lexicographically first point on ties, until all atoms are used."""
    remaining = list(a.atoms)
    out = []
    while remaining:
        best_norm = max(g.norm for g, _ in remaining)
        candidates = [i for i, (g, _) in enumerate(remaining) if g.norm == best_norm]
        best = min(candidates, key=lambda i: remaining[i][1])
        out.append(remaining.pop(best))
    return CanonicalRep(tuple(out))


# ---------------------------------------------------------------------------
# G-valued measures on dyadic cubes
# ---------------------------------------------------------------------------


def cube_index(point: Vec, level: int) -> tuple[int, ...]:
    """Index of the half-open dyadic cube of side 2**-level containing the point.

    Index j corresponds to the cube prod_i (2^-n (j_i - 1), 2^-n j_i]; the
    cube (0, 2^-n]^N carries index (1, ..., 1).
    """
    scale = Fraction(2) ** level
    return tuple(math.ceil(x * scale) for x in point)


def cube_center(index: tuple[int, ...], level: int) -> Vec:
    h = Fraction(1, 2 ** level)
    return tuple(h * (j - Fraction(1, 2)) for j in index)


def cube_box(index: tuple[int, ...], level: int) -> Box:
    h = Fraction(1, 2 ** level)
    lo = tuple(h * (j - 1) for j in index)
    hi = tuple(h * j for j in index)
    return Box.dyadic(lo, hi)


def parent_index(index: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-(-j // 2) for j in index)  # ceil(j / 2)


class GMeasure:
    """A compactly supported group-valued measure: an atomic part plus values
    on the cubes of one finest dyadic level."""

    __slots__ = ("descriptor", "ambient", "level", "cubes", "atoms")

    def __init__(
        self,
        descriptor: GroupDescriptor,
        ambient: int,
        level: int,
        cubes: dict[tuple[int, ...], GroupElement] | None = None,
        atoms: Iterable[tuple[GroupElement, Vec]] = (),
    ):
        self.descriptor = descriptor
        self.ambient = ambient
        self.level = level
        clean = {}
        for idx, g in (cubes or {}).items():
            if g.descriptor != descriptor:
                raise GroupMismatchError("cube value from a different group")
            if len(idx) != ambient:
                raise ChainStructureError("cube index has wrong length")
            if not g.is_zero:
                clean[tuple(int(i) for i in idx)] = g
        self.cubes = dict(sorted(clean.items()))
        merged: dict[Vec, GroupElement] = {}
        for g, p in atoms:
            if g.descriptor != descriptor:
                raise GroupMismatchError("atom value from a different group")
            p = vec(p)
            merged[p] = merged[p] + g if p in merged else g
        self.atoms = tuple((g, p) for p, g in sorted(merged.items()) if not g.is_zero)

    def total_variation(self) -> float:
        return math.fsum(g.norm for g in self.cubes.values()) + math.fsum(
            g.norm for g, _ in self.atoms
        )

    def aggregated_cubes(self, level: int) -> dict[tuple[int, ...], GroupElement]:
        """Cube values at a coarser (or equal) level; atoms folded in by their
        own half-open cube assignment at that level."""
        if level > self.level and self.cubes:
            raise ChainStructureError(
                f"cannot refine dyadic data of level {self.level} to level {level}"
            )
        out: dict[tuple[int, ...], GroupElement] = {}

        def add(idx, g):
            out[idx] = out[idx] + g if idx in out else g

        for idx, g in self.cubes.items():
            cur = idx
            for _ in range(self.level - level):
                cur = parent_index(cur)
            add(cur, g)
        for g, p in self.atoms:
            add(cube_index(p, level), g)
        return {idx: g for idx, g in sorted(out.items()) if not g.is_zero}

    def __eq__(self, other):
        if not isinstance(other, GMeasure):
            return NotImplemented
        return (
            self.descriptor == other.descriptor
            and self.ambient == other.ambient
            and self.level == other.level
            and self.cubes == other.cubes
            and self.atoms == other.atoms
        )


@dataclass
class DyadicApproximation:
    """Per-level atomic approximations A_n of a measure, the transport
    1-chains T_n with boundary(T_n) = A_n - A_{n-1}, and the certified
    flat-distance bounds M(T_n) = 2^(-n-1) sqrt(N) * sum |nu(Q)|."""

    levels: list[int]
    chains: list[ZeroChain]
    transports: list[Chain | None]
    bounds: list[float | None]


def measure_to_chain_dyadic(nu: GMeasure, n_max: int) -> DyadicApproximation:
    """The cube-center approximation of a measure, level by level.

    Level n places an atom nu(Q)[z_Q] at the center of every level-n cube Q
    with nonzero aggregated value; T_n transports level-(n-1) centers to
    level-n centers, so boundary(T_n) = A_n - A_{n-1} exactly and the Cauchy
    bound M(T_n) certifies flat convergence.
    """
    levels = list(range(n_max + 1))
    chains: list[ZeroChain] = []
    transports: list[Chain | None] = [None]
    bounds: list[float | None] = [None]
    per_level = [nu.aggregated_cubes(n) for n in levels]
    for n in levels:
        atoms = [(g, cube_center(idx, n)) for idx, g in per_level[n].items()]
        chains.append(ZeroChain(nu.descriptor, nu.ambient, atoms))
    factor_cache = {}
    for n in levels[1:]:
        segs = []
        terms = []
        for idx, g in per_level[n].items():
            z = cube_center(idx, n)
            zp = cube_center(parent_index(idx), n - 1)
            segs.append(g.norm)
            terms.append((g, Simplex((zp, z))))
        transports.append(Chain(nu.descriptor, 1, nu.ambient, terms))
        if n not in factor_cache:
            factor_cache[n] = math.sqrt(nu.ambient) * 2.0 ** (-n - 1)
        bounds.append(math.fsum(s * factor_cache[n] for s in segs))
    return DyadicApproximation(levels, chains, transports, bounds)


def chain_to_measure(a: ZeroChain, level: int) -> GMeasure:
    """The level-n dyadic snapshot of the measure S -> chi(A restricted to S)."""
    cubes: dict[tuple[int, ...], GroupElement] = {}
    for g, p in a.atoms:
        idx = cube_index(p, level)
        cubes[idx] = cubes[idx] + g if idx in cubes else g
    return GMeasure(a.descriptor, a.ambient, level, cubes)

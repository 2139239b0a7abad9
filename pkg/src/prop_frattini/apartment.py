"""Affine roots, walls and the fundamental alcove of the standard apartment.

Points are rational vectors in the coordinates ``x_i = alpha_i(x)`` dual to the
basis of simple roots, with the origin on every simple wall.  The affine root
``(a, l)`` is the function ``x -> a(x) + l``; the group ``U_{a,l}`` fixes the
half-apartment where it is non-negative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .root_system import DeltaWeights, Root, RootSystem, bc_theta, delta_weights, is_concave
from .valued_datum import (
    DatumError,
    SplittingData,
    check_compatible,
    evaluate,
    f_profiles,
    gamma_sets,
    panel_exponent,
    panel_residue_card,
)

Point = tuple[Fraction, ...]


def _frac_json(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


@dataclass(frozen=True)
class AffineRoot:
    """The affine function ``x -> root(x) + level``.

    Use :meth:`make` to check that the pair really is an affine root, i.e.
    ``level`` lies in Gamma'_a, or ``2 * level`` lies in Gamma'_{2a} for a
    multipliable ``a``.
    """

    root: Root
    level: Fraction

    @classmethod
    def make(cls, root: Root, level, split: SplittingData) -> "AffineRoot":
        level = Fraction(level)
        if panel_exponent(root, level, split) == 0:
            raise DatumError(f"({root}, {level}) is not an affine root")
        return cls(root, level)

    def __call__(self, x: Sequence) -> Fraction:
        return evaluate(self.root, x) + self.level

    def __neg__(self) -> "AffineRoot":
        return AffineRoot(-self.root, -self.level)

    def __str__(self) -> str:
        return f"({self.root}, {self.level})"

    def to_json(self) -> dict:
        return {"root": list(self.root.coeffs), "level": _frac_json(self.level)}


@dataclass
class AlcoveProfile:
    """An alcove described by its bounding affine roots and the maps f_c, f'_c."""

    sys: RootSystem
    split: SplittingData
    weights: DeltaWeights
    bounding: tuple[AffineRoot, ...]
    vertices: tuple[Point, ...]
    f_c: dict[Root, Fraction] = field(repr=False)
    f_prime: dict[Root, Fraction] = field(repr=False)

    @property
    def interior_point(self) -> Point:
        n = len(self.vertices)
        return tuple(sum((v[i] for v in self.vertices), Fraction(0)) / n for i in range(self.sys.rank))

    @property
    def theta(self) -> Root:
        return self.weights.theta

    def to_json(self) -> dict:
        return {
            "schema": "prop-frattini/alcove/1",
            "family": self.sys.kind.family,
            "rank": self.sys.rank,
            "ramified": self.split.ramified,
            "d_prime": self.split.d_prime,
            "theta": list(self.theta.coeffs),
            "walls": [w.to_json() for w in self.bounding],
            "vertices": [[_frac_json(x) for x in v] for v in self.vertices],
            "f_prime": [
                {"root": list(r.coeffs), "value": _frac_json(self.f_prime[r])} for r in self.sys.roots if not r.divisible
            ],
        }


def _negative_wall(sys: RootSystem, split: SplittingData, weights: DeltaWeights) -> tuple[Root, Fraction]:
    if not sys.is_reduced:
        return bc_theta(sys), Fraction(1, 2)
    if split.ramified:
        return weights.theta, Fraction(1)
    return sys.highest, Fraction(1)


def fundamental_alcove(sys: RootSystem, split: SplittingData) -> AlcoveProfile:
    """The alcove ``{x : alpha(x) > 0 for alpha in Delta, theta(x) < c}``.

    ``theta`` is the highest root (reduced, unramified), the short dominant
    root (reduced, ramified) or half the highest root (non-reduced), and ``c``
    is 1, 1 and 1/2 respectively.
    """
    check_compatible(sys, split)
    weights = delta_weights(sys, split)
    top, c = _negative_wall(sys, split, weights)
    n = sys.rank
    vertices = [tuple(Fraction(0) for _ in range(n))]
    for i in range(n):
        vertices.append(tuple(c / top.coeffs[i] if j == i else Fraction(0) for j in range(n)))
    bounding = tuple(AffineRoot.make(a, 0, split) for a in sys.basis) + (AffineRoot.make(-top, c, split),)
    f, fp = f_profiles(vertices, sys, split)
    return AlcoveProfile(sys, split, weights, bounding, tuple(vertices), f, fp)


def f_c_values(profile: AlcoveProfile, root: Root) -> Fraction:
    """``f'_c(root)`` for the alcove of ``profile``."""
    return profile.f_prime[profile.sys.root(root.coeffs)]


# ---------------------------------------------------------------------------
# walls


def _affine_rank(points: Sequence[Point]) -> int:
    """Dimension of the affine hull of a finite point set."""
    if len(points) <= 1:
        return 0
    base = points[0]
    rows = [[p[i] - base[i] for i in range(len(base))] for p in points[1:]]
    rank = 0
    ncols = len(base)
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                k = rows[r][col] / rows[rank][col]
                rows[r] = [x - k * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _region_vertices(region) -> list[Point] | None:
    """Vertices of a box ``(lo, hi)`` or an explicit vertex list; None when empty."""
    if isinstance(region, tuple) and len(region) == 2 and all(isinstance(c, (tuple, list)) for c in region):
        lo, hi = (tuple(Fraction(x) for x in c) for c in region)
        if len(lo) != len(hi):
            raise ValueError("box corners have different dimensions")
        if any(a > b for a, b in zip(lo, hi)):
            return None
        return sorted({tuple(v) for v in product(*zip(lo, hi))})
    pts = [tuple(Fraction(x) for x in v) for v in region]
    return pts or None


def _wall_hyperplanes(split: SplittingData, root: Root, lo: Fraction, hi: Fraction) -> list[AffineRoot]:
    """Affine roots of direction ``root`` with ``-level`` in ``[lo, hi]``."""
    prof = gamma_sets(root, split)
    levels = set(prof.gamma_prime.members_between(-hi, -lo))
    if root.multipliable:
        levels.update(l2 / 2 for l2 in prof.gamma_double.members_between(-2 * hi, -2 * lo))
    return [AffineRoot(root, l) for l in sorted(levels)]


def walls_in_box(sys: RootSystem, split: SplittingData, box) -> list[AffineRoot]:
    """Affine roots whose wall meets the region in codimension one.

    ``box`` is either ``(lo, hi)`` (two corner tuples) or a list of vertices of
    a convex polytope.  A wall is listed when it separates two vertices or
    contains a facet of the region.  Each hyperplane is listed once, directed
    by a positive non-divisible root; for a multipliable ``a`` the levels run
    over Gamma'_a together with half of Gamma'_{2a}.
    """
    verts = _region_vertices(box)
    if verts is None:
        return []
    dim = _affine_rank(verts)
    out = []
    for r in sys.positive_roots:
        if r.divisible:
            continue
        values = [evaluate(r, v) for v in verts]
        lo, hi = min(values), max(values)
        for w in _wall_hyperplanes(split, r, lo, hi):
            zero_level = -w.level
            if lo < zero_level < hi:
                out.append(w)
                continue
            on = [v for v, val in zip(verts, values) if val == zero_level]
            if on and _affine_rank(on) >= dim - 1:
                out.append(w)
    out.sort(key=lambda w: (w.root.height, w.root.coeffs, w.level))
    return out


def unit_ball_alcove_count(profile: AlcoveProfile, split: SplittingData, q: int) -> int:
    """Alcoves of the combinatorial unit ball: the alcove plus its panel residues.

    ``q`` is the cardinality of the residue field of L_d.
    """
    total = 1
    for w in profile.bounding:
        total += panel_residue_card(w.root, w.level, split, q) - 1
    return total


def panel_exponents(profile: AlcoveProfile) -> list[int]:
    return [panel_exponent(w.root, w.level, profile.split) for w in profile.bounding]


def coroot_coordinates(sys: RootSystem, a: Root) -> tuple[Fraction, ...]:
    """Coordinates ``alpha_i(a^vee)`` of the coroot of ``a``."""
    return tuple(Fraction(2) * sys.inner(alpha, a) / sys.sqlength(a) for alpha in sys.basis)


def reflect_point(sys: RootSystem, wall: AffineRoot, x: Sequence) -> Point:
    """Orthogonal reflection of ``x`` through the wall of ``wall``."""
    value = wall(x)
    cv = coroot_coordinates(sys, wall.root)
    return tuple(Fraction(xi) - value * c for xi, c in zip(x, cv))


def neighbor_alcove(profile: AlcoveProfile, index: int) -> AlcoveProfile:
    """The alcove adjacent to ``profile`` across its ``index``-th bounding wall."""
    sys, split = profile.sys, profile.split
    wall = profile.bounding[index]
    verts = tuple(reflect_point(sys, wall, v) for v in profile.vertices)
    # bounding walls of the image: reflect every wall through ``wall``
    refl = []
    for w in profile.bounding:
        if w == wall:
            refl.append(-wall)
            continue
        image = sys.reflect(wall.root, w.root)
        # level chosen so that the image function vanishes on the reflected wall
        probe = [v for v in profile.vertices if w(v) == 0][0]
        level = -evaluate(image, reflect_point(sys, wall, probe))
        refl.append(AffineRoot(image, level))
    f, fp = f_profiles(verts, sys, split)
    return AlcoveProfile(sys, split, profile.weights, tuple(refl), verts, f, fp)


def profile_is_concave(profile: AlcoveProfile, rounded: bool = False) -> bool:
    """Concavity of ``f_c`` (or of the rounded ``f'_c`` when ``rounded``).

    ``f_c`` is always concave.  The rounded map is concave for reduced
    unramified data only: rounding up to Gamma'_a breaks (C1) once root
    lengths carry different sets of values.
    """
    return is_concave(profile.sys, profile.f_prime if rounded else profile.f_c)


__all__ = [
    "AffineRoot",
    "AlcoveProfile",
    "fundamental_alcove",
    "f_c_values",
    "walls_in_box",
    "unit_ball_alcove_count",
    "panel_exponents",
    "coroot_coordinates",
    "reflect_point",
    "neighbor_alcove",
    "profile_is_concave",
]

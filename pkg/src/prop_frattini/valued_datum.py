"""Sets of values of root groups, quotient dimensions and the maps f and f'.

Valuations are normalized so that the valuation group of L' is the integers.
Levels are exact :class:`fractions.Fraction` values (in practice half-integers).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd
from typing import Iterable, Sequence

import numpy as np

from .root_system import Root, RootSystem, _length_ratio

Number = int | Fraction
Point = Sequence[Number]


class DatumError(ValueError):
    """Inconsistent splitting data or an invalid request on sets of values."""


@dataclass(frozen=True)
class SplittingData:
    """Degrees attached to the tower K, L_d, L'.

    ``d`` is the order of the *-action, ``d_prime = [L':L_d]``; ``e_prime`` and
    ``f_prime`` split ``d_prime`` into ramification index and residue degree,
    ``e`` and ``f`` do the same for ``L_d/K``, and ``|kappa_K| = p**m``.
    """

    d: int = 1
    d_prime: int = 1
    ramified: bool = False
    e_prime: int = 1
    f_prime: int = 1
    e: int = 1
    f: int = 1
    m: int = 1
    p: int | None = None

    def __post_init__(self) -> None:
        if self.d not in (1, 2, 3, 6):
            raise DatumError("d must be one of 1, 2, 3, 6")
        if self.d_prime != min(self.d, 3):
            raise DatumError("d' must equal min(d, 3)")
        if self.e_prime * self.f_prime != self.d_prime:
            raise DatumError("e' * f' must equal d'")
        if self.d_prime > 1 and self.ramified != (self.e_prime == self.d_prime):
            raise DatumError("ramified must agree with e' = d'")
        if self.d_prime == 1 and self.ramified:
            raise DatumError("a trivial extension L'/L_d is not ramified")
        if min(self.e, self.f, self.m) < 1:
            raise DatumError("e, f and m must be positive")
        if self.p is not None and (self.p < 3 or any(self.p % k == 0 for k in range(2, int(self.p**0.5) + 1))):
            raise DatumError("p must be an odd prime")

    @classmethod
    def make(cls, d: int = 1, ramified: bool = False, *, e: int = 1, f: int = 1, m: int = 1, p: int | None = None) -> "SplittingData":
        dp = min(d, 3)
        ramified = ramified and dp > 1
        return cls(d, dp, ramified, dp if ramified else 1, 1 if ramified else dp, e, f, m, p)

    @property
    def q(self) -> int:
        """Cardinality of the residue field of L_d (needs ``p``)."""
        if self.p is None:
            raise DatumError("the residue cardinality needs p")
        return self.p ** (self.m * self.f)


@dataclass(frozen=True)
class ValueSet:
    """The progression ``offset + step * Z``; the offset is reduced into ``[0, step)``."""

    offset: Fraction
    step: Fraction

    def __init__(self, offset: Number, step: Number):
        step = Fraction(step)
        if step <= 0:
            raise DatumError("step must be positive")
        offset = Fraction(offset)
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "offset", offset - step * floor(offset / step))

    def __contains__(self, x: Number) -> bool:
        return ((Fraction(x) - self.offset) / self.step).denominator == 1

    def least_at_least(self, x: Number) -> Fraction:
        """Least member ``>= x``."""
        k = -floor((self.offset - Fraction(x)) / self.step)
        return self.offset + k * self.step

    def next_value(self, x: Number) -> Fraction:
        """Least member ``> x``."""
        k = floor((Fraction(x) - self.offset) / self.step) + 1
        return self.offset + k * self.step

    def members_between(self, lo: Number, hi: Number) -> list[Fraction]:
        out = []
        x = self.least_at_least(lo)
        while x <= hi:
            out.append(x)
            x += self.step
        return out

    def __str__(self) -> str:
        def fmt(v: Fraction) -> str:
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

        step = "Z" if self.step == 1 else f"{fmt(self.step)}Z"
        return step if self.offset == 0 else f"{fmt(self.offset)}+{step}"


def next_value(level: Number, vs: ValueSet) -> Fraction:
    """``level^+``: the least member of ``vs`` strictly above ``level``."""
    return vs.next_value(level)


@dataclass(frozen=True)
class RootValueProfile:
    root: Root
    gamma: ValueSet
    gamma_prime: ValueSet
    gamma_double: ValueSet | None
    residue_card: int | None

    def to_json(self) -> dict:
        return {
            "root": list(self.root.coeffs),
            "class": _root_class(self.root),
            "gamma": str(self.gamma),
            "gamma_prime": str(self.gamma_prime),
            "gamma_double": None if self.gamma_double is None else str(self.gamma_double),
            "residue_card": self.residue_card,
        }


def _root_class(root: Root) -> str:
    if root.multipliable:
        return "multipliable"
    if root.divisible:
        return "divisible"
    return root.length_class


def _is_bc_root(root: Root) -> bool:
    return root.multipliable or root.divisible or root.length_class == "middle"


def _double_set(split: SplittingData) -> ValueSet:
    """Gamma of the divisible root 2a: Z (unramified) or 1 + 2Z (ramified)."""
    return ValueSet(1, 2) if split.ramified else ValueSet(0, 1)


def f_res(root: Root, split: SplittingData) -> int:
    """Residue degree by which a quotient dimension is scaled to count over kappa_{L_d}.

    Quotients of multipliable and divisible roots are already measured over
    kappa_{L_d}; roots with splitting field L' contribute ``f'``.
    """
    if split.d_prime == 1:
        return 1
    if _is_bc_root(root):
        return split.f_prime if root.length_class == "middle" else 1
    return split.f_prime if root.length_class == "short" else 1


def gamma_sets(root: Root, split: SplittingData, q: int | None = None) -> RootValueProfile:
    """Sets of values of ``root``.

    ``q`` is the cardinality of the residue field of L_d; by default it is
    taken from ``split`` when ``p`` is known.
    """
    if q is None and split.p is not None:
        q = split.q
    card = None
    if root.multipliable:
        g, gp, gd = ValueSet(0, Fraction(1, 2)), ValueSet(0, 1), _double_set(split)
        if q is not None:
            card = q ** split.f_prime
    elif root.divisible:
        g = gp = _double_set(split)
        gd = None
        if q is not None:
            card = q
    else:
        gd = None
        if not _is_bc_root(root) and split.ramified and root.length_class == "long":
            g = gp = ValueSet(0, split.d_prime)
        else:
            g = gp = ValueSet(0, 1)
        if q is not None:
            card = q ** f_res(root, split)
    return RootValueProfile(root, g, gp, gd, card)


def _half_root(root: Root) -> Root:
    return Root(tuple(c // 2 for c in root.coeffs), True, False, "short")


def _double_root(root: Root) -> Root:
    return Root(tuple(2 * c for c in root.coeffs), False, True, "long")


def quotient_dim(root: Root, level: Number, split: SplittingData) -> int:
    """Dimension of ``X_{a,l}`` modulo ``X_{2a,2l}``.

    Counted over the residue field of L_{2a} for multipliable roots and of
    L_a otherwise; zero exactly when ``level`` is not in Gamma'_a.
    """
    prof = gamma_sets(root, split)
    if Fraction(level) not in prof.gamma_prime:
        return 0
    if root.multipliable:
        return 1 if split.ramified else 2
    return 1


def panel_exponent(root: Root, level: Number, split: SplittingData) -> int:
    """``f_res * (d(a/2, l/2) + d(a, l) + d(2a, 2l))``."""
    level = Fraction(level)
    total = quotient_dim(root, level, split)
    if root.divisible:
        total += quotient_dim(_half_root(root), level / 2, split)
    if root.multipliable:
        total += quotient_dim(_double_root(root), 2 * level, split)
    return f_res(root, split) * total


def panel_residue_card(root: Root, level: Number, split: SplittingData, q: int) -> int:
    """Number of alcoves in the residue of a panel of the wall ``H_{root, level}``.

    ``q`` is the cardinality of the residue field of L_d.
    """
    exponent = panel_exponent(root, level, split)
    if exponent == 0:
        raise DatumError(f"there is no wall for root {root} at level {level}")
    return 1 + q**exponent


def evaluate(root: Root, point: Point) -> Fraction:
    """``root(x)`` for a point given by its coordinates ``x_i = alpha_i(x)``."""
    return sum((c * Fraction(x) for c, x in zip(root.coeffs, point)), Fraction(0))


def f_prime_from_f(root: Root, value: Number, split: SplittingData) -> Fraction:
    """Least admissible level: min over Gamma'_a and, for multipliable a, half of Gamma'_{2a}."""
    value = Fraction(value)
    prof = gamma_sets(root, split)
    best = prof.gamma_prime.least_at_least(value)
    if root.multipliable:
        best = min(best, prof.gamma_double.least_at_least(2 * value) / 2)
    return best


def f_profile(points: Iterable[Point], root: Root, split: SplittingData) -> tuple[Fraction, Fraction]:
    """``(f_Omega(a), f'_Omega(a))`` for the finite set ``points``."""
    pts = list(points)
    if not pts:
        raise DatumError("f_profile needs a non-empty point set")
    f = max(-evaluate(root, x) for x in pts)
    return f, f_prime_from_f(root, f, split)


def f_profiles(points: Iterable[Point], sys: RootSystem, split: SplittingData) -> tuple[dict[Root, Fraction], dict[Root, Fraction]]:
    """The maps f_Omega and f'_Omega on every root of ``sys``."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    if not pts:
        raise DatumError("f_profiles needs a non-empty point set")
    den = 1
    for p in pts:
        for x in p:
            den = den * x.denominator // gcd(den, x.denominator)
    scaled = np.array([[int(x * den) for x in p] for p in pts], dtype=np.int64)
    # exact integer values of -a(x) * den for all roots and points
    sup = (-(sys.coeff_matrix @ scaled.T)).max(axis=1)
    f, fp = {}, {}
    for r, v in zip(sys.roots, sup.tolist()):
        f[r] = Fraction(v, den)
        fp[r] = f_prime_from_f(r, f[r], split)
    return f, fp


def check_compatible(sys: RootSystem, split: SplittingData) -> None:
    """Raise unless ``sys`` can be the relative root system for ``split``."""
    if not sys.is_reduced:
        if split.d_prime != 2:
            raise DatumError("a non-reduced relative system needs d' = 2")
        return
    if split.d_prime == 1:
        return
    ratio = _length_ratio(sys)
    if ratio != split.d_prime:
        raise DatumError(f"{sys.kind.name} is incompatible with d' = {split.d_prime}")


def profile_table(sys: RootSystem, split: SplittingData, q: int | None = None) -> list[RootValueProfile]:
    """One profile per root class present in ``sys`` (first positive representative)."""
    seen: dict[str, RootValueProfile] = {}
    for r in sorted(sys.positive_roots, key=lambda r: (r.height, r.coeffs)):
        key = _root_class(r)
        if key not in seen:
            seen[key] = gamma_sets(r, split, q)
    return list(seen.values())


__all__ = [
    "DatumError",
    "SplittingData",
    "ValueSet",
    "RootValueProfile",
    "next_value",
    "gamma_sets",
    "f_res",
    "quotient_dim",
    "panel_exponent",
    "panel_residue_card",
    "evaluate",
    "f_prime_from_f",
    "f_profile",
    "f_profiles",
    "check_compatible",
    "profile_table",
]

"""Level recursions, Frattini level assignments and minimal generator counts.

All levels are exact fractions, normalized as in :mod:`valued_datum`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping

import numpy as np

from .apartment import AlcoveProfile, _frac_json, fundamental_alcove
from .root_system import DeltaWeights, Root, RootSystem, RootSystemKind, build, delta_coeffs
from .valued_datum import DatumError, SplittingData, f_res, gamma_sets, quotient_dim

SCHEMA = "prop-frattini/1"


class HypothesisError(ValueError):
    """The requested computation falls outside the hypotheses it relies on."""


def check_residue_characteristic(sys_kind: RootSystemKind, p: int | None) -> None:
    """p is odd, and at least 5 for G2 and non-reduced systems."""
    if p is None:
        return
    if p == 2:
        raise HypothesisError("residue characteristic 2 is excluded (hypothesis: p != 2)")
    if sys_kind.family in ("G2", "BC") and p < 5:
        raise HypothesisError(f"{sys_kind.name} requires p >= 5 (hypothesis: p >= 5 for G2 and non-reduced systems)")


def _gamma(root: Root, split: SplittingData):
    return gamma_sets(root, split).gamma


# ---------------------------------------------------------------------------
# level recursions


def _common(values: list[Fraction]) -> tuple[np.ndarray, int]:
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    return np.array([int(v * den) for v in values], dtype=np.int64), den


def positive_bounds(sys: RootSystem, l: Mapping[Root, Fraction], split: SplittingData | None = None) -> dict[Root, Fraction]:
    """``l'_b = sum_alpha n_alpha(b) l_alpha`` on every positive root.

    With ``split`` the simple values are checked to lie in their sets of values.
    """
    simple = [Fraction(l[a]) for a in sys.basis]
    if split is not None:
        for a, v in zip(sys.basis, simple):
            if v not in _gamma(a, split):
                raise DatumError(f"l at simple root {a} is {v}, not in Gamma")
    vec, den = _common(simple)
    pos = sys.positive_roots
    sums = np.array([b.coeffs for b in pos], dtype=np.int64) @ vec
    return {b: Fraction(int(x), den) for b, x in zip(pos, sums)}


@dataclass
class NegativeBounds:
    """The values ``l''_c`` plus the trialitarian warning, if raised."""

    values: dict[Root, Fraction]
    warning: str | None = None

    def __getitem__(self, root: Root) -> Fraction:
        return self.values[root]

    def __iter__(self):
        return iter(self.values)

    def items(self):
        return self.values.items()


def trialitarian_guard(sys: RootSystem, weights: DeltaWeights, l: Mapping[Root, Fraction]) -> bool:
    """``l'_theta + l_{-theta} <= 1`` when G2 comes with delta_theta = 3 (else vacuous)."""
    theta = weights.theta
    if sys.kind.family != "G2" or weights.delta[theta] != 3:
        return True
    lp_theta = sum((n * Fraction(l[a]) for n, a in zip(theta.coeffs, sys.basis)), Fraction(0))
    return lp_theta + Fraction(l[-theta]) <= 1


def negative_bounds(
    sys: RootSystem,
    weights: DeltaWeights,
    l: Mapping[Root, Fraction],
    split: SplittingData | None = None,
) -> NegativeBounds:
    """``l''_c`` from ``delta_c l''_c = delta_theta l_{-theta} + sum delta_alpha n'_alpha(c) l_alpha``.

    ``n'_alpha(c) = n^delta_alpha(c) + n^delta_alpha(theta)`` are the
    coordinates of ``delta_c c + delta_theta theta`` over the scaled basis.
    Divisible roots get ``l''_{2c} = 2 l''_c``.
    """
    theta = weights.theta
    delta = weights.delta
    l_simple = [Fraction(l[a]) for a in sys.basis]
    l_low = Fraction(l[-theta])
    if split is not None:
        for a, v in zip(sys.basis, l_simple):
            if v not in _gamma(a, split):
                raise DatumError(f"l at simple root {a} is {v}, not in Gamma")
        if l_low not in _gamma(-theta, split):
            raise DatumError(f"l at -theta is {l_low}, not in Gamma")
    # rows: n'_alpha(c) = n^delta_alpha(c) + n^delta_alpha(theta) for every non-divisible c
    nd = sys.nd_roots
    n_theta = np.array(delta_coeffs(sys, weights, theta), dtype=np.int64)
    n_prime = np.array([delta_coeffs(sys, weights, c) for c in nd], dtype=np.int64) + n_theta
    if (n_prime < 0).any():
        raise DatumError("negative coefficient in the lowest-root expansion")  # pragma: no cover
    vec, den = _common(l_simple + [l_low])
    d_simple = np.array([delta[a] for a in sys.basis], dtype=np.int64)
    totals = n_prime @ (d_simple * vec[:-1]) + delta[theta] * vec[-1]
    out: dict[Root, Fraction] = {c: Fraction(int(t), den * delta[c]) for c, t in zip(nd, totals)}
    for c in sys.roots:
        if c.divisible:
            out[c] = 2 * out[sys.root(tuple(x // 2 for x in c.coeffs))]
    warning = None
    if not trialitarian_guard(sys, weights, l):
        warning = "trialitarian bound l'_theta + l_{-theta} <= 1 fails; the containment needs it"
    return NegativeBounds(out, warning)


# ---------------------------------------------------------------------------
# Frattini levels


@dataclass(frozen=True)
class RootLevel:
    root: Root
    base_level_raw: Fraction
    base_level: Fraction
    frattini_level: Fraction
    adjunct_2a: Fraction | None
    bounding: bool

    def to_json(self) -> dict:
        return {
            "root": list(self.root.coeffs),
            "f_c": _frac_json(self.base_level_raw),
            "base_level": _frac_json(self.base_level),
            "frattini_level": _frac_json(self.frattini_level),
            "adjunct_2a": None if self.adjunct_2a is None else _frac_json(self.adjunct_2a),
            "bounding": self.bounding,
        }


@dataclass
class LevelAssignment:
    """Levels of the groups ``V_{a,c}`` generating the Frattini subgroup, per non-divisible root."""

    sys: RootSystem
    split: SplittingData
    entries: dict[Root, RootLevel] = field(repr=False)

    def __getitem__(self, root: Root) -> RootLevel:
        return self.entries[root]

    def bounding_roots(self) -> list[Root]:
        return [r for r, e in self.entries.items() if e.bounding]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "frattini-levels",
            "family": self.sys.kind.family,
            "rank": self.sys.rank,
            "ramified": self.split.ramified,
            "d_prime": self.split.d_prime,
            "dimension": frattini_dimension(self),
            "levels": [self.entries[r].to_json() for r in self.sys.nd_roots],
        }


def frattini_levels(profile: AlcoveProfile, split: SplittingData | None = None, p: int | None = None) -> LevelAssignment:
    """Level of ``V_{a,c}`` for every non-divisible root.

    Roots directing a bounding wall are raised to the next value; in the
    non-reduced case a multipliable such root with ``L_a/L_{2a}`` unramified
    and ``f'_c(a)`` in Gamma'_a also keeps ``U_{2a, 2 f'_c(a)}``.
    """
    split = profile.split if split is None else split
    sys = profile.sys
    p = split.p if p is None else p
    check_residue_characteristic(sys.kind, p)
    if not sys.is_reduced and sys.rank < 2:
        raise HypothesisError("the non-reduced description needs rank >= 2; use rank1_levels for BC1")
    walls = {w.root for w in profile.bounding}
    entries = {}
    for a in sys.nd_roots:
        prof = gamma_sets(a, split)
        base = profile.f_prime[a]
        adjunct = None
        if a in walls:
            level = prof.gamma.next_value(base)
            if a.multipliable and not split.ramified and base in prof.gamma_prime:
                adjunct = 2 * base
        else:
            level = base
        entries[a] = RootLevel(a, profile.f_c[a], base, level, adjunct, a in walls)
    return LevelAssignment(sys, split, entries)


def frattini_dimension(assign: LevelAssignment) -> int:
    """Dimension over F_p, divided by m f, of the Frattini quotient.

    Sums ``f_res(a) * (d(a, f'_c(a)) + d(2a, 2 f'_c(a)))`` over the bounding
    roots, leaving out the ``2a`` term when it is kept as an adjunct.
    """
    total = 0
    sys, split = assign.sys, assign.split
    for a in assign.bounding_roots():
        e = assign.entries[a]
        dim = quotient_dim(a, e.base_level, split)
        if a.multipliable and e.adjunct_2a is None:
            dim += quotient_dim(sys.scaled(a, 2), 2 * e.base_level, split)
        total += f_res(a, split) * dim
    return total


# ---------------------------------------------------------------------------
# quasi-split types and generator counts


_TAG = re.compile(r"^\^?([1236])([A-G])(\d*)$")


@dataclass(frozen=True)
class QuasiSplitType:
    d: int
    letter: str
    n: int
    l: int
    relative: RootSystemKind
    row: str

    @property
    def label(self) -> str:
        return f"^{self.d}{self.letter}_{self.n}"


def resolve_type(tag: str, n: int | None = None, l: int | None = None) -> QuasiSplitType:
    """Read a tag like ``1A``, ``2D``, ``2E6`` or ``3D4`` with an absolute rank ``n`` or a relative rank ``l``."""
    m = _TAG.match(tag.strip())
    if not m:
        raise HypothesisError(f"unknown tag {tag!r}")
    d, letter, digits = int(m.group(1)), m.group(2), m.group(3)
    if digits:
        fixed = int(digits)
        if n is not None and n != fixed:
            raise HypothesisError(f"tag {tag} fixes n = {fixed}")
        n = fixed

    def need_n() -> int:
        if n is None:
            raise HypothesisError(f"tag {tag} needs --n")
        return n

    if d == 1:
        if letter in "ABCD" and not digits:
            rank = n if n is not None else l
            if rank is None:
                raise HypothesisError(f"tag {tag} needs --n or --l")
            if n is not None and l is not None and n != l:
                raise HypothesisError("for split groups n = l")
            kind = RootSystemKind(letter, rank)
            return QuasiSplitType(1, letter, rank, rank, kind, "^1X_l")
        fam = {"E": f"E{n}", "F": "F4", "G": "G2"}.get(letter)
        if fam is None or fam not in ("E6", "E7", "E8", "F4", "G2") or (letter in "FG" and n not in (None, int(fam[1]))):
            raise HypothesisError(f"unknown tag {tag!r}")
        kind = RootSystemKind(fam, int(fam[1]))
        row = "^1G_2" if fam == "G2" else "^1X_l"
        return QuasiSplitType(1, letter, kind.rank, kind.rank, kind, row)
    if d == 2 and letter == "A":
        nn = need_n()
        if nn < 2:
            raise HypothesisError("^2A_n needs n >= 2")
        if nn % 2:
            rel = RootSystemKind("C", (nn + 1) // 2)
            row = "^2A_{2l-1}"
        else:
            rel = RootSystemKind("BC", nn // 2)
            row = "^2A_2" if nn == 2 else "^2A_{2l}"
        if l is not None and l != rel.rank:
            raise HypothesisError(f"^2A_{nn} has relative rank {rel.rank}")
        return QuasiSplitType(2, "A", nn, rel.rank, rel, row)
    if d == 2 and letter == "D" and not digits:
        if n is None and l is not None:
            n = l + 1
        nn = need_n()
        if nn < 4:
            raise HypothesisError("^2D_n needs n >= 4")
        if l is not None and l != nn - 1:
            raise HypothesisError(f"^2D_{nn} has relative rank {nn - 1}")
        return QuasiSplitType(2, "D", nn, nn - 1, RootSystemKind("B", nn - 1), "^2D_{l+1}")
    if d == 2 and letter == "E" and n == 6:
        return QuasiSplitType(2, "E", 6, 4, RootSystemKind("F4", 4), "^2E_6")
    if d in (3, 6) and letter == "D" and n == 4:
        return QuasiSplitType(d, "D", 4, 2, RootSystemKind("G2", 2), "^3D_4/^6D_4")
    raise HypothesisError(f"unknown tag {tag!r}")


@dataclass(frozen=True)
class GeneratorReport:
    """Minimal number of topological generators of a pro-p Sylow subgroup."""

    family_tag: str
    qtype: QuasiSplitType
    xi: int | tuple[int, int]
    d_P: int | tuple[int, int]
    m: int
    f: int
    f_prime: int
    ramified: bool
    p: int | None
    formula: str
    substitution: str
    hypotheses: tuple[str, ...]

    @property
    def split(self) -> SplittingData:
        return SplittingData.make(self.qtype.d, self.ramified, f=self.f, m=self.m, p=self.p)

    @property
    def exact(self) -> bool:
        return isinstance(self.xi, int)

    def to_json(self) -> dict:
        def val(x):
            return x if isinstance(x, int) else {"min": x[0], "max": x[1]}

        return {
            "schema": SCHEMA,
            "kind": "generator-count",
            "tag": self.family_tag,
            "type": self.qtype.label,
            "d": self.qtype.d,
            "n": self.qtype.n,
            "l": self.qtype.l,
            "relative_root_system": self.qtype.relative.name,
            "inputs": {"m": self.m, "f": self.f, "fprime": self.f_prime, "ramified": self.ramified, "p": self.p},
            "xi": val(self.xi),
            "d_P": val(self.d_P),
            "derivation": {"row": self.qtype.row, "formula": self.formula, "substitution": self.substitution},
            "hypotheses": list(self.hypotheses),
        }


def _resolve_ramification(d: int, ramified: bool | None, fprime: int | None) -> bool:
    dp = min(d, 3)
    if dp == 1:
        if ramified:
            raise HypothesisError("split groups have no ramified L'/L_d")
        if fprime not in (None, 1):
            raise HypothesisError("split groups have f' = 1")
        return False
    if d == 6:
        if ramified is False or fprime not in (None, 1):
            raise HypothesisError("^6D_4 needs a ramified (non-Galois) cubic L'/L_d, so f' = 1")
        return True
    if fprime is not None:
        if fprime not in (1, dp):
            raise HypothesisError(f"f' must be 1 (ramified) or {dp} (unramified)")
        from_fp = fprime == 1
        if ramified is not None and ramified != from_fp:
            raise HypothesisError("f' is inconsistent with the ramification flag")
        return from_fp
    return bool(ramified)


def generator_count(
    tag: str,
    *,
    n: int | None = None,
    l: int | None = None,
    m: int = 1,
    f: int = 1,
    ramified: bool | None = None,
    fprime: int | None = None,
    p: int | None = None,
) -> GeneratorReport:
    """``d(P) = m f xi`` with ``xi`` read from the quasi-split classification.

    ``ramified`` refers to ``L'/L_d``; by default it is unramified, except for
    ``^6D_4``.  ``^2A_2`` only yields an interval.
    """
    qt = resolve_type(tag, n, l)
    if m < 1 or f < 1:
        raise HypothesisError("m and f must be positive")
    ram = _resolve_ramification(qt.d, ramified, fprime)
    dp = min(qt.d, 3)
    fp = 1 if (dp == 1 or ram) else dp
    hyps = ["p != 2"]
    check_residue_characteristic(qt.relative, p)
    if qt.relative.family in ("G2", "BC"):
        hyps.append("p >= 5")
    if p is not None:
        q = p ** (m * f)
        if qt.d == 6 and q % 3 != 2:
            raise HypothesisError(f"^6D_4 needs |kappa_(L_d)| = {q} = 2 mod 3 (non-Galois cubic)")
        if qt.d == 3 and ram and q % 3 != 1:
            raise HypothesisError(f"a ramified ^3D_4 needs |kappa_(L_d)| = {q} = 1 mod 3 (Galois cubic)")
    ll = qt.l
    row = qt.row
    if row == "^1X_l":
        xi, formula, sub = ll + 1, "xi = l+1", f"{ll}+1"
    elif row == "^1G_2":
        xi, formula, sub = 3, "xi = 3", "3"
    elif row == "^2A_{2l-1}":
        xi, formula, sub = fp * (ll - 1) + 2, "xi = f'(l-1)+2", f"{fp}*({ll}-1)+2"
    elif row == "^2D_{l+1}":
        xi, formula, sub = ll + fp, "xi = l+f'", f"{ll}+{fp}"
    elif row == "^2E_6":
        xi, formula, sub = 3 + 2 * fp, "xi = 3+2f'", f"3+2*{fp}"
    elif row == "^3D_4/^6D_4":
        xi, formula, sub = 2 + fp, "xi = 2+f'", f"2+{fp}"
    elif row == "^2A_{2l}":
        xi, formula, sub = fp * ll + 1, "xi = f'l+1", f"{fp}*{ll}+1"
    else:
        xi = (fp + 1, 3 * fp + 3)
        formula, sub = "f'+1 <= xi <= 3f'+3", f"{fp}+1 <= xi <= 3*{fp}+3"
    d_p = m * f * xi if isinstance(xi, int) else (m * f * xi[0], m * f * xi[1])
    return GeneratorReport(tag, qt, xi, d_p, m, f, fp, ram, p, formula, sub, tuple(hyps))


def xi_from_levels(qt: QuasiSplitType, ramified: bool) -> int:
    """``xi`` recomputed as the Frattini quotient dimension of the fundamental alcove."""
    if qt.relative.family == "BC" and qt.relative.rank < 2:
        raise HypothesisError("BC1 has no exact level description")
    sys = build(qt.relative)
    split = SplittingData.make(qt.d, ramified)
    return frattini_dimension(frattini_levels(fundamental_alcove(sys, split), split))


# ---------------------------------------------------------------------------
# rank one


@dataclass(frozen=True)
class Rank1Levels:
    """Levels of the root groups and torus depth contained in ``H^p [H, H]``."""

    kind: str
    level: Fraction
    positive_level: Fraction
    negative_level: Fraction
    torus_depth: int
    epsilon: int
    swapped: bool

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "rank1-levels",
            "system": self.kind,
            "level": _frac_json(self.level),
            "positive_level": _frac_json(self.positive_level),
            "negative_level": _frac_json(self.negative_level),
            "torus_depth": self.torus_depth,
            "epsilon": self.epsilon,
            "swapped": self.swapped,
        }


def rank1_levels(split: SplittingData, kind: str, level, p: int | None = None, improved: bool = False) -> Rank1Levels:
    """Containments for a subgroup ``H`` of a rank-one group.

    ``kind="reduced"``: ``H`` contains ``U_{a,l}``, the bounded torus and
    ``U_{-a,-l+1}``; then ``H^p[H,H]`` contains ``U_{a,l+1}``, ``U_{-a,-l+2}``
    and the whole bounded torus (depth 1).

    ``kind="BC1"``: ``H`` contains ``U_{-a,-l}``, the torus and
    ``U_{a,l+1/2}``; the torus part of ``H^p[H,H]`` has depth ``3 + eps``
    (``1 + 2 eps`` under the ``improved`` hypothesis).
    """
    level = Fraction(level)
    p = split.p if p is None else p
    if kind == "reduced":
        if p == 2:
            raise HypothesisError("residue characteristic 2 is excluded (hypothesis: p != 2)")
        if level.denominator != 1:
            raise DatumError("reduced rank one levels are integers")
        return Rank1Levels("reduced", level, level + 1, -level + 2, 1, 0, False)
    if kind != "BC1":
        raise ValueError("kind must be 'reduced' or 'BC1'")
    check_residue_characteristic(RootSystemKind("BC", 1), p)
    if (2 * level).denominator != 1:
        raise DatumError("BC1 levels are half-integers")
    swapped = level.denominator != 1
    base = -level - Fraction(1, 2) if swapped else level
    eps = int(split.ramified and base % 2 == 1)
    depth = 1 + 2 * eps if improved else 3 + eps
    if split.ramified:
        neg, pos = -level + Fraction(3, 2), level + 2
    else:
        neg, pos = -level + 1, level + Fraction(3, 2)
    return Rank1Levels("BC1", level, pos, neg, depth, eps, swapped)


__all__ = [
    "HypothesisError",
    "check_residue_characteristic",
    "positive_bounds",
    "NegativeBounds",
    "trialitarian_guard",
    "negative_bounds",
    "RootLevel",
    "LevelAssignment",
    "frattini_levels",
    "frattini_dimension",
    "QuasiSplitType",
    "resolve_type",
    "GeneratorReport",
    "generator_count",
    "xi_from_levels",
    "Rank1Levels",
    "rank1_levels",
]

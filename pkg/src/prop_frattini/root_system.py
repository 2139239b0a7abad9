"""Irreducible root systems of types A-G and BC.

Roots are stored by their integer coordinates over the basis of simple roots.
Each system is built from a standard Euclidean realization with rational
coordinates, which is only used to compute inner products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

import numpy as np

if TYPE_CHECKING:
    from .valued_datum import SplittingData

Vector = tuple[Fraction, ...]
Coeffs = tuple[int, ...]

FAMILIES = ("A", "B", "C", "D", "E6", "E7", "E8", "F4", "G2", "BC")


class RootSystemError(ValueError):
    """Invalid root system request or violated precondition."""


@dataclass(frozen=True)
class RootSystemKind:
    family: str
    rank: int

    def __post_init__(self) -> None:
        fam, n = self.family, self.rank
        if fam not in FAMILIES:
            raise RootSystemError(f"unknown family {fam!r}")
        if not isinstance(n, int) or n < 1:
            raise RootSystemError("rank must be a positive integer")
        fixed = {"E6": 6, "E7": 7, "E8": 8, "F4": 4, "G2": 2}
        if fam in fixed and n != fixed[fam]:
            raise RootSystemError(f"{fam} has rank {fixed[fam]}, not {n}")
        if fam in ("B", "C") and n < 2:
            raise RootSystemError(f"{fam} needs rank >= 2")
        if fam == "D" and n < 3:
            raise RootSystemError("D needs rank >= 3")

    @property
    def name(self) -> str:
        return self.family if self.family[-1].isdigit() else f"{self.family}{self.rank}"


@dataclass(frozen=True)
class Root:
    """A root given by its coordinates over the simple roots.

    Equality and hashing only look at ``coeffs``; the flags are descriptive.
    """

    coeffs: Coeffs
    multipliable: bool = field(default=False, compare=False)
    divisible: bool = field(default=False, compare=False)
    length_class: str = field(default="long", compare=False)

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    @property
    def is_positive(self) -> bool:
        return self.height > 0

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.coeffs), self.multipliable, self.divisible, self.length_class)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coeffs) + ")"


def _half(*xs) -> Vector:
    return tuple(Fraction(x, 2) for x in xs)


def _unit(n: int, i: int, scale: int = 1) -> Vector:
    return tuple(Fraction(scale if j == i else 0) for j in range(n))


def _simple_vectors(kind: RootSystemKind) -> tuple[list[Vector], list[Vector]]:
    """Simple roots and extra generators (for BC) of the standard realization."""
    fam, n = kind.family, kind.rank
    e = lambda i, dim=n: _unit(dim, i)  # noqa: E731
    sub = lambda a, b: tuple(x - y for x, y in zip(a, b))  # noqa: E731
    add = lambda a, b: tuple(x + y for x, y in zip(a, b))  # noqa: E731
    extra: list[Vector] = []
    if fam == "A":
        dim = n + 1
        simple = [sub(e(i, dim), e(i + 1, dim)) for i in range(n)]
    elif fam in ("B", "C", "BC"):
        simple = [sub(e(i), e(i + 1)) for i in range(n - 1)]
        simple.append(_unit(n, n - 1, 2 if fam == "C" else 1))
        if fam == "BC":
            extra.append(_unit(n, n - 1, 2))
    elif fam == "D":
        simple = [sub(e(i), e(i + 1)) for i in range(n - 1)]
        simple.append(add(e(n - 2), e(n - 1)))
    elif fam in ("E6", "E7", "E8"):
        e8 = lambda i: _unit(8, i)  # noqa: E731
        first = _half(1, -1, -1, -1, -1, -1, -1, 1)
        simple = [first, add(e8(0), e8(1))] + [sub(e8(i), e8(i - 1)) for i in range(1, 7)]
        simple = simple[:n]
    elif fam == "F4":
        simple = [sub(e(1), e(2)), sub(e(2), e(3)), e(3), _half(1, -1, -1, -1)]
    elif fam == "G2":
        simple = [
            (Fraction(1), Fraction(-1), Fraction(0)),
            (Fraction(-2), Fraction(1), Fraction(1)),
        ]
    else:  # pragma: no cover - guarded by RootSystemKind
        raise RootSystemError(fam)
    return simple, extra


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _reflect(v: Vector, a: Vector) -> Vector:
    k = 2 * _dot(v, a) / _dot(a, a)
    return tuple(x - k * y for x, y in zip(v, a))


def _invert(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                k = aug[r][col]
                aug[r] = [x - k * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class RootSystem:
    """An irreducible, possibly non-reduced, root system with a fixed basis."""

    def __init__(self, kind: RootSystemKind):
        self.kind = kind
        self.rank = kind.rank
        simple, extra = _simple_vectors(kind)
        self._simple_vectors = simple
        self.gram = [[_dot(a, b) for b in simple] for a in simple]
        self._gram_inv = _invert(self.gram)
        # integer copy of the Gram matrix for fast inner products
        self._gram_scale = 1
        for row in self.gram:
            for x in row:
                self._gram_scale = self._gram_scale * x.denominator // gcd(self._gram_scale, x.denominator)
        self._igram = [[int(x * self._gram_scale) for x in row] for row in self.gram]
        self._gc_cache: dict[Coeffs, tuple[int, ...]] = {}
        # closure under simple reflections of the simple roots (and 2e_n for BC)
        seen: set[Vector] = set()
        frontier = list(simple) + list(extra)
        while frontier:
            v = frontier.pop()
            if v in seen:
                continue
            seen.add(v)
            for a in simple:
                w = _reflect(v, a)
                if w not in seen:
                    frontier.append(w)
        coeff_of = {v: self._coordinates(v) for v in seen}
        sqlen = {c: _dot(v, v) for v, c in coeff_of.items()}
        coeff_set = set(coeff_of.values())
        lengths = sorted(set(sqlen.values()))
        roots = []
        for c in coeff_set:
            mult = tuple(2 * x for x in c) in coeff_set
            div = all(x % 2 == 0 for x in c) and tuple(x // 2 for x in c) in coeff_set
            if kind.family == "BC":
                cls = "short" if mult else ("long" if div else "middle")
            elif len(lengths) == 1:
                cls = "long"
            else:
                cls = "short" if sqlen[c] == lengths[0] else "long"
            roots.append(Root(c, mult, div, cls))
        roots.sort(key=lambda r: (-r.height, tuple(-x for x in r.coeffs)))
        self.roots: tuple[Root, ...] = tuple(roots)
        self._by_coeffs = {r.coeffs: r for r in roots}
        self._sqlen = sqlen
        self.basis: tuple[Root, ...] = tuple(self._by_coeffs[tuple(int(i == j) for j in range(self.rank))] for i in range(self.rank))
        self.cartan = [
            [int(2 * self.gram[i][j] / self.gram[j][j]) for j in range(self.rank)] for i in range(self.rank)
        ]
        self.highest = self._find_highest(r for r in roots)
        self.nd_roots = tuple(r for r in roots if not r.divisible)
        self.nm_roots = tuple(r for r in roots if not r.multipliable)

    # -- helpers ----------------------------------------------------------------
    def _coordinates(self, v: Vector) -> Coeffs:
        pairings = [_dot(v, a) for a in self._simple_vectors]
        coords = [sum((self._gram_inv[i][j] * pairings[j] for j in range(self.rank)), Fraction(0)) for i in range(self.rank)]
        if any(c.denominator != 1 for c in coords):
            raise RootSystemError("vector is not in the root lattice")
        return tuple(int(c) for c in coords)

    def _find_highest(self, candidates: Iterable[Root]) -> Root:
        cands = [r for r in candidates if r.is_positive]
        best = max(cands, key=lambda r: r.height)
        if not all(all(x <= y for x, y in zip(r.coeffs, best.coeffs)) for r in cands):
            raise RootSystemError("no coefficientwise maximal root")  # pragma: no cover
        return best

    def __repr__(self) -> str:
        return f"RootSystem({self.kind.name}, {len(self.roots)} roots)"

    def __contains__(self, item) -> bool:
        coeffs = item.coeffs if isinstance(item, Root) else tuple(item)
        return coeffs in self._by_coeffs

    def __iter__(self):
        return iter(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def is_reduced(self) -> bool:
        return self.kind.family != "BC"

    @property
    def is_simply_laced(self) -> bool:
        return self.kind.family in ("A", "D", "E6", "E7", "E8")

    @property
    def positive_roots(self) -> tuple[Root, ...]:
        return tuple(r for r in self.roots if r.is_positive)

    def root(self, coeffs: Iterable[int]) -> Root:
        """Canonical root object for a coefficient vector."""
        key = tuple(int(c) for c in coeffs)
        try:
            return self._by_coeffs[key]
        except KeyError:
            raise RootSystemError(f"{key} is not a root of {self.kind.name}") from None

    def root_from_vector(self, v: Sequence) -> Root:
        """Root with the given Euclidean coordinates in the standard realization."""
        return self.root(self._coordinates(tuple(Fraction(x) for x in v)))

    def vector(self, r: Root) -> Vector:
        dim = len(self._simple_vectors[0])
        out = [Fraction(0)] * dim
        for c, a in zip(r.coeffs, self._simple_vectors):
            for i in range(dim):
                out[i] += c * a[i]
        return tuple(out)

    def _igram_times(self, coeffs: Coeffs) -> tuple[int, ...]:
        cached = self._gc_cache.get(coeffs)
        if cached is None:
            cached = tuple(sum(g * c for g, c in zip(row, coeffs)) for row in self._igram)
            self._gc_cache[coeffs] = cached
        return cached

    def _iinner(self, a: Coeffs, b: Coeffs) -> int:
        return sum(x * y for x, y in zip(a, self._igram_times(b)))

    def inner(self, a: Root, b: Root) -> Fraction:
        return Fraction(self._iinner(a.coeffs, b.coeffs), self._gram_scale)

    def sqlength(self, a: Root) -> Fraction:
        return self.inner(a, a)

    def pairing(self, b: Root, a: Root) -> int:
        """``<b, a^vee> = 2 (a|b) / (a|a)``, always an integer."""
        num, den = 2 * self._iinner(a.coeffs, b.coeffs), self._iinner(a.coeffs, a.coeffs)
        if num % den:
            raise RootSystemError("non-integral Cartan pairing")  # pragma: no cover
        return num // den

    def reflect(self, a: Root, b: Root) -> Root:
        k = self.pairing(b, a)
        return self.root(tuple(y - k * x for x, y in zip(a.coeffs, b.coeffs)))

    def add(self, a: Root, b: Root) -> Root | None:
        key = tuple(x + y for x, y in zip(a.coeffs, b.coeffs))
        return self._by_coeffs.get(key)

    def scaled(self, a: Root, k: int) -> Root | None:
        return self._by_coeffs.get(tuple(k * x for x in a.coeffs))

    def collinear(self, a: Root, b: Root) -> bool:
        i = next(k for k, x in enumerate(a.coeffs) if x)
        return all(a.coeffs[i] * y == b.coeffs[i] * x for x, y in zip(a.coeffs, b.coeffs))

    @cached_property
    def index(self) -> dict[Root, int]:
        return {r: i for i, r in enumerate(self.roots)}

    @cached_property
    def sum_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Index triples ``(i, j, k)`` with ``roots[i] + roots[j] = roots[k]``."""
        triples = []
        for i, a in enumerate(self.roots):
            for j, b in enumerate(self.roots):
                s = self.add(a, b)
                if s is not None:
                    triples.append((i, j, self.index[s]))
        arr = np.array(triples, dtype=np.int64).reshape(-1, 3)
        return arr[:, 0], arr[:, 1], arr[:, 2]

    @cached_property
    def coeff_matrix(self) -> np.ndarray:
        return np.array([r.coeffs for r in self.roots], dtype=np.int64)


# ---------------------------------------------------------------------------
# operations


def build(kind: RootSystemKind | tuple[str, int]) -> RootSystem:
    """The root system of ``kind``; instances are shared and must not be mutated."""
    if not isinstance(kind, RootSystemKind):
        kind = RootSystemKind(*kind)
    return _build(kind)


@lru_cache(maxsize=None)
def _build(kind: RootSystemKind) -> RootSystem:
    return RootSystem(kind)


def highest_root(sys: RootSystem) -> Root:
    return sys.highest


@dataclass(frozen=True)
class DeltaWeights:
    """The scaling ``delta`` making the fundamental alcove uniform, with theta."""

    delta: Mapping[Root, int]
    lam: Mapping[Root, int]
    theta: Root

    def of(self, a: Root) -> int:
        return self.delta[a]


def _length_ratio(sys: RootSystem) -> int:
    lengths = sorted({sys.sqlength(r) for r in sys.nd_roots})
    if len(lengths) == 1:
        return 1
    ratio = lengths[-1] / lengths[0]
    return int(ratio)


def delta_weights(sys: RootSystem, splitting: "SplittingData") -> DeltaWeights:
    """delta map and theta for a given splitting (reads ``d_prime`` and ``ramified``)."""
    dprime = splitting.d_prime
    ramified = splitting.ramified and dprime > 1
    if sys.is_reduced:
        ratio = _length_ratio(sys)
        if dprime > 1 and ratio != dprime:
            raise RootSystemError(
                f"{sys.kind.name} cannot arise with d' = {dprime} (long/short squared ratio is {ratio})"
            )
        lam = {r: (dprime if r.length_class == "short" and ratio > 1 else 1) for r in sys.roots}
        delta = dict(lam) if ramified else {r: 1 for r in sys.roots}
    else:
        lam = {r: (2 if r.multipliable else 1) for r in sys.roots}
        delta = dict(lam)

    def dcoeffs(c: Root) -> tuple[Fraction, ...]:
        return tuple(Fraction(delta[c] * n, delta[a]) for n, a in zip(c.coeffs, sys.basis))

    positives = [r for r in sys.nd_roots if r.is_positive]
    theta = max(positives, key=lambda r: sum(dcoeffs(r)))
    top = dcoeffs(theta)
    if not all(all(x <= y for x, y in zip(dcoeffs(r), top)) for r in positives):
        raise RootSystemError("delta-scaled system has no dominant root")  # pragma: no cover
    return DeltaWeights(delta, lam, theta)


def delta_coeffs(sys: RootSystem, weights: DeltaWeights, c: Root) -> tuple[int, ...]:
    """Coordinates ``n^delta_alpha(c)`` of ``delta_c c`` over the scaled basis."""
    out = []
    dc = weights.delta[c]
    for n, a in zip(c.coeffs, sys.basis):
        q, r = divmod(dc * n, weights.delta[a])
        if r:
            raise RootSystemError("scaled coordinates are not integral")  # pragma: no cover
        out.append(q)
    return tuple(out)


def decompose_positive(sys: RootSystem, b: Root) -> tuple[Root, Root]:
    """Write ``b = a + b'`` with ``a`` simple, ``b'`` positive and not collinear to ``a``.

    The simple roots are scanned in basis order and the first one with
    positive inner product against ``b`` that yields a valid pair is used.
    """
    b = sys.root(b.coeffs)
    if not b.is_positive:
        raise RootSystemError("decompose_positive needs a positive root")
    if any(b == a or sys.scaled(a, 2) == b for a in sys.basis):
        raise RootSystemError("b lies in the basis or its double")
    for a in sys.basis:
        if sys.inner(a, b) <= 0:
            continue
        rest = sys._by_coeffs.get(tuple(y - x for x, y in zip(a.coeffs, b.coeffs)))
        if rest is not None and rest.is_positive and not sys.collinear(a, rest):
            return a, rest
    # a root with no such simple root would contradict the standard lemma
    raise RootSystemError(f"no decomposition found for {b}")  # pragma: no cover


def lowest_root_coeffs(sys: RootSystem, gamma: Root) -> tuple[int, ...]:
    """Non-negative ``n`` with ``gamma = -h + sum n_alpha alpha``."""
    gamma = sys.root(gamma.coeffs)
    return tuple(g + h for g, h in zip(gamma.coeffs, sys.highest.coeffs))


def _generic_short_decomposition(sys: RootSystem, c: Root) -> tuple[Root, Root]:
    shorts = [r for r in sys.roots if r.length_class == "short"]
    for b in sorted(sys.positive_roots, key=lambda r: (r.height, r.coeffs)):
        a = sys._by_coeffs.get(tuple(x - y for x, y in zip(c.coeffs, b.coeffs)))
        if a is not None and a in shorts and not sys.collinear(a, b):
            return a, b
    raise RootSystemError(f"no short decomposition of {c}")


def short_root_decomposition(sys: RootSystem, c: Root) -> tuple[Root, Root]:
    """``c = a + b`` with ``a`` short, ``b`` positive, following the explicit case tables.

    Types outside the tables (C2) fall back to a search over positive roots.
    """
    if not sys.is_reduced or sys.is_simply_laced:
        raise RootSystemError("needs a reduced non-simply-laced system")
    c = sys.root(c.coeffs)
    if c.length_class != "short":
        raise RootSystemError("c must be a short root")

    class _Ramified:
        d_prime = _length_ratio(sys)
        ramified = True

    theta = delta_weights(sys, _Ramified()).theta
    if c == -theta:
        raise RootSystemError("c = -theta has no such decomposition")
    fam, n = sys.kind.family, sys.rank
    v = sys.vector(c)
    E = lambda i, s=1: tuple(Fraction(s if j == i else 0) for j in range(n))  # noqa: E731
    plus = lambda *vs: tuple(sum(x) for x in zip(*vs))  # noqa: E731
    neg = lambda w: tuple(-x for x in w)  # noqa: E731
    if fam == "B":
        i = next(j for j, x in enumerate(v) if x != 0)
        if v[i] > 0:
            j = 0 if i != 0 else 1
            a, b = neg(E(j)), plus(E(i), E(j))
        else:
            a, b = neg(E(0)), plus(E(0), neg(E(i)))
        return sys.root_from_vector(a), sys.root_from_vector(b)
    if fam == "C" and n >= 3:
        nz = [(j, x) for j, x in enumerate(v) if x != 0]
        (i, si), (j, sj) = nz
        if si > 0:
            a, b = plus(neg(E(i)), E(j, sj)), E(i, 2)
        elif i > 0:
            # c = -e_i +- e_j with 1 < i < j
            a, b = plus(neg(E(0)), neg(E(i))), plus(E(0), E(j, sj))
        elif j > 1:
            a, b = plus(neg(E(0)), neg(E(1))), plus(E(1), E(j, sj))
        else:
            a, b = plus(neg(E(0)), neg(E(2))), plus(E(1), E(2))
        return sys.root_from_vector(a), sys.root_from_vector(b)
    if fam == "F4":
        half = Fraction(1, 2)
        if v == E(0):
            a, b = _half(1, -1, -1, -1), _half(1, 1, 1, 1)
        elif all(abs(x) in (0, 1) for x in v):
            i = next(j for j, x in enumerate(v) if x != 0)
            s = v[i]
            a = tuple(Fraction(-1, 2) if j == 0 else (s * half if j == i else Fraction(-1, 2)) for j in range(4))
            b = tuple(half if j == 0 else (s * half if j == i else half) for j in range(4))
        elif v[0] > 0:
            a = (-v[0], -v[1], v[2], v[3])
            b = plus(E(0), E(1, 2 * v[1]))
        else:
            a = neg(E(0))
            b = (-v[0],) + tuple(v[1:])
        return sys.root_from_vector(a), sys.root_from_vector(b)
    if fam == "G2":
        table = {
            (2, 1): ((1, 0), (1, 1)),
            (1, 1): ((-1, 0), (2, 1)),
            (1, 0): ((-1, -1), (2, 1)),
            (-1, 0): ((-2, -1), (1, 1)),
            (-1, -1): ((-2, -1), (1, 0)),
        }
        a, b = table[c.coeffs]
        return sys.root(a), sys.root(b)
    return _generic_short_decomposition(sys, c)


def is_concave(sys: RootSystem, f: Mapping[Root, Fraction]) -> bool:
    """Check the three concavity axioms for a map on all roots."""
    vals = [Fraction(f[r]) for r in sys.roots]
    den = 1
    for v in vals:
        den = den * v.denominator // gcd(den, v.denominator)
    x = np.array([int(v * den) for v in vals], dtype=np.int64)
    for a in sys.roots:
        if f[a] + f[-a] < 0:
            return False
        two = sys.scaled(a, 2)
        if two is not None and f[two] > 2 * f[a]:
            return False
    i, j, k = sys.sum_table
    return bool(np.all(x[k] <= x[i] + x[j]))


def bc_theta(sys: RootSystem) -> Root:
    if sys.kind.family != "BC":
        raise RootSystemError("only for BC systems")
    return sys.root(tuple(x // 2 for x in sys.highest.coeffs))


def basis_swap_bc(sys: RootSystem) -> tuple[tuple[Root, ...], Root]:
    """Replace the multipliable simple root ``a`` by ``-theta``; ``-a`` becomes half-highest."""
    theta = bc_theta(sys)
    a = next(r for r in sys.basis if r.multipliable)
    new_basis = tuple(r for r in sys.basis if r != a) + (-theta,)
    return new_basis, -a


def coordinates_in(sys: RootSystem, basis: Sequence[Root], r: Root) -> tuple[Fraction, ...]:
    """Coordinates of ``r`` in an arbitrary basis of the root span."""
    n = sys.rank
    m = [[Fraction(basis[j].coeffs[i]) for j in range(n)] for i in range(n)]
    inv = _invert(m)
    return tuple(sum((inv[i][j] * r.coeffs[j] for j in range(n)), Fraction(0)) for i in range(n))


def all_kinds(max_rank: int = 8) -> list[RootSystemKind]:
    """Every valid kind with rank up to ``max_rank``."""
    out = []
    for fam in FAMILIES:
        for n in range(1, max_rank + 1):
            try:
                out.append(RootSystemKind(fam, n))
            except RootSystemError:
                pass
    return out

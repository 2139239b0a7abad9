"""Truncated Laurent series over finite fields and their small Galois extensions.

Every series lives in a fixed window of valuations ``[-depth, precision)`` of a
model field ``F_{p^k}((x))`` and carries its own absolute precision.  Arrays of
series share one :class:`LocalField` context and are stored as integer digit
arrays of shape ``batch + (width, k)``, so whole batches of random trials are
multiplied with a handful of numpy calls.

Valuations are measured in units of the model uniformizer ``x``: ``x = t`` for
the base field and unramified extensions, ``x = s`` with ``s**e = t`` for the
ramified ones.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

INF = 1 << 40
_EXACT = INF // 2


class FieldError(ValueError):
    """Unsupported or inconsistent field configuration."""


class IndeterminateValuation(ArithmeticError):
    """All stored coefficients vanish but the series is only known to finite precision."""


class WindowError(ArithmeticError):
    """A result has terms of valuation below the representable window."""


# ---------------------------------------------------------------------------
# finite fields


# Monic irreducible moduli, coefficients listed from degree 0 upwards.
_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (3, 0, 1),
    (5, 3): (1, 1, 0, 1),
    (7, 2): (1, 0, 1),
    (7, 3): (5, 0, 0, 1),
    (11, 2): (1, 0, 1),
    (11, 3): (4, 1, 0, 1),
    (13, 2): (11, 0, 1),
    (13, 3): (11, 1, 0, 1),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _poly_has_root_free_factorization(poly: Sequence[int], p: int) -> bool:
    # degree <= 3: irreducible iff no root in F_p
    return all(sum(c * pow(a, i, p) for i, c in enumerate(poly)) % p for a in range(p))


def _search_modulus(p: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (0, 1)
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        poly = tuple(low) + (1,)
        if low[0] and _poly_has_root_free_factorization(poly, p):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")


class FiniteField:
    """The field F_{p^k} realized as F_p[g]/(modulus).

    Elements are handled either as integer codes ``sum d_i p**i`` or as digit
    vectors ``(d_0, ..., d_{k-1})``.
    """

    def __init__(self, p: int, k: int = 1):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        if p == 2:
            raise FieldError("residue characteristic 2 is not supported")
        if not 1 <= k <= 6:
            raise FieldError("extension degree must be between 1 and 6")
        self.p = p
        self.k = k
        self.size = p**k
        if k == 1:
            self.modulus: tuple[int, ...] = (0, 1)
        elif (p, k) in _MODULI:
            self.modulus = _MODULI[(p, k)]
        else:
            self.modulus = _search_modulus(p, k)

    def __repr__(self) -> str:
        return f"FiniteField(p={self.p}, k={self.k})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self) -> int:
        return hash((self.p, self.k))

    # -- conversions -------------------------------------------------------
    def digits(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        powers = self.p ** np.arange(self.k, dtype=np.int64)
        return (codes[..., None] // powers) % self.p

    def codes(self, digits) -> np.ndarray:
        digits = np.asarray(digits, dtype=np.int64)
        powers = self.p ** np.arange(self.k, dtype=np.int64)
        return (digits * powers).sum(-1)

    # -- tables -------------------------------------------------------------
    @cached_property
    def reduction(self) -> np.ndarray:
        """Matrix sending coefficients of g^0..g^(2k-2) to reduced digits."""
        k, p = self.k, self.p
        rows = []
        cur = [1] + [0] * (k - 1)
        for _ in range(2 * k - 1):
            rows.append(list(cur))
            # multiply by g
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(c - top * m) % p for c, m in zip(cur, self.modulus[:k])]
        return np.array(rows, dtype=np.int64)

    def mul_digits(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        k = self.k
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        prod = np.zeros(shape + (2 * k - 1,), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[..., i + j] += a[..., i] * b[..., j]
        return (prod @ self.reduction) % self.p

    def mul(self, a: int, b: int) -> int:
        return int(self.codes(self.mul_digits(self.digits(a), self.digits(b))))

    def add(self, a: int, b: int) -> int:
        return int(self.codes((self.digits(a) + self.digits(b)) % self.p))

    def neg(self, a: int) -> int:
        return int(self.codes((-self.digits(a)) % self.p))

    @cached_property
    def _mul_table(self) -> np.ndarray:
        all_codes = np.arange(self.size)
        d = self.digits(all_codes)
        return self.codes(self.mul_digits(d[:, None, :], d[None, :, :]))

    @cached_property
    def inverse_table(self) -> np.ndarray:
        """``inverse_table[c]`` is the code of 1/c (0 maps to 0)."""
        table = self._mul_table
        inv = np.zeros(self.size, dtype=np.int64)
        for c in range(1, self.size):
            inv[c] = int(np.nonzero(table[c] == 1)[0][0])
        return inv

    def inv(self, a: int) -> int:
        if a % self.size == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return int(self.inverse_table[a])

    def power(self, a: int, n: int) -> int:
        result = 1
        base = a
        if n < 0:
            base, n = self.inv(a), -n
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    @cached_property
    def frobenius(self) -> np.ndarray:
        """Digit matrix ``M`` with ``digits(c**p) = digits(c) @ M``."""
        # row i holds the digits of (g**i)**p; the code of g**i is p**i
        rows = [self.digits(self.power(self.p**i, self.p)) for i in range(self.k)]
        return np.array(rows, dtype=np.int64)

    def format(self, code: int) -> str:
        d = [int(x) for x in self.digits(code)]
        if self.k == 1:
            return str(d[0])
        terms = []
        for i, c in enumerate(d):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "g" if i == 1 else f"g^{i}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        if not terms:
            return "0"
        if terms == [str(d[0])]:
            return terms[0]
        return "(" + "+".join(terms) + ")"

    def parse(self, text: str) -> int:
        text = text.strip().strip("()").replace(" ", "")
        if not text:
            raise ValueError("empty residue literal")
        digits = [0] * self.k
        for term in re.findall(r"[+-]?[^+-]+", text):
            sign = -1 if term.startswith("-") else 1
            term = term.lstrip("+-")
            m = re.fullmatch(r"(\d*)\*?(g(?:\^(\d+))?)?", term)
            if not m or (not m.group(1) and not m.group(2)):
                raise ValueError(f"bad residue term {term!r}")
            coeff = int(m.group(1)) if m.group(1) else 1
            deg = 0 if not m.group(2) else int(m.group(3) or 1)
            if deg >= self.k:
                raise ValueError(f"power g^{deg} exceeds residue degree {self.k}")
            digits[deg] = (digits[deg] + sign * coeff) % self.p
        return int(self.codes(digits))


# ---------------------------------------------------------------------------
# extensions


@dataclass(frozen=True)
class ExtensionDesc:
    """A Galois extension L/K of K = F_q((t)) of degree 1, 2 or 3.

    ``degree == 1`` describes K itself.  Unramified extensions extend the
    residue field and act by Frobenius on coefficients; ramified ones adjoin
    ``s`` with ``s**degree = t`` and act by ``s -> zeta*s``.
    """

    p: int
    degree: int = 1
    ramified: bool = False
    base_degree: int = 1

    def __post_init__(self) -> None:
        if not _is_prime(self.p) or self.p == 2:
            raise FieldError("p must be an odd prime")
        if self.degree not in (1, 2, 3):
            raise FieldError("extension degree must be 1, 2 or 3")
        if self.degree == 1 and self.ramified:
            raise FieldError("a degree-1 extension cannot be ramified")
        if self.degree > 1 and self.base_degree != 1:
            raise FieldError("extensions are modelled over prime residue fields only")
        if not 1 <= self.base_degree <= 3:
            raise FieldError("base residue degree must be 1, 2 or 3")
        if self.ramified and self.degree == 3 and self.p % 3 != 1:
            raise FieldError("a ramified Galois cubic model needs q = 1 mod 3")

    @property
    def e(self) -> int:
        return self.degree if self.ramified else 1

    @property
    def f(self) -> int:
        return 1 if self.ramified else self.degree

    @property
    def q(self) -> int:
        return self.p**self.base_degree

    @property
    def tau(self) -> str:
        if self.degree == 1:
            return "identity"
        if self.ramified:
            return "s -> -s" if self.degree == 2 else "s -> zeta*s"
        return "Frobenius on coefficients"

    def label(self) -> str:
        if self.degree == 1:
            return f"F_{self.q}((t))"
        kind = "ramified" if self.ramified else "unramified"
        return f"{kind} degree-{self.degree} extension of F_{self.q}((t))"


def _primitive_root_of_unity(p: int, order: int) -> int:
    for z in range(2, p):
        if pow(z, order, p) == 1 and all(pow(z, d, p) != 1 for d in range(1, order)):
            return z
    if order == 2:
        return p - 1
    raise FieldError(f"F_{p} has no primitive {order}-th root of unity")


def _split_terms(text: str) -> list[tuple[str, str]]:
    """Split on top-level signs, skipping those inside parentheses or exponents."""
    out: list[tuple[str, str]] = []
    depth, sign, start = 0, "", 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > 0 and text[i - 1] != "^":
            if text[start:i]:
                out.append((sign, text[start:i]))
            sign, start = ch, i + 1
        elif ch in "+-" and i == 0:
            sign, start = ch, 1
    if text[start:]:
        out.append((sign, text[start:]))
    return out


class LocalField:
    """Arithmetic context: an extension description plus a representable window."""

    def __init__(self, desc: ExtensionDesc | None = None, precision: int = 24, depth: int = 16, *, p: int | None = None):
        if desc is None:
            if p is None:
                raise FieldError("give an ExtensionDesc or p")
            desc = ExtensionDesc(p)
        if precision < 1 or depth < 0:
            raise FieldError("precision must be positive and depth non-negative")
        self.desc = desc
        self.p = desc.p
        self.precision = precision
        self.depth = depth
        self.width = precision + depth
        self.offset = -depth
        self.residue = FiniteField(desc.p, desc.base_degree * desc.f)
        self.k = self.residue.k
        self.e = desc.e
        self.var = "s" if desc.ramified else "t"
        self._valuations = np.arange(self.width, dtype=np.int64) + self.offset
        # Galois generator: digit map and per-column scaling
        self._frob: np.ndarray | None = None
        self._twist: np.ndarray | None = None
        if desc.degree > 1 and not desc.ramified:
            self._frob = self.residue.frobenius
        if desc.ramified:
            zeta = _primitive_root_of_unity(self.p, desc.degree)
            self.zeta = zeta
            self._twist = np.array([pow(zeta, int(v) % desc.degree, self.p) for v in self._valuations], dtype=np.int64)

    def __repr__(self) -> str:
        return f"LocalField({self.desc.label()}, precision={self.precision}, depth={self.depth})"

    @property
    def degree(self) -> int:
        return self.desc.degree

    @property
    def ramified(self) -> bool:
        return self.desc.ramified

    # -- element constructors ----------------------------------------------
    def _empty(self, shape=()) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.width, self.k), dtype=np.int64)

    def zero(self, shape=()) -> "Series":
        return Series(self, self._empty(shape), np.full(tuple(shape), INF, dtype=np.int64))

    def const(self, value: int = 1, shape=()) -> "Series":
        c = self._empty(shape)
        c[..., -self.offset, 0] = value % self.p
        return Series(self, c, np.full(tuple(shape), INF, dtype=np.int64))

    def one(self, shape=()) -> "Series":
        return self.const(1, shape)

    def half(self, shape=()) -> "Series":
        return self.const(pow(2, -1, self.p), shape)

    def monomial(self, exponent: int, code: int = 1, shape=()) -> "Series":
        exponent = int(exponent)
        idx = exponent - self.offset
        if idx < 0:
            raise WindowError(f"x^{exponent} lies below the window")
        c = self._empty(shape)
        if idx < self.width:
            c[..., idx, :] = self.residue.digits(code)
            prec = INF
        else:
            prec = self.precision
        return Series(self, c, np.full(tuple(shape), prec, dtype=np.int64))

    def uniformizer(self) -> "Series":
        return self.monomial(1)

    def base_uniformizer(self) -> "Series":
        """The uniformizer t of the fixed field, ``x**e``."""
        return self.monomial(self.e)

    def from_terms(self, terms: dict[int, int], prec: int | None = None) -> "Series":
        c = self._empty()
        for exp, code in terms.items():
            idx = exp - self.offset
            if idx < 0:
                raise WindowError(f"term of valuation {exp} lies below the window")
            if idx < self.width:
                c[idx] = (c[idx] + self.residue.digits(code)) % self.p
        p = INF if prec is None else int(prec)
        if prec is None and any(exp - self.offset >= self.width and code % self.residue.size for exp, code in terms.items()):
            p = self.precision
        return Series(self, c, np.asarray(min(p, INF), dtype=np.int64)).clean()

    def parse(self, text: str) -> "Series":
        """Parse a sparse term list such as ``"1 + 2*t^3 - (1+g)*t^-1 + O(t^10)"``."""
        text = text.replace(" ", "")
        prec = None
        m = re.search(r"\+?O\(" + self.var + r"(?:\^(-?\d+))?\)$", text)
        if m:
            prec = int(m.group(1) or 1)
            text = text[: m.start()]
        terms: dict[int, int] = {}
        if text in ("", "0"):
            return self.from_terms({}, prec)
        for sign, body in _split_terms(text):
            m = re.fullmatch(r"(\([^)]*\)|[\dg^]+)?\*?(" + self.var + r"(?:\^(-?\d+))?)?", body)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise ValueError(f"cannot parse term {body!r}")
            coeff = self.residue.parse(m.group(1)) if m.group(1) else 1
            if sign == "-":
                coeff = self.residue.neg(coeff)
            exp = 0 if m.group(2) is None else int(m.group(3) or 1)
            terms[exp] = self.residue.add(terms.get(exp, 0), coeff)
        return self.from_terms(terms, prec)

    # -- residue-level data ---------------------------------------------------
    def _column_codes(self, kind: str, valuation: int) -> np.ndarray:
        """Admissible residue codes at a given valuation for a subspace kind."""
        R = self.residue
        allcodes = np.arange(R.size, dtype=np.int64)
        if kind == "L":
            return allcodes
        if self.degree == 1:
            if kind == "K":
                return allcodes
            return np.zeros(1, dtype=np.int64)
        if kind == "K":
            if self.ramified:
                return allcodes if valuation % self.e == 0 else np.zeros(1, dtype=np.int64)
            return allcodes[: self.p]
        if kind == "L0":
            if self.degree != 2:
                raise FieldError("the trace-zero line is only used for quadratic extensions")
            if self.ramified:
                return allcodes if valuation % 2 else np.zeros(1, dtype=np.int64)
            lam = self.trace_zero_unit
            return np.array([R.mul(lam, c) for c in range(self.p)], dtype=np.int64)
        raise ValueError(f"unknown subspace kind {kind!r}")

    @cached_property
    def trace_zero_unit(self) -> int:
        """A residue unit lambda with tau(lambda) = -lambda (unramified quadratic case)."""
        R = self.residue
        for c in range(1, R.size):
            image = R.codes(R.digits(c) @ self._frob % self.p) if self._frob is not None else c
            if int(image) == R.neg(c):
                return c
        raise FieldError("no trace-zero residue unit in this model")

    # -- random sampling ------------------------------------------------------
    def random(
        self,
        rng: np.random.Generator,
        shape=(),
        vmin: int = 0,
        vmax: int | None = None,
        *,
        kind: str = "L",
        exact_valuation: bool = True,
        prec: int | None = None,
    ) -> "Series":
        """Random series with valuation drawn uniformly from ``[vmin, vmax]``.

        ``kind`` restricts to the fixed field ("K"), the trace-zero line ("L0")
        or allows all of L ("L").  Coefficients above the leading term are
        uniform in the admissible set up to the working precision.
        """
        shape = tuple(shape)
        prec = self.precision if prec is None else prec
        vmax = vmin if vmax is None else vmax
        allowed = [v for v in range(vmin, vmax + 1) if len(self._column_codes(kind, v)) > 1]
        if not allowed:
            raise ValueError("no admissible valuation in the requested window")
        if min(allowed) < self.offset or max(allowed) >= prec:
            raise WindowError("sampling window outside the representable range")
        lead = rng.choice(np.array(allowed), size=shape) if exact_valuation else np.full(shape, min(allowed))
        codes = np.zeros(shape + (self.width,), dtype=np.int64)
        for j, v in enumerate(self._valuations):
            if v >= prec:
                break
            choices = self._column_codes(kind, int(v))
            if len(choices) == 1:
                continue
            pick = choices[rng.integers(0, len(choices), size=shape)]
            if exact_valuation:
                nonzero = choices[choices != 0]
                lead_pick = nonzero[rng.integers(0, len(nonzero), size=shape)]
                pick = np.where(lead == v, lead_pick, pick)
            codes[..., j] = np.where(v < lead, 0, pick)
        c = self.residue.digits(codes)
        return Series(self, c, np.full(shape, prec, dtype=np.int64))

    def random_unit(self, rng, shape=(), kind: str = "L") -> "Series":
        return self.random(rng, shape, 0, 0, kind=kind)


# ---------------------------------------------------------------------------
# low-level digit-array kernels


def _convolve(F: LocalField, a: np.ndarray, b: np.ndarray, lo: int = 0, hi: int | None = None) -> np.ndarray:
    """Entries ``lo:hi`` of the product of two digit arrays along the valuation axis.

    The cyclic transform length only has to keep the requested slice free of
    wrap-around, which roughly halves it for the window of a product.
    """
    n = a.shape[-2] + b.shape[-2] - 1
    hi = n if hi is None else hi
    need = max(n - lo, hi)
    nfft = 1 << max(need - 1, 1).bit_length()
    fa = np.fft.rfft(a, n=nfft, axis=-2)
    fb = np.fft.rfft(b, n=nfft, axis=-2)
    k = F.k
    if k == 1:
        prod = fa * fb
    else:
        shape = np.broadcast_shapes(fa.shape[:-1], fb.shape[:-1])
        prod = np.zeros(shape + (2 * k - 1,), dtype=np.complex128)
        for i in range(k):
            for j in range(k):
                prod[..., i + j] += fa[..., i] * fb[..., j]
    raw = np.fft.irfft(prod, n=nfft, axis=-2)[..., lo:hi, :]
    out = np.rint(raw).astype(np.int64)
    if k > 1:
        out = out @ F.residue.reduction
    return out % F.p


def _shift(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``out[..., i, :] = c[..., i + s, :]`` with zeros outside the window."""
    s = np.asarray(s, dtype=np.int64)
    width = c.shape[-2]
    shape = np.broadcast_shapes(c.shape[:-2], s.shape)
    c = np.broadcast_to(c, shape + c.shape[-2:])
    idx = np.arange(width, dtype=np.int64) + s[..., None]
    valid = (idx >= 0) & (idx < width)
    idx = np.clip(idx, 0, width - 1)
    out = np.take_along_axis(c, np.broadcast_to(idx, shape + (width,))[..., None], axis=-2)
    return np.where(valid[..., None], out, 0)


def _unit_inverse(F: LocalField, u: np.ndarray) -> np.ndarray:
    """Inverse of power series with invertible constant term, to full width."""
    R = F.residue
    width = u.shape[-2]
    lead = R.codes(u[..., 0, :])
    y = np.zeros(u.shape, dtype=np.int64)
    y[..., 0, :] = R.digits(R.inverse_table[lead])
    two = np.zeros((width, F.k), dtype=np.int64)
    two[0, 0] = 2
    # Newton steps double the number of correct digits; work on that prefix only
    known = 1
    while known < width:
        known = min(2 * known, width)
        um, ym = u[..., :known, :], y[..., :known, :]
        uy = _convolve(F, um, ym, 0, known)
        y[..., :known, :] = _convolve(F, ym, (two[:known] - uy) % F.p, 0, known)
    return y


# ---------------------------------------------------------------------------
# series arrays


class Series:
    """An array of truncated Laurent series sharing one :class:`LocalField`.

    ``c`` holds digits indexed by ``(..., valuation - offset, digit)`` and
    ``prec`` the absolute precision of each entry (``INF`` for exact values).
    A zero-dimensional ``Series`` plays the role of a single Laurent series.
    """

    __slots__ = ("F", "c", "prec")
    __array_priority__ = 1000

    def __init__(self, F: LocalField, c: np.ndarray, prec):
        self.F = F
        self.c = c
        self.prec = np.asarray(prec, dtype=np.int64)

    # -- basic structure ------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.c.shape[:-2]

    def __len__(self) -> int:
        return self.shape[0]

    def __getitem__(self, item) -> "Series":
        if not isinstance(item, tuple):
            item = (item,)
        return Series(self.F, self.c[item + (Ellipsis,)] if Ellipsis not in item else self.c[item], self.prec[item])

    def broadcast_to(self, shape) -> "Series":
        shape = tuple(shape)
        return Series(self.F, np.broadcast_to(self.c, shape + self.c.shape[-2:]).copy(), np.broadcast_to(self.prec, shape).copy())

    def reshape(self, *shape) -> "Series":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Series(self.F, self.c.reshape(tuple(shape) + self.c.shape[-2:]), self.prec.reshape(shape))

    def copy(self) -> "Series":
        return Series(self.F, self.c.copy(), self.prec.copy())

    def clean(self) -> "Series":
        """Zero the coefficients that sit at or above the precision."""
        mask = self.F._valuations >= self.prec[..., None]
        if mask.any():
            self.c = np.where(mask[..., None], 0, self.c)
        return self

    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            if other.F is not self.F:
                raise FieldError("series from different field contexts")
            return other
        if isinstance(other, (int, np.integer)):
            return self.F.const(int(other))
        return NotImplemented

    # -- valuations -----------------------------------------------------------
    def _lead(self) -> tuple[np.ndarray, np.ndarray]:
        nz = (self.c != 0).any(-1)
        has = nz.any(-1)
        idx = nz.argmax(-1)
        val = np.where(has, idx + self.F.offset, self.prec)
        return val, has

    def valuation(self, strict: bool = True) -> np.ndarray:
        """Valuations as an int array, ``INF`` for exact zeros.

        With ``strict`` an :class:`IndeterminateValuation` is raised when some
        entry is zero only up to its finite precision; otherwise such entries
        report their precision.
        """
        val, has = self._lead()
        exact = self.prec >= _EXACT
        indeterminate = ~has & ~exact
        if strict and indeterminate.any():
            raise IndeterminateValuation("series is zero to its working precision")
        return np.where(has, val, np.where(exact, INF, self.prec))

    def is_exact(self) -> np.ndarray:
        return self.prec >= _EXACT

    def is_zero(self) -> np.ndarray:
        """True where all known coefficients vanish."""
        return ~(self.c != 0).any((-1, -2))

    # -- ring operations ------------------------------------------------------
    def _wrap(self, c: np.ndarray, prec: np.ndarray) -> "Series":
        prec = np.where(prec >= _EXACT, INF, prec)
        return Series(self.F, c, prec).clean()

    def __add__(self, other) -> "Series":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap((self.c + other.c) % self.F.p, np.minimum(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series(self.F, (-self.c) % self.F.p, self.prec.copy())

    def __sub__(self, other) -> "Series":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap((self.c - other.c) % self.F.p, np.minimum(self.prec, other.prec))

    def __rsub__(self, other) -> "Series":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, n: int) -> "Series":
        """Multiply by the integer ``n`` viewed in the prime field."""
        n %= self.F.p
        if n == 0:
            return self.F.zero(self.shape)
        return Series(self.F, (self.c * n) % self.F.p, self.prec.copy())

    def __mul__(self, other) -> "Series":
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.F
        va, ha = self._lead()
        vb, hb = other._lead()
        both = ha & hb
        # leading and trailing digits multiply to nonzero digits, so the
        # extent of the full product is known without computing it
        if (both & (va + vb < F.offset)).any():
            raise WindowError("product has terms below the representable window")
        overflow = both & (self._lead_last() + other._lead_last() >= F.precision)
        d = F.depth
        body = _convolve(F, self.c, other.c, d, d + F.width)
        prec = np.minimum(self.prec + vb, other.prec + va)
        exact = (prec >= _EXACT) & ~overflow
        prec = np.where(exact, INF, np.minimum(prec, F.precision))
        return self._wrap(body, prec)

    __rmul__ = __mul__

    def inverse(self) -> "Series":
        F = self.F
        val, has = self._lead()
        if not has.all():
            raise IndeterminateValuation("inverse of a series that is zero to its precision")
        if (val > F.depth).any():
            raise WindowError("inverse has valuation below the representable window")
        u = _shift(self.c, val - F.offset)
        y = _unit_inverse(F, u)
        out = _shift(y, val + F.offset)
        # exact monomials have exact inverses
        single = (u[..., 1:, :] == 0).all((-1, -2))
        exact = (self.prec >= _EXACT) & single
        prec = np.where(exact, INF, np.minimum(self.prec - 2 * val, F.precision))
        return self._wrap(out, prec)

    def __truediv__(self, other) -> "Series":
        if isinstance(other, (int, np.integer)):
            if int(other) % self.F.p == 0:
                raise ZeroDivisionError("division by a multiple of p")
            return self.scale(pow(int(other), -1, self.F.p))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Series":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int) -> "Series":
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        result = self.F.one(self.shape)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, n) -> "Series":
        """Multiply by ``x**n``; ``n`` may be an integer array broadcasting against the batch shape."""
        n = np.asarray(n, dtype=np.int64)
        if n.ndim == 0 and int(n) == 0:
            return self.copy()
        val, has = self._lead()
        if (has & (val + n < self.F.offset)).any():
            raise WindowError("shift moves terms below the window")
        c = _shift(self.c, np.broadcast_to(-n, np.broadcast_shapes(self.shape, n.shape)))
        prec = np.where(self.prec >= _EXACT, INF, np.minimum(self.prec + n, self.F.precision))
        dropped = has & (self._lead_last() + n >= self.F.precision)
        prec = np.where(dropped & (prec >= _EXACT), self.F.precision, prec)
        return self._wrap(c, prec)

    def _lead_last(self) -> np.ndarray:
        nz = (self.c != 0).any(-1)
        last = self.F.width - 1 - nz[..., ::-1].argmax(-1)
        return last + self.F.offset

    # -- Galois structure -----------------------------------------------------
    def tau(self, times: int = 1) -> "Series":
        """Apply the chosen generator of Gal(L/K) ``times`` times."""
        F = self.F
        c = self.c
        for _ in range(times % max(F.degree, 1)):
            if F._frob is not None:
                c = (c @ F._frob) % F.p
            if F._twist is not None:
                c = (c * F._twist[:, None]) % F.p
        return Series(F, c, self.prec.copy())

    def trace(self) -> "Series":
        acc = self
        for i in range(1, self.F.degree):
            acc = acc + self.tau(i)
        return acc

    def norm(self) -> "Series":
        acc = self
        for i in range(1, self.F.degree):
            acc = acc * self.tau(i)
        return acc

    # -- comparison -----------------------------------------------------------
    def agrees(self, other) -> np.ndarray:
        """Entrywise equality up to the joint precision."""
        other = self._coerce(other)
        diff = self - other
        return diff.is_zero()

    def margin_against(self, other) -> np.ndarray:
        """Joint precision minus the leading valuation of the compared values."""
        other = self._coerce(other)
        joint = np.minimum(self.prec, other.prec)
        va, ha = self._lead()
        vb, hb = other._lead()
        ref = np.where(ha | hb, np.minimum(np.where(ha, va, INF), np.where(hb, vb, INF)), 0)
        return joint - ref

    # -- scalar views ---------------------------------------------------------
    def _require_scalar(self) -> None:
        if self.shape != ():
            raise ValueError("scalar view requested on a series array")

    @property
    def lead(self) -> int | None:
        """Valuation of the first stored term (None for exact zero)."""
        self._require_scalar()
        v = int(self.valuation(strict=True))
        return None if v >= _EXACT else v

    @property
    def coeffs(self) -> list[int]:
        """Residue codes from the leading term up to the precision."""
        self._require_scalar()
        val, has = self._lead()
        if not bool(has):
            return []
        start = int(val) - self.F.offset
        stop = min(self.F.width, int(min(self.prec, self.F.precision)) - self.F.offset)
        return [int(x) for x in self.F.residue.codes(self.c[start:stop])]

    def terms(self) -> dict[int, int]:
        self._require_scalar()
        codes = self.F.residue.codes(self.c)
        return {int(self.F._valuations[j]): int(codes[j]) for j in np.nonzero(codes)[0]}

    def __str__(self) -> str:
        if self.shape != ():
            return f"<Series array shape={self.shape} over {self.F.desc.label()}>"
        R, var = self.F.residue, self.F.var
        parts = []
        for exp, code in sorted(self.terms().items()):
            coef = R.format(code)
            if exp == 0:
                parts.append(coef)
            else:
                mono = var if exp == 1 else f"{var}^{exp}"
                parts.append(mono if coef == "1" else f"{coef}*{mono}")
        body = " + ".join(parts) if parts else "0"
        if int(self.prec) < _EXACT:
            body += f" + O({self.F.var}^{int(self.prec)})"
        return body

    def __repr__(self) -> str:
        return f"Series({self})"


LaurentSeries = Series


def stack(items: Sequence[Series], axis: int = 0) -> Series:
    F = items[0].F
    shape = np.broadcast_shapes(*(s.shape for s in items))
    items = [s.broadcast_to(shape) for s in items]
    ax = axis if axis >= 0 else axis + len(shape) + 1
    c = np.stack([s.c for s in items], axis=ax)
    prec = np.stack([s.prec for s in items], axis=ax)
    return Series(F, c, prec)


def where(mask, a: Series, b: Series) -> Series:
    mask = np.asarray(mask, dtype=bool)
    return Series(a.F, np.where(mask[..., None, None], a.c, b.c), np.where(mask, a.prec, b.prec))


def series_sum(s: Series, axis: int) -> Series:
    """Sum a series array along one of its batch axes."""
    ax = axis if axis >= 0 else axis + len(s.shape)
    c = s.c.sum(axis=ax) % s.F.p
    prec = s.prec.min(axis=ax)
    return Series(s.F, c, prec).clean()


# ---------------------------------------------------------------------------
# arithmetic lemmas


def hensel_sqrt(a: Series) -> Series:
    """Return ``b`` with ``(1 + b)**2 = 1 + a`` and ``b = a/2 + O(higher)``.

    Requires ``valuation(a) >= 1``; the valuation of ``b`` then equals that of ``a``.
    """
    F = a.F
    val = a.valuation(strict=False)
    if (val < 1).any():
        raise ValueError("hensel_sqrt needs an argument of positive valuation")
    target = a + 1
    # inverse square root by Newton iteration, then multiply back
    z = F.one(a.shape)
    half = F.half()
    known = 1
    while known < F.width:
        known *= 2
        z = z * (3 - target * z * z) * half
    root = target * z
    b = root - 1
    b.prec = np.minimum(b.prec, a.prec)
    return b.clean()


def trace_uniformizer(F: LocalField, candidate: Series | None = None) -> Series:
    """A uniformizer of L whose trace down to K is a uniformizer of K.

    ``candidate`` is an optional starting uniformizer; in the ramified case it
    is corrected by adding its norm when its trace is too divisible.
    """
    if F.degree != 2:
        raise FieldError("trace_uniformizer is defined for quadratic extensions")
    cand = F.uniformizer() if candidate is None else candidate
    if (cand.valuation() != 1).any():
        raise ValueError("candidate is not a uniformizer")
    tr_val = cand.trace().valuation(strict=False)
    good = tr_val == F.e
    if F.ramified:
        fixed = cand + cand.norm()
    else:
        fixed = F.base_uniformizer().broadcast_to(cand.shape)
    return where(good, cand, fixed)


def good_torus_element(F: LocalField, uniformizer: Series | None = None) -> Series:
    """An element t of 1 + m_L with the extremal commutator valuations.

    Unramified: ``w(t*tau(t) - 1) = w(t**2 - tau(t)) = 1``.  Ramified (p >= 5):
    ``w(t*tau(t) - 1) = 2`` and ``w(t**2 - tau(t)) = 1``.
    """
    if F.degree != 2:
        raise FieldError("good_torus_element is defined for quadratic extensions")
    if F.ramified and F.p < 5:
        raise FieldError("the ramified case needs p >= 5")
    if not F.ramified:
        fallback = F.one() + F.base_uniformizer()
        if uniformizer is None:
            return fallback
        # the leading residue c needs Tr(c) != 0 and 2c != tau(c)
        t1 = uniformizer + 1
        ok = ((t1 * t1.tau() - 1).valuation(strict=False) == 1) & ((t1 * t1 - t1.tau()).valuation(strict=False) == 1)
        return where(ok, t1, fallback.broadcast_to(t1.shape))
    pi = F.uniformizer() if uniformizer is None else uniformizer
    t1 = pi + 1
    t2 = pi + pi * pi.tau() + 1
    ok1 = (t1 * t1.tau() - 1).valuation(strict=False) == 2
    return where(ok1, t1, t2)


def epsilon(F: LocalField, level: int) -> int:
    """The parity correction: 1 exactly for odd levels in a ramified model."""
    return int(F.ramified and level % 2 != 0)


def min_trace_unipotent(F: LocalField, level: int) -> "HPoint":
    """``(u, u*tau(u)/2)`` with ``w(u) = level`` and ``w(Tr u) = level + epsilon``."""
    if F.degree != 2:
        raise FieldError("min_trace_unipotent is defined for quadratic extensions")
    level = int(level)
    eps = epsilon(F, level)
    pi_l = trace_uniformizer(F)
    step = (level - eps) // F.e
    u = (pi_l ** eps) * (F.base_uniformizer() ** step)
    return HPoint(u, u * u.tau() * F.half())


# ---------------------------------------------------------------------------
# the group H(L, L_2)


@dataclass
class HPoint:
    """A point (u, v) of H(L, L_2): ``u * tau(u) = v + tau(v)``."""

    u: Series
    v: Series

    @property
    def shape(self):
        return np.broadcast_shapes(self.u.shape, self.v.shape)

    def membership_defect(self) -> Series:
        return self.u * self.u.tau() - self.v - self.v.tau()

    def is_member(self) -> np.ndarray:
        return self.membership_defect().is_zero()

    def level(self) -> np.ndarray:
        """Half the valuation of v, returned doubled as an integer array."""
        return self.v.valuation(strict=False)

    def inverse(self) -> "HPoint":
        return HPoint(-self.u, self.v.tau())

    def __getitem__(self, item) -> "HPoint":
        return HPoint(self.u[item], self.v[item])


def h_mul(x: HPoint, y: HPoint, check: bool = True) -> HPoint:
    """Group law ``(u, v)(u', v') = (u + u', v + v' + u * tau(u'))``."""
    if check and not (np.all(x.is_member()) and np.all(y.is_member())):
        raise ValueError("h_mul input violates the membership relation")
    return HPoint(x.u + y.u, x.v + y.v + x.u * y.u.tau())


def h_from_u(F: LocalField, u: Series, w: Series | None = None) -> HPoint:
    """The point ``(u, u*tau(u)/2 + w)`` for ``w`` in the trace-zero line."""
    v = u * u.tau() * F.half()
    if w is not None:
        v = v + w
    return HPoint(u, v)


def random_hpoint(F: LocalField, rng: np.random.Generator, shape, level2: int, spread: int = 3) -> HPoint:
    """Random point at level ``level2 / 2`` (i.e. ``w(v) >= level2``)."""
    umin = -((-level2) // 2)
    u = F.random(rng, shape, umin, umin + spread)
    w = F.random(rng, shape, level2, level2 + spread, kind="L0")
    return h_from_u(F, u, w)


@dataclass
class TraceSubspaces:
    """Generator of the trace-zero line and the base point 1/2 of the trace-one line."""

    L0_gen: Series
    L1_point: Series
    delta: int = 0


def trace_subspaces(F: LocalField) -> TraceSubspaces:
    if F.degree != 2:
        raise FieldError("trace subspaces are defined for quadratic extensions")
    if F.ramified:
        gen = F.uniformizer()
    else:
        gen = F.const(0) + F.monomial(0, F.trace_zero_unit)
    return TraceSubspaces(gen, F.half())


def solve_inversion(F: LocalField, w: Series, level: int, level_prime2: int) -> tuple[HPoint, HPoint]:
    """Solve ``tau(u)*x - v*y = w`` with (u, v) at ``level`` and (x, y) at ``level_prime2/2``.

    ``level`` is an integer, ``level_prime2`` is twice the half-integer level of
    the second point.  Requires ``level + level_prime2/2 > 0`` and
    ``w(w) >= max(1 + 2 eps, eps + 2 level + level_prime2)``.
    """
    if F.degree != 2:
        raise FieldError("solve_inversion is defined for quadratic extensions")
    level = int(level)
    if 2 * level + level_prime2 <= 0:
        raise ValueError("levels must satisfy l + l' > 0")
    eps = epsilon(F, level)
    need = max(1 + 2 * eps, eps + 2 * level + level_prime2)
    wval = w.valuation(strict=False)
    if (wval < need).any():
        raise ValueError(f"target valuation must be at least {need}")
    uv = min_trace_unipotent(F, level)
    u, v = uv.u.broadcast_to(w.shape), uv.v.broadcast_to(w.shape)
    tr_tu_v = (u.tau() / v).trace()
    tr_w_v = (w / v).trace()
    zero = w.is_zero() & (w.prec >= _EXACT)
    delta = tr_w_v * 4 / (tr_tu_v * tr_tu_v)
    safe_delta = where(w.is_zero(), F.zero(w.shape), delta)
    b = hensel_sqrt(-safe_delta) if not np.all(safe_delta.is_zero()) else F.zero(w.shape)
    x = tr_tu_v * F.half() * (-b)
    y = (u.tau() * x - w) / v
    x = where(zero, F.zero(w.shape), x)
    y = where(zero, F.zero(w.shape), y)
    return HPoint(u, v), HPoint(x, y)


def inversion_threshold(F: LocalField, level: int, level_prime2: int) -> int:
    eps = epsilon(F, level)
    return max(1 + 2 * eps, eps + 2 * level + level_prime2)

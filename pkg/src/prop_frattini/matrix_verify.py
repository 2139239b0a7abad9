"""Randomized matrix checks of the rank-one commutator identities.

Group elements are batches of 2x2 or 3x3 matrices whose entries are truncated
Laurent series (:class:`~prop_frattini.local_field.Series` arrays of shape
``(trials, n, n)``).  Every suite draws its inputs from a seeded generator,
multiplies both sides of an identity and compares them entrywise at the joint
precision.  Parameters are read back from matrix entries and compared with the
closed forms, so a transcription error on either side shows up as a failure.

Conventions (fixed once here and used everywhere):

* SL2: ``x_a(x) = [[1, x], [0, 1]]``, ``x_{-a}(y) = [[1, 0], [-y, 1]]``,
  ``a~(t) = diag(t, 1/t)``.
* SU3 for the form ``h(x, y) = sum_i x_i tau(y_{-i})`` with Gram matrix the
  antidiagonal ``J``: ``x_a(u, v) = [[1, -tau(u), -v], [0, 1, u], [0, 0, 1]]``,
  ``x_{-a}(x, y) = [[1, 0, 0], [x, 1, 0], [-y, -tau(x), 1]]`` and
  ``a~(t) = diag(t, tau(t)/t, 1/tau(t))``.
* Commutators are ``[g, h] = g h g^-1 h^-1``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .local_field import (
    INF,
    ExtensionDesc,
    HPoint,
    LocalField,
    Series,
    good_torus_element,
    hensel_sqrt,
    inversion_threshold,
    random_hpoint,
    series_sum,
    solve_inversion,
    stack,
)

SCHEMA = "prop-frattini/trial-report/1"
MIN_MARGIN = 4


class AdmissibilityError(ValueError):
    """The requested suite does not apply to the field model."""


# ---------------------------------------------------------------------------
# batched matrices


def _expand(s: Series, axis: int) -> Series:
    """Insert a length-one batch axis at negative position ``axis``."""
    return Series(s.F, np.expand_dims(s.c, axis - 2), np.expand_dims(s.prec, axis))


class Mat:
    """A batch of square matrices over a truncated Laurent field."""

    __slots__ = ("e",)

    def __init__(self, entries: Series):
        self.e = entries

    @classmethod
    def from_rows(cls, rows) -> "Mat":
        return cls(stack([stack(list(r), axis=-1) for r in rows], axis=-2))

    @property
    def F(self) -> LocalField:
        return self.e.F

    @property
    def size(self) -> int:
        return self.e.shape[-1]

    @property
    def batch(self) -> tuple[int, ...]:
        return self.e.shape[:-2]

    def __getitem__(self, ij) -> Series:
        i, j = ij
        return Series(self.F, self.e.c[..., i, j, :, :], self.e.prec[..., i, j])

    def _entry_kinds(self) -> np.ndarray:
        """Per entry: 0 if exactly zero, 1 if exactly one across the batch, else 2."""
        e = self.e
        exact = np.all(e.prec >= INF, axis=tuple(range(e.prec.ndim - 2)))
        one = self.F.one().c
        nz = (e.c != 0).any(axis=tuple(range(len(self.batch)))).any((-1, -2))
        is_one = np.all(e.c == one, axis=tuple(range(len(self.batch)))).all((-1, -2))
        return np.where(exact & ~nz, 0, np.where(exact & is_one, 1, 2))

    def __matmul__(self, other: "Mat") -> "Mat":
        # skip products with exact zeros and ones: root-group and torus
        # matrices are mostly constant
        n = self.size
        ka, kb = self._entry_kinds(), other._entry_kinds()
        shape = np.broadcast_shapes(self.batch, other.batch)
        rows = []
        for i in range(n):
            row = []
            for k in range(n):
                acc = None
                for j in range(n):
                    if ka[i, j] == 0 or kb[j, k] == 0:
                        continue
                    if ka[i, j] == 1:
                        term = other[j, k]
                    elif kb[j, k] == 1:
                        term = self[i, j]
                    else:
                        term = self[i, j] * other[j, k]
                    acc = term if acc is None else acc + term
                row.append(self.F.zero(shape) if acc is None else acc.broadcast_to(shape))
            rows.append(row)
        return Mat.from_rows(rows)

    def dense_matmul(self, other: "Mat") -> "Mat":
        """Reference product through one broadcast multiplication."""
        prod = _expand(self.e, -1) * _expand(other.e, -3)
        return Mat(series_sum(prod, -2))

    def transpose(self) -> "Mat":
        return Mat(Series(self.F, self.e.c.swapaxes(-3, -4), self.e.prec.swapaxes(-1, -2)))

    def tau(self) -> "Mat":
        return Mat(self.e.tau())

    def reverse_rows(self) -> "Mat":
        return Mat(Series(self.F, self.e.c[..., ::-1, :, :, :], self.e.prec[..., ::-1, :]))

    def reverse_cols(self) -> "Mat":
        return Mat(Series(self.F, self.e.c[..., :, ::-1, :, :], self.e.prec[..., :, ::-1]))

    def det(self) -> Series:
        a = self
        if self.size == 2:
            return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        if self.size == 3:
            m0 = a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
            m1 = a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0]
            m2 = a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]
            return a[0, 0] * m0 - a[0, 1] * m1 + a[0, 2] * m2
        raise ValueError("only sizes 2 and 3 are supported")

    def unitary_inverse(self) -> "Mat":
        """``J tau(g)^T J``: the inverse of an element preserving the antidiagonal form."""
        return self.tau().transpose().reverse_rows().reverse_cols()


def identity(F: LocalField, n: int) -> Mat:
    one, zero = F.one(), F.zero()
    return Mat.from_rows([[one if i == j else zero for j in range(n)] for i in range(n)])


def commutator(g: Mat, h: Mat, g_inv: Mat, h_inv: Mat) -> Mat:
    return g @ h @ g_inv @ h_inv


@dataclass
class Check:
    """Outcome of one batched comparison: per-trial success and margin."""

    ok: np.ndarray
    margin: np.ndarray


def _margin(a: Series, b: Series) -> np.ndarray:
    m = a.margin_against(b)
    return np.minimum(m, a.F.width)


def compare(a: Mat | Series, b: Mat | Series) -> Check:
    """Entrywise equality at the joint precision, reduced to one value per trial."""
    if isinstance(a, Mat):
        x, y = a.e, b.e
        axes = (-1, -2)
    else:
        x, y = a, b
        axes = ()
    ok = x.agrees(y)
    margin = _margin(x, y)
    if axes:
        ok = ok.all(axis=axes)
        margin = margin.min(axis=axes)
    return Check(np.asarray(ok), np.asarray(margin))


def preserves_form(g: Mat) -> Check:
    """``g^T J tau(g) = J`` for the antidiagonal ``J``."""
    lhs = g.transpose() @ g.tau().reverse_rows()
    return compare(lhs, identity(g.F, 3).reverse_cols())


def det_one(g: Mat) -> Check:
    d = g.det()
    return compare(d, d.F.one())


# ---------------------------------------------------------------------------
# parametrizations


@dataclass(frozen=True)
class Parametrization:
    """Root-group and torus maps of a rank-one group, with parameter inverses."""

    name: str
    x_plus: Callable[..., Mat]
    x_minus: Callable[..., Mat]
    torus: Callable[[Series], Mat]


def _sl2_plus(x: Series) -> Mat:
    F = x.F
    return Mat.from_rows([[F.one(), x], [F.zero(), F.one()]])


def _sl2_minus(y: Series) -> Mat:
    F = y.F
    return Mat.from_rows([[F.one(), F.zero()], [-y, F.one()]])


def _sl2_torus(t: Series) -> Mat:
    F = t.F
    return Mat.from_rows([[t, F.zero()], [F.zero(), t.inverse()]])


def _su3_plus(u: Series, v: Series) -> Mat:
    F = u.F
    one, zero = F.one(), F.zero()
    return Mat.from_rows([[one, -u.tau(), -v], [zero, one, u], [zero, zero, one]])


def _su3_minus(x: Series, y: Series) -> Mat:
    F = x.F
    one, zero = F.one(), F.zero()
    return Mat.from_rows([[one, zero, zero], [x, one, zero], [-y, -x.tau(), one]])


def _su3_torus(t: Series) -> Mat:
    F = t.F
    zero = F.zero()
    tt = t.tau()
    return Mat.from_rows([[t, zero, zero], [zero, tt / t, zero], [zero, zero, tt.inverse()]])


SL2 = Parametrization("SL2", _sl2_plus, _sl2_minus, _sl2_torus)
SU3 = Parametrization("SU3", _su3_plus, _su3_minus, _su3_torus)


def sl3_root(F: LocalField, i: int, j: int, u: Series) -> Mat:
    """``1 + u E_ij`` in SL3."""
    one, zero = F.one(), F.zero()
    return Mat.from_rows([[one if r == c else (u if (r, c) == (i, j) else zero) for c in range(3)] for r in range(3)])


def su3_decompose(M: Mat) -> tuple[Series, Series, Series, Series, Series]:
    """Read ``(T, U, V, X, Y)`` off ``M = x_{-a}(X, Y) a~(T) x_a(U, V)``."""
    T = M[0, 0]
    V = -M[0, 2] / T
    U = (-M[0, 1] / T).tau()
    X = M[1, 0] / T
    Y = -M[2, 0] / T
    return T, U, V, X, Y


def sl2_decompose(M: Mat) -> tuple[Series, Series, Series]:
    """Read ``(T, U, X)`` off ``M = x_{-a}(X) a~(T) x_a(U)``."""
    T = M[0, 0]
    return T, M[0, 1] / T, -M[1, 0] / T


# ---------------------------------------------------------------------------
# reports


@dataclass
class TrialReport:
    """Outcome of a suite; reports over disjoint trial sets merge by addition."""

    lemma_id: str
    trials: int = 0
    failures: int = 0
    worst_precision_margin: int = INF
    resampled: int = 0
    configs: list[str] = field(default_factory=list)
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.worst_precision_margin >= MIN_MARGIN

    def merge(self, other: "TrialReport") -> "TrialReport":
        if other.lemma_id != self.lemma_id:
            raise ValueError("cannot merge reports of different suites")
        return TrialReport(
            self.lemma_id,
            self.trials + other.trials,
            self.failures + other.failures,
            min(self.worst_precision_margin, other.worst_precision_margin),
            self.resampled + other.resampled,
            self.configs + [c for c in other.configs if c not in self.configs],
            self.seconds + other.seconds,
            self.notes + [n for n in other.notes if n not in self.notes],
        )

    def to_json(self, timing: bool = False) -> dict:
        """JSON form; wall-clock time is left out unless ``timing`` so output is reproducible."""
        out = {
            "schema": SCHEMA,
            "lemma_id": self.lemma_id,
            "trials": self.trials,
            "failures": self.failures,
            "worst_precision_margin": None if self.worst_precision_margin >= INF else int(self.worst_precision_margin),
            "resampled": self.resampled,
            "configs": list(self.configs),
            "notes": list(self.notes),
            "passed": self.passed,
        }
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


class _Tally:
    """Accumulates per-trial verdicts for one batch of trials."""

    def __init__(self, n: int):
        self.ok = np.ones(n, dtype=bool)
        self.margin = np.full(n, INF, dtype=np.int64)

    def eq(self, check: Check) -> None:
        self.ok &= np.broadcast_to(check.ok, self.ok.shape)
        self.margin = np.minimum(self.margin, np.broadcast_to(check.margin, self.ok.shape))

    def holds(self, cond) -> None:
        self.ok &= np.broadcast_to(np.asarray(cond, dtype=bool), self.ok.shape)

    def finish(self, report: TrialReport) -> None:
        # an equality confirmed with too few terms of margin is not trusted
        bad = ~self.ok | (self.margin < MIN_MARGIN)
        report.trials += self.ok.size
        report.failures += int(bad.sum())
        report.worst_precision_margin = min(report.worst_precision_margin, int(self.margin.min()))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed))


def _batches(trials: int, groups: int) -> list[int]:
    base, extra = divmod(trials, groups)
    return [base + (i < extra) for i in range(groups) if base + (i < extra)]


def _val(s: Series) -> np.ndarray:
    return s.valuation(strict=False)


def model_label(F: LocalField) -> str:
    return f"{F.desc.label()} prec={F.precision}"


def _start(lemma_id: str, F: LocalField) -> tuple[TrialReport, float]:
    return TrialReport(lemma_id, configs=[model_label(F)]), time.perf_counter()


def _done(report: TrialReport, t0: float) -> TrialReport:
    report.seconds = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# admissibility


def _require_quadratic(F: LocalField, lemma: str) -> None:
    if F.degree != 2:
        raise AdmissibilityError(f"{lemma} needs a quadratic extension model")


def check_admissible(lemma_id: str, F: LocalField) -> None:
    """Raise :class:`AdmissibilityError` when ``lemma_id`` does not apply to ``F``."""
    if lemma_id not in SUITES:
        raise AdmissibilityError(f"unknown suite {lemma_id!r}")
    if F.p == 2:
        raise AdmissibilityError("residue characteristic 2 is excluded (p != 2)")
    if lemma_id.startswith("su3"):
        _require_quadratic(F, lemma_id)
    if lemma_id == "su3-torus" and F.ramified and F.p < 5:
        raise AdmissibilityError("su3-torus over a ramified model needs p >= 5")
    if lemma_id == "su3-inversion" and F.p < 5:
        raise AdmissibilityError("su3-inversion needs p >= 5")


# ---------------------------------------------------------------------------
# SL2 suites


def check_sl2_torus_commutator(F: LocalField, trials: int = 1000, seed=0) -> TrialReport:
    """``[x_a(x), a~(t)] = x_a((1 - t^2) x)`` with the level gain, plus witnesses."""
    check_admissible("sl2-torus", F)
    report, t0 = _start("sl2-torus", F)
    rng = _rng(seed)
    n = trials
    tally = _Tally(n)
    t = F.random(rng, (n,), 1, 3) + 1
    x = F.random(rng, (n,), -3, 4)
    g, a = SL2.x_plus(x), SL2.torus(t)
    lhs = commutator(g, a, SL2.x_plus(-x), SL2.torus(t.inverse()))
    y = (1 - t * t) * x
    tally.eq(compare(lhs, SL2.x_plus(y)))
    tally.eq(det_one(g))
    tally.eq(det_one(a))
    # level gain: U_{a,l} is moved into U_{a,l+1}
    tally.holds(_val(y) >= _val(x) + 1)
    # equality witness: every y of valuation >= l+1 is reached from level l
    pi = F.uniformizer()
    target = F.random(rng, (n,), -2, 5)
    xw = target / (pi * 2 + pi * pi)
    tp = pi + 1
    lhs = commutator(SL2.torus(tp), SL2.x_plus(xw), SL2.torus(tp.inverse()), SL2.x_plus(-xw))
    tally.eq(compare(lhs, SL2.x_plus(target)))
    tally.holds(_val(xw) == _val(target) - 1)
    tally.finish(report)
    return _done(report, t0)


def check_sl2_opposite_commutator(F: LocalField, trials: int = 1000, seed=0) -> TrialReport:
    """``[x_{-a}(y), x_a(x)] = x_{-a}(x y^2/(1+xy)) a~(1+xy) x_a(-x^2 y/(1+xy))``."""
    check_admissible("sl2-opposite", F)
    report, t0 = _start("sl2-opposite", F)
    rng = _rng(seed)
    n = trials
    tally = _Tally(n)
    x = F.random(rng, (n,), -3, 3)
    # w(x) + w(y) >= 1 by construction: shift a positive-valuation draw
    y = F.random(rng, (n,), 1, 3).shift(-_val(x))
    den = x * y + 1
    bad = _val(den) != 0
    report.resampled += int(bad.sum())
    lhs = commutator(SL2.x_minus(y), SL2.x_plus(x), SL2.x_minus(-y), SL2.x_plus(-x))
    X, T, U = x * y * y / den, den, -(x * x * y) / den
    rhs = SL2.x_minus(X) @ SL2.torus(T) @ SL2.x_plus(U)
    tally.eq(compare(lhs, rhs))
    tally.eq(det_one(lhs))
    T2, U2, X2 = sl2_decompose(lhs)
    tally.eq(compare(T2, T))
    tally.eq(compare(U2, U))
    tally.eq(compare(X2, X))
    vx, vy = _val(x), _val(y)
    tally.holds(_val(X) == vx + 2 * vy)
    tally.holds(_val(U) == 2 * vx + vy)
    tally.holds(_val(T - 1) == vx + vy)
    tally.holds(~bad)
    tally.finish(report)
    return _done(report, t0)


def frattini_eq1(t: Series, u: Series) -> tuple[Mat, Mat]:
    """Both sides of the first upper-triangular commutator identity."""
    F = t.F
    s2 = 1 - t * t
    a = Mat.from_rows([[t, t * u / s2], [F.zero(), t.inverse()]])
    b = SL2.x_minus(s2 * s2 / (t * t * u))
    a_inv = Mat.from_rows([[t.inverse(), -(t * u / s2)], [F.zero(), t]])
    b_inv = SL2.x_minus(-(s2 * s2) / (t * t * u))
    lhs = commutator(a, b, a_inv, b_inv)
    rhs = Mat.from_rows([[t * t, u], [F.zero(), (t * t).inverse()]])
    return lhs, rhs


def frattini_eq2(t: Series, v: Series) -> tuple[Mat, Mat]:
    """Both sides of the lower-triangular identity, in its corrected form."""
    F = t.F
    s2 = 1 - t * t
    c = SL2.x_plus(s2 * s2 / (t * t * v))
    d = Mat.from_rows([[t.inverse(), F.zero()], [t * v / (t * t - 1), t]])
    c_inv = SL2.x_plus(-(s2 * s2) / (t * t * v))
    d_inv = Mat.from_rows([[t, F.zero()], [-(t * v / (t * t - 1)), t.inverse()]])
    lhs = commutator(c, d, c_inv, d_inv)
    rhs = Mat.from_rows([[t * t, F.zero()], [v, (t * t).inverse()]])
    return lhs, rhs


def frattini_eq3(t: Series, u: Series) -> tuple[Mat, Mat]:
    """Two upper-triangular factors multiplying to ``diag(t^4, t^-4)``."""
    F = t.F
    t2 = t * t
    t2i = t2.inverse()
    a = Mat.from_rows([[t2, u], [F.zero(), t2i]])
    b = Mat.from_rows([[t2, -(t2i * t2i * u)], [F.zero(), t2i]])
    rhs = Mat.from_rows([[t2 * t2, F.zero()], [F.zero(), t2i * t2i]])
    return a @ b, rhs


def check_sl2_frattini_identities(F: LocalField, trials: int = 1000, seed=0) -> TrialReport:
    """The three triangular identities, their valuation claims and square surjectivity."""
    check_admissible("sl2-frattini", F)
    report, t0 = _start("sl2-frattini", F)
    rng = _rng(seed)
    n = trials
    tally = _Tally(n)
    s = F.random(rng, (n,), 1, 3)
    t = s + 1
    u = F.random(rng, (n,), -2, 4)
    v = F.random(rng, (n,), -2, 4)
    for lhs, rhs in (frattini_eq1(t, u), frattini_eq2(t, v), frattini_eq3(t, u)):
        tally.eq(compare(lhs, rhs))
        tally.eq(det_one(lhs))
    vs, vu = _val(s), _val(u)
    tally.holds(_val(t * u / (1 - t * t)) == vu - vs)
    tally.holds(_val((1 - t * t) * (1 - t * t) / (t * t * u)) == 2 * vs - vu)
    # every element of 1 + m is a square
    target = F.random(rng, (n,), 1, 6)
    r = hensel_sqrt(target)
    tally.eq(compare((r + 1) * (r + 1), target + 1))
    tally.holds(_val(r) == _val(target))
    tally.finish(report)
    return _done(report, t0)


# ---------------------------------------------------------------------------
# SU3 suites


def su3_opposite_forms(u, v, x, y) -> tuple[Series, Series, Series, Series, Series]:
    """``(T, U, V, X, Y)`` with ``[x_{-a}(x, y)^-1, x_a(u, v)] = x_{-a}(X, Y) a~(T) x_a(U, V)``."""
    tu, tv, tx, ty = u.tau(), v.tau(), x.tau(), y.tau()
    T = 1 - tu * x + v * y
    U = (u * u * tx - tv * x - u * tv * ty) / T.tau()
    V = (u * v * tx - tu * tv * x + v * tv * y) / T
    X = (tu * x * x - u * y - v * x * y) / T
    Y = (tx * u * y - tu * x * ty + v * y * ty) / T
    return T, U, V, X, Y


def _opposite_commutator(P: HPoint, Q: HPoint) -> Mat:
    g_inv, g = SU3.x_minus(*_inv(Q)), SU3.x_minus(Q.u, Q.v)
    h, h_inv = SU3.x_plus(P.u, P.v), SU3.x_plus(*_inv(P))
    return commutator(g_inv, h, g, h_inv)


def _inv(P: HPoint) -> tuple[Series, Series]:
    Q = P.inverse()
    return Q.u, Q.v


def _ceil_half(n: int) -> int:
    return -((-n) // 2)


def check_su3_opposite_commutator(F: LocalField, trials: int = 1000, seed=0) -> TrialReport:
    """Opposite root groups of SU3: closed forms, membership and valuation bounds.

    Levels are drawn as doubled integers ``(2l, 2l')`` with ``l + l' > 0``;
    ``(x, y)`` sits at level ``l`` and ``(u, v)`` at level ``l'``.
    """
    check_admissible("su3-opposite", F)
    report, t0 = _start("su3-opposite", F)
    rng = _rng(seed)
    # wider level gaps push V close to the precision cap through cancellation
    combos = [(l2, s - l2) for l2 in range(-2, 3) for s in (1, 2, 3) if s < 3 or l2 >= 0]
    picks = rng.integers(0, len(combos), size=trials)
    for idx in np.unique(picks):
        l2, lp2 = combos[idx]
        n = int((picks == idx).sum())
        tally = _Tally(n)
        P = random_hpoint(F, rng, (n,), lp2)
        Q = random_hpoint(F, rng, (n,), l2)
        T, U, V, X, Y = su3_opposite_forms(P.u, P.v, Q.u, Q.v)
        bad = _val(T) != 0
        report.resampled += int(bad.sum())
        tally.holds(~bad)
        M = _opposite_commutator(P, Q)
        rhs = SU3.x_minus(X, Y) @ SU3.torus(T) @ SU3.x_plus(U, V)
        tally.eq(compare(M, rhs))
        for got, want in zip(su3_decompose(M), (T, U, V, X, Y)):
            tally.eq(compare(got, want))
        for g in (SU3.x_plus(P.u, P.v), SU3.x_minus(Q.u, Q.v), M):
            tally.eq(preserves_form(g))
            tally.eq(det_one(g))
        tally.holds(HPoint(U, V).is_member())
        tally.holds(HPoint(X, Y).is_member())
        tally.holds(_val(V) >= _ceil_half(3 * lp2 + l2))
        tally.holds(_val(Y) >= _ceil_half(lp2 + 3 * l2))
        tally.finish(report)
    return _done(report, t0)


def su3_torus_forms(t: Series, u: Series, v: Series) -> tuple[Series, Series]:
    """``(U, V)`` with ``[x_a(u, v), a~(t)] = x_a(U, V)``."""
    r = t.tau() * t.tau() / t
    return (1 - r) * u, (1 - r) * v + (t * t.tau() - r) * v.tau()


def su3_torus_preimage(t: Series, U: Series, V: Series) -> tuple[Series, Series]:
    """Invert :func:`su3_torus_forms` for fixed ``t``."""
    tt = t.tau()
    r = tt * tt / t
    u = t / (t - tt * tt) * U
    v = (V + r * V.tau()) / ((1 - t * tt) * (1 - r))
    return u, v


def _su3_torus_commutator(t: Series, u: Series, v: Series) -> Mat:
    a, a_inv = SU3.torus(t), SU3.torus(t.inverse())
    return commutator(SU3.x_plus(u, v), a, SU3.x_plus(-u, v.tau()), a_inv)


def check_su3_torus_commutator(F: LocalField, trials: int = 1000, seed=0) -> TrialReport:
    """Torus action on ``U_a`` in SU3: forward formula and preimages at the level gap."""
    check_admissible("su3-torus", F)
    report, t0 = _start("su3-torus", F)
    rng = _rng(seed)
    gap2 = 3 if F.ramified else 2
    half = trials // 2
    # forward direction for random t in 1 + m_L
    for lp2, n in zip(range(-2, 4), _batches(half, 6)):
        tally = _Tally(n)
        t = F.random(rng, (n,), 1, 3) + 1
        P = random_hpoint(F, rng, (n,), lp2)
        U, V = su3_torus_forms(t, P.u, P.v)
        tally.eq(compare(_su3_torus_commutator(t, P.u, P.v), SU3.x_plus(U, V)))
        tally.eq(preserves_form(SU3.torus(t)))
        tally.holds(HPoint(U, V).is_member())
        tally.holds(_val(V) >= _val(P.v) + _val(t * t - t.tau()))
        tally.finish(report)
    # preimages under the good element t
    t = good_torus_element(F)
    rest = trials - half
    for lp2, n in zip(range(-1, 5), _batches(rest, 6)):
        tally = _Tally(n)
        target = random_hpoint(F, rng, (n,), lp2)
        u, v = su3_torus_preimage(t, target.u, target.v)
        tally.holds(HPoint(u, v).is_member())
        tally.holds(_val(v) >= lp2 - gap2)
        tally.eq(compare(_su3_torus_commutator(t, u, v), SU3.x_plus(target.u, target.v)))
        tally.finish(report)
    return _done(report, t0)


def same_root_preimage(F: LocalField, level2: int, w: Series) -> tuple[HPoint, HPoint]:
    """Points ``(x, y)`` and ``(u, v)`` at level ``level2 / 2`` with
    ``[x_a(u, v), x_a(x, y)] = x_a(0, w)``.

    ``w`` lies in the trace-zero line with ``w(w) >= 2 ceil(l)`` (unramified)
    or ``2 ceil(l) + 1`` (ramified).
    """
    c = _ceil_half(level2)
    if F.ramified:
        k = _ceil_half(c - 1)
        x = F.uniformizer() * F.base_uniformizer() ** k
    else:
        x = F.monomial(c, F.trace_zero_unit)
    x = x.broadcast_to(w.shape)
    y = x * x.tau() * F.half()
    u = w / (x - x.tau())
    return HPoint(x, y), HPoint(u, u * u * F.half())


def same_root_threshold(F: LocalField, level2: int) -> int:
    c = _ceil_half(level2)
    return 2 * c + 1 if F.ramified else 2 * c


def _same_root_commutator(A: HPoint, B: HPoint) -> Mat:
    return commutator(SU3.x_plus(A.u, A.v), SU3.x_plus(B.u, B.v), SU3.x_plus(*_inv(A)), SU3.x_plus(*_inv(B)))


def check_su3_same_root(F: LocalField, trials: int = 1000, seed=0) -> TrialReport:
    """Commutators inside ``U_a`` and their surjectivity onto the derived level.

    With the matrices above ``[x_a(u, v), x_a(x, y)] = x_a(0, x tau(u) - u tau(x))``:
    the first argument supplies the conjugated ``u``.
    """
    check_admissible("su3-same-root", F)
    report, t0 = _start("su3-same-root", F)
    rng = _rng(seed)
    levels = list(range(-4, 5))
    sizes = _batches(trials, len(levels))
    for l2, n in zip(levels, sizes):
        tally = _Tally(n)
        A = random_hpoint(F, rng, (n,), l2)
        B = random_hpoint(F, rng, (n,), l2)
        w = B.u * A.u.tau() - A.u * B.u.tau()
        tally.eq(compare(_same_root_commutator(A, B), SU3.x_plus(F.zero(), w)))
        tally.holds(_val(w) >= same_root_threshold(F, l2) - (1 if F.ramified else 0))
        # surjectivity onto the derived level
        target = F.random(rng, (n,), same_root_threshold(F, l2), same_root_threshold(F, l2) + 4, kind="L0")
        X, U = same_root_preimage(F, l2, target)
        for P in (X, U):
            tally.holds(P.is_member())
            tally.holds(_val(P.v) >= l2)
        tally.eq(compare(_same_root_commutator(U, X), SU3.x_plus(F.zero(), target)))
        tally.finish(report)
    return _done(report, t0)


def inversion_chain(F: LocalField, w: Series, level: int) -> dict:
    """Factor ``a~(1 + w)`` through an opposite-root commutator.

    ``(u, v)`` sits at level ``l + 1`` and ``(x, y)`` at ``-l + 1/2``; the
    returned dict holds the points, the closed-form parameters and the
    three-factor product that must equal ``a~(1 + w)``.
    """
    P, Q = solve_inversion(F, -w, level + 1, -2 * level + 1)
    T, U, V, X, Y = su3_opposite_forms(P.u, P.v, Q.u, Q.v)
    C = _opposite_commutator(P, Q)
    product = SU3.x_minus(*_inv(HPoint(X, Y))) @ C @ SU3.x_plus(*_inv(HPoint(U, V)))
    return {"P": P, "Q": Q, "T": T, "U": U, "V": V, "X": X, "Y": Y, "product": product}


def check_su3_inversion_chain(F: LocalField, trials: int = 1000, seed=0, levels=(-1, 0, 1, 2)) -> TrialReport:
    """``a~(1 + w)`` as a product of root-group elements at the claimed levels."""
    check_admissible("su3-inversion", F)
    report, t0 = _start("su3-inversion", F)
    rng = _rng(seed)
    for level, n in zip(levels, _batches(trials, len(levels))):
        tally = _Tally(n)
        need = inversion_threshold(F, level + 1, -2 * level + 1)
        w = F.random(rng, (n,), need, need + 4)
        out = inversion_chain(F, w, level)
        tally.eq(compare(out["T"], w + 1))
        tally.eq(compare(out["product"], SU3.torus(w + 1)))
        tally.holds(out["P"].is_member())
        tally.holds(out["Q"].is_member())
        tally.holds(HPoint(out["U"], out["V"]).is_member())
        tally.holds(HPoint(out["X"], out["Y"]).is_member())
        tally.holds(_val(out["V"]) >= 2 * level + 4)
        tally.holds(_val(out["Y"]) >= -2 * level + 3)
        tally.finish(report)
    return _done(report, t0)


# ---------------------------------------------------------------------------
# split SL3


def check_structure_constants(F: LocalField, trials: int = 1000, seed=0) -> TrialReport:
    """``[x_alpha(u), x_beta(v)] = x_{alpha+beta}(c u v)`` with one sign ``c`` throughout."""
    check_admissible("structure-constants", F)
    report, t0 = _start("structure-constants", F)
    rng = _rng(seed)
    n = trials
    tally = _Tally(n)
    u = F.random(rng, (n,), -3, 3)
    v = F.random(rng, (n,), -3, 3)
    M = commutator(sl3_root(F, 0, 1, u), sl3_root(F, 1, 2, v), sl3_root(F, 0, 1, -u), sl3_root(F, 1, 2, -v))
    ratio = M[0, 2] / (u * v)
    sign = 1 if bool(ratio[0].agrees(F.one())) else -1
    report.notes.append(f"sign {sign:+d}")
    tally.eq(compare(ratio, F.const(sign)))
    tally.eq(compare(M, sl3_root(F, 0, 2, u * v * sign)))
    tally.eq(det_one(M))
    # any target z is reached with v = c^-1 z u^-1
    z = F.random(rng, (n,), -3, 5)
    v2 = z / u * sign
    M2 = commutator(sl3_root(F, 0, 1, u), sl3_root(F, 1, 2, v2), sl3_root(F, 0, 1, -u), sl3_root(F, 1, 2, -v2))
    tally.eq(compare(M2, sl3_root(F, 0, 2, z)))
    tally.finish(report)
    return _done(report, t0)


# ---------------------------------------------------------------------------
# registry and drivers

SUITES: dict[str, Callable[..., TrialReport]] = {
    "sl2-torus": check_sl2_torus_commutator,
    "sl2-opposite": check_sl2_opposite_commutator,
    "sl2-frattini": check_sl2_frattini_identities,
    "su3-opposite": check_su3_opposite_commutator,
    "su3-torus": check_su3_torus_commutator,
    "su3-same-root": check_su3_same_root,
    "su3-inversion": check_su3_inversion_chain,
    "structure-constants": check_structure_constants,
}

MODELS = ("base", "unramified", "ramified")


def make_field(p: int, model: str, precision: int = 24, depth: int = 16) -> LocalField:
    """``F_p((t))`` ("base") or a quadratic extension model."""
    if model == "base":
        desc = ExtensionDesc(p)
    elif model in ("unramified", "ramified"):
        desc = ExtensionDesc(p, 2, model == "ramified")
    else:
        raise ValueError(f"unknown model {model!r}")
    return LocalField(desc, precision=precision, depth=depth)


def admissible_models(lemma_id: str, p: int) -> list[str]:
    out = []
    for model in MODELS:
        try:
            check_admissible(lemma_id, make_field(p, model, precision=4, depth=0))
        except AdmissibilityError:
            continue
        out.append(model)
    return out


def run_suite(lemma_id: str, p: int, model: str, *, trials: int = 1000, precision: int = 24, seed=0) -> TrialReport:
    """Run one suite on one field model with a seed derived from ``(seed, suite, p, model)``."""
    if lemma_id not in SUITES:
        raise AdmissibilityError(f"unknown suite {lemma_id!r}")
    F = make_field(p, model, precision)
    check_admissible(lemma_id, F)
    key = [int(seed), sorted(SUITES).index(lemma_id), p, MODELS.index(model)]
    return SUITES[lemma_id](F, trials=trials, seed=np.random.SeedSequence(key))


def run_all(primes=(3, 5), *, trials: int = 1000, precision: int = 24, seed=0) -> dict[str, TrialReport]:
    """Every suite over every admissible model for ``primes``; one merged report per suite."""
    out: dict[str, TrialReport] = {}
    for lemma_id in SUITES:
        for p in primes:
            for model in admissible_models(lemma_id, p):
                rep = run_suite(lemma_id, p, model, trials=trials, precision=precision, seed=seed)
                out[lemma_id] = out[lemma_id].merge(rep) if lemma_id in out else rep
    return out


__all__ = [
    "AdmissibilityError",
    "Mat",
    "Parametrization",
    "SL2",
    "SU3",
    "TrialReport",
    "Check",
    "compare",
    "commutator",
    "identity",
    "preserves_form",
    "det_one",
    "sl3_root",
    "su3_decompose",
    "sl2_decompose",
    "frattini_eq1",
    "frattini_eq2",
    "frattini_eq3",
    "su3_opposite_forms",
    "su3_torus_forms",
    "su3_torus_preimage",
    "same_root_preimage",
    "same_root_threshold",
    "inversion_chain",
    "check_admissible",
    "check_sl2_torus_commutator",
    "check_sl2_opposite_commutator",
    "check_sl2_frattini_identities",
    "check_su3_opposite_commutator",
    "check_su3_torus_commutator",
    "check_su3_same_root",
    "check_su3_inversion_chain",
    "check_structure_constants",
    "SUITES",
    "MODELS",
    "make_field",
    "admissible_models",
    "run_suite",
    "run_all",
]

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prop_frattini.root_system import (
    RootSystemError,
    RootSystemKind,
    _length_ratio,
    all_kinds,
    basis_swap_bc,
    bc_theta,
    build,
    coordinates_in,
    decompose_positive,
    delta_coeffs,
    delta_weights,
    is_concave,
    lowest_root_coeffs,
    short_root_decomposition,
)
from prop_frattini.valued_datum import SplittingData

KINDS = all_kinds(8)


def expected_count(kind: RootSystemKind) -> int:
    n = kind.rank
    return {
        "A": n * (n + 1),
        "B": 2 * n * n,
        "C": 2 * n * n,
        "D": 2 * n * (n - 1),
        "E6": 72,
        "E7": 126,
        "E8": 240,
        "F4": 48,
        "G2": 12,
        "BC": 2 * n * (n + 1),
    }[kind.family]


# highest roots in Bourbaki numbering
HIGHEST = {
    "A4": (1, 1, 1, 1),
    "B4": (1, 2, 2, 2),
    "C4": (2, 2, 2, 1),
    "D5": (1, 2, 2, 1, 1),
    "E6": (1, 2, 2, 3, 2, 1),
    "E7": (2, 2, 3, 4, 3, 2, 1),
    "E8": (2, 3, 4, 6, 5, 4, 3, 2),
    "F4": (2, 3, 4, 2),
    "G2": (3, 2),
    "BC3": (2, 2, 2),
}


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_root_count(kind):
    assert len(build(kind).roots) == expected_count(kind)


@pytest.mark.parametrize("name, coeffs", sorted(HIGHEST.items()))
def test_highest_root(name, coeffs):
    kind = next(k for k in KINDS if k.name == name)
    assert build(kind).highest.coeffs == coeffs


def test_cartan_rank_two():
    assert build(RootSystemKind("B", 2)).cartan == [[2, -2], [-1, 2]]
    assert build(RootSystemKind("G2", 2)).cartan == [[2, -1], [-3, 2]]


def test_invalid_kinds():
    for fam, n in (("Z", 2), ("B", 1), ("D", 2), ("E6", 7), ("A", 0)):
        with pytest.raises(RootSystemError):
            RootSystemKind(fam, n)


def test_bc_classes():
    sys = build(RootSystemKind("BC", 3))
    mult = [r for r in sys.roots if r.multipliable]
    div = [r for r in sys.roots if r.divisible]
    assert len(mult) == len(div) == 6
    for r in mult:
        assert sys.scaled(r, 2) in div
    assert bc_theta(sys).coeffs == (1, 1, 1)


@given(st.sampled_from(KINDS), st.data())
def test_reflections_permute_roots(kind, data):
    sys = build(kind)
    a = data.draw(st.sampled_from(sys.roots))
    b = data.draw(st.sampled_from(sys.roots))
    s = sys.reflect(a, b)
    assert s in sys
    assert sys.reflect(a, s) == b
    # integrality of the pairing
    assert isinstance(sys.pairing(b, a), int)
    assert -b in sys


@given(st.sampled_from(KINDS), st.data())
def test_sum_is_root_or_none(kind, data):
    sys = build(kind)
    a = data.draw(st.sampled_from(sys.roots))
    b = data.draw(st.sampled_from(sys.roots))
    s = sys.add(a, b)
    coeffs = tuple(x + y for x, y in zip(a.coeffs, b.coeffs))
    assert (s is not None) == (coeffs in sys)


@given(st.sampled_from(KINDS), st.data())
def test_roots_are_sign_coherent(kind, data):
    sys = build(kind)
    r = data.draw(st.sampled_from(sys.roots))
    assert all(c >= 0 for c in r.coeffs) or all(c <= 0 for c in r.coeffs)
    assert all(abs(c) <= h for c, h in zip(r.coeffs, sys.highest.coeffs))


@pytest.mark.parametrize("kind", [k for k in KINDS if k.family not in ("A", "D", "E6", "E7", "E8", "BC")], ids=lambda k: k.name)
def test_length_ratio(kind):
    sys = build(kind)
    want = {"B": 2, "C": 2, "F4": 2, "G2": 3}[kind.family]
    assert _length_ratio(sys) == want


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_decompose_positive(kind):
    sys = build(kind)
    for b in sys.positive_roots:
        if b in sys.basis or any(sys.scaled(a, 2) == b for a in sys.basis):
            continue
        a, rest = decompose_positive(sys, b)
        assert a in sys.basis and rest.is_positive
        assert tuple(x + y for x, y in zip(a.coeffs, rest.coeffs)) == b.coeffs
        assert not sys.collinear(a, rest)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_lowest_root_coeffs_nonnegative(kind):
    sys = build(kind)
    for g in sys.roots:
        assert all(n >= 0 for n in lowest_root_coeffs(sys, g))


@pytest.mark.parametrize("name", ["B3", "B5", "C2", "C3", "C5", "F4", "G2"])
def test_short_root_decomposition(name):
    kind = next(k for k in KINDS if k.name == name)
    sys = build(kind)
    theta = delta_weights(sys, SplittingData.make(_length_ratio(sys), True)).theta
    for c in sys.roots:
        if c.length_class != "short" or c == -theta:
            continue
        a, b = short_root_decomposition(sys, c)
        assert a.length_class == "short" and b.is_positive
        assert tuple(x + y for x, y in zip(a.coeffs, b.coeffs)) == c.coeffs
    with pytest.raises(RootSystemError):
        short_root_decomposition(sys, -theta)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_delta_theta_dominates(kind):
    sys = build(kind)
    splits = [SplittingData.make(1)] if sys.is_reduced else [SplittingData.make(2, True)]
    if sys.is_reduced and _length_ratio(sys) > 1:
        splits.append(SplittingData.make(_length_ratio(sys), True))
    for split in splits:
        w = delta_weights(sys, split)
        top = delta_coeffs(sys, w, w.theta)
        for r in sys.nd_roots:
            if r.is_positive:
                assert all(x <= y for x, y in zip(delta_coeffs(sys, w, r), top))


def test_ramified_theta_is_short_dominant():
    sys = build(RootSystemKind("B", 3))
    w = delta_weights(sys, SplittingData.make(2, True))
    assert w.theta.length_class == "short"
    assert w.theta.coeffs == (1, 1, 1)
    g2 = build(RootSystemKind("G2", 2))
    assert delta_weights(g2, SplittingData.make(3, True)).theta.coeffs == (2, 1)


def test_basis_swap_bc():
    sys = build(RootSystemKind("BC", 2))
    basis, half_highest = basis_swap_bc(sys)
    theta = bc_theta(sys)
    assert -theta in basis
    # every root has sign-coherent integer coordinates in the new basis
    for r in sys.nd_roots:
        co = coordinates_in(sys, basis, r)
        assert all(c.denominator == 1 for c in co)
        assert all(c >= 0 for c in co) or all(c <= 0 for c in co)
    assert half_highest.multipliable


def test_is_concave_examples():
    sys = build(RootSystemKind("A", 2))
    zero = {r: Fraction(0) for r in sys.roots}
    assert is_concave(sys, zero)
    bad = dict(zero)
    a1, a2 = sys.basis
    bad[sys.add(a1, a2)] = Fraction(1)
    assert not is_concave(sys, bad)
    # a point profile -a(x) is concave
    x = (Fraction(1, 3), Fraction(-2))
    point = {r: -(r.coeffs[0] * x[0] + r.coeffs[1] * x[1]) for r in sys.roots}
    assert is_concave(sys, point)

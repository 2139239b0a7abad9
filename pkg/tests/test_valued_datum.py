from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prop_frattini.root_system import RootSystemKind, build
from prop_frattini.valued_datum import (
    DatumError,
    SplittingData,
    ValueSet,
    check_compatible,
    evaluate,
    f_prime_from_f,
    f_profile,
    f_profiles,
    f_res,
    gamma_sets,
    next_value,
    panel_exponent,
    panel_residue_card,
    profile_table,
    quotient_dim,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
steps = st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)])


@given(fractions, steps)
def test_value_set_offset_is_reduced(offset, step):
    vs = ValueSet(offset, step)
    assert 0 <= vs.offset < vs.step
    assert offset in vs


@given(fractions, steps, fractions)
def test_least_and_next(offset, step, x):
    vs = ValueSet(offset, step)
    lo = vs.least_at_least(x)
    nx = vs.next_value(x)
    assert lo in vs and nx in vs
    assert x <= lo < x + step
    assert x < nx <= x + step
    assert nx == (lo if lo > x else lo + step)
    assert next_value(x, vs) == nx


def test_value_set_members_and_str():
    vs = ValueSet(1, 2)
    assert vs.members_between(-3, 4) == [-3, -1, 1, 3]
    assert str(vs) == "1+2Z"
    assert str(ValueSet(0, Fraction(1, 2))) == "1/2Z"
    assert str(ValueSet(0, 1)) == "Z"
    with pytest.raises(DatumError):
        ValueSet(0, 0)


def test_splitting_data_validation():
    sp = SplittingData.make(3, True, f=2, m=1, p=5)
    assert (sp.d_prime, sp.e_prime, sp.f_prime) == (3, 3, 1)
    assert sp.q == 25
    assert SplittingData.make(6).d_prime == 3
    assert SplittingData.make(2).f_prime == 2
    with pytest.raises(DatumError):
        SplittingData(d=4)
    with pytest.raises(DatumError):
        SplittingData(d=2, d_prime=2, ramified=True, e_prime=1, f_prime=2)
    with pytest.raises(DatumError):
        SplittingData.make(1, p=9)
    with pytest.raises(DatumError):
        SplittingData.make(1).q


def test_check_compatible():
    check_compatible(build(RootSystemKind("C", 3)), SplittingData.make(2, True))
    check_compatible(build(RootSystemKind("G2", 2)), SplittingData.make(3))
    with pytest.raises(DatumError):
        check_compatible(build(RootSystemKind("G2", 2)), SplittingData.make(2))
    with pytest.raises(DatumError):
        check_compatible(build(RootSystemKind("BC", 2)), SplittingData.make(1))


def roots_by_class(sys):
    out = {}
    for r in sys.positive_roots:
        key = "multipliable" if r.multipliable else "divisible" if r.divisible else r.length_class
        out.setdefault(key, r)
    return out


def test_f_res():
    c3 = roots_by_class(build(RootSystemKind("C", 3)))
    assert f_res(c3["short"], SplittingData.make(2)) == 2
    assert f_res(c3["long"], SplittingData.make(2)) == 1
    assert f_res(c3["short"], SplittingData.make(2, True)) == 1
    bc = roots_by_class(build(RootSystemKind("BC", 2)))
    unr = SplittingData.make(2)
    assert (f_res(bc["middle"], unr), f_res(bc["multipliable"], unr), f_res(bc["divisible"], unr)) == (2, 1, 1)
    g2 = roots_by_class(build(RootSystemKind("G2", 2)))
    assert f_res(g2["short"], SplittingData.make(3)) == 3


def test_quotient_dims_bc():
    bc = roots_by_class(build(RootSystemKind("BC", 1)))
    a, a2 = bc["multipliable"], bc["divisible"]
    unr, ram = SplittingData.make(2), SplittingData.make(2, True)
    assert quotient_dim(a, 0, unr) == 2
    assert quotient_dim(a, 0, ram) == 1
    assert quotient_dim(a, Fraction(1, 2), unr) == 0
    assert quotient_dim(a2, 1, ram) == 1 and quotient_dim(a2, 0, ram) == 0
    assert panel_exponent(a, 0, unr) == 3
    assert panel_exponent(a, 0, ram) == 1
    assert panel_exponent(a, Fraction(1, 2), ram) == 1
    assert panel_exponent(a, Fraction(1, 2), unr) == 1
    assert panel_exponent(a2, 0, unr) == 3
    with pytest.raises(DatumError):
        panel_residue_card(a, Fraction(1, 4), unr, 3)


def test_panel_residue_cards_reduced():
    c2 = roots_by_class(build(RootSystemKind("C", 2)))
    assert panel_residue_card(c2["short"], 0, SplittingData.make(2), 5) == 26
    assert panel_residue_card(c2["long"], 0, SplittingData.make(2), 5) == 6
    assert panel_residue_card(c2["long"], 2, SplittingData.make(2, True), 5) == 6
    with pytest.raises(DatumError):
        panel_residue_card(c2["long"], 1, SplittingData.make(2, True), 5)


def test_profile_table_cards():
    rows = profile_table(build(RootSystemKind("BC", 2)), SplittingData.make(2, p=3))
    cards = {row.to_json()["class"]: row.residue_card for row in rows}
    assert cards == {"multipliable": 9, "middle": 9, "divisible": 3}


def test_evaluate_is_linear():
    sys = build(RootSystemKind("B", 2))
    x = (Fraction(1, 2), Fraction(-3))
    for r in sys.roots:
        assert evaluate(r, x) == r.coeffs[0] * x[0] + r.coeffs[1] * x[1]
        assert evaluate(-r, x) == -evaluate(r, x)


KIND_SPLITS = [
    (RootSystemKind("A", 3), SplittingData.make(1)),
    (RootSystemKind("B", 3), SplittingData.make(2, True)),
    (RootSystemKind("C", 3), SplittingData.make(2, False)),
    (RootSystemKind("G2", 2), SplittingData.make(3, True)),
    (RootSystemKind("BC", 2), SplittingData.make(2, False)),
    (RootSystemKind("BC", 3), SplittingData.make(2, True)),
]


def allowed_levels(root, split):
    prof = gamma_sets(root, split)
    sets = [(prof.gamma_prime, 1)]
    if root.multipliable:
        sets.append((prof.gamma_double, 2))
    return sets


@given(st.sampled_from(KIND_SPLITS), st.data(), fractions)
def test_f_prime_is_least_admissible(ks, data, value):
    kind, split = ks
    sys = build(kind)
    r = data.draw(st.sampled_from([r for r in sys.roots if not r.divisible]))
    fp = f_prime_from_f(r, value, split)
    sets = allowed_levels(r, split)
    assert fp >= value
    assert any(fp * scale in vs for vs, scale in sets)
    # nothing admissible strictly between value and fp
    for vs, scale in sets:
        assert not (value * scale <= vs.least_at_least(value * scale) < fp * scale)


@given(st.sampled_from(KIND_SPLITS), st.lists(st.tuples(fractions, fractions, fractions), min_size=1, max_size=3))
def test_f_profiles_match_pointwise(ks, raw):
    kind, split = ks
    sys = build(kind)
    pts = [p[: sys.rank] for p in raw]
    f, fp = f_profiles(pts, sys, split)
    for r in sys.roots[:6]:
        assert (f[r], fp[r]) == f_profile(pts, r, split)
    for r in sys.roots:
        assert f[r] + f[-r] >= 0


def test_f_profile_needs_points():
    sys = build(RootSystemKind("A", 1))
    with pytest.raises(DatumError):
        f_profile([], sys.roots[0], SplittingData.make(1))
    with pytest.raises(DatumError):
        f_profiles([], sys, SplittingData.make(1))

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prop_frattini.apartment import fundamental_alcove
from prop_frattini.frattini import (
    HypothesisError,
    check_residue_characteristic,
    frattini_dimension,
    frattini_levels,
    generator_count,
    negative_bounds,
    positive_bounds,
    rank1_levels,
    resolve_type,
    trialitarian_guard,
    xi_from_levels,
)
from prop_frattini.root_system import RootSystemKind, all_kinds, build
from prop_frattini.valued_datum import DatumError, SplittingData


def test_residue_characteristic():
    check_residue_characteristic(RootSystemKind("B", 3), 3)
    with pytest.raises(HypothesisError):
        check_residue_characteristic(RootSystemKind("A", 2), 2)
    with pytest.raises(HypothesisError):
        check_residue_characteristic(RootSystemKind("G2", 2), 3)
    with pytest.raises(HypothesisError):
        check_residue_characteristic(RootSystemKind("BC", 2), 3)


@pytest.mark.parametrize(
    "tag, n, rel, label",
    [
        ("1A", 3, "A3", "^1A_3"),
        ("2A", 5, "C3", "^2A_5"),
        ("2A", 4, "BC2", "^2A_4"),
        ("2A", 2, "BC1", "^2A_2"),
        ("2D", 5, "B4", "^2D_5"),
        ("2E6", None, "F4", "^2E_6"),
        ("3D4", None, "G2", "^3D_4"),
        ("6D4", None, "G2", "^6D_4"),
        ("1G", None, "G2", "^1G_2"),
    ],
)
def test_resolve_type(tag, n, rel, label):
    qt = resolve_type(tag, n)
    assert qt.relative.name == rel
    assert qt.label == label


@pytest.mark.parametrize("tag, n", [("2A", 1), ("2D", 3), ("4A", 2), ("2E7", None), ("1B", None), ("2A", None)])
def test_resolve_type_errors(tag, n):
    with pytest.raises(HypothesisError):
        resolve_type(tag, n)


def test_generator_count_examples():
    assert generator_count("1A", l=2, p=3).d_P == 3
    rep = generator_count("2A", n=3, fprime=2, p=3)
    assert (rep.xi, rep.d_P, rep.ramified) == (4, 4, False)
    assert generator_count("2A", n=3, fprime=2, m=2, f=2, p=3).d_P == 16
    assert generator_count("6D4", p=5).ramified
    assert generator_count("2A", n=2, p=5).d_P == (3, 9)
    assert generator_count("2A", n=2, p=5, ramified=True).d_P == (2, 6)
    assert generator_count("2A", n=2, p=5).exact is False


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(tag="2A", n=2, p=3),
        dict(tag="1G", p=3),
        dict(tag="1A", n=2, p=2),
        dict(tag="1A", n=2, ramified=True),
        dict(tag="2A", n=3, fprime=3),
        dict(tag="2A", n=3, fprime=2, ramified=True),
        dict(tag="6D4", ramified=False),
        dict(tag="6D4", p=7),
        dict(tag="3D4", ramified=True, p=5),
        dict(tag="1A", n=2, m=0),
    ],
)
def test_generator_count_rejects(kwargs):
    with pytest.raises(HypothesisError):
        generator_count(**kwargs)


def test_generator_report_json():
    doc = generator_count("2D", n=5, fprime=2, p=3).to_json()
    assert doc["xi"] == 6 and doc["relative_root_system"] == "B4"
    assert doc["derivation"]["formula"] == "xi = l+f'"
    assert "p != 2" in doc["hypotheses"]


def test_a2_levels():
    sys = build(RootSystemKind("A", 2))
    split = SplittingData.make(1)
    assign = frattini_levels(fundamental_alcove(sys, split), split)
    a1, a2 = sys.basis
    theta = sys.highest
    assert set(assign.bounding_roots()) == {a1, a2, -theta}
    assert assign[a1].frattini_level == 1
    assert assign[-theta].frattini_level == 2
    assert assign[theta].frattini_level == 0 and not assign[theta].bounding
    assert assign[-a1].frattini_level == 1
    assert frattini_dimension(assign) == 3
    assert assign.to_json()["dimension"] == 3


def test_bc_adjunct_only_unramified():
    sys = build(RootSystemKind("BC", 2))
    for ram, has_adjunct in ((False, True), (True, False)):
        split = SplittingData.make(2, ram)
        assign = frattini_levels(fundamental_alcove(sys, split), split)
        a = next(r for r in sys.basis if r.multipliable)
        assert (assign[a].adjunct_2a is not None) == has_adjunct
        assert assign[a].frattini_level == Fraction(1, 2)


def test_bc1_levels_need_rank_one_helper():
    sys = build(RootSystemKind("BC", 1))
    split = SplittingData.make(2)
    with pytest.raises(HypothesisError):
        frattini_levels(fundamental_alcove(sys, split), split)
    with pytest.raises(HypothesisError):
        xi_from_levels(resolve_type("2A", 2), False)


def test_frattini_levels_checks_p():
    sys = build(RootSystemKind("G2", 2))
    split = SplittingData.make(1, p=3)
    with pytest.raises(HypothesisError):
        frattini_levels(fundamental_alcove(sys, split), split)


@pytest.mark.parametrize(
    "tag, n, ram, xi",
    [("1E", 8, False, 9), ("2A", 7, True, 5), ("2A", 7, False, 8), ("2A", 6, True, 4), ("2E6", 6, False, 7), ("3D4", 4, False, 5)],
)
def test_xi_from_levels(tag, n, ram, xi):
    assert xi_from_levels(resolve_type(tag, n), ram) == xi


def test_rank1_reduced():
    r = rank1_levels(SplittingData.make(1), "reduced", 3)
    assert (r.positive_level, r.negative_level, r.torus_depth) == (4, -1, 1)
    with pytest.raises(DatumError):
        rank1_levels(SplittingData.make(1), "reduced", Fraction(1, 2))


@pytest.mark.parametrize(
    "ram, level, pos, neg, eps, depth",
    [
        (False, 0, Fraction(3, 2), 1, 0, 3),
        (True, 0, 2, Fraction(3, 2), 0, 3),
        (True, 1, 3, Fraction(1, 2), 1, 4),
        (True, Fraction(1, 2), Fraction(5, 2), 1, 1, 4),
    ],
)
def test_rank1_bc1(ram, level, pos, neg, eps, depth):
    r = rank1_levels(SplittingData.make(2, ram), "BC1", level, p=5)
    assert (r.positive_level, r.negative_level, r.epsilon, r.torus_depth) == (pos, neg, eps, depth)
    improved = rank1_levels(SplittingData.make(2, ram), "BC1", level, p=5, improved=True)
    assert improved.torus_depth == 1 + 2 * eps


def test_rank1_bc1_needs_p5():
    with pytest.raises(HypothesisError):
        rank1_levels(SplittingData.make(2), "BC1", 0, p=3)


def test_bounds_reject_levels_outside_gamma():
    sys = build(RootSystemKind("B", 2))
    split = SplittingData.make(2, True)
    long_simple = sys.basis[0]
    l = {a: Fraction(0) for a in sys.basis}
    l[long_simple] = Fraction(1)
    with pytest.raises(DatumError):
        positive_bounds(sys, l, split)


def test_trialitarian_guard():
    sys = build(RootSystemKind("G2", 2))
    split = SplittingData.make(3, True)
    prof = fundamental_alcove(sys, split)
    theta = prof.theta
    l = {a: Fraction(0) for a in sys.basis}
    l[-theta] = Fraction(1)
    assert trialitarian_guard(sys, prof.weights, l)
    assert negative_bounds(sys, prof.weights, l).warning is None
    l[-theta] = Fraction(2)
    assert not trialitarian_guard(sys, prof.weights, l)
    assert negative_bounds(sys, prof.weights, l).warning is not None


KINDS = [k for k in all_kinds(6) if k.family != "BC"]


@given(st.sampled_from(KINDS), st.lists(st.integers(-5, 5), min_size=6, max_size=6))
def test_positive_bounds_additive(kind, values):
    sys = build(kind)
    l = {a: Fraction(v) for a, v in zip(sys.basis, values)}
    lp = positive_bounds(sys, l)
    for a in sys.positive_roots:
        for b in sys.positive_roots:
            s = sys.add(a, b)
            if s is not None:
                assert lp[s] == lp[a] + lp[b]

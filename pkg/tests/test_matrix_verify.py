import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prop_frattini.local_field import HPoint, LocalField, h_mul, random_hpoint
from prop_frattini.matrix_verify import (
    MIN_MARGIN,
    SL2,
    SU3,
    SUITES,
    AdmissibilityError,
    Mat,
    TrialReport,
    admissible_models,
    check_admissible,
    commutator,
    compare,
    det_one,
    frattini_eq2,
    identity,
    inversion_chain,
    make_field,
    preserves_form,
    run_suite,
    same_root_preimage,
    same_root_threshold,
    sl2_decompose,
    sl3_root,
    su3_decompose,
)


def holds(check):
    return bool(np.all(check.ok)) and int(np.min(check.margin)) >= MIN_MARGIN


def test_torus_commutator_example():
    F = LocalField(p=5, precision=12, depth=6)
    t = F.one() + F.uniformizer()
    x = F.one()
    lhs = commutator(SL2.x_plus(x), SL2.torus(t), SL2.x_plus(-x), SL2.torus(t.inverse()))
    # 1 - (1 + t)^2 = -2t - t^2 = 3t + 4t^2 over F_5
    assert lhs[0, 1].terms() == {1: 3, 2: 4}
    assert holds(compare(lhs, SL2.x_plus(F.parse("3*t + 4*t^2"))))


def test_opposite_commutator_example():
    F = LocalField(p=5, precision=12, depth=6)
    x, y = F.uniformizer(), F.one()
    lhs = commutator(SL2.x_minus(y), SL2.x_plus(x), SL2.x_minus(-y), SL2.x_plus(-x))
    den = F.one() + x
    rhs = SL2.x_minus(x / den) @ SL2.torus(den) @ SL2.x_plus(-(x * x) / den)
    assert holds(compare(lhs, rhs))
    T, U, X = sl2_decompose(lhs)
    assert T.terms() == {0: 1, 1: 1}
    assert X.agrees(x / den) and U.agrees(-(x * x) / den)


def printed_eq2(t, v):
    """The lower-triangular identity with the signs and factors as first printed."""
    F = t.F
    c = SL2.x_plus((t * t - 1) / (t * t * v))
    d = Mat.from_rows([[t.inverse(), F.zero()], [-(t * v / (t * t - 1)), t]])
    c_inv = SL2.x_plus(-((t * t - 1) / (t * t * v)))
    d_inv = Mat.from_rows([[t, F.zero()], [t * v / (t * t - 1), t.inverse()]])
    rhs = Mat.from_rows([[t * t, F.zero()], [v, (t * t).inverse()]])
    return commutator(c, d, c_inv, d_inv), rhs


def test_printed_eq2_fails_and_corrected_holds():
    F = make_field(5, "base")
    rng = np.random.default_rng(2)
    t = F.random(rng, (50,), 1, 3) + 1
    v = F.random(rng, (50,), -2, 4)
    lhs, rhs = printed_eq2(t, v)
    assert not np.any(compare(lhs, rhs).ok)
    assert holds(compare(*frattini_eq2(t, v)))


@given(st.integers(0, 2**32 - 1), st.sampled_from(["base", "unramified", "ramified"]))
def test_sparse_and_dense_products_agree(seed, model):
    F = make_field(5, model, precision=12, depth=8)
    rng = np.random.default_rng(seed)
    entries = F.random(rng, (3, 3, 3), -2, 3)
    a, b = Mat(entries), Mat(F.random(rng, (3, 3, 3), -2, 3))
    sl = SL2.x_plus(F.random(rng, (3,), 0, 2))
    assert holds(compare(a @ b, a.dense_matmul(b)))
    assert holds(compare(sl @ sl, sl.dense_matmul(sl)))


@pytest.mark.parametrize("model", ["unramified", "ramified"])
def test_su3_parametrization(model):
    F = make_field(5, model, precision=16, depth=8)
    rng = np.random.default_rng(3)
    P, Q = random_hpoint(F, rng, (20,), -1), random_hpoint(F, rng, (20,), 1)
    g, h = SU3.x_plus(P.u, P.v), SU3.x_plus(Q.u, Q.v)
    assert holds(preserves_form(g)) and holds(det_one(g))
    assert holds(preserves_form(SU3.x_minus(Q.u, Q.v)))
    # the matrices compose by (u + u', v + v' + tau(u) u'), the conjugate of h_mul's law
    assert holds(compare(g @ h, SU3.x_plus(P.u + Q.u, P.v + Q.v + P.u.tau() * Q.u)))
    R = h_mul(P, Q)
    assert np.all(R.is_member())
    assert holds(compare(g @ g.unitary_inverse(), identity(F, 3)))
    t = F.random(rng, (20,), 0, 0)
    assert holds(preserves_form(SU3.torus(t)))


def test_su3_decompose_roundtrip():
    F = make_field(5, "unramified", precision=16, depth=8)
    rng = np.random.default_rng(4)
    P, Q = random_hpoint(F, rng, (10,), 2), random_hpoint(F, rng, (10,), 1)
    t = F.random(rng, (10,), 0, 0)
    M = SU3.x_minus(Q.u, Q.v) @ SU3.torus(t) @ SU3.x_plus(P.u, P.v)
    T, U, V, X, Y = su3_decompose(M)
    for got, want in ((T, t), (U, P.u), (V, P.v), (X, Q.u), (Y, Q.v)):
        assert holds(compare(got, want))


def test_same_root_preimage():
    F = make_field(5, "unramified")
    w = F.random(np.random.default_rng(5), (10,), same_root_threshold(F, 1), same_root_threshold(F, 1) + 3, kind="L0")
    X, U = same_root_preimage(F, 1, w)
    assert np.all(X.is_member()) and np.all(U.is_member())
    lhs = commutator(SU3.x_plus(U.u, U.v), SU3.x_plus(X.u, X.v), SU3.x_plus(*_inv(U)), SU3.x_plus(*_inv(X)))
    assert holds(compare(lhs, SU3.x_plus(F.zero(), w)))


def _inv(P: HPoint):
    Q = P.inverse()
    return Q.u, Q.v


def test_inversion_chain_single():
    F = make_field(5, "unramified")
    w = F.parse("t^3 + 2*t^5")
    out = inversion_chain(F, w.broadcast_to((1,)), 0)
    assert holds(compare(out["product"], SU3.torus(w.broadcast_to((1,)) + 1)))


def test_structure_constant_sign():
    F = LocalField(p=5, precision=12, depth=6)
    u, v = F.parse("2 + t"), F.parse("t^-1")
    M = commutator(sl3_root(F, 0, 1, u), sl3_root(F, 1, 2, v), sl3_root(F, 0, 1, -u), sl3_root(F, 1, 2, -v))
    assert holds(compare(M, sl3_root(F, 0, 2, u * v)))


def test_admissibility():
    with pytest.raises(AdmissibilityError):
        check_admissible("su3-torus", make_field(5, "base"))
    with pytest.raises(AdmissibilityError):
        check_admissible("su3-torus", make_field(3, "ramified"))
    with pytest.raises(AdmissibilityError):
        check_admissible("su3-inversion", make_field(3, "unramified"))
    with pytest.raises(AdmissibilityError):
        check_admissible("nope", make_field(5, "base"))
    assert admissible_models("su3-torus", 3) == ["unramified"]
    assert admissible_models("sl2-torus", 3) == ["base", "unramified", "ramified"]
    with pytest.raises(AdmissibilityError):
        run_suite("su3-inversion", 3, "unramified", trials=4)


def test_report_merge_and_json():
    a = TrialReport("x", trials=10, failures=0, worst_precision_margin=9, configs=["m1"])
    b = TrialReport("x", trials=5, failures=1, worst_precision_margin=3, configs=["m1", "m2"])
    c = a.merge(b)
    assert (c.trials, c.failures, c.worst_precision_margin, c.configs) == (15, 1, 3, ["m1", "m2"])
    assert a.passed and not c.passed
    assert not TrialReport("x", trials=1, worst_precision_margin=3).passed
    with pytest.raises(ValueError):
        a.merge(TrialReport("y"))
    doc = a.to_json()
    assert doc["schema"] == "prop-frattini/trial-report/1" and "seconds" not in doc
    assert "seconds" in a.to_json(timing=True)


def test_suites_are_deterministic():
    one = run_suite("sl2-opposite", 5, "base", trials=40, seed=11).to_json()
    two = run_suite("sl2-opposite", 5, "base", trials=40, seed=11).to_json()
    assert json.dumps(one) == json.dumps(two)


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suites_at_p7(suite):
    for model in admissible_models(suite, 7):
        rep = run_suite(suite, 7, model, trials=60, seed=1)
        assert rep.failures == 0, (suite, model)
        assert rep.passed

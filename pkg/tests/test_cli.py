import json

import pytest

from prop_frattini.cli import ERROR_SCHEMA, main


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, json.loads(out.out), out.err


def test_dp_split_a2(capsys):
    status, doc, _ = run(capsys, "dp", "--tag", "1A", "--l", "2", "--p", "3")
    assert status == 0
    assert (doc["xi"], doc["d_P"], doc["relative_root_system"]) == (3, 3, "A2")


def test_dp_unitary_a3(capsys):
    status, doc, _ = run(capsys, "dp", "--tag", "2A", "--n", "3", "--fprime", "2", "--p", "3")
    assert status == 0
    assert doc["xi"] == 4 and doc["type"] == "^2A_3"


def test_dp_rejects_bc1_at_p3(capsys):
    status, doc, err = run(capsys, "dp", "--tag", "2A", "--n", "2", "--p", "3")
    assert status == 2
    assert doc["schema"] == ERROR_SCHEMA
    assert set(doc) == {"schema", "command", "error", "message"}
    assert doc["command"] == "dp" and doc["error"] == "HypothesisError"
    assert err.startswith("prop-frattini:")


def test_dp_bc1_range(capsys):
    status, doc, _ = run(capsys, "dp", "--tag", "2A", "--n", "2", "--p", "5")
    assert status == 0 and doc["d_P"] == {"min": 3, "max": 9}


def test_alcove_bc2_ramified(capsys):
    status, doc, _ = run(capsys, "alcove", "--family", "BC", "--rank", "2", "--ramified")
    assert status == 0
    walls = {(tuple(w["root"]), w["level"]["num"], w["level"]["den"]) for w in doc["walls"]}
    assert walls == {((1, 0), 0, 1), ((0, 1), 0, 1), ((-1, -1), 1, 2)}


def test_alcove_unit_ball(capsys):
    status, doc, _ = run(capsys, "alcove", "--family", "A", "--rank", "2", "--p", "3")
    assert status == 0 and doc["unit_ball_alcoves"] == 10 and doc["q"] == 3


def test_values_bc1_ramified(capsys):
    status, doc, _ = run(capsys, "values", "--family", "BC", "--rank", "1", "--ramified")
    assert status == 0
    rows = {r["class"]: r for r in doc["rows"]}
    assert rows["multipliable"]["gamma"] == "1/2Z"
    assert rows["multipliable"]["gamma_double"] == "1+2Z"
    assert rows["divisible"]["gamma"] == "1+2Z"


def test_frattini_a2(capsys):
    status, doc, _ = run(capsys, "frattini", "--family", "A", "--rank", "2", "--p", "3")
    assert status == 0 and doc["dimension"] == 3


def test_frattini_rank1_level(capsys):
    status, doc, _ = run(capsys, "frattini", "--family", "A", "--rank", "1", "--rank1-level", "3")
    assert status == 0
    status, doc, _ = run(capsys, "frattini", "--family", "A", "--rank", "2", "--rank1-level", "3")
    assert status == 2 and doc["error"] == "UsageError"


def test_verify_inadmissible_model(capsys):
    status, doc, _ = run(capsys, "verify", "--suite", "su3-torus", "--p", "3", "--ramified")
    assert status == 2 and doc["error"] == "AdmissibilityError"


def test_verify_opposite_passes(capsys):
    status, doc, _ = run(capsys, "verify", "--suite", "sl2-opposite", "--trials", "50")
    assert status == 0
    assert doc["failures"] == 0 and doc["trials"] == 50
    assert "seconds" not in doc


def test_verify_timing_flag(capsys):
    _, doc, _ = run(capsys, "verify", "--suite", "sl2-torus", "--trials", "10", "--timing")
    assert "seconds" in doc


@pytest.mark.parametrize("q, ok", [(7, True), (9, False)])
def test_verify_q(capsys, q, ok):
    status, doc, _ = run(capsys, "verify", "--suite", "sl2-torus", "--q", str(q), "--trials", "10")
    assert (status == 0) == ok
    if not ok:
        assert status == 2 and doc["error"] == "UsageError"


def test_verify_q_disagrees_with_p(capsys):
    status, doc, _ = run(capsys, "verify", "--suite", "sl2-torus", "--q", "7", "--p", "5", "--trials", "10")
    assert status == 2


def test_rootsys(capsys):
    status, doc, _ = run(capsys, "rootsys", "--family", "G2")
    assert status == 0
    assert (doc["roots"], doc["highest_root"], len(doc["positive_roots"])) == (12, [3, 2], 6)


def test_rootsys_bad_family(capsys):
    status, doc, _ = run(capsys, "rootsys", "--family", "Q", "--rank", "2")
    assert status == 2 and doc["error"] == "RootSystemError"

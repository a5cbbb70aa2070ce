import itertools

import pytest
from hypothesis import given, strategies as st

from ifw.errors import CapExceeded, MissingRelation, ParseError, TupleOutOfRange, UnboundVariable
from ifw.model import (
    Structure,
    count_structures,
    enumerate_structures,
    evaluate_atom,
    format_model,
    parse_model,
)
from ifw.syntax import EqAtom, NegAtom, RelAtom


def test_parse_domain_only():
    M = parse_model("domain 2")
    assert M == Structure(2) and M.relations == {}


def test_parse_relation():
    M = parse_model("domain 3\nrelation R 2 { (0,1) (2,2) }")
    assert M.size == 3
    assert M.relations["R"] == (2, frozenset({(0, 1), (2, 2)}))


def test_parse_comments_and_layout():
    M = parse_model("# two points\ndomain 2\nrelation P 1 {\n  (1)\n}\n")
    assert M.holds("P", (1,)) and not M.holds("P", (0,))


def test_tuple_out_of_range():
    with pytest.raises(TupleOutOfRange):
        parse_model("domain 2\nrelation R 1 { (5) }")


def test_parse_errors_have_positions():
    with pytest.raises(ParseError) as e:
        parse_model("domain 2\nrelation R 2 { (0) }")
    assert e.value.line == 2
    with pytest.raises(ParseError):
        parse_model("domain 0")
    with pytest.raises(ParseError):
        parse_model("relation R 1 { }")


def test_format_round_trip():
    M = parse_model("domain 3\nrelation R 2 { (2,2) (0,1) }\nrelation E 1 { }")
    text = format_model(M)
    assert parse_model(text) == M
    assert format_model(parse_model(text)) == text


def test_evaluate_atom():
    M = Structure(2, {"R": (1, frozenset())})
    assert evaluate_atom(EqAtom("x", "y"), {"x": 1, "y": 1}, M)
    assert evaluate_atom(NegAtom(RelAtom("R", ("x",))), {"x": 0}, M)
    with pytest.raises(UnboundVariable):
        evaluate_atom(EqAtom("x", "y"), {"x": 0}, M)


def test_missing_relation():
    with pytest.raises(MissingRelation):
        Structure(2).check_signature({"R": 1})


def test_counts():
    assert len(list(enumerate_structures({}, 3))) == 3
    assert len(list(enumerate_structures({"R": 1}, 2))) == 6
    with pytest.raises(CapExceeded):
        enumerate_structures({"R": 2}, 4, cap=100)


@given(
    st.dictionaries(st.sampled_from("PQR"), st.integers(1, 2), max_size=2),
    st.integers(1, 2),
)
def test_enumeration_matches_count_and_is_duplicate_free(sig, max_size):
    expected = sum(
        2 ** sum(n**a for a in sig.values()) for n in range(1, max_size + 1)
    )
    out = list(enumerate_structures(sig, max_size))
    assert len(out) == expected == count_structures(sig, max_size)
    assert len(set(out)) == len(out)
    assert out == list(enumerate_structures(sig, max_size))


def test_enumeration_order():
    out = list(enumerate_structures({"R": 1}, 2))
    assert [M.size for M in out] == [1, 1, 2, 2, 2, 2]
    assert out[0].relations["R"][1] == frozenset()
    # every subset of the tuple space appears exactly once per size
    subsets = {M.relations["R"][1] for M in out if M.size == 2}
    tuples = [(0,), (1,)]
    assert subsets == {
        frozenset(c) for r in range(3) for c in itertools.combinations(tuples, r)
    }

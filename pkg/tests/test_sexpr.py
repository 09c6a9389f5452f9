"""Reader/writer round-trips and error reporting for the s-expression layer."""

import pytest
from hypothesis import given, strategies as st

from stamp.errors import ParseError
from stamp.sexpr import Symbol, dumps, format_number, parse_all, parse_one


def test_atoms_and_nesting():
    form = parse_one("(a (b c) d)")
    assert form == ["a", ["b", "c"], "d"]
    assert isinstance(form[0], Symbol)


def test_vector_literal_reads_as_float_tuple():
    assert parse_one("[1 2.5 -3]") == (1.0, 2.5, -3.0)


def test_comments_and_whitespace_ignored():
    text = "; header\n(a ; trailing\n  b)\n"
    assert parse_all(text) == [["a", "b"]]


def test_multiple_top_level_forms():
    assert parse_all("(a) (b)") == [["a"], ["b"]]


def test_symbol_positions_point_at_source():
    form = parse_one("(alpha\n  beta)")
    assert (form[0].line, form[0].col) == (1, 2)
    assert (form[1].line, form[1].col) == (2, 3)


@pytest.mark.parametrize("text", ["(a", "a)", "(a]", "[1 2", "[a b]"])
def test_malformed_input_raises_parse_error(text):
    with pytest.raises(ParseError):
        parse_all(text)


def test_parse_one_rejects_extra_forms():
    with pytest.raises(ParseError):
        parse_one("(a) (b)")


def test_format_number_is_exact_and_compact():
    assert format_number(1.0) == "1"
    assert format_number(2.5) == "2.5"
    assert float(format_number(0.1)) == 0.1


atoms = st.text(
    alphabet=st.sampled_from("abcdefghijklmnopqrstuvwxyz0123456789-_?.:/"),
    min_size=1, max_size=8,
).filter(lambda s: not s[0].isdigit() and s not in (".", "-"))

vectors = st.tuples(*[st.floats(-1e6, 1e6, allow_nan=False)] * 2)

forms = st.recursive(
    atoms | vectors,
    lambda inner: st.lists(inner, min_size=0, max_size=4),
    max_leaves=12,
)


@given(forms)
def test_dumps_parse_round_trip(form):
    rendered = dumps([form] if not isinstance(form, list) else form)
    parsed = parse_one(rendered)
    expected = [form] if not isinstance(form, list) else form
    assert parsed == expected

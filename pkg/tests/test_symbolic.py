"""Lexicons, words, incidence matrices, and the primitive-grammar catalogue."""

import itertools

import numpy as np
import pytest

from sftlearn import (
    ClassTooLargeError,
    Grammar,
    Lexicon,
    OrderRelation,
    ValidationError,
    admits,
    all_words,
    compare,
    enumerate_grammars,
    format_word,
    is_primitive,
    parse_word,
    transition_closure,
    validate_word,
    wielandt_exponent,
)

from conftest import primitive_by_graph


# ---------------------------------------------------------------------------
# lexicons and words
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("bad", [1, 0, -3, 2.5, "2", True])
def test_lexicon_rejects_non_integral_or_small_theta(bad):
    with pytest.raises(ValidationError):
        Lexicon(bad)


def test_lexicon_symbols_enumerate_the_alphabet():
    assert list(Lexicon(4).symbols) == [0, 1, 2, 3]


def test_validate_word_normalizes_to_tuple(lex2):
    assert validate_word([0, 1, 1], lex2) == (0, 1, 1)
    assert validate_word((), lex2) == ()


def test_validate_word_rejects_out_of_range_symbols(lex2):
    with pytest.raises(ValidationError):
        validate_word((0, 2), lex2)
    with pytest.raises(ValidationError):
        validate_word((0, -1), lex2)


def test_parse_and_format_word_round_trip():
    assert parse_word("0110") == (0, 1, 1, 0)
    assert format_word((2, 0, 1)) == "201"
    assert parse_word(format_word((0, 1, 1, 0))) == (0, 1, 1, 0)


def test_parse_word_rejects_non_digits():
    with pytest.raises(ValidationError):
        parse_word("01a0")
    with pytest.raises(ValidationError):
        parse_word("-12")


def test_format_word_rejects_symbols_beyond_digits():
    with pytest.raises(ValidationError):
        format_word((0, 11))


# ---------------------------------------------------------------------------
# primitivity
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("theta,expected", [(2, 2), (3, 5), (4, 10)])
def test_wielandt_exponent_values(theta, expected):
    assert wielandt_exponent(theta) == expected


def test_is_primitive_hand_cases():
    assert is_primitive([[1, 1], [1, 0]])
    assert is_primitive([[1, 1], [1, 1]])
    assert not is_primitive([[0, 1], [1, 0]])   # period two
    assert not is_primitive([[1, 0], [0, 1]])   # disconnected
    assert not is_primitive([[1, 1], [0, 1]])   # not irreducible
    # the classic extremal example: a cycle plus one chord needs the full
    # Wielandt power to go positive, and must still be recognized
    assert is_primitive([[0, 1, 0], [0, 0, 1], [1, 1, 0]])


def test_wielandt_bound_is_tight_for_the_extremal_matrix():
    m = np.array([[0, 1, 0], [0, 0, 1], [1, 1, 0]], dtype=np.int64)
    p = np.eye(3, dtype=np.int64)
    first_positive = None
    for k in range(1, wielandt_exponent(3) + 1):
        p = (p @ m > 0).astype(np.int64)
        if p.all():
            first_positive = k
            break
    assert first_positive == wielandt_exponent(3)


def test_is_primitive_matches_graph_oracle_exhaustively():
    for theta in (2, 3):
        for bits in itertools.product((0, 1), repeat=theta * theta):
            rows = [list(bits[i * theta:(i + 1) * theta]) for i in range(theta)]
            assert is_primitive(rows) == primitive_by_graph(rows), rows


def test_is_primitive_rejects_malformed_matrices():
    with pytest.raises(ValidationError):
        is_primitive([[1, 1], [1]])
    with pytest.raises(ValidationError):
        is_primitive([[1, 2], [1, 0]])
    with pytest.raises(ValidationError):
        is_primitive([[1]])


# ---------------------------------------------------------------------------
# grammars
# ---------------------------------------------------------------------------

def test_grammar_constructor_enforces_primitivity(lex2):
    with pytest.raises(ValidationError) as err:
        Grammar(lex2, ((0, 1), (1, 0)))
    assert "[[0, 1], [1, 0]]" in str(err.value)


def test_grammar_normalizes_rows_and_freezes_array(golden):
    assert golden.matrix == ((1, 1), (1, 0))
    assert golden.array.dtype == np.int64
    with pytest.raises(ValueError):
        golden.array[0, 0] = 0


def test_grammar_shape_must_match_lexicon(lex2):
    with pytest.raises(ValidationError):
        Grammar(lex2, ((1, 1, 0), (1, 0, 0), (1, 0, 0)))


def test_grammar_equality_and_hash(golden):
    again = Grammar.from_rows(np.array([[1, 1], [1, 0]]))
    assert again == golden
    assert hash(again) == hash(golden)


def test_compare_covers_all_relations(golden, full2, swapped):
    assert compare(golden, full2) is OrderRelation.LESS
    assert compare(full2, golden) is OrderRelation.GREATER
    assert compare(golden, golden) is OrderRelation.EQUAL
    assert compare(golden, swapped) is OrderRelation.INCOMPARABLE


def test_compare_requires_shared_lexicon(golden):
    other = Grammar.from_rows([[1, 1, 1], [1, 1, 1], [1, 1, 1]])
    with pytest.raises(ValidationError):
        compare(golden, other)


def test_admits_checks_every_adjacent_pair(golden, full2):
    assert admits(golden, (0, 1, 0, 1))
    assert not admits(golden, (0, 1, 1))
    assert admits(full2, (1, 1, 1, 1))
    assert admits(golden, (1,))        # single symbols are always admissible
    assert admits(golden, ())


def test_transition_closure_collects_observed_pairs(lex2):
    closure = transition_closure((0, 1, 1, 0), lex2)
    assert closure.tolist() == [[0, 1], [1, 1]]
    assert transition_closure((0,), lex2).tolist() == [[0, 0], [0, 0]]
    with pytest.raises(ValidationError):
        transition_closure((), lex2)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def test_enumerate_theta2_catalogue(lex2):
    matrices = [g.matrix for g in enumerate_grammars(lex2)]
    assert matrices == [
        ((0, 1), (1, 1)),
        ((1, 1), (1, 0)),
        ((1, 1), (1, 1)),
    ]


def test_enumerate_theta3_matches_graph_oracle():
    got = [g.matrix for g in enumerate_grammars(Lexicon(3))]
    expected = []
    for bits in itertools.product((0, 1), repeat=9):
        rows = tuple(tuple(bits[3 * i:3 * i + 3]) for i in range(3))
        if primitive_by_graph([list(r) for r in rows]):
            expected.append(rows)
    assert got == expected
    assert len(got) == 139


def test_enumeration_is_row_major_ascending(lex2):
    def key(g):
        return tuple(bit for row in g.matrix for bit in row)
    keys = [key(g) for g in enumerate_grammars(lex2)]
    assert keys == sorted(keys)


def test_enumeration_cap():
    with pytest.raises(ClassTooLargeError):
        enumerate_grammars(Lexicon(5))


def test_all_words_counts(lex2):
    assert sum(1 for _ in all_words(lex2, 5)) == 32
    assert list(all_words(lex2, 1)) == [(0,), (1,)]

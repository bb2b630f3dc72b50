import pytest
from hypothesis import given
from hypothesis import strategies as st

from copland_tamper.syntax import (
    At,
    Branch,
    BranchKind,
    Copy,
    Hash,
    LexError,
    Meas,
    Nul,
    ParseError,
    Seq,
    Sign,
    SplitSpec,
    TopPhrase,
    parse_phrase,
    parse_top,
    print_phrase,
    print_top,
)
from conftest import EX1_TEXT, EX2_TEXT, EX3_TEXT


def test_parse_example_one_structure():
    top = parse_top(EX1_TEXT)
    assert top == TopPhrase(
        "app",
        At("ks", Seq(Meas("vcm", "us", "vc"), At("us", Meas("vc", "us", "sys")))),
    )


def test_parse_example_three_structure():
    top = parse_top(EX3_TEXT)
    assert top == TopPhrase(
        "app",
        At(
            "ks",
            Seq(
                Meas("vcm", "us", "vc"),
                Seq(Sign(), At("us", Seq(Meas("vc", "us", "sys"), Sign()))),
            ),
        ),
    )


def test_parse_example_two_branch():
    top = parse_top(EX2_TEXT)
    body = top.body
    assert isinstance(body, At)
    branch = body.body.right.body
    assert branch == Branch(
        BranchKind.PAR,
        SplitSpec.PLUS,
        SplitSpec.PLUS,
        Meas("aim", "us", "ai"),
        Meas("vc", "us", "sys"),
    )


def test_parse_single_copy():
    assert parse_top("*p: _") == TopPhrase("p", Copy())


@pytest.mark.parametrize(
    "text,expected",
    [
        ("_", Copy()),
        ("!", Sign()),
        ("#", Hash()),
        ("{}", Nul()),
        ("m q t", Meas("m", "q", "t")),
        ("a b c -> ! -> #", Seq(Meas("a", "b", "c"), Seq(Sign(), Hash()))),
        ("(_ -<- {})", Branch(BranchKind.SEQ, SplitSpec.MINUS, SplitSpec.MINUS, Copy(), Nul())),
        ("(_ +~- _)", Branch(BranchKind.PAR, SplitSpec.PLUS, SplitSpec.MINUS, Copy(), Copy())),
        ("(_ -> !) -> #", Seq(Seq(Copy(), Sign()), Hash())),
        ("((_))", Copy()),
    ],
)
def test_parse_phrase_forms(text, expected):
    assert parse_phrase(text) == expected


def test_arrow_is_right_associative():
    assert parse_phrase("_ -> ! -> #") == Seq(Copy(), Seq(Sign(), Hash()))


def test_whitespace_and_comments_are_insignificant():
    text = """// an attestation
    *app:
      @ks [
        vcm us vc   // kernel-space measurement
        -> @us [vc us sys]
      ]
    """
    assert parse_top(text) == parse_top(EX1_TEXT)


def test_print_is_canonical_on_examples():
    for text in (EX1_TEXT, EX2_TEXT, EX3_TEXT):
        assert print_top(parse_top(text)) == text


def test_print_parse_canonicalization_is_idempotent():
    samples = [
        "* p :_",
        "*p: a b c->!->#",
        "*p: ( _ +<+ ( {} -~- ! ) )",
        "*p: @q[((a b c -> !) -> _)]",
        EX1_TEXT,
    ]
    for text in samples:
        once = print_top(parse_top(text))
        assert print_top(parse_top(once)) == once
        assert parse_top(once) == parse_top(text)


def test_grouped_sequence_round_trips():
    top = parse_top("*p: (_ -> !) -> #")
    assert top.body == Seq(Seq(Copy(), Sign()), Hash())
    assert print_top(top) == "*p: (_ -> !) -> #"


@pytest.mark.parametrize(
    "text",
    [
        "*p: $",
        "*p: {x}",
        "*p: {",
    ],
)
def test_lexical_errors(text):
    with pytest.raises(LexError):
        parse_top(text)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "p: _",
        "*p _",
        "*p:",
        "*p: m q",
        "*p: @q _",
        "*p: @q [_",
        "*p: (_ +<+ _",
        "*p: (_ +< _)",
        "*p: _ -> ",
        "*p: _ _",
        "*p: _ extra q t",
        "*p: a b c +<+ d e f",
    ],
)
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        parse_top(text)


def test_errors_carry_positions():
    with pytest.raises(ParseError) as err:
        parse_top("*p:\n  @q _")
    assert err.value.line == 2
    assert "'['" in str(err.value)
    with pytest.raises(LexError) as lex_err:
        parse_top("*p: %")
    assert lex_err.value.line == 1
    assert lex_err.value.column == 5


# ── Round-trip property ──────────────────────────────────────────────────

identifiers = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,7}", fullmatch=True)

leaves = st.one_of(
    st.builds(Copy),
    st.builds(Sign),
    st.builds(Hash),
    st.builds(Nul),
    st.builds(Meas, identifiers, identifiers, identifiers),
)

phrases = st.recursive(
    leaves,
    lambda children: st.one_of(
        st.builds(Seq, children, children),
        st.builds(At, identifiers, children),
        st.builds(
            Branch,
            st.sampled_from(BranchKind),
            st.sampled_from(SplitSpec),
            st.sampled_from(SplitSpec),
            children,
            children,
        ),
    ),
    max_leaves=25,
)

top_phrases = st.builds(TopPhrase, identifiers, phrases)


@given(top_phrases)
def test_print_then_parse_is_identity(top):
    assert parse_top(print_top(top)) == top


@given(phrases)
def test_phrase_print_then_parse_is_identity(phrase):
    assert parse_phrase(print_phrase(phrase)) == phrase

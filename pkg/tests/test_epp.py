import random

import pytest

from copland_tamper.dataflow import graph_of, graph_of_phrase, is_cross_place
from copland_tamper.dataflow import evidence_of, sending_place
from copland_tamper.epp import (
    EppDiff,
    InsertionSide,
    SignInsertion,
    check_evidence_preservation,
    epp,
    epp_top,
    epp_top_with_diff,
    epp_with_diff,
    erase_insertions,
)
from copland_tamper.evidence import EMPTY, PlaceSet, SigE, eval_phrase, eval_top
from copland_tamper.evidence import tamper_places
from copland_tamper.syntax import (
    At,
    Copy,
    Hash,
    Meas,
    Nul,
    Seq,
    Sign,
    TopPhrase,
    parse_phrase,
    parse_top,
    print_top,
)
from copland_tamper.tamper import is_protected_graph
import gen
from conftest import EX1_PROTECTED_TEXT


def _random_cases(count, seed, include_nul=True):
    """Random (phrase, place, evidence) triples for the general transform."""
    rng = random.Random(seed)
    for top in gen.tops(count, seed=seed, include_nul=include_nul):
        place = rng.choice(gen.PLACES)
        roll = rng.random()
        if roll < 0.5:
            e = EMPTY
        elif roll < 0.8:
            e = eval_phrase(gen.random_phrase(rng, 2, include_nul=include_nul), place)
        else:
            e = SigE(eval_top(top), rng.choice(gen.PLACES))
        yield top.body, place, e


# ── Leaf and same-place cases ────────────────────────────────────────────


def test_leaves_are_unchanged():
    evidence = eval_phrase(Meas("a", "b", "c"), "p")
    for leaf in (Meas("m", "q", "t"), Copy(), Sign(), Hash(), Nul()):
        assert epp(leaf, "p", evidence) == leaf


def test_same_place_hop_recurses_without_signatures():
    body = Seq(Meas("m", "q", "t"), At("q", Meas("m2", "q", "t2")))
    out = epp(At("p", body), "p", EMPTY)
    assert out == At("p", epp(body, "p", EMPTY))


# ── The worked example ───────────────────────────────────────────────────


def test_transform_of_example_one(ex1, ex3):
    # Both inner measurements get their signatures, and the final reply
    # back to the appraiser gets a kernel-space signature as well.
    out = epp_top(ex1)
    assert print_top(out) == EX1_PROTECTED_TEXT
    assert out.body == At("ks", Seq(ex3.body.body, Sign()))


def test_transform_of_example_three_adds_the_final_signature(ex1, ex3):
    assert epp_top(ex3) == epp_top(ex1)


def test_transform_output_is_fixed(ex1):
    out = epp_top(ex1)
    assert epp_top(out) == out
    _, diff = epp_top_with_diff(out)
    assert diff.inserted_signs == ()


def test_transform_diff_on_example_one(ex1):
    out, diff = epp_top_with_diff(ex1)
    sides = sorted(record.side.value for record in diff.inserted_signs)
    assert sides == ["before_at", "inside_at_end", "inside_at_end"]
    assert erase_insertions(out.body, diff) == ex1.body


def test_nul_escapes_the_protection_transform():
    # {} throws the measurement away, so no signature is inserted and the
    # stale tamper set still crosses unprotected; the transform's guarantee
    # covers phrases whose evidence flows through every event.
    top = parse_top("*q: m t s -> {} -> @r [_]")
    assert epp_top(top) == top
    assert not is_protected_graph(graph_of(epp_top(top)))


# ── General properties ───────────────────────────────────────────────────


def test_transform_is_idempotent():
    for body, place, e in _random_cases(250, seed=50):
        once = epp(body, place, e)
        assert epp(once, place, e) == once


def test_transform_confines_cross_place_evidence():
    for body, place, e in _random_cases(200, seed=51, include_nul=False):
        out = epp(body, place, e)
        d = graph_of_phrase(out, place, (), e)
        for event in d.events:
            if is_cross_place(event):
                allowed = PlaceSet.of(sending_place(event))
                assert tamper_places(evidence_of(event)).subset_of(allowed)


def test_transform_output_graphs_are_protected():
    for top in gen.tops(150, seed=52, include_nul=False):
        assert is_protected_graph(graph_of(epp_top(top)))


def test_erasing_the_diff_recovers_the_input():
    for body, place, e in _random_cases(250, seed=53):
        out, diff = epp_with_diff(body, place, e)
        assert erase_insertions(out, diff) == body
        for record in diff.inserted_signs:
            assert record.side in (InsertionSide.BEFORE_AT, InsertionSide.INSIDE_AT_END)


def test_evidence_preservation_on_random_phrases():
    for top in gen.tops(150, seed=54):
        assert check_evidence_preservation(top, epp_top(top))


def test_evidence_preservation_identity_case(ex1):
    fixed = epp_top(ex1)
    assert check_evidence_preservation(fixed, fixed)


def test_evidence_preservation_rejects_other_phrases(ex1):
    # Dropping the inner measurement leaves nothing to inject into.
    mutilated = TopPhrase("app", At("ks", Meas("vcm", "us", "vc")))
    assert not check_evidence_preservation(ex1, mutilated)
    assert not check_evidence_preservation(ex1, ex1)


def test_erase_rejects_paths_that_are_not_signatures(ex1):
    diff = EppDiff((SignInsertion((1,), InsertionSide.BEFORE_AT),))
    with pytest.raises(ValueError):
        erase_insertions(ex1.body, diff)


# ── The four hop cases ───────────────────────────────────────────────────


def test_hop_with_clean_request_and_clean_reply():
    # Evidence empty, body signs at the remote place: nothing to add.
    body = Seq(Meas("m", "q", "t"), Sign())
    out = epp(At("q", body), "p", EMPTY)
    assert out == At("q", body)


def test_hop_with_clean_request_and_exposed_reply():
    out = epp(At("q", Meas("m", "q", "t")), "p", EMPTY)
    assert out == At("q", Seq(Meas("m", "q", "t"), Sign()))


def test_hop_with_exposed_request_and_clean_reply():
    incoming = eval_phrase(Meas("a", "b", "c"), "p")
    body = Seq(Copy(), Sign())
    out = epp(At("q", body), "p", incoming)
    assert out == Seq(Sign(), At("q", body))


def test_hop_with_exposed_request_and_exposed_reply():
    incoming = eval_phrase(Meas("a", "b", "c"), "p")
    out = epp(At("q", Copy()), "p", incoming)
    assert out == Seq(Sign(), At("q", Seq(Copy(), Sign())))


def test_hop_cases_match_parsed_forms():
    incoming = eval_phrase(Meas("a", "b", "c"), "p")
    out = epp(At("q", Copy()), "p", incoming)
    assert out == parse_phrase("! -> @q [_ -> !]")

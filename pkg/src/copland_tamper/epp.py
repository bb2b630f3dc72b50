"""Signature insertion that makes a phrase's data-flow graph protected.

The transform walks a phrase tracking the evidence each subphrase will
receive.  At every hop to another place it asks two questions: could
anyone besides the requesting place still tamper with the evidence about
to be sent, and could anyone besides the remote place still tamper with
the evidence about to be sent back?  A "yes" inserts a signature just
before the offending communication: in front of the hop for the request,
at the end of the remote body for the reply.  Everything else is left
untouched, which makes the transform idempotent: running it on its own
output changes nothing, because the inserted signatures already confine
tampering at every hop.

The returned phrase differs from the input only by signature nodes chained
in with the arrow operator, so the original events and data flows all
survive; :func:`check_evidence_preservation` verifies exactly that.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .dataflow import Event, Msp, Sig, graph_of, kind_args, kind_name
from .evidence import EMPTY, Evidence, PlaceSet, SigE, eval_phrase, split_filter
from .evidence import tamper_places
from .syntax import At, Branch, Copy, Hash, Meas, Nul, Phrase, Seq, Sign, TopPhrase

__all__ = [
    "InsertionSide",
    "SignInsertion",
    "EppDiff",
    "epp",
    "epp_top",
    "epp_with_diff",
    "epp_top_with_diff",
    "erase_insertions",
    "check_evidence_preservation",
]


class InsertionSide(Enum):
    """Where an inserted signature sits relative to its ``@`` phrase."""

    BEFORE_AT = "before_at"
    INSIDE_AT_END = "inside_at_end"


@dataclass(frozen=True)
class SignInsertion:
    """One inserted signature: its node path in the output tree and its side.

    Path components select children, root first: 1/2 for sequence and
    branch operands, 1 for an ``@`` body.
    """

    path: tuple[int, ...]
    side: InsertionSide


@dataclass(frozen=True)
class EppDiff:
    """Record of every signature the transform added."""

    inserted_signs: tuple[SignInsertion, ...]


_Records = list[SignInsertion]


def _prefixed(prefix: tuple[int, ...], records: _Records) -> _Records:
    return [SignInsertion(prefix + r.path, r.side) for r in records]


def _for_place(places: PlaceSet, place: str) -> bool:
    return places.subset_of(PlaceSet.of(place))


def _transform(t: Phrase, place: str, e: Evidence) -> tuple[Phrase, _Records]:
    """Transform ``t``; insertion paths are relative to the returned root."""
    match t:
        case Meas() | Copy() | Sign() | Hash() | Nul():
            return t, []
        case Seq(left, right):
            new_left, left_records = _transform(left, place, e)
            threaded = eval_phrase(new_left, place, (), e)
            new_right, right_records = _transform(right, place, threaded)
            records = _prefixed((1,), left_records) + _prefixed((2,), right_records)
            return Seq(new_left, new_right), records
        case Branch(kind, left_spec, right_spec, left, right):
            new_left, left_records = _transform(left, place, split_filter(left_spec, e))
            new_right, right_records = _transform(right, place, split_filter(right_spec, e))
            records = _prefixed((1,), left_records) + _prefixed((2,), right_records)
            return Branch(kind, left_spec, right_spec, new_left, new_right), records
        case At(other, body) if other == place:
            new_body, records = _transform(body, place, e)
            return At(place, new_body), _prefixed((1,), records)
        case At(other, body):
            if _for_place(tamper_places(e), place):
                # The outgoing request is already confined to this place.
                new_body, records = _transform(body, other, e)
                reply_evidence = eval_phrase(new_body, other, (), e)
                if _for_place(tamper_places(reply_evidence), other):
                    return At(other, new_body), _prefixed((1,), records)
                records = _prefixed((1, 1), records)
                records.append(SignInsertion((1, 2), InsertionSide.INSIDE_AT_END))
                return At(other, Seq(new_body, Sign())), records
            # Sign before hopping; the body now receives signed evidence.
            signed = SigE(e, place)
            new_body, records = _transform(body, other, signed)
            reply_evidence = eval_phrase(new_body, other, (), signed)
            if _for_place(tamper_places(reply_evidence), other):
                records = _prefixed((2, 1), records)
                records.insert(0, SignInsertion((1,), InsertionSide.BEFORE_AT))
                return Seq(Sign(), At(other, new_body)), records
            records = _prefixed((2, 1, 1), records)
            records.insert(0, SignInsertion((1,), InsertionSide.BEFORE_AT))
            records.append(SignInsertion((2, 1, 2), InsertionSide.INSIDE_AT_END))
            return Seq(Sign(), At(other, Seq(new_body, Sign()))), records
    raise TypeError(f"not a phrase: {t!r}")


def epp_with_diff(t: Phrase, place: str, e: Evidence = EMPTY) -> tuple[Phrase, EppDiff]:
    """Transform a phrase and report the signatures inserted."""
    out, records = _transform(t, place, e)
    return out, EppDiff(tuple(records))


def epp(t: Phrase, place: str, e: Evidence = EMPTY) -> Phrase:
    """Insert the signatures needed to confine tampering at every place hop."""
    out, _ = _transform(t, place, e)
    return out


def epp_top_with_diff(t: TopPhrase) -> tuple[TopPhrase, EppDiff]:
    out, diff = epp_with_diff(t.body, t.place, EMPTY)
    return TopPhrase(t.place, out), diff


def epp_top(t: TopPhrase) -> TopPhrase:
    """Transform a whole attestation, starting from empty evidence."""
    return TopPhrase(t.place, epp(t.body, t.place, EMPTY))


# ── Undoing and checking the transform ───────────────────────────────────


def _child(t: Phrase, step: int) -> Phrase:
    match t:
        case Seq(left, right) | Branch(_, _, _, left, right):
            return left if step == 1 else right
        case At(_, body) if step == 1:
            return body
    raise ValueError(f"no child {step} at {t!r}")


def _replace_child(t: Phrase, step: int, new: Phrase) -> Phrase:
    match t:
        case Seq(left, right):
            return Seq(new, right) if step == 1 else Seq(left, new)
        case Branch(kind, left_spec, right_spec, left, right):
            if step == 1:
                return Branch(kind, left_spec, right_spec, new, right)
            return Branch(kind, left_spec, right_spec, left, new)
        case At(place, _) if step == 1:
            return At(place, new)
    raise ValueError(f"no child {step} at {t!r}")


def _replace_at(t: Phrase, path: tuple[int, ...], new: Phrase) -> Phrase:
    if not path:
        return new
    return _replace_child(t, path[0], _replace_at(_child(t, path[0]), path[1:], new))


def _node_at(t: Phrase, path: tuple[int, ...]) -> Phrase:
    for step in path:
        t = _child(t, step)
    return t


def erase_insertions(t: Phrase, diff: EppDiff) -> Phrase:
    """Remove recorded signatures, recovering the pre-transform phrase.

    Each record points at a signature that is one operand of a sequence
    node; erasing replaces that sequence by its other operand.  Deeper
    insertions are erased first so shallower paths stay valid.
    """
    ordered = sorted(diff.inserted_signs, key=lambda r: len(r.path), reverse=True)
    for record in ordered:
        if not record.path:
            raise ValueError("an inserted signature cannot be the root")
        if not isinstance(_node_at(t, record.path), Sign):
            raise ValueError(f"no inserted signature at {record.path}")
        parent_path = record.path[:-1]
        parent = _node_at(t, parent_path)
        if not isinstance(parent, Seq):
            raise ValueError(f"inserted signature at {record.path} is not chained by an arrow")
        keep = parent.right if record.path[-1] == 1 else parent.left
        t = _replace_at(t, parent_path, keep)
    return t


def _event_shape(event: Event) -> tuple:
    """Label identity ignoring evidence and measurement positions."""
    kind = event.label.kind
    args = kind_args(kind)
    if isinstance(kind, Msp):
        args = args[:3]
    return (event.label.place, kind_name(kind), tuple(map(str, args)))


def _reachability(d) -> list[set[int]]:
    n = len(d.events)
    order: list[int] = []
    indegree = {v: len(d.predecessors(v)) for v in range(n)}
    ready = [v for v in range(n) if indegree[v] == 0]
    while ready:
        v = ready.pop()
        order.append(v)
        for w in d.successors(v):
            indegree[w] -= 1
            if indegree[w] == 0:
                ready.append(w)
    reach: list[set[int]] = [set() for _ in range(n)]
    for v in reversed(order):
        for w in d.successors(v):
            reach[v].add(w)
            reach[v] |= reach[w]
    return reach


def _events_embed(original, transformed) -> bool:
    """Order-preserving injection of events matching place and action.

    Signature events added by the transform are the only events allowed to
    be skipped, and reachability between matched events must agree with the
    original.
    """
    mapping: list[int] = []
    cursor = 0
    for event in original.events:
        shape = _event_shape(event)
        while cursor < len(transformed.events):
            candidate = transformed.events[cursor]
            if _event_shape(candidate) == shape:
                mapping.append(candidate.id)
                cursor += 1
                break
            if isinstance(candidate.label.kind, Sig):
                cursor += 1
                continue
            return False
        else:
            return False
    reach_original = _reachability(original)
    reach_transformed = _reachability(transformed)
    n = len(original.events)
    for i in range(n):
        for j in range(n):
            if (j in reach_original[i]) != (mapping[j] in reach_transformed[mapping[i]]):
                return False
    return True


def check_evidence_preservation(original: TopPhrase, transformed: TopPhrase) -> bool:
    """Whether ``transformed`` is the transform of ``original`` and only adds signatures.

    Erasing the recorded insertions must recover the original phrase, and
    the original's events must embed into the transformed graph, in order,
    with only signature events skipped and reachability unchanged.
    """
    replayed, diff = epp_top_with_diff(original)
    if replayed != transformed:
        return False
    if original.place != transformed.place:
        return False
    if erase_insertions(transformed.body, diff) != original.body:
        return False
    return _events_embed(graph_of(original), graph_of(transformed))

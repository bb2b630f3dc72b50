"""Symbolic evidence terms and the evidence semantics of phrases.

Evidence is a purely symbolic record of how measurement values were
produced, bundled, signed, and hashed while a phrase executed.  No
cryptography is involved; a signature node merely remembers which place
signed.  :func:`eval_phrase` computes the evidence a phrase produces, and
:func:`tamper_places` computes the set of places that could still alter
some measurement value buried inside an evidence term without the change
being detectable downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .syntax import At, Branch, BranchKind, Copy, Hash, Meas, Nul, Phrase
from .syntax import Position, Seq, Sign, SplitSpec, TopPhrase

__all__ = [
    "Empty",
    "MeasE",
    "SigE",
    "HashE",
    "SeqE",
    "ParE",
    "Evidence",
    "EMPTY",
    "PlaceSet",
    "split_filter",
    "eval_phrase",
    "eval_top",
    "tamper_places",
    "evidence_text",
    "evidence_to_json",
]


@dataclass(frozen=True)
class Empty:
    """The empty evidence term."""


@dataclass(frozen=True)
class MeasE:
    """Measurement evidence with its provenance metadata.

    ``pos`` is the syntactic position of the measurement within the phrase
    that produced it, which keeps otherwise identical measurements apart.
    ``input`` is the evidence the measurement received.
    """

    probe: str
    target_place: str
    target: str
    at_place: str
    pos: Position
    input: Evidence


@dataclass(frozen=True)
class SigE:
    """``body`` signed at ``place``."""

    body: Evidence
    place: str


@dataclass(frozen=True)
class HashE:
    """``body`` hashed at ``place``."""

    body: Evidence
    place: str


@dataclass(frozen=True)
class SeqE:
    """Two evidence terms collected one after the other."""

    left: Evidence
    right: Evidence


@dataclass(frozen=True)
class ParE:
    """Two evidence terms collected concurrently."""

    left: Evidence
    right: Evidence


Evidence = Empty | MeasE | SigE | HashE | SeqE | ParE

EMPTY = Empty()


@dataclass(frozen=True)
class PlaceSet:
    """Either the set of all places or an explicit finite set.

    The set of all places is kept symbolic (places are an open-ended
    universe), so it acts as an absorbing element for union and an identity
    for intersection.
    """

    is_all: bool = False
    places: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.is_all and self.places:
            object.__setattr__(self, "places", frozenset())

    @staticmethod
    def every() -> PlaceSet:
        return PlaceSet(is_all=True)

    @staticmethod
    def none() -> PlaceSet:
        return PlaceSet()

    @staticmethod
    def of(*places: str) -> PlaceSet:
        return PlaceSet(places=frozenset(places))

    def __contains__(self, place: str) -> bool:
        return self.is_all or place in self.places

    def is_empty(self) -> bool:
        return not self.is_all and not self.places

    def union(self, other: PlaceSet) -> PlaceSet:
        if self.is_all or other.is_all:
            return PlaceSet.every()
        return PlaceSet(places=self.places | other.places)

    def intersect(self, other: PlaceSet) -> PlaceSet:
        if self.is_all:
            return other
        if other.is_all:
            return self
        return PlaceSet(places=self.places & other.places)

    def subset_of(self, other: PlaceSet) -> bool:
        if other.is_all:
            return True
        if self.is_all:
            return False
        return self.places <= other.places


def split_filter(spec: SplitSpec, e: Evidence) -> Evidence:
    """Evidence actually sent down a branch side: all of it or none of it."""
    return e if spec is SplitSpec.PLUS else EMPTY


def eval_phrase(t: Phrase, place: str, pos: Position = (), e: Evidence = EMPTY) -> Evidence:
    """Evidence produced by running ``t`` at ``place`` on input ``e``.

    ``pos`` locates ``t`` within the enclosing phrase and is threaded into
    measurement evidence so distinct occurrences stay distinguishable.
    """
    match t:
        case Meas(probe, target_place, target):
            return MeasE(probe, target_place, target, place, pos, e)
        case Nul():
            return EMPTY
        case Copy():
            return e
        case Sign():
            return SigE(e, place)
        case Hash():
            return HashE(e, place)
        case At(other, body):
            return eval_phrase(body, other, (1,) + pos, e)
        case Seq(left, right):
            left_out = eval_phrase(left, place, (1,) + pos, e)
            return eval_phrase(right, place, (2,) + pos, left_out)
        case Branch(kind, left_spec, right_spec, left, right):
            left_out = eval_phrase(left, place, (1,) + pos, split_filter(left_spec, e))
            right_out = eval_phrase(right, place, (2,) + pos, split_filter(right_spec, e))
            if kind is BranchKind.SEQ:
                return SeqE(left_out, right_out)
            return ParE(left_out, right_out)
    raise TypeError(f"not a phrase: {t!r}")


def eval_top(t: TopPhrase) -> Evidence:
    """Evidence produced by a whole attestation, starting from empty input."""
    return eval_phrase(t.body, t.place, (), EMPTY)


def tamper_places(e: Evidence) -> PlaceSet:
    """Places able to undetectably alter a measurement value inside ``e``.

    An unsigned measurement is alterable anywhere, since its raw value
    carries no protection.  A signature restricts tampering to the signing
    place: anyone else would invalidate the signature, while components at
    the signing place can always obtain a fresh one.  Hashing and bundling
    change nothing.
    """
    match e:
        case Empty():
            return PlaceSet.none()
        case MeasE():
            return PlaceSet.every()
        case HashE(body, _):
            return tamper_places(body)
        case SigE(body, place):
            return PlaceSet.of(place).intersect(tamper_places(body))
        case SeqE(left, right) | ParE(left, right):
            return tamper_places(left).union(tamper_places(right))
    raise TypeError(f"not evidence: {e!r}")


def _pos_text(pos: Iterable[int]) -> str:
    return "[" + ",".join(str(i) for i in pos) + "]"


def evidence_text(e: Evidence) -> str:
    """Compact, unambiguous one-line rendering of an evidence term."""
    match e:
        case Empty():
            return "xi"
        case MeasE(probe, target_place, target, at_place, pos, inner):
            ms = f"ms({probe},{target_place},{target})"
            return f"m({ms},{at_place},{_pos_text(pos)},{evidence_text(inner)})"
        case SigE(body, place):
            return f"sig({evidence_text(body)},{place})"
        case HashE(body, place):
            return f"hsh({evidence_text(body)},{place})"
        case SeqE(left, right):
            return f"seq({evidence_text(left)},{evidence_text(right)})"
        case ParE(left, right):
            return f"par({evidence_text(left)},{evidence_text(right)})"
    raise TypeError(f"not evidence: {e!r}")


def evidence_to_json(e: Evidence) -> dict:
    """Canonical JSON form: a tag plus child fields."""
    match e:
        case Empty():
            return {"tag": "empty"}
        case MeasE(probe, target_place, target, at_place, pos, inner):
            return {
                "tag": "meas",
                "probe": probe,
                "targetPlace": target_place,
                "target": target,
                "atPlace": at_place,
                "pos": list(pos),
                "input": evidence_to_json(inner),
            }
        case SigE(body, place):
            return {"tag": "sig", "place": place, "body": evidence_to_json(body)}
        case HashE(body, place):
            return {"tag": "hash", "place": place, "body": evidence_to_json(body)}
        case SeqE(left, right):
            return {"tag": "seq", "left": evidence_to_json(left), "right": evidence_to_json(right)}
        case ParE(left, right):
            return {"tag": "par", "left": evidence_to_json(left), "right": evidence_to_json(right)}
    raise TypeError(f"not evidence: {e!r}")

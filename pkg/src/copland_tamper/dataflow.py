"""Data-flow graphs describing how evidence moves during an attestation.

A graph is a finite set of labeled events with a distinguished input event,
a distinguished output event, and acyclic flow edges; there is never an
edge into the input or out of the output.  Each label records the place an
event occurs at, what kind of action it is (measure, copy, sign, hash,
null, request, reply, split, join), and the evidence the event emits.

Graphs are built by structural recursion over a phrase.  Subgraphs are
stitched together either by :func:`before_copy`, which adds a flow edge
from the first graph's output to the second graph's input, or by
:func:`before_nil`, which places the graphs side by side without the
linking edge.  Event ids are assigned densely in construction order, so a
phrase always maps to the same graph with the same ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import syntax
from .evidence import EMPTY, Evidence, HashE, MeasE, SigE, eval_phrase, evidence_text
from .evidence import split_filter
from .syntax import BranchKind, Phrase, Position, SplitSpec, TopPhrase

__all__ = [
    "Msp",
    "Cpy",
    "Sig",
    "Hsh",
    "NulE",
    "Req",
    "Rpy",
    "Split",
    "Join",
    "LabelKind",
    "Label",
    "Event",
    "DataFlowGraph",
    "single",
    "before_copy",
    "before_nil",
    "graph_of",
    "graph_of_phrase",
    "sending_place",
    "receiving_place",
    "is_cross_place",
    "evidence_of",
    "kind_name",
    "kind_args",
    "label_text",
]


@dataclass(frozen=True)
class Msp:
    """A measurement event: probe, measured place, target, and position."""

    probe: str
    target_place: str
    target: str
    pos: Position


@dataclass(frozen=True)
class Cpy:
    pass


@dataclass(frozen=True)
class Sig:
    pass


@dataclass(frozen=True)
class Hsh:
    pass


@dataclass(frozen=True)
class NulE:
    pass


@dataclass(frozen=True)
class Req:
    """Request sending evidence to another place."""

    to: str


@dataclass(frozen=True)
class Rpy:
    """Reply returning evidence to the requesting place."""

    to: str


@dataclass(frozen=True)
class Split:
    """Fan-out of evidence into the two sides of a branch."""

    left: SplitSpec
    right: SplitSpec


@dataclass(frozen=True)
class Join:
    """Fan-in combining the two sides of a branch."""

    kind: BranchKind


LabelKind = Msp | Cpy | Sig | Hsh | NulE | Req | Rpy | Split | Join


@dataclass(frozen=True)
class Label:
    """Where an event happens, what it does, and the evidence it emits."""

    place: str
    kind: LabelKind
    evidence: Evidence


@dataclass(frozen=True)
class Event:
    id: int
    label: Label


@dataclass(frozen=True)
class DataFlowGraph:
    events: tuple[Event, ...]
    input: int
    output: int
    edges: frozenset[tuple[int, int]]

    @cached_property
    def _successors(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {e.id: [] for e in self.events}
        for src, dst in self.edges:
            out[src].append(dst)
        return {v: tuple(sorted(ws)) for v, ws in out.items()}

    @cached_property
    def _predecessors(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {e.id: [] for e in self.events}
        for src, dst in self.edges:
            out[dst].append(src)
        return {v: tuple(sorted(ws)) for v, ws in out.items()}

    def event(self, event_id: int) -> Event:
        if not 0 <= event_id < len(self.events):
            raise ValueError(f"unknown event id {event_id}")
        return self.events[event_id]

    def successors(self, event_id: int) -> tuple[int, ...]:
        self.event(event_id)
        return self._successors[event_id]

    def predecessors(self, event_id: int) -> tuple[int, ...]:
        self.event(event_id)
        return self._predecessors[event_id]

    def validate(self) -> None:
        """Raise ValueError unless the graph satisfies its invariants."""
        ids = [e.id for e in self.events]
        if ids != list(range(len(self.events))):
            raise ValueError("event ids must be dense and in order")
        for src, dst in self.edges:
            if not (0 <= src < len(ids) and 0 <= dst < len(ids)):
                raise ValueError(f"edge ({src}, {dst}) has an unknown endpoint")
        if self.input not in ids or self.output not in ids:
            raise ValueError("input/output must be event ids")
        if self._predecessors[self.input]:
            raise ValueError("the input event must have no incoming edges")
        if self._successors[self.output]:
            raise ValueError("the output event must have no outgoing edges")
        # Kahn's algorithm: all events drain iff the edge relation is acyclic.
        indegree = {v: len(self._predecessors[v]) for v in ids}
        ready = [v for v in ids if indegree[v] == 0]
        drained = 0
        while ready:
            v = ready.pop()
            drained += 1
            for w in self._successors[v]:
                indegree[w] -= 1
                if indegree[w] == 0:
                    ready.append(w)
        if drained != len(ids):
            raise ValueError("flow edges must be acyclic")

    def to_dot(self, show_evidence: bool = False) -> str:
        """Render as a Graphviz digraph.

        The input event is drawn with a double border and the output event
        in bold.
        """
        lines = ["digraph copland {", "  rankdir=LR;"]
        for event in self.events:
            text = f"{event.id}: {label_text(event.label)}"
            if show_evidence:
                text += f" = {evidence_text(event.label.evidence)}"
            attrs = [f'label="{text}"']
            if event.id == self.input:
                attrs.append("peripheries=2")
            if event.id == self.output:
                attrs.append("style=bold")
            lines.append(f"  {event.id} [{', '.join(attrs)}];")
        for src, dst in sorted(self.edges):
            lines.append(f"  {src} -> {dst};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# ── Projections ──────────────────────────────────────────────────────────


def sending_place(event: Event) -> str:
    """The place an event occurs at."""
    return event.label.place


def receiving_place(event: Event) -> str:
    """The place that receives the event's evidence.

    Only requests and replies transmit between places; every other event
    receives at the place it occurs.
    """
    kind = event.label.kind
    if isinstance(kind, (Req, Rpy)):
        return kind.to
    return event.label.place


def is_cross_place(event: Event) -> bool:
    """True when the event moves evidence from one place to a different one."""
    return sending_place(event) != receiving_place(event)


def evidence_of(event: Event) -> Evidence:
    """The evidence emitted by an event."""
    return event.label.evidence


# ── Construction ─────────────────────────────────────────────────────────


def single(label: Label) -> DataFlowGraph:
    """A one-event graph; the event is both input and output."""
    return DataFlowGraph((Event(0, label),), 0, 0, frozenset())


def _shift(d: DataFlowGraph, offset: int) -> DataFlowGraph:
    events = tuple(Event(e.id + offset, e.label) for e in d.events)
    edges = frozenset((src + offset, dst + offset) for src, dst in d.edges)
    return DataFlowGraph(events, d.input + offset, d.output + offset, edges)


def _combine(d1: DataFlowGraph, d2: DataFlowGraph, link: bool) -> DataFlowGraph:
    d2 = _shift(d2, len(d1.events))
    edges = d1.edges | d2.edges
    if link:
        edges |= {(d1.output, d2.input)}
    return DataFlowGraph(d1.events + d2.events, d1.input, d2.output, edges)


def before_copy(d1: DataFlowGraph, d2: DataFlowGraph) -> DataFlowGraph:
    """Run ``d2`` after ``d1``, flowing ``d1``'s output into ``d2``'s input.

    ``d2`` is re-indexed so the two id spaces stay disjoint.
    """
    return _combine(d1, d2, link=True)


def before_nil(d1: DataFlowGraph, d2: DataFlowGraph) -> DataFlowGraph:
    """Place ``d2`` after ``d1`` without a connecting flow edge."""
    return _combine(d1, d2, link=False)


def graph_of_phrase(t: Phrase, place: str, pos: Position = (), e: Evidence = EMPTY) -> DataFlowGraph:
    """Build the data-flow graph of ``t`` run at ``place`` on input ``e``."""
    match t:
        case syntax.Meas(probe, target_place, target):
            out = MeasE(probe, target_place, target, place, pos, e)
            return single(Label(place, Msp(probe, target_place, target, pos), out))
        case syntax.Nul():
            return single(Label(place, NulE(), EMPTY))
        case syntax.Copy():
            return single(Label(place, Cpy(), e))
        case syntax.Sign():
            return single(Label(place, Sig(), SigE(e, place)))
        case syntax.Hash():
            return single(Label(place, Hsh(), HashE(e, place)))
        case syntax.At(other, body):
            request = single(Label(place, Req(other), e))
            inner = graph_of_phrase(body, other, (1,) + pos, e)
            reply = single(Label(other, Rpy(place), eval_phrase(body, other, (1,) + pos, e)))
            return before_copy(before_copy(request, inner), reply)
        case syntax.Seq(left, right):
            first = graph_of_phrase(left, place, (1,) + pos, e)
            left_out = eval_phrase(left, place, (1,) + pos, e)
            second = graph_of_phrase(right, place, (2,) + pos, left_out)
            return before_copy(first, second)
        case syntax.Branch(kind, left_spec, right_spec, left, right):
            return _branch_graph(t, kind, left_spec, right_spec, left, right, place, pos, e)
    raise TypeError(f"not a phrase: {t!r}")


def _branch_graph(
    t: Phrase,
    kind: BranchKind,
    left_spec: SplitSpec,
    right_spec: SplitSpec,
    left: Phrase,
    right: Phrase,
    place: str,
    pos: Position,
    e: Evidence,
) -> DataFlowGraph:
    # The split event is shared by both sides, so the two subgraphs are
    # placed manually instead of via before_copy/before_nil.
    split_event = Event(0, Label(place, Split(left_spec, right_spec), e))
    g1 = _shift(graph_of_phrase(left, place, (1,) + pos, split_filter(left_spec, e)), 1)
    g2 = _shift(
        graph_of_phrase(right, place, (2,) + pos, split_filter(right_spec, e)),
        1 + len(g1.events),
    )
    join_id = 1 + len(g1.events) + len(g2.events)
    join_event = Event(join_id, Label(place, Join(kind), eval_phrase(t, place, pos, e)))
    edges = set(g1.edges | g2.edges)
    if left_spec is SplitSpec.PLUS:
        edges.add((0, g1.input))
    if right_spec is SplitSpec.PLUS:
        edges.add((0, g2.input))
    edges.add((g1.output, join_id))
    edges.add((g2.output, join_id))
    events = (split_event,) + g1.events + g2.events + (join_event,)
    return DataFlowGraph(events, 0, join_id, frozenset(edges))


def graph_of(t: TopPhrase) -> DataFlowGraph:
    """Data-flow graph of a whole attestation, starting from empty evidence."""
    return graph_of_phrase(t.body, t.place, (), EMPTY)


# ── Rendering helpers ────────────────────────────────────────────────────


def kind_name(kind: LabelKind) -> str:
    return {
        Msp: "msp",
        Cpy: "cpy",
        Sig: "sig",
        Hsh: "hsh",
        NulE: "nul",
        Req: "req",
        Rpy: "rpy",
        Split: "split",
        Join: "join",
    }[type(kind)]


def kind_args(kind: LabelKind) -> list:
    """Action-specific label arguments, excluding place and evidence."""
    match kind:
        case Msp(probe, target_place, target, pos):
            return [probe, target_place, target, list(pos)]
        case Req(to) | Rpy(to):
            return [to]
        case Split(left, right):
            return [left.value, right.value]
        case Join(branch_kind):
            return [branch_kind.value]
        case _:
            return []


def label_text(label: Label) -> str:
    """Short ``place:kind(args)`` rendering used in DOT and text output."""
    args = kind_args(label.kind)
    if not args:
        return f"{label.place}:{kind_name(label.kind)}"
    rendered = ",".join("[" + ",".join(map(str, a)) + "]" if isinstance(a, list) else a for a in args)
    return f"{label.place}:{kind_name(label.kind)}({rendered})"

"""Tampering analysis over data-flow graphs.

A runtime adversary who controls a component can alter measurement
evidence that reaches it, provided no signature from another place pins
the evidence down.  This module enumerates data-flow paths, decides which
paths permit tampering, computes every event at which given measurement
evidence could be undetectably altered (its tamper opportunities), finds
the minimal sets of such events that would corrupt every copy reaching the
final output (minimal tamper strategies), and classifies graphs whose
tampering is confined to single-place paths as protected.

The core bookkeeping is the tamper set of a path: the set of places still
able to alter the measurement made at the path's first event once the
evidence has traveled the whole path.  It starts as all places (an
unsigned measurement is alterable anywhere), every signature intersects it
with the signing place, and nothing ever re-enlarges it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataflow import DataFlowGraph, Event, Msp, Sig, evidence_of, is_cross_place
from .dataflow import receiving_place, sending_place
from .evidence import PlaceSet, tamper_places

__all__ = [
    "Path",
    "TamperReport",
    "paths_between",
    "paths_from",
    "tamper_set",
    "permits_tampering",
    "tamper_opportunities",
    "tamper_opportunities_fast",
    "tamper_opportunity_witnesses",
    "is_tamper_strategy",
    "minimal_tamper_strategies",
    "minimal_tamper_strategies_fast",
    "is_local_path",
    "is_protected_graph",
    "find_unprotected_path",
    "protected_sufficient",
    "analyze_tampering",
]

# A path is a nonempty sequence of event ids connected by flow edges.
Path = tuple[int, ...]


def paths_between(d: DataFlowGraph, start: int, end: int) -> list[Path]:
    """All paths from ``start`` to ``end``, in lexicographic id order.

    The graph is acyclic, so the set is finite and no path revisits an
    event; a single-event path connects an event to itself.
    """
    d.event(start)
    d.event(end)
    found: list[Path] = []

    def walk(path: Path) -> None:
        last = path[-1]
        if last == end:
            found.append(path)
            return
        for nxt in d.successors(last):
            walk(path + (nxt,))

    walk((start,))
    return found


def paths_from(d: DataFlowGraph, start: int) -> list[Path]:
    """Every path starting at ``start``, including the single-event path."""
    d.event(start)
    found: list[Path] = []

    def walk(path: Path) -> None:
        found.append(path)
        for nxt in d.successors(path[-1]):
            walk(path + (nxt,))

    walk((start,))
    return found


def _initial_tamper_set(first: Event) -> PlaceSet:
    if isinstance(first.label.kind, Msp):
        return PlaceSet.every()
    return PlaceSet.none()


def _extend_tamper_set(ts: PlaceSet, event: Event) -> PlaceSet:
    if isinstance(event.label.kind, Sig):
        return PlaceSet.of(event.label.place).intersect(ts)
    return ts


def tamper_set(d: DataFlowGraph, path: Path) -> PlaceSet:
    """Places still able to alter the path's initial measurement at its end.

    All places for a bare measurement, shrunk by each signature along the
    path; empty whenever the path does not start at a measurement.  The
    result is always all places, a singleton, or empty.
    """
    ts = _initial_tamper_set(d.event(path[0]))
    for event_id in path[1:]:
        ts = _extend_tamper_set(ts, d.event(event_id))
    return ts


def permits_tampering(d: DataFlowGraph, path: Path) -> bool:
    """Whether the path's final event can alter the initial measurement.

    Requires a measurement at the start, at least one further event, and a
    final event whose sending or receiving place can still re-sign
    everything signed so far, i.e. lies in the tamper set of the path up to
    (but not including) the final event.
    """
    if len(path) < 2:
        return False
    if not isinstance(d.event(path[0]).label.kind, Msp):
        return False
    ts = tamper_set(d, path[:-1])
    last = d.event(path[-1])
    return sending_place(last) in ts or receiving_place(last) in ts


def tamper_opportunity_witnesses(d: DataFlowGraph, target: int) -> dict[int, Path]:
    """For each tamper opportunity, the first tamper-permitting path to it.

    The search grows all paths out of ``target`` one event at a time,
    carrying the tamper set along, and keeps the lexicographically first
    permitting path per endpoint.
    """
    start = d.event(target)
    witnesses: dict[int, Path] = {}

    def walk(path: Path, ts: PlaceSet) -> None:
        for nxt in d.successors(path[-1]):
            event = d.event(nxt)
            extended = path + (nxt,)
            if nxt not in witnesses and (sending_place(event) in ts or receiving_place(event) in ts):
                witnesses[nxt] = extended
            walk(extended, _extend_tamper_set(ts, event))

    walk((target,), _initial_tamper_set(start))
    return witnesses


def tamper_opportunities(d: DataFlowGraph, target: int) -> frozenset[int]:
    """Every event at which the measurement made at ``target`` can be altered."""
    return frozenset(tamper_opportunity_witnesses(d, target))


def tamper_opportunities_fast(d: DataFlowGraph, target: int) -> frozenset[int]:
    """Same result as :func:`tamper_opportunities` without enumerating paths.

    Tamper sets take only a handful of values (all places, one place,
    none), so propagating the set of achievable values per event visits
    each (event, value) pair once instead of each path.
    """
    start = d.event(target)
    initial = _initial_tamper_set(start)
    reached: dict[int, set[PlaceSet]] = {target: {initial}}
    frontier: list[tuple[int, PlaceSet]] = [(target, initial)]
    opportunities: set[int] = set()
    while frontier:
        event_id, ts = frontier.pop()
        for nxt in d.successors(event_id):
            event = d.event(nxt)
            if sending_place(event) in ts or receiving_place(event) in ts:
                opportunities.add(nxt)
            extended = _extend_tamper_set(ts, event)
            seen = reached.setdefault(nxt, set())
            if extended not in seen:
                seen.add(extended)
                frontier.append((nxt, extended))
    return frozenset(opportunities)


def _cover_sets(d: DataFlowGraph, target: int) -> list[frozenset[int]]:
    """Per path from ``target`` to the output: the events able to cover it.

    An event covers a path when the path's prefix ending there permits
    tampering.  A set of events is a tamper strategy exactly when it meets
    every cover set.
    """
    covers = []
    for path in paths_between(d, target, d.output):
        ts = _initial_tamper_set(d.event(path[0]))
        good = set()
        for event_id in path[1:]:
            event = d.event(event_id)
            if sending_place(event) in ts or receiving_place(event) in ts:
                good.add(event_id)
            ts = _extend_tamper_set(ts, event)
        covers.append(frozenset(good))
    return covers


def is_tamper_strategy(d: DataFlowGraph, target: int, members) -> bool:
    """Whether tampering at ``members`` corrupts every copy reaching the output.

    Every path from ``target`` to the graph output must pass through some
    member via a tamper-permitting prefix.  Vacuously true when no such
    path exists, since then the measurement never reaches the output.
    """
    chosen = frozenset(members)
    return all(chosen & cover for cover in _cover_sets(d, target))


def minimal_tamper_strategies(d: DataFlowGraph, target: int) -> list[frozenset[int]]:
    """All minimal tamper strategies for the measurement at ``target``.

    Starts from the full set of tamper opportunities (a strategy whenever
    any strategy exists, because supersets of strategies are strategies)
    and repeatedly drops single events, keeping the sets from which nothing
    more can be dropped.  Returns strategies sorted lexicographically; the
    list is empty exactly when no strategy exists.
    """
    covers = _cover_sets(d, target)

    def is_strategy(candidate: frozenset[int]) -> bool:
        return all(candidate & cover for cover in covers)

    full = tamper_opportunities(d, target)
    if not is_strategy(full):
        return []
    minimal: list[frozenset[int]] = []
    seen = {full}
    stack = [full]
    while stack:
        candidate = stack.pop()
        shrunk = False
        for member in sorted(candidate):
            smaller = candidate - {member}
            if is_strategy(smaller):
                shrunk = True
                if smaller not in seen:
                    seen.add(smaller)
                    stack.append(smaller)
        if not shrunk:
            minimal.append(candidate)
    return sorted(minimal, key=sorted)


def minimal_tamper_strategies_fast(d: DataFlowGraph, target: int) -> list[frozenset[int]]:
    """Same result as :func:`minimal_tamper_strategies` without the descent.

    Minimal strategies are exactly the minimal sets meeting every cover
    set, so they can be assembled one cover set at a time: keep candidates
    that already meet the new cover set, branch the rest on its elements,
    and prune anything no longer minimal.  The descent revisits every set
    between the full opportunity set and the minimal ones, which is
    hopeless on long unsigned chains; this stays proportional to the
    answer.
    """
    covers = sorted(set(_cover_sets(d, target)), key=len)
    candidates: set[frozenset[int]] = {frozenset()}
    for cover in covers:
        grown: set[frozenset[int]] = set()
        for candidate in candidates:
            if candidate & cover:
                grown.add(candidate)
            else:
                for member in cover:
                    grown.add(candidate | {member})
        candidates = {h for h in grown if not any(other < h for other in grown)}
    return sorted(candidates, key=sorted)


def is_local_path(d: DataFlowGraph, path: Path, place: str) -> bool:
    """Whether the path never leaves ``place``.

    Interior events must send and receive at ``place``; the endpoints may
    be cross-place communications as long as they touch ``place``.
    """
    for event_id in path[1:-1]:
        event = d.event(event_id)
        if sending_place(event) != place or receiving_place(event) != place:
            return False
    for event_id in {path[0], path[-1]}:
        event = d.event(event_id)
        if sending_place(event) != place and receiving_place(event) != place:
            return False
    return True


def find_unprotected_path(d: DataFlowGraph) -> Path | None:
    """A measurement-rooted path violating the protection condition, if any.

    Protection demands that whenever such a path crosses between places,
    the tamper set accumulated so far is already confined to the sending
    place.  Returns the first violating path in (measurement id, path)
    lexicographic order, or None when the graph is protected.
    """

    def walk(path: Path, ts: PlaceSet) -> Path | None:
        for nxt in d.successors(path[-1]):
            event = d.event(nxt)
            extended_ts = _extend_tamper_set(ts, event)
            extended = path + (nxt,)
            if is_cross_place(event) and not extended_ts.subset_of(PlaceSet.of(sending_place(event))):
                return extended
            violation = walk(extended, extended_ts)
            if violation is not None:
                return violation
        return None

    for event in d.events:
        if isinstance(event.label.kind, Msp):
            violation = walk((event.id,), PlaceSet.every())
            if violation is not None:
                return violation
    return None


def is_protected_graph(d: DataFlowGraph) -> bool:
    """Exact protection check by walking every measurement-rooted path.

    Paths that do not start at a measurement are protected outright (their
    tamper set is empty), so only measurement-rooted paths are examined.
    """
    return find_unprotected_path(d) is None


def protected_sufficient(d: DataFlowGraph) -> bool:
    """Fast sufficient condition for protection, read off event evidence.

    If every cross-place communication event emits evidence whose tamper
    places lie within the sending place, the graph is protected.  The
    converse need not hold, so False means only "not established".
    """
    for event in d.events:
        if is_cross_place(event):
            allowed = PlaceSet.of(sending_place(event))
            if not tamper_places(evidence_of(event)).subset_of(allowed):
                return False
    return True


@dataclass(frozen=True)
class TamperReport:
    """Aggregated tampering analysis for one measurement event."""

    target: int
    opportunities: frozenset[int]
    witness_paths: dict[int, Path]
    minimal_strategies: list[frozenset[int]]


def analyze_tampering(d: DataFlowGraph, target: int) -> TamperReport:
    """Run the opportunity and strategy analyses for one measurement event."""
    witnesses = tamper_opportunity_witnesses(d, target)
    return TamperReport(
        target=target,
        opportunities=frozenset(witnesses),
        witness_paths=witnesses,
        minimal_strategies=minimal_tamper_strategies_fast(d, target),
    )

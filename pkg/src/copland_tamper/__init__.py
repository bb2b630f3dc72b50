"""Copland phrase parsing, evidence semantics, and tampering analysis.

The package parses attestation phrases, gives them evidence and data-flow
graph semantics, enumerates the events at which a runtime adversary could
tamper with measurement evidence, computes minimal tampering strategies,
and rewrites phrases to confine tampering by inserting signatures.
"""

from .dataflow import (
    DataFlowGraph,
    Event,
    Label,
    before_copy,
    before_nil,
    evidence_of,
    graph_of,
    graph_of_phrase,
    is_cross_place,
    receiving_place,
    sending_place,
)
from .epp import (
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
from .evidence import (
    EMPTY,
    Empty,
    Evidence,
    HashE,
    MeasE,
    ParE,
    PlaceSet,
    SeqE,
    SigE,
    eval_phrase,
    eval_top,
    split_filter,
    tamper_places,
)
from .syntax import (
    At,
    Branch,
    BranchKind,
    CoplandSyntaxError,
    Copy,
    Hash,
    LexError,
    Meas,
    Nul,
    ParseError,
    Phrase,
    Position,
    Seq,
    Sign,
    SplitSpec,
    TopPhrase,
    parse_phrase,
    parse_top,
    print_phrase,
    print_top,
)
from .tamper import (
    Path,
    TamperReport,
    analyze_tampering,
    find_unprotected_path,
    is_local_path,
    is_protected_graph,
    is_tamper_strategy,
    minimal_tamper_strategies,
    minimal_tamper_strategies_fast,
    paths_between,
    paths_from,
    permits_tampering,
    protected_sufficient,
    tamper_opportunities,
    tamper_opportunities_fast,
    tamper_opportunity_witnesses,
    tamper_set,
)

__version__ = "0.1.0"

"""Command-line front end: parse, render, analyze, and protect phrases."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from enum import Enum
from typing import TextIO

from .dataflow import DataFlowGraph, evidence_text, graph_of, kind_args, kind_name
from .dataflow import label_text
from .epp import epp_top_with_diff
from .evidence import evidence_to_json
from .syntax import CoplandSyntaxError, parse_top, print_top
from .tamper import find_unprotected_path, minimal_tamper_strategies_fast
from .tamper import tamper_opportunity_witnesses

__all__ = ["Command", "OutputFormat", "AnalysisConfig", "parse_args", "run", "main"]


class Command(Enum):
    PARSE = "parse"
    GRAPH = "graph"
    OPPS = "opps"
    STRATEGIES = "strategies"
    PROTECT = "protect"
    CHECK_PROTECTED = "check-protected"


class OutputFormat(Enum):
    TEXT = "text"
    JSON = "json"
    DOT = "dot"


@dataclass(frozen=True)
class AnalysisConfig:
    input_path: str
    command: Command
    target_event: int | None = None
    output_format: OutputFormat = OutputFormat.TEXT
    show_evidence: bool = False
    witness: bool = False
    diff: bool = False


def parse_args(argv: list[str] | None = None) -> AnalysisConfig:
    """Parse command-line arguments; exits with status 2 on usage errors."""
    parser = argparse.ArgumentParser(
        prog="copland-tamper",
        description="Analyze evidence tampering in Copland attestation phrases.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, formats: tuple[str, ...]) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="phrase file (one top phrase, // comments)")
        p.add_argument("--format", choices=formats, default="text", help="output format")
        return p

    add("parse", "parse a phrase and print its canonical form", ("text", "json"))
    graph = add("graph", "print the data-flow graph", ("text", "json", "dot"))
    graph.add_argument("--show-evidence", action="store_true", help="include evidence terms")
    opps = add("opps", "list tamper opportunities for an event", ("text", "json"))
    opps.add_argument("--event", type=int, required=True, help="target event id")
    opps.add_argument("--witness", action="store_true", help="include one witness path per opportunity")
    strategies = add("strategies", "list minimal tamper strategies for an event", ("text", "json"))
    strategies.add_argument("--event", type=int, required=True, help="target event id")
    protect = add("protect", "insert protective signatures", ("text", "json"))
    protect.add_argument("--diff", action="store_true", help="report inserted signatures")
    add("check-protected", "decide whether the graph is protected", ("text", "json"))

    ns = parser.parse_args(argv)
    return AnalysisConfig(
        input_path=ns.input,
        command=Command(ns.command),
        target_event=getattr(ns, "event", None),
        output_format=OutputFormat(ns.format),
        show_evidence=getattr(ns, "show_evidence", False),
        witness=getattr(ns, "witness", False),
        diff=getattr(ns, "diff", False),
    )


def _use_color(stream: TextIO) -> bool:
    mode = os.environ.get("COPLAND_COLOR", "auto")
    if mode == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _colored(text: str, code: str, enabled: bool) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if enabled else text


def _dump_json(obj: dict, stdout: TextIO) -> None:
    stdout.write(json.dumps(obj, indent=2) + "\n")


def _graph_json(d: DataFlowGraph) -> dict:
    return {
        "events": [
            {
                "id": event.id,
                "place": event.label.place,
                "kind": kind_name(event.label.kind),
                "args": kind_args(event.label.kind),
                "evidence": evidence_to_json(event.label.evidence),
            }
            for event in d.events
        ],
        "edges": [list(edge) for edge in sorted(d.edges)],
        "input": d.input,
        "output": d.output,
    }


def _graph_text(d: DataFlowGraph, show_evidence: bool, stdout: TextIO) -> None:
    stdout.write(f"input:  {d.input}\n")
    stdout.write(f"output: {d.output}\n")
    stdout.write("events:\n")
    for event in d.events:
        line = f"  {event.id:>3}  {label_text(event.label)}"
        if show_evidence:
            line += f" = {evidence_text(event.label.evidence)}"
        stdout.write(line + "\n")
    stdout.write("edges:\n")
    for src, dst in sorted(d.edges):
        stdout.write(f"  {src} -> {dst}\n")


def _path_text(path: tuple[int, ...]) -> str:
    return " -> ".join(str(v) for v in path)


def run(config: AnalysisConfig, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        with open(config.input_path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        stderr.write(f"error: cannot read {config.input_path}: {exc.strerror}\n")
        return 1
    try:
        top = parse_top(text)
    except CoplandSyntaxError as exc:
        stderr.write(f"error: {config.input_path}:{exc}\n")
        return 1
    try:
        return _dispatch(config, top, stdout)
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return 1


def _dispatch(config: AnalysisConfig, top, stdout: TextIO) -> int:
    command = config.command
    as_json = config.output_format is OutputFormat.JSON
    if command is Command.PARSE:
        if as_json:
            _dump_json({"phrase": print_top(top)}, stdout)
        else:
            stdout.write(print_top(top) + "\n")
        return 0
    if command is Command.PROTECT:
        protected, diff = epp_top_with_diff(top)
        inserted = [
            {"path": list(record.path), "side": record.side.value}
            for record in diff.inserted_signs
        ]
        if as_json:
            payload: dict = {"phrase": print_top(protected)}
            if config.diff:
                payload["inserted"] = inserted
            _dump_json(payload, stdout)
        else:
            stdout.write(print_top(protected) + "\n")
            if config.diff:
                _dump_json({"inserted": inserted}, stdout)
        return 0

    d = graph_of(top)
    if command is Command.GRAPH:
        if config.output_format is OutputFormat.DOT:
            stdout.write(d.to_dot(show_evidence=config.show_evidence))
        elif as_json:
            _dump_json(_graph_json(d), stdout)
        else:
            _graph_text(d, config.show_evidence, stdout)
        return 0
    if command is Command.OPPS:
        assert config.target_event is not None
        witnesses = tamper_opportunity_witnesses(d, config.target_event)
        opportunities = sorted(witnesses)
        if as_json:
            payload = {"target": config.target_event, "opportunities": opportunities}
            if config.witness:
                payload["witnesses"] = {
                    str(v): list(path) for v, path in sorted(witnesses.items())
                }
            _dump_json(payload, stdout)
        else:
            target_label = label_text(d.event(config.target_event).label)
            stdout.write(f"target: {config.target_event}  {target_label}\n")
            listed = " ".join(map(str, opportunities)) if opportunities else "none"
            stdout.write(f"opportunities ({len(opportunities)}): {listed}\n")
            if config.witness:
                for v, path in sorted(witnesses.items()):
                    stdout.write(f"witness {v}: {_path_text(path)}\n")
        return 0
    if command is Command.STRATEGIES:
        assert config.target_event is not None
        d.event(config.target_event)
        strategies = minimal_tamper_strategies_fast(d, config.target_event)
        if as_json:
            _dump_json(
                {
                    "target": config.target_event,
                    "minimalStrategies": [sorted(s) for s in strategies],
                },
                stdout,
            )
        else:
            target_label = label_text(d.event(config.target_event).label)
            stdout.write(f"target: {config.target_event}  {target_label}\n")
            stdout.write(f"minimal strategies ({len(strategies)}):\n")
            for s in strategies:
                stdout.write("  {" + " ".join(map(str, sorted(s))) + "}\n")
        return 0
    if command is Command.CHECK_PROTECTED:
        violation = find_unprotected_path(d)
        protected = violation is None
        if as_json:
            payload = {"protected": protected, "exact": True}
            if violation is not None:
                payload["violatingPath"] = list(violation)
            _dump_json(payload, stdout)
        else:
            color = _use_color(stdout)
            verdict = _colored("yes", "32", color) if protected else _colored("no", "31", color)
            stdout.write(f"protected: {verdict}\n")
            if violation is not None:
                stdout.write(f"violating path: {_path_text(violation)}\n")
        return 0
    raise AssertionError(f"unhandled command {command}")


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(parse_args(argv)))


if __name__ == "__main__":
    main()

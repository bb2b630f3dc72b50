"""Concrete and abstract syntax for Copland attestation phrases.

A phrase describes what to measure, where, and how the resulting evidence
flows.  The concrete grammar accepted by :func:`parse_top` is

    top    := '*' place ':' phrase
    phrase := atom ('->' phrase)?                 # '->' is right-associative
    atom   := sym sym sym                         # measurement: probe place target
            | '@' place '[' phrase ']'            # run the body at another place
            | '_' | '!' | '#' | '{}'              # copy, sign, hash, null
            | '(' phrase spec kind spec phrase ')' # branch, e.g. (a +<+ b)
            | '(' phrase ')'                      # grouping
    spec   := '+' | '-'
    kind   := '<' | '~'

Identifiers match ``[A-Za-z][A-Za-z0-9_]*``, whitespace is insignificant,
and ``//`` starts a comment running to end of line (``#`` is the hash
phrase, not a comment).  Branch operators are written as three adjacent
tokens, e.g. ``+<+`` or ``-~+``.  Parentheses are mandatory around branches
and optional as grouping elsewhere; the printer emits grouping parentheses
only where a sequence appears as the left operand of another sequence,
which the right-associative arrow could not otherwise express.

Parsing and printing are mutually inverse: ``parse_phrase(print_phrase(t))``
equals ``t`` structurally for every phrase ``t``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "SplitSpec",
    "BranchKind",
    "Meas",
    "At",
    "Copy",
    "Sign",
    "Hash",
    "Nul",
    "Seq",
    "Branch",
    "Phrase",
    "TopPhrase",
    "Position",
    "CoplandSyntaxError",
    "LexError",
    "ParseError",
    "parse_top",
    "parse_phrase",
    "print_top",
    "print_phrase",
]


class SplitSpec(Enum):
    """Whether incoming evidence is passed (+) or withheld (-) on a branch side."""

    PLUS = "+"
    MINUS = "-"


class BranchKind(Enum):
    """Sequential (<) or parallel (~) branching."""

    SEQ = "<"
    PAR = "~"


@dataclass(frozen=True)
class Meas:
    """Measurement: ``probe`` measures ``target`` residing at ``place``."""

    probe: str
    place: str
    target: str


@dataclass(frozen=True)
class At:
    """Run ``body`` at ``place``, sending current evidence along."""

    place: str
    body: Phrase


@dataclass(frozen=True)
class Copy:
    """Pass evidence through unchanged (``_``)."""


@dataclass(frozen=True)
class Sign:
    """Sign evidence with the current place's key (``!``)."""


@dataclass(frozen=True)
class Hash:
    """Hash evidence at the current place (``#``)."""


@dataclass(frozen=True)
class Nul:
    """Discard evidence, yielding the empty term (``{}``)."""


@dataclass(frozen=True)
class Seq:
    """Pipeline: evidence from ``left`` feeds ``right`` (``left -> right``)."""

    left: Phrase
    right: Phrase


@dataclass(frozen=True)
class Branch:
    """Two-way branch with per-side evidence splitting specifications."""

    kind: BranchKind
    left_spec: SplitSpec
    right_spec: SplitSpec
    left: Phrase
    right: Phrase


Phrase = Meas | At | Copy | Sign | Hash | Nul | Seq | Branch


@dataclass(frozen=True)
class TopPhrase:
    """A phrase together with the place where execution starts."""

    place: str
    body: Phrase


# A path into a phrase: 1/2 select sequence and branch operands, 1 selects
# an `@` body.  New components are prepended, so the most recent step is
# leftmost.
Position = tuple[int, ...]


class CoplandSyntaxError(ValueError):
    """Malformed phrase text, with a 1-based source position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class LexError(CoplandSyntaxError):
    pass


class ParseError(CoplandSyntaxError):
    pass


# ── Tokens ───────────────────────────────────────────────────────────────


class TokenKind(Enum):
    IDENT = "identifier"
    STAR = "'*'"
    COLON = "':'"
    ARROW = "'->'"
    AT = "'@'"
    LBRACKET = "'['"
    RBRACKET = "']'"
    LPAREN = "'('"
    RPAREN = "')'"
    UNDERSCORE = "'_'"
    BANG = "'!'"
    HASH = "'#'"
    NUL = "'{}'"
    PLUS = "'+'"
    MINUS = "'-'"
    LESS = "'<'"
    TILDE = "'~'"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int


_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")

_SINGLE_CHAR = {
    "*": TokenKind.STAR,
    ":": TokenKind.COLON,
    "@": TokenKind.AT,
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "_": TokenKind.UNDERSCORE,
    "!": TokenKind.BANG,
    "#": TokenKind.HASH,
    "+": TokenKind.PLUS,
    "<": TokenKind.LESS,
    "~": TokenKind.TILDE,
}


def tokenize(text: str) -> list[Token]:
    """Split phrase text into tokens, raising :class:`LexError` on bad input."""
    tokens: list[Token] = []
    i = 0
    line = 1
    line_start = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            line_start = i
            continue
        if ch in " \t\r":
            i += 1
            continue
        col = i - line_start + 1
        if ch == "/" and text[i : i + 2] == "//":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "-":
            if text[i : i + 2] == "->":
                tokens.append(Token(TokenKind.ARROW, "->", line, col))
                i += 2
            else:
                tokens.append(Token(TokenKind.MINUS, "-", line, col))
                i += 1
            continue
        if ch == "{":
            if text[i : i + 2] == "{}":
                tokens.append(Token(TokenKind.NUL, "{}", line, col))
                i += 2
                continue
            raise LexError("'{' must be followed by '}'", line, col)
        if ch in _SINGLE_CHAR:
            tokens.append(Token(_SINGLE_CHAR[ch], ch, line, col))
            i += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(Token(TokenKind.IDENT, m.group(), line, col))
            i = m.end()
            continue
        raise LexError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token(TokenKind.EOF, "", line, n - line_start + 1))
    return tokens


# ── Parser ───────────────────────────────────────────────────────────────


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def expect(self, kind: TokenKind) -> Token:
        tok = self.peek()
        if tok.kind is not kind:
            self.fail(f"expected {kind.value}, found {tok.kind.value}")
        return self.advance()

    def fail(self, message: str) -> None:
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column)

    def top(self) -> TopPhrase:
        self.expect(TokenKind.STAR)
        place = self.expect(TokenKind.IDENT).text
        self.expect(TokenKind.COLON)
        body = self.phrase()
        self.expect(TokenKind.EOF)
        return TopPhrase(place, body)

    def phrase(self) -> Phrase:
        left = self.atom()
        if self.peek().kind is TokenKind.ARROW:
            self.advance()
            return Seq(left, self.phrase())
        return left

    def atom(self) -> Phrase:
        tok = self.peek()
        if tok.kind is TokenKind.IDENT:
            probe = self.advance().text
            place = self.expect(TokenKind.IDENT).text
            target = self.expect(TokenKind.IDENT).text
            return Meas(probe, place, target)
        if tok.kind is TokenKind.AT:
            self.advance()
            place = self.expect(TokenKind.IDENT).text
            self.expect(TokenKind.LBRACKET)
            body = self.phrase()
            self.expect(TokenKind.RBRACKET)
            return At(place, body)
        if tok.kind is TokenKind.UNDERSCORE:
            self.advance()
            return Copy()
        if tok.kind is TokenKind.BANG:
            self.advance()
            return Sign()
        if tok.kind is TokenKind.HASH:
            self.advance()
            return Hash()
        if tok.kind is TokenKind.NUL:
            self.advance()
            return Nul()
        if tok.kind is TokenKind.LPAREN:
            self.advance()
            left = self.phrase()
            if self.peek().kind is TokenKind.RPAREN:
                self.advance()
                return left
            left_spec = self.split_spec()
            kind = self.branch_kind()
            right_spec = self.split_spec()
            right = self.phrase()
            self.expect(TokenKind.RPAREN)
            return Branch(kind, left_spec, right_spec, left, right)
        self.fail(f"expected a phrase, found {tok.kind.value}")
        raise AssertionError("unreachable")

    def split_spec(self) -> SplitSpec:
        tok = self.peek()
        if tok.kind is TokenKind.PLUS:
            self.advance()
            return SplitSpec.PLUS
        if tok.kind is TokenKind.MINUS:
            self.advance()
            return SplitSpec.MINUS
        self.fail(f"expected '+' or '-', found {tok.kind.value}")
        raise AssertionError("unreachable")

    def branch_kind(self) -> BranchKind:
        tok = self.peek()
        if tok.kind is TokenKind.LESS:
            self.advance()
            return BranchKind.SEQ
        if tok.kind is TokenKind.TILDE:
            self.advance()
            return BranchKind.PAR
        self.fail(f"expected '<' or '~', found {tok.kind.value}")
        raise AssertionError("unreachable")


def parse_top(text: str) -> TopPhrase:
    """Parse a complete ``*place: phrase`` input."""
    return _Parser(tokenize(text)).top()


def parse_phrase(text: str) -> Phrase:
    """Parse a bare phrase without the ``*place:`` prefix."""
    parser = _Parser(tokenize(text))
    body = parser.phrase()
    parser.expect(TokenKind.EOF)
    return body


# ── Printer ──────────────────────────────────────────────────────────────


def print_phrase(t: Phrase) -> str:
    """Render a phrase in canonical concrete syntax."""
    match t:
        case Meas(probe, place, target):
            return f"{probe} {place} {target}"
        case At(place, body):
            return f"@{place} [{print_phrase(body)}]"
        case Copy():
            return "_"
        case Sign():
            return "!"
        case Hash():
            return "#"
        case Nul():
            return "{}"
        case Seq(left, right):
            # The arrow is right-associative, so a sequence on the left
            # needs grouping parentheses to survive re-parsing.
            left_text = print_phrase(left)
            if isinstance(left, Seq):
                left_text = f"({left_text})"
            return f"{left_text} -> {print_phrase(right)}"
        case Branch(kind, left_spec, right_spec, left, right):
            op = f"{left_spec.value}{kind.value}{right_spec.value}"
            return f"({print_phrase(left)} {op} {print_phrase(right)})"
    raise TypeError(f"not a phrase: {t!r}")


def print_top(t: TopPhrase) -> str:
    """Render a top phrase in canonical concrete syntax."""
    return f"*{t.place}: {print_phrase(t.body)}"

"""Lexical scanning and normalization for Scala-style source text.

The scanner is total: it never raises on malformed input. Unterminated
strings or comments consume the rest of the text, and characters outside
every known class become single-character UNKNOWN tokens (reported through
the module logger).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

log = logging.getLogger(__name__)

KEYWORDS = frozenset(
    """abstract case catch class def do else extends false final finally for
    forSome if implicit import lazy match new null object override package
    private protected return sealed super this throw trait true try type val
    var while with yield _""".split()
)

OP_CHARS = frozenset("+-*/<>=!&|^~%?:@#\\")
PUNCT_CHARS = frozenset("(){}[],;.")

OPEN_DELIMS = {"(": ")", "[": "]", "{": "}"}
CLOSE_DELIMS = frozenset(")]}")


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "ident"
    NUMBER = "number"
    STRING = "string"
    CHAR = "char"
    OP = "op"
    PUNCT = "punct"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int  # 1-based line of the token's first character
    pos: int  # character offset into the scanned text


def _skip_line_comment(text: str, i: int) -> int:
    n = len(text)
    while i < n and text[i] != "\n":
        i += 1
    return i


def _skip_block_comment(text: str, i: int) -> int:
    # i points at the "/*"; block comments nest in Scala
    n = len(text)
    depth = 1
    i += 2
    while i < n and depth > 0:
        if text.startswith("/*", i):
            depth += 1
            i += 2
        elif text.startswith("*/", i):
            depth -= 1
            i += 2
        else:
            i += 1
    return i


def _scan_string(text: str, i: int) -> int:
    """Return the index one past the string literal starting at i."""
    n = len(text)
    if text.startswith('"""', i):
        j = text.find('"""', i + 3)
        if j < 0:
            return n
        # multi-line strings may end with extra quotes ("""x"""")
        j += 3
        while j < n and text[j] == '"':
            j += 1
        return j
    j = i + 1
    while j < n:
        c = text[j]
        if c == "\\" and j + 1 < n:
            j += 2
            continue
        if c == '"' or c == "\n":  # unterminated at newline: recover
            return j + 1 if c == '"' else j
        j += 1
    return n


def _scan_char(text: str, i: int) -> int | None:
    """Char literal at i, or None if the quote is not one ('a', '\\n')."""
    n = len(text)
    if i + 1 >= n:
        return None
    if text[i + 1] == "\\":
        j = i + 3
        while j < n and text[j] not in "'\n" and j - i < 10:
            j += 1  # unicode escapes like 'A'
        if j < n and text[j] == "'":
            return j + 1
        return None
    if i + 2 < n and text[i + 2] == "'" and text[i + 1] != "'":
        return i + 3
    return None


def strip_comments(text: str) -> str:
    """Replace comments with spaces, preserving newlines and all else.

    Line structure survives so downstream line numbers match the input.
    String literal contents are never touched.
    """
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "/" and text.startswith("//", i):
            j = _skip_line_comment(text, i)
            out.append(" " * (j - i))
            i = j
        elif c == "/" and text.startswith("/*", i):
            j = _skip_block_comment(text, i)
            out.append("".join("\n" if ch == "\n" else " " for ch in text[i:j]))
            i = j
        elif c == '"':
            j = _scan_string(text, i)
            out.append(text[i:j])
            i = j
        elif c == "'":
            j = _scan_char(text, i)
            if j is None:
                out.append(c)
                i += 1
            else:
                out.append(text[i:j])
                i = j
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _single_string_unterminated(s: str) -> bool:
    return not s.startswith('"""') and not (len(s) >= 2 and s.endswith('"'))


def normalize(text: str) -> str:
    """Strip comments and collapse whitespace runs to single spaces.

    Idempotent; string literal contents are preserved verbatim. A string
    with no closing quote keeps the newline it was recovered at, so the
    next line's tokens survive a rescan.
    """
    stripped = strip_comments(text)
    out: list[str] = []
    i, n = 0, len(stripped)
    pending_space = False
    while i < n:
        c = stripped[i]
        if c in " \t\r\n\f\v":
            pending_space = bool(out)
            i += 1
            continue
        if pending_space:
            out.append(" ")
            pending_space = False
        if c == '"':
            j = _scan_string(stripped, i)
            s = stripped[i:j]
            out.append(s)
            i = j
            if _single_string_unterminated(s) and i < n and stripped[i] == "\n":
                out.append("\n")
                i += 1
        elif c == "'":
            j = _scan_char(stripped, i)
            if j is None:
                out.append(c)
                i += 1
            else:
                out.append(stripped[i:j])
                i = j
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c in "_$"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c in "_$"


def scan(text: str) -> list[Token]:
    """Tokenize ``text``, skipping comments and whitespace."""
    tokens: list[Token] = []
    i, n = 0, len(text)
    line = 1
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            continue
        if c in " \t\r\f\v":
            i += 1
            continue
        if text.startswith("//", i):
            i = _skip_line_comment(text, i)
            continue
        if text.startswith("/*", i):
            j = _skip_block_comment(text, i)
            line += text.count("\n", i, j)
            i = j
            continue
        if c == '"':
            j = _scan_string(text, i)
            tokens.append(Token(TokenKind.STRING, text[i:j], line, i))
            line += text.count("\n", i, j)
            i = j
            continue
        if c == "'":
            j = _scan_char(text, i)
            if j is not None:
                tokens.append(Token(TokenKind.CHAR, text[i:j], line, i))
                i = j
            else:
                log.debug("stray quote at line %d treated as unknown token", line)
                tokens.append(Token(TokenKind.UNKNOWN, c, line, i))
                i += 1
            continue
        if c == "`":
            j = text.find("`", i + 1)
            j = n if j < 0 else j + 1
            tokens.append(Token(TokenKind.IDENT, text[i:j], line, i))
            i = j
            continue
        if c.isdigit():
            j = i + 1
            if c == "0" and j < n and text[j] in "xX":
                j += 1
                while j < n and (text[j].isdigit() or text[j] in "abcdefABCDEF"):
                    j += 1
            else:
                while j < n and text[j].isdigit():
                    j += 1
                if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                    j += 1
                    while j < n and text[j].isdigit():
                        j += 1
                if j < n and text[j] in "eE":
                    k = j + 1
                    if k < n and text[k] in "+-":
                        k += 1
                    if k < n and text[k].isdigit():
                        j = k
                        while j < n and text[j].isdigit():
                            j += 1
            if j < n and text[j] in "LlFfDd":
                j += 1
            tokens.append(Token(TokenKind.NUMBER, text[i:j], line, i))
            i = j
            continue
        if _is_ident_start(c):
            j = i + 1
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, word, line, i))
            i = j
            continue
        if c in OP_CHARS:
            j = i + 1
            while j < n and text[j] in OP_CHARS and not text.startswith("//", j) and not text.startswith("/*", j):
                j += 1
            tokens.append(Token(TokenKind.OP, text[i:j], line, i))
            i = j
            continue
        if c in PUNCT_CHARS:
            tokens.append(Token(TokenKind.PUNCT, c, line, i))
            i += 1
            continue
        log.debug("unknown character %r at line %d", c, line)
        tokens.append(Token(TokenKind.UNKNOWN, c, line, i))
        i += 1
    return tokens


def count_effective_lines(text: str) -> int:
    """Lines that remain non-blank after comment removal."""
    stripped = strip_comments(text)
    return sum(1 for ln in stripped.splitlines() if ln.strip())

"""Corpus ingestion and method extraction for Scala-style sources.

Methods are named ``def`` definitions (brace- or expression-bodied),
including nested ones. Constructors (``def this``) and anonymous functions
are not extracted: they have no stable name to report.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path

from .lexer import (
    Token,
    TokenKind,
    count_effective_lines,
    normalize,
    scan,
    strip_comments,
)

log = logging.getLogger(__name__)

REPR_KINDS = ("identifier", "ast")

# keywords that cannot occur inside a result-type annotation; seeing one
# means the def had no body (abstract declaration)
_TYPE_STOP_KEYWORDS = frozenset(
    """def val var class object trait import package private protected
    override final implicit lazy sealed abstract case type""".split()
)

_CONTINUE_LINE_END_KEYWORDS = frozenset(
    """match if else for while do try catch finally yield new return throw
    extends with case forSome""".split()
)

_CONTINUE_LINE_START_KEYWORDS = frozenset("else catch finally yield match".split())


class CorpusError(Exception):
    """The corpus root is missing or unreadable."""


@dataclass(frozen=True)
class SourceFile:
    path: str  # corpus-relative, posix separators
    content: str
    loc: int  # non-empty, non-comment lines


@dataclass(frozen=True)
class Method:
    id: str
    file: str
    name: str
    start_line: int
    end_line: int
    raw_body: str
    normalized_body: str
    effective_lines: int


@dataclass(frozen=True)
class TokenBag:
    method_id: str
    entries: dict[str, int]
    size: int


@dataclass(frozen=True)
class RepresentationSequence:
    method_id: str
    kind: str  # "identifier" | "ast"
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class TokenizerConfig:
    """Token classes included in bags. Punctuation is excluded by default:
    braces/parens/commas dominate frequency counts and dilute overlap."""

    include_punct: bool = False


def method_id(file: str, start_line: int, name: str) -> str:
    digest = hashlib.sha1(f"{file}:{start_line}:{name}".encode()).hexdigest()
    return digest[:16]


def ingest_corpus(root: str | Path, extensions: tuple[str, ...] = (".scala",)) -> list[SourceFile]:
    """Read every matching file under ``root``, path-sorted.

    Undecodable files are skipped with a diagnostic; a missing root is fatal.
    """
    rootp = Path(root)
    if not rootp.is_dir():
        raise CorpusError(f"corpus root {rootp} is not a readable directory")
    exts = {e if e.startswith(".") else "." + e for e in extensions}
    files: list[SourceFile] = []
    for path in sorted(rootp.rglob("*")):
        if not path.is_file() or path.suffix not in exts:
            continue
        rel = path.relative_to(rootp).as_posix()
        try:
            content = path.read_text(encoding="utf-8")
        except UnicodeDecodeError:
            log.warning("skipping %s: not valid UTF-8", rel)
            continue
        except OSError as exc:
            log.warning("skipping %s: %s", rel, exc)
            continue
        files.append(SourceFile(path=rel, content=content, loc=count_effective_lines(content)))
    files.sort(key=lambda f: f.path)
    return files


def _token_end_line(tok: Token) -> int:
    return tok.line + tok.text.count("\n")


def _skip_balanced(tokens: list[Token], i: int) -> int:
    """Skip a balanced ()/[]/{} group starting at i; index after the close."""
    depth = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t.kind == TokenKind.PUNCT:
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                depth -= 1
                if depth == 0:
                    return i + 1
                if depth < 0:
                    raise _Unbalanced(t.line)
        i += 1
    raise _Unbalanced(tokens[i - 1].line if tokens else 0)


class _Unbalanced(Exception):
    def __init__(self, line: int):
        super().__init__(f"unbalanced delimiters near line {line}")
        self.line = line


def _is_line_end(tokens: list[Token], k: int) -> bool:
    if k + 1 >= len(tokens):
        return True
    return tokens[k + 1].line > _token_end_line(tokens[k])


def _expression_continues(tokens: list[Token], k: int) -> bool:
    """Does the expression run past the line break after token k?"""
    t = tokens[k]
    if t.kind == TokenKind.OP:
        return True
    if t.kind == TokenKind.KEYWORD and t.text in _CONTINUE_LINE_END_KEYWORDS:
        return True
    if t.kind == TokenKind.PUNCT and t.text in ",.":
        return True
    if k + 1 < len(tokens):
        nxt = tokens[k + 1]
        if nxt.kind == TokenKind.OP:
            return True
        if nxt.kind == TokenKind.PUNCT and nxt.text == ".":
            return True
        if nxt.kind == TokenKind.KEYWORD and nxt.text in _CONTINUE_LINE_START_KEYWORDS:
            return True
    return False


def _expression_end(tokens: list[Token], j: int) -> int:
    """Index of the last token of the expression starting at j."""
    depth = 0
    n = len(tokens)
    k = j
    while k < n:
        t = tokens[k]
        if t.kind == TokenKind.PUNCT:
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                if depth == 0:
                    return k - 1  # closes an enclosing scope
                depth -= 1
        if depth == 0 and _is_line_end(tokens, k) and not _expression_continues(tokens, k):
            return k
        k += 1
    return n - 1


def _parse_def(tokens: list[Token], i: int) -> tuple[str, int] | None:
    """Given tokens[i] == 'def', return (name, last body token index)."""
    n = len(tokens)
    j = i + 1
    if j >= n:
        return None
    name_tok = tokens[j]
    if name_tok.kind not in (TokenKind.IDENT, TokenKind.OP):
        return None  # `def this(...)` and malformed defs
    name = name_tok.text
    j += 1
    # type-parameter and value-parameter groups
    while j < n and tokens[j].kind == TokenKind.PUNCT and tokens[j].text in "([":
        j = _skip_balanced(tokens, j)
    # optional result type
    if j < n and tokens[j].kind == TokenKind.OP and tokens[j].text == ":":
        j += 1
        while j < n:
            t = tokens[j]
            if t.kind == TokenKind.OP and t.text == "=":
                break
            if t.kind == TokenKind.PUNCT and t.text == "{":
                break
            if t.kind == TokenKind.PUNCT and t.text in "([":
                j = _skip_balanced(tokens, j)
                continue
            if t.kind == TokenKind.KEYWORD and t.text in _TYPE_STOP_KEYWORDS:
                return None  # abstract declaration, no body
            if t.kind == TokenKind.PUNCT and t.text in ")]}":
                return None
            j += 1
        if j >= n:
            return None
    if j >= n:
        return None
    t = tokens[j]
    if t.kind == TokenKind.OP and t.text == "=":
        j += 1
        if j >= n:
            return None
        if tokens[j].kind == TokenKind.PUNCT and tokens[j].text == "{":
            return name, _skip_balanced(tokens, j) - 1
        return name, _expression_end(tokens, j)
    if t.kind == TokenKind.PUNCT and t.text == "{":
        return name, _skip_balanced(tokens, j) - 1  # procedure syntax
    return None  # abstract declaration


def extract_methods(file: SourceFile, min_lines: int = 10) -> list[Method]:
    """All named defs in ``file`` with at least ``min_lines`` effective lines.

    On unbalanced delimiters, methods found before the imbalance are kept
    and a diagnostic is logged.
    """
    if min_lines < 1:
        raise ValueError("min_lines must be >= 1")
    stripped = strip_comments(file.content)
    tokens = scan(stripped)
    methods: list[Method] = []
    for i, tok in enumerate(tokens):
        if tok.kind != TokenKind.KEYWORD or tok.text != "def":
            continue
        try:
            parsed = _parse_def(tokens, i)
        except _Unbalanced as exc:
            log.warning("%s: %s; keeping methods found so far", file.path, exc)
            break
        if parsed is None:
            continue
        name, end_idx = parsed
        end_tok = tokens[end_idx]
        raw = file.content[tok.pos : end_tok.pos + len(end_tok.text)]
        effective = count_effective_lines(raw)
        if effective < min_lines:
            continue
        normalized = normalize(raw)
        if not normalized:
            continue
        methods.append(
            Method(
                id=method_id(file.path, tok.line, name),
                file=file.path,
                name=name,
                start_line=tok.line,
                end_line=_token_end_line(end_tok),
                raw_body=raw,
                normalized_body=normalized,
                effective_lines=effective,
            )
        )
    return methods


def extract_corpus(files: list[SourceFile], min_lines: int = 10) -> list[Method]:
    """Extract from every file; deterministic (path, start_line) order."""
    methods: list[Method] = []
    for f in files:
        methods.extend(extract_methods(f, min_lines))
    methods.sort(key=lambda m: (m.file, m.start_line))
    return methods


_BAG_KINDS = frozenset(
    (
        TokenKind.KEYWORD,
        TokenKind.IDENT,
        TokenKind.NUMBER,
        TokenKind.STRING,
        TokenKind.CHAR,
        TokenKind.OP,
        TokenKind.UNKNOWN,
    )
)


def tokenize(method: Method, config: TokenizerConfig = TokenizerConfig()) -> TokenBag:
    """Bag of lexical tokens of the normalized body."""
    if not method.normalized_body:
        raise ValueError(f"method {method.id} has an empty normalized body")
    entries: dict[str, int] = {}
    for tok in scan(method.normalized_body):
        if tok.kind in _BAG_KINDS or (config.include_punct and tok.kind == TokenKind.PUNCT):
            entries[tok.text] = entries.get(tok.text, 0) + 1
    return TokenBag(method_id=method.id, entries=entries, size=sum(entries.values()))


def extract_representation(method: Method, kind: str) -> RepresentationSequence:
    """Identifier sequence or pre-order AST label sequence for a method.

    AST extraction raises RepresentationError on unbalanced delimiters;
    the identifier kind always succeeds (possibly empty, flagged degenerate).
    """
    if kind not in REPR_KINDS:
        raise ValueError(f"unknown representation kind {kind!r}")
    if kind == "identifier":
        idents = tuple(
            t.text for t in scan(method.normalized_body) if t.kind == TokenKind.IDENT
        )
        if not idents:
            log.warning("method %s has no identifiers; degenerate sequence", method.id)
        return RepresentationSequence(method_id=method.id, kind=kind, tokens=idents)
    from .astrep import ast_sequence

    labels = ast_sequence(method.raw_body)
    return RepresentationSequence(method_id=method.id, kind=kind, tokens=tuple(labels))

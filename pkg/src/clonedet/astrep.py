"""Structural parse of a method body into a pre-order label sequence.

A tolerant recursive scanner, not a full grammar: it recognizes the
constructs that shape a method (definitions, blocks, matches, branches,
loops, calls, patterns) and degrades to generic labels elsewhere. Labels
carry no identifier or literal text, so renaming identifiers or changing
literal values leaves the sequence unchanged.
"""

from __future__ import annotations

from .lexer import Token, TokenKind, scan, strip_comments


class RepresentationError(Exception):
    """The method body could not be parsed (unbalanced delimiters)."""


class _Node:
    __slots__ = ("label", "children")

    def __init__(self, label: str, children: list["_Node"] | None = None):
        self.label = label
        self.children = children or []


_LIT_KEYWORDS = frozenset(("true", "false", "null"))
_LINE_END_CONTINUE = frozenset(
    """match if else for while do try catch finally yield new return throw
    extends with case forSome""".split()
)
_LINE_START_CONTINUE = frozenset("else catch finally yield match".split())


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens

    def tok(self, i: int) -> Token:
        return self.toks[i]

    def kind(self, i: int) -> TokenKind:
        return self.toks[i].kind

    def text(self, i: int) -> str:
        return self.toks[i].text

    def is_punct(self, i: int, ch: str) -> bool:
        t = self.toks[i]
        return t.kind == TokenKind.PUNCT and t.text == ch

    def is_op(self, i: int, text: str) -> bool:
        t = self.toks[i]
        return t.kind == TokenKind.OP and t.text == text

    def is_kw(self, i: int, word: str) -> bool:
        t = self.toks[i]
        return t.kind == TokenKind.KEYWORD and t.text == word

    def match_end(self, i: int) -> int:
        """Index one past the balanced group opening at i."""
        depth = 0
        n = len(self.toks)
        while i < n:
            t = self.toks[i]
            if t.kind == TokenKind.PUNCT:
                if t.text in "([{":
                    depth += 1
                elif t.text in ")]}":
                    depth -= 1
                    if depth == 0:
                        return i + 1
                    if depth < 0:
                        raise RepresentationError(f"unbalanced near line {t.line}")
            i += 1
        raise RepresentationError("unbalanced delimiters at end of body")

    def find_top_level(self, i: int, end: int, pred) -> int:
        """First index in [i, end) satisfying pred at delimiter depth 0."""
        depth = 0
        while i < end:
            t = self.toks[i]
            if t.kind == TokenKind.PUNCT:
                if t.text in "([{":
                    depth += 1
                elif t.text in ")]}":
                    depth -= 1
            elif depth == 0 and pred(i):
                return i
            i += 1
        return -1

    # ---- statement splitting -------------------------------------------

    def _line_breaks_after(self, i: int, end: int) -> bool:
        if i + 1 >= end:
            return False
        this_end = self.toks[i].line + self.toks[i].text.count("\n")
        return self.toks[i + 1].line > this_end

    def _continues(self, i: int, end: int) -> bool:
        t = self.toks[i]
        if t.kind == TokenKind.OP:
            return True
        if t.kind == TokenKind.KEYWORD and t.text in _LINE_END_CONTINUE:
            return True
        if t.kind == TokenKind.PUNCT and t.text in ",.":
            return True
        if i + 1 < end:
            nxt = self.toks[i + 1]
            if nxt.kind == TokenKind.OP:
                return True
            if nxt.kind == TokenKind.PUNCT and nxt.text == ".":
                return True
            if nxt.kind == TokenKind.KEYWORD and nxt.text in _LINE_START_CONTINUE:
                return True
        return False

    def split_statements(self, i: int, end: int) -> list[tuple[int, int]]:
        spans: list[tuple[int, int]] = []
        start = i
        depth = 0
        while i < end:
            t = self.toks[i]
            if t.kind == TokenKind.PUNCT:
                if t.text in "([{":
                    depth += 1
                elif t.text in ")]}":
                    depth -= 1
                elif t.text == ";" and depth == 0:
                    if i > start:
                        spans.append((start, i))
                    start = i + 1
                    i += 1
                    continue
            if depth == 0 and self._line_breaks_after(i, end) and not self._continues(i, end):
                spans.append((start, i + 1))
                start = i + 1
            i += 1
        if start < end:
            spans.append((start, end))
        return spans

    # ---- expressions ----------------------------------------------------

    def parse_stmts(self, i: int, end: int) -> list[_Node]:
        nodes: list[_Node] = []
        for s, e in self.split_statements(i, end):
            nodes.extend(self.parse_stmt(s, e))
        return nodes

    def parse_stmt(self, i: int, end: int) -> list[_Node]:
        if i >= end:
            return []
        t = self.toks[i]
        if t.kind == TokenKind.KEYWORD:
            if t.text == "def":
                return [self.parse_fun_def(i, end)]
            if t.text in ("val", "var"):
                return [self.parse_val_def(i, end, "ValDef" if t.text == "val" else "VarDef")]
            if t.text == "type":
                return [_Node("TypeDef")]
            if t.text == "import":
                return [_Node("Import")]
        return self.parse_expr(i, end)

    def parse_expr(self, i: int, end: int) -> list[_Node]:
        """Node list for an expression region [i, end)."""
        if i >= end:
            return []
        # postfix match binds loosest: scrutinee nodes become children
        m = self.find_top_level(i, end, lambda k: self.is_kw(k, "match"))
        if m >= 0 and m > i:
            scrutinee = self.parse_expr(i, m)
            cases: list[_Node] = []
            j = m + 1
            if j < end and self.is_punct(j, "{"):
                close = self.match_end(j)
                cases = self.parse_cases(j + 1, close - 1)
                rest = self.parse_expr(close, end)
            else:
                rest = []
            return [_Node("Match", scrutinee + cases)] + rest
        # a top-level `=>` outside parens marks a bare lambda: `x => body`
        arrow = self.find_top_level(i, end, lambda k: self.is_op(k, "=>"))
        if arrow >= 0:
            params = self.parse_pattern(i, arrow)
            body = self.parse_expr(arrow + 1, end)
            return [_Node("Lambda", params + body)]
        return self._parse_expr_seq(i, end)

    def _parse_expr_seq(self, i: int, end: int) -> list[_Node]:
        nodes: list[_Node] = []
        while i < end:
            t = self.toks[i]
            if t.kind == TokenKind.KEYWORD:
                if t.text == "if":
                    node, i = self.parse_if(i, end)
                    nodes.append(node)
                    continue
                if t.text == "while":
                    node, i = self.parse_while(i, end)
                    nodes.append(node)
                    continue
                if t.text == "do":
                    node, i = self.parse_do(i, end)
                    nodes.append(node)
                    continue
                if t.text == "for":
                    node, i = self.parse_for(i, end)
                    nodes.append(node)
                    continue
                if t.text == "try":
                    node, i = self.parse_try(i, end)
                    nodes.append(node)
                    continue
                if t.text in ("return", "throw"):
                    label = "Return" if t.text == "return" else "Throw"
                    nodes.append(_Node(label, self.parse_expr(i + 1, end)))
                    i = end
                    continue
                if t.text == "new":
                    nodes.append(_Node("New"))
                    i += 1
                    continue
                if t.text in _LIT_KEYWORDS:
                    nodes.append(_Node("Lit"))
                    i += 1
                    continue
                if t.text == "this":
                    nodes.append(_Node("This"))
                    i += 1
                    continue
                if t.text == "super":
                    nodes.append(_Node("Super"))
                    i += 1
                    continue
                if t.text == "_":
                    nodes.append(_Node("Wildcard"))
                    i += 1
                    continue
                # modifiers and other structure-free keywords
                i += 1
                continue
            if t.kind in (TokenKind.NUMBER, TokenKind.STRING, TokenKind.CHAR):
                nodes.append(_Node("Lit"))
                i += 1
                continue
            if t.kind == TokenKind.IDENT:
                node, i = self.parse_call_chain(i, end)
                nodes.append(node)
                continue
            if t.kind == TokenKind.OP:
                if t.text == ":" and i + 1 < end:
                    # type ascription: the remainder of the region is a type
                    nodes.append(_Node("TypeRef"))
                    i = self._skip_type(i + 1, end)
                    continue
                nodes.append(_Node("Op"))
                i += 1
                continue
            if t.kind == TokenKind.PUNCT:
                if t.text == "(":
                    close = self.match_end(i)
                    inner = self.parse_args(i + 1, close - 1)
                    if len(inner) > 1:
                        flat: list[_Node] = []
                        for part in inner:
                            flat.extend(part)
                        nodes.append(_Node("Tuple", flat))
                    elif inner:
                        nodes.extend(inner[0])
                    i = close
                    continue
                if t.text == "{":
                    close = self.match_end(i)
                    nodes.append(self.parse_block(i + 1, close - 1))
                    i = close
                    continue
                if t.text == "[":
                    close = self.match_end(i)
                    nodes.append(_Node("TypeApply"))
                    i = close
                    continue
                # '.', ',', stray closers: no structure of their own
                i += 1
                continue
            i += 1  # UNKNOWN
        return nodes

    def _skip_type(self, i: int, end: int) -> int:
        """Skip a type annotation; stops before '=', ',' or region end."""
        while i < end:
            t = self.toks[i]
            if t.kind == TokenKind.PUNCT and t.text in "([":
                i = self.match_end(i)
                continue
            if t.kind == TokenKind.OP and t.text == "=":
                return i
            if t.kind == TokenKind.PUNCT and t.text in ",)}":
                return i
            i += 1
        return end

    def parse_args(self, i: int, end: int) -> list[list[_Node]]:
        """Comma-separated expression regions."""
        parts: list[list[_Node]] = []
        start = i
        depth = 0
        while i < end:
            t = self.toks[i]
            if t.kind == TokenKind.PUNCT:
                if t.text in "([{":
                    depth += 1
                elif t.text in ")]}":
                    depth -= 1
                elif t.text == "," and depth == 0:
                    parts.append(self.parse_expr(start, i))
                    start = i + 1
            i += 1
        if start < end:
            parts.append(self.parse_expr(start, end))
        return parts

    def parse_call_chain(self, i: int, end: int) -> tuple[_Node, int]:
        """An identifier with optional type-application and call groups."""
        j = i + 1
        applied = False
        children: list[_Node] = []
        while j < end:
            if self.is_punct(j, "["):
                j = self.match_end(j)
                continue
            if self.is_punct(j, "("):
                close = self.match_end(j)
                for part in self.parse_args(j + 1, close - 1):
                    children.extend(part)
                applied = True
                j = close
                continue
            break
        return (_Node("Apply", children) if applied else _Node("Ident")), j

    def parse_block(self, i: int, end: int) -> _Node:
        """Brace region: case clauses, a lambda, or plain statements."""
        c = self.find_top_level(i, end, lambda k: self.is_kw(k, "case"))
        if c >= 0:
            return _Node("Cases", self.parse_cases(i, end))
        arrow = self.find_top_level(i, end, lambda k: self.is_op(k, "=>"))
        if arrow >= 0:
            # lambda parameters never span a statement break
            spans = self.split_statements(i, end)
            if spans and arrow < spans[0][1]:
                params = self.parse_pattern(i, arrow)
                body = self.parse_stmts(arrow + 1, end)
                return _Node("Lambda", params + body)
        return _Node("Block", self.parse_stmts(i, end))

    def parse_cases(self, i: int, end: int) -> list[_Node]:
        clauses: list[_Node] = []
        k = self.find_top_level(i, end, lambda j: self.is_kw(j, "case"))
        while k >= 0:
            nxt = self.find_top_level(k + 1, end, lambda j: self.is_kw(j, "case"))
            stop = nxt if nxt >= 0 else end
            clauses.append(self.parse_case_clause(k + 1, stop))
            k = nxt
        return clauses

    def parse_case_clause(self, i: int, end: int) -> _Node:
        arrow = self.find_top_level(i, end, lambda k: self.is_op(k, "=>"))
        if arrow < 0:
            return _Node("CaseClause", self.parse_pattern(i, end))
        guard = self.find_top_level(i, arrow, lambda k: self.is_kw(k, "if"))
        children: list[_Node] = []
        if guard >= 0:
            children.extend(self.parse_pattern(i, guard))
            children.append(_Node("Guard", self.parse_expr(guard + 1, arrow)))
        else:
            children.extend(self.parse_pattern(i, arrow))
        children.extend(self.parse_stmts(arrow + 1, end))
        return _Node("CaseClause", children)

    def parse_pattern(self, i: int, end: int) -> list[_Node]:
        nodes: list[_Node] = []
        while i < end:
            t = self.toks[i]
            if t.kind == TokenKind.KEYWORD and t.text == "_":
                if i + 1 < end and self.is_op(i + 1, "*"):
                    nodes.append(_Node("PatSeqWildcard"))
                    i += 2
                else:
                    nodes.append(_Node("PatWildcard"))
                    i += 1
                continue
            if t.kind in (TokenKind.NUMBER, TokenKind.STRING, TokenKind.CHAR):
                nodes.append(_Node("PatLit"))
                i += 1
                continue
            if t.kind == TokenKind.KEYWORD and t.text in _LIT_KEYWORDS:
                nodes.append(_Node("PatLit"))
                i += 1
                continue
            if t.kind == TokenKind.IDENT:
                if i + 1 < end and self.is_punct(i + 1, "("):
                    close = self.match_end(i + 1)
                    sub: list[_Node] = []
                    for s, e in self._split_commas(i + 2, close - 1):
                        sub.extend(self.parse_pattern(s, e))
                    nodes.append(_Node("PatExtract", sub))
                    i = close
                    continue
                nodes.append(_Node("PatVar"))
                i += 1
                continue
            if t.kind == TokenKind.OP:
                if t.text == "|":
                    nodes.append(_Node("PatAlt"))
                elif t.text == "@":
                    nodes.append(_Node("PatBind"))
                elif t.text == ":":
                    nodes.append(_Node("TypeRef"))
                    i = self._skip_type(i + 1, end)
                    continue
                i += 1
                continue
            if t.kind == TokenKind.PUNCT:
                if t.text == "(":
                    close = self.match_end(i)
                    sub = []
                    for s, e in self._split_commas(i + 1, close - 1):
                        sub.extend(self.parse_pattern(s, e))
                    nodes.append(_Node("PatTuple", sub))
                    i = close
                    continue
                if t.text == "[":
                    i = self.match_end(i)
                    continue
                i += 1
                continue
            i += 1
        return nodes

    def _split_commas(self, i: int, end: int) -> list[tuple[int, int]]:
        spans: list[tuple[int, int]] = []
        start = i
        depth = 0
        while i < end:
            t = self.toks[i]
            if t.kind == TokenKind.PUNCT:
                if t.text in "([{":
                    depth += 1
                elif t.text in ")]}":
                    depth -= 1
                elif t.text == "," and depth == 0:
                    spans.append((start, i))
                    start = i + 1
            i += 1
        if start < end:
            spans.append((start, end))
        return spans

    # ---- control constructs ----------------------------------------------

    def parse_if(self, i: int, end: int) -> tuple[_Node, int]:
        j = i + 1
        cond: list[_Node] = []
        if j < end and self.is_punct(j, "("):
            close = self.match_end(j)
            cond = self.parse_expr(j + 1, close - 1)
            j = close
        els = self.find_top_level(j, end, lambda k: self.is_kw(k, "else"))
        if els >= 0:
            then = self.parse_expr(j, els)
            other = self.parse_expr(els + 1, end)
            return _Node("If", cond + then + [_Node("Else", other)]), end
        then = self.parse_expr(j, end)
        return _Node("If", cond + then), end

    def parse_while(self, i: int, end: int) -> tuple[_Node, int]:
        j = i + 1
        cond: list[_Node] = []
        if j < end and self.is_punct(j, "("):
            close = self.match_end(j)
            cond = self.parse_expr(j + 1, close - 1)
            j = close
        return _Node("While", cond + self.parse_expr(j, end)), end

    def parse_do(self, i: int, end: int) -> tuple[_Node, int]:
        w = self.find_top_level(i + 1, end, lambda k: self.is_kw(k, "while"))
        if w < 0:
            return _Node("DoWhile", self.parse_expr(i + 1, end)), end
        body = self.parse_expr(i + 1, w)
        cond = self.parse_expr(w + 1, end)
        return _Node("DoWhile", body + cond), end

    def parse_for(self, i: int, end: int) -> tuple[_Node, int]:
        j = i + 1
        enums: list[_Node] = []
        if j < end and (self.is_punct(j, "(") or self.is_punct(j, "{")):
            close = self.match_end(j)
            enums = self.parse_stmts(j + 1, close - 1)
            j = close
        if j < end and self.is_kw(j, "yield"):
            return _Node("For", enums + [_Node("Yield", self.parse_expr(j + 1, end))]), end
        return _Node("For", enums + self.parse_expr(j, end)), end

    def parse_try(self, i: int, end: int) -> tuple[_Node, int]:
        cat = self.find_top_level(i + 1, end, lambda k: self.is_kw(k, "catch"))
        fin = self.find_top_level(i + 1, end, lambda k: self.is_kw(k, "finally"))
        body_end = min(x for x in (cat, fin, end) if x >= 0)
        children = self.parse_expr(i + 1, body_end)
        if cat >= 0:
            cat_end = fin if fin > cat else end
            children.append(_Node("Catch", self.parse_expr(cat + 1, cat_end)))
        if fin >= 0:
            children.append(_Node("Finally", self.parse_expr(fin + 1, end)))
        return _Node("Try", children), end

    # ---- definitions -------------------------------------------------------

    def parse_val_def(self, i: int, end: int, label: str) -> _Node:
        eq = self.find_top_level(i + 1, end, lambda k: self.is_op(k, "="))
        children: list[_Node] = []
        header_end = eq if eq >= 0 else end
        colon = self.find_top_level(i + 1, header_end, lambda k: self.is_op(k, ":"))
        if colon >= 0:
            children.append(_Node("TypeRef"))
        if eq >= 0:
            children.extend(self.parse_expr(eq + 1, end))
        return _Node(label, children)

    def parse_param_group(self, i: int) -> tuple[_Node, int]:
        close = self.match_end(i)
        params: list[_Node] = []
        for s, e in self._split_commas(i + 1, close - 1):
            pchildren: list[_Node] = []
            colon = self.find_top_level(s, e, lambda k: self.is_op(k, ":"))
            if colon >= 0:
                pchildren.append(_Node("TypeRef"))
                eq = self.find_top_level(colon, e, lambda k: self.is_op(k, "="))
            else:
                eq = self.find_top_level(s, e, lambda k: self.is_op(k, "="))
            if eq >= 0:
                pchildren.extend(self.parse_expr(eq + 1, e))
            params.append(_Node("Param", pchildren))
        return _Node("ParamList", params), close

    def parse_fun_def(self, i: int, end: int) -> _Node:
        children: list[_Node] = []
        j = i + 1
        if j < end and self.kind(j) in (TokenKind.IDENT, TokenKind.OP):
            j += 1  # the name carries no label
        while j < end and self.toks[j].kind == TokenKind.PUNCT and self.toks[j].text in "([":
            if self.text(j) == "[":
                children.append(_Node("TypeParams"))
                j = self.match_end(j)
            else:
                group, j = self.parse_param_group(j)
                children.append(group)
        if j < end and self.is_op(j, ":"):
            children.append(_Node("TypeRef"))
            j = self._skip_type(j + 1, end)
        if j < end and self.is_op(j, "="):
            children.extend(self.parse_expr(j + 1, end))
        elif j < end and self.is_punct(j, "{"):
            close = self.match_end(j)
            children.append(self.parse_block(j + 1, close - 1))
        return _Node("FunDef", children)


def _pre_order(node: _Node, out: list[str]) -> None:
    out.append(node.label)
    for child in node.children:
        _pre_order(child, out)


def ast_sequence(raw_body: str) -> list[str]:
    """Pre-order label sequence of the method's structural parse tree."""
    tokens = scan(strip_comments(raw_body))
    if not tokens:
        raise RepresentationError("empty method body")
    parser = _Parser(tokens)
    if tokens[0].kind == TokenKind.KEYWORD and tokens[0].text == "def":
        tree = parser.parse_fun_def(0, len(tokens))
    else:
        tree = _Node("FunDef", parser.parse_stmts(0, len(tokens)))
    out: list[str] = []
    _pre_order(tree, out)
    return out

"""Layout-only mutations: edits that add/remove comments or reshuffle
whitespace without touching the token stream. Used to test that such
changes never affect detection."""

from __future__ import annotations

import random

_NOISE = ("note", "fixme later", "reviewed", "see ticket", "tmp", "keep", "edge case")

_CODE = 0
_BLOCK_COMMENT = 1
_STRING = 2


def _line_boundary_states(text: str) -> list[int]:
    """State at the start of each line: code, inside a block comment, or
    inside a (triple-quoted) string literal."""
    states = [_CODE]
    depth = 0
    in_triple = False
    in_single = False
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            in_single = False  # single-line strings never cross a newline
            if in_triple:
                states.append(_STRING)
            elif depth > 0:
                states.append(_BLOCK_COMMENT)
            else:
                states.append(_CODE)
            i += 1
            continue
        if in_triple:
            if text.startswith('"""', i):
                in_triple = False
                i += 3
            else:
                i += 1
            continue
        if in_single:
            if c == "\\":
                i += 2
            elif c == '"':
                in_single = False
                i += 1
            else:
                i += 1
            continue
        if depth > 0:
            if text.startswith("/*", i):
                depth += 1
                i += 2
            elif text.startswith("*/", i):
                depth -= 1
                i += 2
            else:
                i += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("/*", i):
            depth += 1
            i += 2
            continue
        if text.startswith('"""', i):
            in_triple = True
            i += 3
            continue
        if c == '"':
            in_single = True
            i += 1
            continue
        i += 1
    return states


def type1_mutant(source: str, seed: int) -> str:
    """A comment/whitespace mutant of ``source`` with an identical token
    stream (normalization maps both to the same text)."""
    rng = random.Random(seed)
    lines = source.split("\n")
    states = _line_boundary_states(source)
    # states[k] is the state at the start of line k (0-based)
    out: list[str] = []
    for k, line in enumerate(lines):
        start_state = states[k] if k < len(states) else _CODE
        end_state = states[k + 1] if k + 1 < len(states) else _CODE
        if start_state != _STRING and rng.random() < 0.3:
            indent = len(line) - len(line.lstrip(" \t"))
            line = " " * rng.randint(0, max(8, indent + 4)) + line.lstrip(" \t")
        if end_state != _STRING and rng.random() < 0.3:
            line = line + "  // " + rng.choice(_NOISE)
        out.append(line)
        if end_state != _STRING:
            roll = rng.random()
            if roll < 0.15:
                out.append("")
            elif roll < 0.3:
                out.append("// " + rng.choice(_NOISE))
            elif roll < 0.4:
                out.append("/* " + rng.choice(_NOISE) + " */")
            elif roll < 0.45:
                out.append("/* outer /* nested " + rng.choice(_NOISE) + " */ */")
    return "\n".join(out)

"""Synthetic corpora: random token bags for detector stress tests and
generated Scala sources for extraction, mutation, and benchmark runs."""

from __future__ import annotations

import random

from .extractor import TokenBag

_WORDS = """account balance buffer cache client config cursor data delta
    entry event factor field filter flag frame graph handle index input item
    key label limit line link list lock map mark merge meta mode node offset
    option output owner page param parent patch path peer pivot plan point
    pool port prefix proxy query queue range rank rate record ref region
    result root route row scale schema scope seed segment service shard shape
    sink slot source span spec stack stage state stats status step store
    stream table tag task term text tick token total trace track tree unit
    user value vector view weight window worker zone""".split()


def _zipf_token(rng: random.Random, vocab_size: int) -> str:
    # heavy head, long tail; rank 0 is the most common token
    rank = min(int(rng.paretovariate(1.2)) - 1, vocab_size - 1)
    return f"t{rank}"


def random_bags(
    n: int,
    seed: int,
    vocab_size: int = 400,
    min_size: int = 5,
    max_size: int = 80,
    clone_fraction: float = 0.3,
) -> list[TokenBag]:
    """Random bags with planted near-duplicate clusters.

    A planted bag copies an earlier one and applies a few add/remove edits,
    so similarities concentrate around the interesting thresholds.
    """
    rng = random.Random(seed)
    bags: list[TokenBag] = []
    for i in range(n):
        if bags and rng.random() < clone_fraction:
            base = rng.choice(bags)
            entries = dict(base.entries)
            edits = rng.randint(0, max(1, base.size // 8))
            for _ in range(edits):
                if rng.random() < 0.5 and entries:
                    tok = rng.choice(sorted(entries))
                    entries[tok] -= 1
                    if entries[tok] == 0:
                        del entries[tok]
                else:
                    tok = _zipf_token(rng, vocab_size)
                    entries[tok] = entries.get(tok, 0) + 1
            if not entries:
                entries = {_zipf_token(rng, vocab_size): 1}
        else:
            size = rng.randint(min_size, max_size)
            entries = {}
            for _ in range(size):
                tok = _zipf_token(rng, vocab_size)
                entries[tok] = entries.get(tok, 0) + 1
        bags.append(
            TokenBag(method_id=f"m{i:05d}", entries=entries, size=sum(entries.values()))
        )
    return bags


def _fresh_name(rng: random.Random, prefix: str, used: set[str]) -> str:
    while True:
        name = prefix + rng.choice(_WORDS).capitalize() + str(rng.randint(0, 9999))
        if name not in used:
            used.add(name)
            return name


def synth_method(rng: random.Random, name: str, min_lines: int = 12) -> str:
    """One plausible Scala method with at least ``min_lines`` code lines."""
    p1 = rng.choice(_WORDS)
    p2 = rng.choice(_WORDS) + "Str"
    lines = [f"def {name}({p1}: Int, {p2}: String): Int = {{"]
    vars_in_scope = [p1]
    while len(lines) < min_lines - 1:
        v = f"v{len(lines)}"
        kind = rng.randrange(6)
        src = rng.choice(vars_in_scope)
        lit = rng.randint(1, 99)
        if kind == 0:
            lines.append(f"  val {v} = {src} + {lit}")
            vars_in_scope.append(v)
        elif kind == 1:
            lines.append(f"  val {v} = {p2}.length * {src}")
            vars_in_scope.append(v)
        elif kind == 2:
            lines.append(f"  if ({src} > {lit}) {{")
            lines.append(f'    println("{rng.choice(_WORDS)}")')
            lines.append("  }")
        elif kind == 3:
            lines.append(f"  var {v} = 0")
            lines.append(f"  for (i{lit} <- 0 until {src}) {{")
            lines.append(f"    {v} += i{lit} * {rng.randint(1, 9)}")
            lines.append("  }")
            vars_in_scope.append(v)
        elif kind == 4:
            lines.append(f"  val {v} = {src} match {{")
            lines.append(f"    case 0 => {lit}")
            lines.append(f"    case n{lit} if n{lit} > 0 => n{lit} + {src}")
            lines.append("    case _ => -1")
            lines.append("  }")
            vars_in_scope.append(v)
        else:
            lines.append(f"  val {v} = List({lit}, {lit + 1}, {lit + 2}).map(x => x * {src}).sum")
            vars_in_scope.append(v)
    lines.append(f"  {vars_in_scope[-1]}")
    lines.append("}")
    return "\n".join(lines)


def synth_corpus(
    n_methods: int,
    seed: int,
    methods_per_file: int = 10,
    clone_fraction: float = 0.1,
) -> dict[str, str]:
    """Corpus tree (path -> content). Some methods are near-copies of
    earlier ones (same body, new name) to plant detectable clones."""
    rng = random.Random(seed)
    used: set[str] = set()
    bodies: list[str] = []
    files: dict[str, str] = {}
    produced = 0
    file_no = 0
    while produced < n_methods:
        batch = min(methods_per_file, n_methods - produced)
        methods = []
        for _ in range(batch):
            name = _fresh_name(rng, "do", used)
            if bodies and rng.random() < clone_fraction:
                base = rng.choice(bodies)
                body = base.replace(base.split("(")[0], f"def {name}", 1)
            else:
                body = synth_method(rng, name, min_lines=rng.randint(11, 18))
                bodies.append(body)
            methods.append("  " + body.replace("\n", "\n  "))
        content = f"object Pack{file_no} {{\n" + "\n\n".join(methods) + "\n}\n"
        files[f"pack{file_no // 50}/Pack{file_no}.scala"] = content
        file_no += 1
        produced += batch
    return files


def write_corpus(files: dict[str, str], root) -> None:
    from pathlib import Path

    rootp = Path(root)
    for rel, content in files.items():
        path = rootp / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")

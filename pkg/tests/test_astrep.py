import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clonedet.astrep import RepresentationError, ast_sequence
from clonedet.extractor import SourceFile, extract_methods, extract_representation
from clonedet.lexer import count_effective_lines
from clonedet.synth import synth_corpus


def _methods(content, path="T.scala", min_lines=1):
    sf = SourceFile(path=path, content=content, loc=count_effective_lines(content))
    return extract_methods(sf, min_lines=min_lines)


LISTING_M1 = """def secondElementIfArray(x: Any) = x match {
  case Array(_, a, _*) => a
  case _ => "default"
}
"""


def test_listing_method_preorder_walk():
    # hand walk: def > params(param: type) > match(scrutinee, two cases)
    assert ast_sequence(LISTING_M1) == [
        "FunDef",
        "ParamList",
        "Param",
        "TypeRef",
        "Match",
        "Ident",
        "CaseClause",
        "PatExtract",
        "PatWildcard",
        "PatVar",
        "PatSeqWildcard",
        "Ident",
        "CaseClause",
        "PatWildcard",
        "Lit",
    ]


def test_first_label_is_function_definition():
    assert ast_sequence(LISTING_M1)[0] == "FunDef"


def test_type2_renaming_preserves_ast():
    original = "def f(count: Int): Int = {\n  val total = count + 10\n  if (total > 5) total else count\n}"
    renamed = "def g(items: Int): Int = {\n  val acc = items + 99\n  if (acc > 7) acc else items\n}"
    assert ast_sequence(original) == ast_sequence(renamed)


def test_literal_changes_preserve_ast():
    a = 'def f(x: Int) = x + 1 + "one"'
    b = 'def f(x: Int) = x + 2 + "two"'
    assert ast_sequence(a) == ast_sequence(b)


def test_statement_changes_change_ast():
    a = "def f(x: Int) = {\n  val y = x + 1\n  y\n}"
    b = "def f(x: Int) = {\n  val y = x + 1\n  val z = y * 2\n  z\n}"
    assert ast_sequence(a) != ast_sequence(b)


def test_control_constructs_labeled():
    body = (
        "def f(x: Int): Int = {\n"
        "  var acc = 0\n"
        "  for (i <- 0 until x) {\n"
        "    acc += i\n"
        "  }\n"
        "  while (acc > 10) {\n"
        "    acc -= 1\n"
        "  }\n"
        "  try {\n"
        "    acc / x\n"
        "  } catch {\n"
        "    case e: Exception => 0\n"
        "  } finally {\n"
        "    acc = 0\n"
        "  }\n"
        "}"
    )
    labels = ast_sequence(body)
    for expected in ("VarDef", "For", "While", "Try", "Catch", "Finally", "CaseClause"):
        assert expected in labels, f"{expected} missing from {labels}"


def test_lambda_and_blocks():
    labels = ast_sequence("def f(xs: List[Int]) = xs.map { x => x * 2 }")
    assert "Lambda" in labels


def test_nested_def_nested_in_tree():
    labels = ast_sequence("def outer(x: Int) = {\n  def inner(y: Int) = y + 1\n  inner(x)\n}")
    assert labels.count("FunDef") == 2


def test_unbalanced_body_raises():
    with pytest.raises(RepresentationError):
        ast_sequence("def f(x: Int) = { x + (1\n")


def test_type2_clone_pair_via_extractor():
    src_a = "object A {\n  def f(a: Int): Int = {\n    val b = a * 2\n    b + 1\n  }\n}"
    src_b = 'object B {\n  def g(z: Int): Int = {\n    val w = z * 9\n    w + 5\n  }\n}'
    (ma,) = _methods(src_a, "A.scala")
    (mb,) = _methods(src_b, "B.scala")
    ia = extract_representation(ma, "identifier")
    ib = extract_representation(mb, "identifier")
    assert len(ia.tokens) == len(ib.tokens)
    assert extract_representation(ma, "ast").tokens == extract_representation(mb, "ast").tokens


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_ast_total_on_synthetic_corpus(seed):
    files = synth_corpus(3, seed=seed, methods_per_file=3)
    for path, content in files.items():
        for m in _methods(content, path):
            labels = ast_sequence(m.raw_body)
            assert labels[0] == "FunDef"
            assert len(labels) >= 2

"""Six-candidate labeling service instance for frontend integration tests.

Usage: python3 fixture_server.py --port 8765 --labels /tmp/labels.jsonl
"""

import argparse

import uvicorn

from clonedet.evaluator import CandidatePair
from clonedet.extractor import Method
from clonedet.labelsvc import LabelSession, LabelStore, create_app


def _method(mid: str, name: str) -> Method:
    body = (
        f"def {name}(count: Int, label: String): Int = {{\n"
        f"  val scaled = count * 3\n"
        f"  if (scaled > 10) {{\n"
        f'    println(label)\n'
        f"  }}\n"
        f"  scaled + label.length\n"
        f"}}"
    )
    return Method(
        id=mid,
        file=f"src/{name}.scala",
        name=name,
        start_line=1,
        end_line=7,
        raw_body=body,
        normalized_body=body.replace("\n", " "),
        effective_lines=7,
    )


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, required=True)
    parser.add_argument("--labels", required=True)
    args = parser.parse_args()

    methods = {f"m{i}": _method(f"m{i}", f"method{i}") for i in range(12)}
    candidates = [
        CandidatePair(a=f"m{2 * i}", b=f"m{2 * i + 1}", filter_score=0.75 + i / 100)
        for i in range(6)
    ]
    store = LabelStore(args.labels)
    session = LabelSession(candidates, methods, store, seed=7)
    uvicorn.run(create_app(session), host="127.0.0.1", port=args.port, log_level="error")


if __name__ == "__main__":
    main()

"""
Documentation builder: math-to-code map from source annotations, file
format reference, a fixture walkthrough and the acceptance reproduction guide.

Every module declares ``__math__`` (concept -> operations) and
``__plumbing__`` (helpers with no mathematical content).  A public function
listed in neither fails the build.
"""

from __future__ import annotations

import importlib
import inspect
import os
import re
from importlib import resources
from typing import Dict, List, Optional, Tuple

MODULES = ("linalg", "channel", "conic", "entropy", "majorize", "factorize", "approx",
           "oracle", "cli")

OUT_OF_SCOPE = (
    ("characterization of injectivity by norm coincidence",
     "not implemented; at finite dimension it holds automatically and is only checked "
     "as the equality of lambda with the channel-pairing supremum"),
    ("infinite-dimensional algebra machinery (semifinite traces, weak* closures, "
     "convexity and closedness lemmas)", "not implemented"),
    ("tracial Hahn-Banach separation theorems",
     "not implemented; their finite-dimensional content is the witness extraction"),
    ("operator-space and Banach-space generalizations", "not implemented"),
)


class DocsError(RuntimeError):
    pass


def _public_functions(mod) -> List[str]:
    names = getattr(mod, "__all__", None)
    if names is None:
        names = [n for n in dir(mod) if not n.startswith("_")]
    out = []
    for n in names:
        obj = getattr(mod, n, None)
        if inspect.isfunction(obj) and obj.__module__ == mod.__name__:
            out.append(n)
    return out


def coverage() -> List[Tuple[str, str, str]]:
    """Rows (concept, module, operation) from the annotations.

    Raises DocsError if an annotated name does not exist or a public
    function is unannotated.
    """
    rows = []
    for name in MODULES:
        mod = importlib.import_module(f"qmaj.{name}")
        math = getattr(mod, "__math__", {})
        plumbing = set(getattr(mod, "__plumbing__", []))
        listed = set(plumbing)
        for concept, ops in math.items():
            for op in ops:
                if not callable(getattr(mod, op, None)):
                    raise DocsError(f"qmaj.{name}: annotated operation {op!r} does not exist")
                rows.append((concept, name, op))
                listed.add(op)
        missing = [f for f in _public_functions(mod) if f not in listed]
        if missing:
            raise DocsError(f"qmaj.{name}: unannotated public functions {missing}")
    return rows


def _table() -> str:
    rows = coverage()
    lines = ["| Concept | Code | Status |", "|---|---|---|"]
    grouped: Dict[str, List[str]] = {}
    for concept, mod, op in rows:
        grouped.setdefault(concept, []).append(f"`qmaj.{mod}.{op}`")
    for concept, ops in grouped.items():
        lines.append(f"| {concept} | {', '.join(ops)} | implemented |")
    for concept, status in OUT_OF_SCOPE:
        lines.append(f"| {concept} | none | {status} |")
    return "\n".join(lines)


def fixture_path(name: str) -> str:
    return str(resources.files("qmaj").joinpath("fixtures", name))


def walkthrough() -> Tuple[str, float]:
    from .cli import load_state, read_json
    from .entropy import hmin

    rho, dims = load_state(read_json(fixture_path("max_entangled_2.json")))
    res = hmin(rho, tuple(dims))
    text = (
        "## Fixture walkthrough\n\n"
        "The bundled fixture `max_entangled_2.json` holds the two-qubit maximally "
        "entangled state.\n\n"
        "```\n$ qmaj hmin max_entangled_2.json\n"
        f"H_min = {res.value_bits:.6f} bits\nlambda = {res.lam:.6f}\n```\n\n"
        "The optimal omega is the identity on B and the dual multiplier is twice "
        "the maximally entangled projector, so both programs certify lambda = 2.\n"
    )
    return text, res.value_bits


FORMATS = """## File formats

A matrix file is a JSON object

```
{"kind": "state" | "channel" | "operator",
 "dims": [d_A, d_B]  or  {"d_in": ..., "d_out": ...},
 "data": [[[re, im], ...], ...]}
```

Entries are decimal strings (written with 17 significant digits) or JSON
numbers.  A channel's `data` is its Choi matrix, input factor first.  A
family file is `{"kind": "family", "pairs": [{"rho": ..., "sigma": ...}, ...],
"weights": [...]}` with `weights` optional.

Certificates carry `format: "qmaj-certificate"`, the command, the verdict,
the margin and the objects needed to re-check the claim: a channel for
positive answers, a POVM with prepared states (or weights and states, a
separable ensemble, or a positive operator) for negative ones.
`qmaj verify` recomputes every number it checks.
"""

GUIDE = """## Reproducing the acceptance suite

```
pip install -e . --no-build-isolation
pytest tests/test_acceptance.py -s
```

Each of the ten criteria prints one `PASS` or `FAIL` line with its measured
value.  The determinism criterion runs `qmaj selftest --seed 42` twice in
subprocesses and compares the JSON bytes.  See the [format reference](#file-formats)
for the certificate layout used by the witness re-verification.
"""


def build_docs(out_dir: Optional[str] = None) -> Dict[str, str]:
    """Render the documents.  Writes them to ``out_dir`` when given."""
    walk, _ = walkthrough()
    index = "\n\n".join([
        "# qmaj reference",
        "Contents: [math-to-code map](#math-to-code-map), [file formats](#file-formats), "
        "[fixture walkthrough](#fixture-walkthrough), "
        "[acceptance guide](#reproducing-the-acceptance-suite).",
        "## Math-to-code map\n\n" + _table(),
        FORMATS.strip(),
        walk.strip(),
        GUIDE.strip(),
    ]) + "\n"
    docs = {"index.md": index}
    bad = check_links(docs)
    if bad:
        raise DocsError(f"broken links: {bad}")
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for name, text in docs.items():
            with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
                fh.write(text)
    return docs


def _slug(heading: str) -> str:
    s = heading.strip().lower()
    s = re.sub(r"[^\w\- ]", "", s)
    return s.replace(" ", "-")


def check_links(docs: Dict[str, str]) -> List[str]:
    """Return links whose target document or anchor does not exist."""
    anchors = {name: {_slug(h) for h in re.findall(r"^#+\s+(.*)$", text, re.M)}
               for name, text in docs.items()}
    bad = []
    for name, text in docs.items():
        for target in re.findall(r"\]\(([^)]+)\)", text):
            if re.match(r"^[a-z]+://", target):
                continue
            doc, _, anchor = target.partition("#")
            doc = doc or name
            if doc not in docs or (anchor and anchor not in anchors[doc]):
                bad.append(f"{name}: {target}")
    return bad


__math__: dict = {}
__plumbing__ = ["coverage", "fixture_path", "walkthrough", "build_docs", "check_links"]
__all__ = ["DocsError"] + __plumbing__

"""Text and JSON rendering of suite results."""

from __future__ import annotations

import json

from .residuals import FAIL, PASS, SKIP
from .runner import SuiteResult

FORMATS = ("text", "json")


def _num(x) -> str:
    return "-" if x is None else f"{x:.3e}"


def _text(result: SuiteResult) -> str:
    lines = [f"fixture: {result.name}", f"sample: {json.dumps(result.sample, sort_keys=True)}"]
    for key, report in sorted(result.reports.items()):
        rows = [(e.name, e.anchor, _num(e.max_residual), f"{e.tolerance:.0e}", e.status, e.note) for e in report.entries]
        w0 = max([len("identity")] + [len(r[0]) for r in rows])
        w1 = max([len("anchor")] + [len(r[1]) for r in rows])
        lines.append("")
        lines.append(f"[{key}] {report.title}")
        lines.append(f"  {'identity':<{w0}}  {'anchor':<{w1}}  {'max residual':>12}  {'tol':>6}  status")
        for name, anchor, res, tol, status, note in rows:
            tail = f"  {note}" if note else ""
            lines.append(f"  {name:<{w0}}  {anchor:<{w1}}  {res:>12}  {tol:>6}  {status}{tail}")
    if result.classification is not None:
        lines.append("")
        lines.append(f"classification: {result.classification.summary()}")
    if result.raw is not None:
        lines.append("")
        lines.append("raw tensor values:")
        for k, v in result.raw.items():
            lines.append(f"  {k} = {json.dumps(v)}")
    lines.append("")
    lines.append(summary(result))
    return "\n".join(lines) + "\n"


def summary(result: SuiteResult) -> str:
    entries = result.entries
    n_pass = sum(e.status == PASS for e in entries)
    n_fail = sum(e.status == FAIL for e in entries)
    n_skip = sum(e.status == SKIP for e in entries)
    skipped = f" ({n_skip} skipped)" if n_skip else ""
    if n_fail:
        return f"{n_fail} of {n_pass + n_fail} identities fail{skipped}"
    return f"all {n_pass} identities pass{skipped}"


def render_report(result: SuiteResult, fmt: str = "text") -> str:
    """Render as an aligned text table or as JSON with a stable key order."""
    if fmt == "json":
        doc = result.to_dict()
        doc["summary"] = summary(result)
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if fmt == "text":
        return _text(result)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")

"""Deterministic report serialization.

JSON documents are emitted with fixed field order and floats formatted at
17 significant digits, so identical runs produce byte-identical files.
Writes are atomic: temp file in the target directory, then rename.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Sequence

import numpy as np

from .derivative import DerivativeReport
from .errors import ConfigError, NonFinite
from .validation import StructureSuiteResult

__all__ = [
    "comparison_record", "suite_record", "summary_record", "report_document",
    "dumps_canonical", "write_json", "write_text",
    "comparisons_csv", "suites_csv", "plot_csv", "load_report",
]


def _num(x) -> float:
    x = float(x)
    if not np.isfinite(x):
        raise NonFinite("report value is not finite")
    return x


def comparison_record(rep: DerivativeReport, include_trace: bool = True) -> dict:
    rec = {
        "functional": rep.functional,
        "manifold": rep.manifold,
        "field": rep.field,
        "fd_value": _num(rep.fd_value),
        "fd_error_estimate": _num(rep.fd_error_estimate),
        "analytic_value": _num(rep.analytic_value),
        "abs_diff": _num(rep.abs_diff),
        "rel_diff": _num(rep.rel_diff),
        "verdict": rep.verdict,
    }
    if include_trace and rep.trace is not None:
        rec["trace"] = {
            "ts": [_num(t) for t in rep.trace.ts],
            "quotients": [_num(q) for q in rep.trace.quotients],
            "extrapolants": [_num(e) for e in rep.trace.extrapolants],
        }
    return rec


def suite_record(res: StructureSuiteResult) -> dict:
    return {
        "suite": res.suite,
        "passed": res.passed,
        "cases": [
            {
                "description": c.description,
                "measured": _num(c.measured),
                "bound": _num(c.bound),
                "passed": c.passed,
            }
            for c in res.cases
        ],
    }


def summary_record(comparisons: Sequence[dict], suites: Sequence[dict]) -> dict:
    cases = [c for s in suites for c in s["cases"]]
    return {
        "comparisons": len(comparisons),
        "comparison_failures": sum(1 for c in comparisons
                                   if c["verdict"] != "pass"),
        "max_comparison_rel_diff": max(
            (c["rel_diff"] for c in comparisons), default=0.0),
        "max_comparison_abs_diff": max(
            (c["abs_diff"] for c in comparisons), default=0.0),
        "suite_cases": len(cases),
        "suite_case_failures": sum(1 for c in cases if not c["passed"]),
        "passed": (all(c["verdict"] == "pass" for c in comparisons)
                   and all(c["passed"] for c in cases)),
    }


def report_document(comparisons: Sequence[dict], suites: Sequence[dict]) -> dict:
    return {
        "schema": "shapecalc-report/1",
        "comparisons": list(comparisons),
        "suites": list(suites),
        "summary": summary_record(comparisons, suites),
    }


# ---------------------------------------------------------------------------
# canonical JSON


def _render(obj, out: list, indent: int):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}  {json.dumps(str(k))}: ")
            _render(v, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad + "  ")
            _render(v, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format(_num(obj), ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj) -> str:
    """Pretty JSON with insertion-ordered keys and .17g floats."""
    out: list[str] = []
    _render(obj, out, 0)
    out.append("\n")
    return "".join(out)


def write_text(path: str, text: str):
    """Atomic write: temp file alongside the target, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, doc: dict):
    write_text(path, dumps_canonical(doc))


# ---------------------------------------------------------------------------
# CSV mirrors


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v
                    for v in row])
    return buf.getvalue()


def comparisons_csv(comparisons: Sequence[dict]) -> str:
    rows = [[c["functional"], c["manifold"], c["field"], c["fd_value"],
             c["fd_error_estimate"], c["analytic_value"], c["abs_diff"],
             c["rel_diff"], c["verdict"]] for c in comparisons]
    return _csv_text(["functional", "manifold", "field", "fd_value",
                      "fd_error_estimate", "analytic_value", "abs_diff",
                      "rel_diff", "verdict"], rows)


def suites_csv(suites: Sequence[dict]) -> str:
    rows = [[s["suite"], c["description"], c["measured"], c["bound"],
             "pass" if c["passed"] else "fail"]
            for s in suites for c in s["cases"]]
    return _csv_text(["suite", "description", "measured", "bound", "status"],
                     rows)


def plot_csv(doc: dict) -> str:
    """One row per FD level per comparison: the quotient series and its
    Richardson extrapolant, for external convergence plots."""
    if not isinstance(doc, dict) or "comparisons" not in doc:
        raise ConfigError("report has no 'comparisons' section")
    rows = []
    for c in doc["comparisons"]:
        tr = c.get("trace")
        if tr is None:
            continue
        try:
            series = zip(tr["ts"], tr["quotients"], tr["extrapolants"],
                         strict=True)
            for lvl, (t, q, e) in enumerate(series):
                rows.append([c["functional"], c["manifold"], c["field"],
                             lvl, float(t), float(q), float(e)])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed trace in report: {exc}") from exc
    return _csv_text(["functional", "manifold", "field", "level", "t",
                      "quotient", "extrapolant"], rows)


def load_report(path: str) -> dict:
    try:
        with open(path, "r") as f:
            doc = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read report '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"report '{path}' is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"report '{path}': top level must be an object")
    return doc

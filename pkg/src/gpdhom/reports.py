"""Deterministic rendering of report objects.

Anything with a to_json method serializes as stable JSON (sorted keys,
fixed indentation); anything with describe renders as text.  Plain
dicts and lists pass through unchanged, so ad hoc documents and the
empty report work too.
"""

import json


def report_document(report):
    """The JSON-ready document behind a report object."""
    if hasattr(report, "to_json"):
        return report.to_json()
    return report


def render_report(report, format="json"):
    """Stable bytes for a report; identical input gives identical output."""
    if format == "json":
        doc = report_document(report)
        text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)
        return (text + "\n").encode("utf-8")
    if format == "text":
        if hasattr(report, "describe"):
            return (report.describe() + "\n").encode("utf-8")
        doc = report_document(report)
        text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)
        return (text + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")

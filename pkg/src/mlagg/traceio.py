"""Text form of simulation traces and field-by-field golden comparison.

A trace file starts with a ``vertices:`` line fixing the column order of
the per-vertex rows, followed by one block per transmission::

    vertices: 0 1 2
    [transmission 1]
    t: 1
    VE: {0,2}
    ell: 1 4 1
    next: 3 inf inf
    I: {1} {} {}

Blocks may list any subset of the fields in ``FIELDS``; a golden file only
pins down what it lists.  Lines starting with ``#`` are ignored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .engine import INF, TraceRecord
from .model import format_fraction

FIELDS = ("t", "critical", "VE", "VI", "T", "A", "Abar", "served", "cost", "abar_cost", "ell", "next", "I")
TABLE_FIELDS = ("ell", "next", "I")

_HEADER = re.compile(r"^\[transmission (\d+)\]$")


class TraceFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def fmt_set(s) -> str:
    return "{" + ",".join(str(v) for v in sorted(s)) + "}"


def fmt_value(x) -> str:
    return "inf" if x == INF else format_fraction(x)


def record_fields(rec: TraceRecord, vertices) -> dict[str, str]:
    return {
        "t": fmt_value(rec.time),
        "critical": str(rec.critical),
        "VE": fmt_set(rec.VE),
        "VI": fmt_set(rec.VI),
        "T": fmt_set(rec.VE | rec.VI),
        "A": fmt_set(rec.anticipated),
        "Abar": fmt_set(rec.unanticipated),
        "served": fmt_set(rec.served),
        "cost": fmt_value(rec.cost),
        "abar_cost": fmt_value(rec.unanticipated_cost),
        "ell": " ".join(fmt_value(rec.ell[v]) for v in vertices),
        "next": " ".join(fmt_value(rec.next[v]) for v in vertices),
        "I": " ".join(fmt_set(rec.invest[v]) for v in vertices),
    }


@dataclass
class TraceDoc:
    vertices: list[int]
    blocks: list[dict[str, str]] = field(default_factory=list)

    def render(self) -> str:
        lines = ["vertices: " + " ".join(str(v) for v in self.vertices)]
        for k, block in enumerate(self.blocks, 1):
            lines.append(f"[transmission {k}]")
            lines += [f"{name}: {block[name]}" for name in FIELDS if name in block]
        return "\n".join(lines) + "\n"


def trace_doc(trace: list[TraceRecord], vertices, fields=FIELDS) -> TraceDoc:
    vertices = list(vertices)
    doc = TraceDoc(vertices)
    for rec in trace:
        full = record_fields(rec, vertices)
        doc.blocks.append({name: full[name] for name in fields})
    return doc


def render_trace(trace: list[TraceRecord], vertices, fields=FIELDS) -> str:
    return trace_doc(trace, vertices, fields).render()


def parse_trace(text: str) -> TraceDoc:
    doc: TraceDoc | None = None
    block: dict[str, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if doc is None:
            if not line.startswith("vertices:"):
                raise TraceFormatError("expected a 'vertices:' line first", lineno)
            try:
                doc = TraceDoc([int(tok) for tok in line[len("vertices:"):].split()])
            except ValueError:
                raise TraceFormatError("vertex ids must be integers", lineno) from None
            continue
        m = _HEADER.match(line)
        if m:
            if int(m.group(1)) != len(doc.blocks) + 1:
                raise TraceFormatError(f"expected transmission {len(doc.blocks) + 1}", lineno)
            block = {}
            doc.blocks.append(block)
            continue
        if block is None:
            raise TraceFormatError("field outside a transmission block", lineno)
        name, sep, value = line.partition(":")
        name = name.strip()
        if not sep or name not in FIELDS:
            raise TraceFormatError(f"unknown field {name!r}", lineno)
        if name in block:
            raise TraceFormatError(f"duplicate field {name!r}", lineno)
        value = value.strip()
        if name in TABLE_FIELDS and len(value.split()) != len(doc.vertices):
            raise TraceFormatError(f"{name} row needs {len(doc.vertices)} entries", lineno)
        block[name] = value
    if doc is None:
        raise TraceFormatError("empty trace", 1)
    return doc


@dataclass(frozen=True)
class Mismatch:
    transmission: int | None
    field: str
    expected: str
    actual: str

    def __str__(self) -> str:
        where = "trace" if self.transmission is None else f"transmission {self.transmission}"
        return f"{where} {self.field}: expected {self.expected} got {self.actual}"


@dataclass
class ReplayVerdict:
    mismatches: list[Mismatch]
    expected_text: str
    actual_text: str

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.expected_text == self.actual_text


def compare_traces(golden: TraceDoc, actual: TraceDoc) -> list[Mismatch]:
    """Field-by-field differences; table rows are compared per vertex."""
    out = []
    if golden.vertices != actual.vertices:
        out.append(Mismatch(None, "vertices", str(golden.vertices), str(actual.vertices)))
    if len(golden.blocks) != len(actual.blocks):
        out.append(Mismatch(None, "transmissions", str(len(golden.blocks)), str(len(actual.blocks))))
    for k, (g, a) in enumerate(zip(golden.blocks, actual.blocks), 1):
        for name in FIELDS:
            if name not in g:
                continue
            got = a.get(name, "<missing>")
            if g[name] == got:
                continue
            if name in TABLE_FIELDS and got != "<missing>":
                for v, ge, ae in zip(golden.vertices, g[name].split(), got.split()):
                    if ge != ae:
                        out.append(Mismatch(k, f"{name}[{v}]", ge, ae))
            else:
                out.append(Mismatch(k, name, g[name], got))
    return out


def replay_against(golden_text: str, trace: list[TraceRecord]) -> ReplayVerdict:
    """Render ``trace`` restricted to the golden's vertices and fields and diff."""
    golden = parse_trace(golden_text)
    fields = [name for name in FIELDS if any(name in b for b in golden.blocks)]
    actual = trace_doc(trace, golden.vertices, fields)
    # restrict each block to what the golden pins down at that position
    for k, block in enumerate(actual.blocks):
        if k < len(golden.blocks):
            for name in list(block):
                if name not in golden.blocks[k]:
                    del block[name]
    return ReplayVerdict(compare_traces(golden, actual), golden.render(), actual.render())

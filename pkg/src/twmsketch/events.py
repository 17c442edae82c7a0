"""Interaction stream parsing, validation, normalization and batching.

The wire format is header-less CSV, one undirected timestamped link per
line: ``u,v,t``.  Lines starting with ``#`` are comments.  Timestamps must
be non-decreasing in file order; self-loops are rejected.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from itertools import groupby

from .errors import (
    MalformedRecord,
    NonMonotonicTimestamp,
    OriginTooLarge,
    SelfLoop,
)


@dataclass(frozen=True)
class InteractionEvent:
    """One undirected link (u, v) at time t.  u != v, t finite and >= 0."""

    u: int
    v: int
    t: float

    def touches(self, node: int) -> bool:
        return node == self.u or node == self.v


@dataclass(frozen=True)
class EventBatch:
    """A non-empty run of events that share one timestamp."""

    t: float
    events: tuple[InteractionEvent, ...]

    def __len__(self) -> int:
        return len(self.events)


def _iter_lines(source):
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, io.RawIOBase) or isinstance(source, io.BufferedIOBase):
        return io.TextIOWrapper(source, encoding="utf-8")
    if hasattr(source, "read"):
        probe = source.read(0)
        if isinstance(probe, bytes):
            return io.TextIOWrapper(source, encoding="utf-8")
        return source
    return source  # assume iterable of text lines


def parse_stream(source) -> list[InteractionEvent]:
    """Parse a CSV byte/text stream into a chronological event list.

    Node ids are preserved verbatim (no compaction).  Raises
    MalformedRecord, NonMonotonicTimestamp or SelfLoop with the offending
    line number.
    """
    events: list[InteractionEvent] = []
    t_prev = None
    for line_no, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise MalformedRecord(line_no, line, "expected 3 comma-separated fields")
        try:
            u = int(parts[0])
            v = int(parts[1])
            t = float(parts[2])
        except ValueError as exc:
            raise MalformedRecord(line_no, line, str(exc)) from exc
        if u < 0 or v < 0:
            raise MalformedRecord(line_no, line, "negative node id")
        if not math.isfinite(t) or t < 0:
            raise MalformedRecord(line_no, line, f"bad timestamp {t}")
        if u == v:
            raise SelfLoop(line_no, u)
        if t_prev is not None and t < t_prev:
            raise NonMonotonicTimestamp(line_no, t, t_prev)
        t_prev = t
        events.append(InteractionEvent(u, v, t))
    return events


def serialize_stream(events) -> str:
    """Inverse of parse_stream: render events back to the CSV wire format."""
    return "".join(f"{e.u},{e.v},{e.t!r}\n" for e in events)


def batch_by_timestamp(events) -> list[EventBatch]:
    """Group consecutive equal-timestamp runs into batches.

    Timestamp equality is exact (bitwise after float parsing).  The
    concatenation of the returned batches reproduces the input order.
    """
    return [
        EventBatch(t=t, events=tuple(run))
        for t, run in groupby(events, key=lambda e: e.t)
    ]


def normalize_times(events, t_origin: float) -> list[InteractionEvent]:
    """Shift all timestamps by -t_origin.  Guards exp overflow downstream."""
    if events and t_origin > events[0].t:
        raise OriginTooLarge(
            f"t_origin {t_origin} exceeds first event timestamp {events[0].t}"
        )
    return [InteractionEvent(e.u, e.v, e.t - t_origin) for e in events]


def max_node_id(events) -> int:
    """Largest node id in the stream, or -1 if empty."""
    return max((max(e.u, e.v) for e in events), default=-1)

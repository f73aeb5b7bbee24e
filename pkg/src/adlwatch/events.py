"""Canonical event/timestamp model and event-log / annotation file I/O.

Ticks are gateway arrival indices and form the canonical time axis: within a
log they are unique and strictly increasing. Wallclock datetimes (1 s
resolution) ride along as metadata for duration- and deadline-style rules.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Optional, Sequence

from .errors import OrderViolationError, ParseError, UniquenessError, VocabularyError

SECONDS_PER_TICK_DEFAULT = 30


@dataclass(frozen=True, order=True)
class Timestamp:
    tick: int
    wallclock: Optional[datetime] = field(default=None, compare=False)

    def __post_init__(self):
        if self.tick < 0:
            raise OrderViolationError(f"negative tick {self.tick}")


@dataclass(frozen=True)
class Event:
    timestamp: Timestamp
    sensor_id: str
    kind: str
    value: Optional[float] = None

    @property
    def tick(self) -> int:
        return self.timestamp.tick


@dataclass(frozen=True)
class EventLog:
    day_id: str
    events: tuple[Event, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        last_tick = None
        last_wc = None
        for ev in self.events:
            if last_tick is not None:
                if ev.tick == last_tick:
                    raise UniquenessError(
                        f"{self.day_id}: duplicate tick {ev.tick}"
                    )
                if ev.tick < last_tick:
                    raise OrderViolationError(
                        f"{self.day_id}: tick {ev.tick} after {last_tick}"
                    )
            wc = ev.timestamp.wallclock
            if wc is not None and last_wc is not None and wc < last_wc:
                raise OrderViolationError(
                    f"{self.day_id}: wallclock decreases at tick {ev.tick}"
                )
            last_tick = ev.tick
            if wc is not None:
                last_wc = wc

    def ticks(self) -> list[int]:
        return [ev.tick for ev in self.events]

    def clock(self, seconds_per_tick: int = SECONDS_PER_TICK_DEFAULT) -> dict[int, float]:
        """Map each tick to seconds since midnight (wallclock when present,
        tick * seconds_per_tick otherwise)."""
        out = {}
        for ev in self.events:
            wc = ev.timestamp.wallclock
            if wc is not None:
                out[ev.tick] = (
                    wc.hour * 3600 + wc.minute * 60 + wc.second
                    + (wc.toordinal() - self._day_ordinal()) * 86400
                )
            else:
                out[ev.tick] = float(ev.tick * seconds_per_tick)
        return out

    def _day_ordinal(self) -> int:
        for ev in self.events:
            if ev.timestamp.wallclock is not None:
                return ev.timestamp.wallclock.toordinal()
        return 0

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class Annotation:
    """Gold labels for one subject-day: activity intervals plus anomalies.

    activity_intervals entries are (activity, start_tick, end_tick);
    anomalies entries are (code, object, tick-or-None).
    """

    day_id: str
    activity_intervals: tuple[tuple[str, int, int], ...]
    anomalies: tuple[tuple[str, str, Optional[int]], ...]

    def __post_init__(self):
        object.__setattr__(self, "activity_intervals", tuple(self.activity_intervals))
        object.__setattr__(self, "anomalies", tuple(self.anomalies))
        for act, start, end in self.activity_intervals:
            if start >= end:
                raise OrderViolationError(
                    f"{self.day_id}: interval for {act} has start {start} >= end {end}"
                )


def ingest_log(
    raw_records: Iterable[tuple],
    vocabulary: Iterable[str],
    day_id: str = "day0",
) -> EventLog:
    """Turn raw records into an EventLog with ticks 0,1,2,... in arrival order.

    Records are (sensor_id, kind) optionally followed by value and wallclock.
    Unknown kinds raise VocabularyError.
    """
    vocab = frozenset(vocabulary)
    events = []
    for i, rec in enumerate(raw_records):
        sensor_id, kind = rec[0], rec[1]
        value = rec[2] if len(rec) > 2 else None
        wallclock = rec[3] if len(rec) > 3 else None
        if kind not in vocab:
            raise VocabularyError(f"unknown event kind {kind!r} (record {i})")
        events.append(Event(Timestamp(i, wallclock), sensor_id, kind, value))
    return EventLog(day_id, tuple(events))


def _format_value(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return repr(value)


def save_log(log: EventLog, path) -> None:
    lines = [f"D;{log.day_id}"]
    for ev in log.events:
        wc = "-" if ev.timestamp.wallclock is None else ev.timestamp.wallclock.isoformat()
        lines.append(
            f"{ev.tick};{wc};{ev.sensor_id};{ev.kind};{_format_value(ev.value)}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_log(path) -> EventLog:
    day_id = None
    events = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("D;"):
                day_id = line[2:]
                continue
            parts = line.split(";")
            if len(parts) != 5:
                raise ParseError(f"expected 5 ';'-fields, got {len(parts)}", line=lineno)
            try:
                tick = int(parts[0])
                wc = None if parts[1] == "-" else datetime.fromisoformat(parts[1])
                value = None if parts[4] == "-" else float(parts[4])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            events.append(Event(Timestamp(tick, wc), parts[2], parts[3], value))
    if day_id is None:
        raise ParseError(f"{path}: missing 'D;<day_id>' header")
    return EventLog(day_id, tuple(events))


def save_annotation(ann: Annotation, path) -> None:
    lines = [f"D;{ann.day_id}"]
    for act, start, end in ann.activity_intervals:
        lines.append(f"A;{act};{start};{end}")
    for code, obj, tick in ann.anomalies:
        lines.append(f"X;{code};{obj};{'-' if tick is None else tick}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_annotation(path, activities: Optional[Sequence[str]] = None) -> Annotation:
    day_id = None
    intervals = []
    anomalies = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tag, _, rest = line.partition(";")
            parts = rest.split(";")
            try:
                if tag == "D":
                    day_id = rest
                elif tag == "A":
                    act, start, end = parts[0], int(parts[1]), int(parts[2])
                    if activities is not None and act not in activities:
                        raise VocabularyError(f"unknown activity label {act!r}")
                    intervals.append((act, start, end))
                elif tag == "X":
                    code, obj, tick = parts[0], parts[1], parts[2]
                    anomalies.append((code, obj, None if tick == "-" else int(tick)))
                else:
                    raise ParseError(f"unknown record tag {tag!r}", line=lineno)
            except (ValueError, IndexError) as exc:
                raise ParseError(str(exc), line=lineno) from None
    if day_id is None:
        raise ParseError(f"{path}: missing 'D;<day_id>' header")
    return Annotation(day_id, tuple(intervals), tuple(anomalies))

"""Semantic integration layer: threshold/combination rules that turn raw
sensor readings into vocabulary events.

Rule file format, one rule per line:

    RULE id: IF sensor cmp value [AND sensor cmp value ...] WITHIN w EMIT kind DEBOUNCE d
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ConfigError, ParseError
from .events import Event, EventLog, Timestamp

_CMP = {
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


@dataclass(frozen=True)
class Guard:
    sensor_id: str
    cmp: str
    threshold: float
    spatial_tag: Optional[str] = None

    def holds(self, value: float) -> bool:
        return _CMP[self.cmp](value, self.threshold)


@dataclass(frozen=True)
class IntegrationRule:
    id: str
    guards: tuple[Guard, ...]
    emitted_kind: str
    window: int = 2      # guards see the latest reading per sensor at most this old
    debounce: int = 0    # min raw ticks between emissions of the same kind

    def __post_init__(self):
        for g in self.guards:
            if not math.isfinite(g.threshold):
                raise ConfigError(f"rule {self.id}: non-finite threshold")


_RULE_RE = re.compile(
    r"RULE\s+(?P<id>\w+)\s*:\s*IF\s+(?P<guards>.+?)\s+WITHIN\s+(?P<w>\d+)"
    r"\s+EMIT\s+(?P<kind>\w+)\s+DEBOUNCE\s+(?P<d>\d+)\s*$"
)
_GUARD_RE = re.compile(r"(\w+)\s*(>=|<=|==|!=|>|<)\s*(-?\d+(?:\.\d+)?)")


def parse_rules(text: str, vocabulary: Iterable[str]) -> list[IntegrationRule]:
    vocab = frozenset(vocabulary)
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        m = _RULE_RE.match(line)
        if not m:
            raise ParseError("malformed integration rule", line=lineno)
        guards = []
        for chunk in m.group("guards").split(" AND "):
            gm = _GUARD_RE.fullmatch(chunk.strip())
            if not gm:
                raise ParseError(f"malformed guard {chunk!r}", line=lineno)
            guards.append(Guard(gm.group(1), gm.group(2), float(gm.group(3))))
        kind = m.group("kind")
        if kind not in vocab:
            raise ConfigError(f"rule {m.group('id')}: emitted kind {kind!r} not in vocabulary")
        rules.append(IntegrationRule(m.group("id"), tuple(guards), kind,
                                     int(m.group("w")), int(m.group("d"))))
    return rules


def integrate(
    raw_stream: Sequence[tuple],
    rules: Sequence[IntegrationRule],
    known_sensors: Optional[Iterable[str]] = None,
    day_id: str = "day0",
) -> EventLog:
    """Replay raw readings through the rules and emit vocabulary events.

    Readings are (sensor_id, value) optionally followed by a wallclock
    datetime; their position is the raw arrival tick. A rule fires when the
    current reading satisfies one of its guards and every other guard is
    satisfied by that sensor's latest reading at most `window-1` ticks old.
    Emitted events get fresh ticks 0,1,2,... in emission order; debounce is
    measured on raw arrival ticks per emitted kind.
    """
    if known_sensors is not None:
        known = frozenset(known_sensors)
        for rule in rules:
            for g in rule.guards:
                if g.sensor_id not in known:
                    raise ConfigError(
                        f"rule {rule.id}: unknown sensor {g.sensor_id!r}"
                    )
    latest: dict[str, tuple[int, float]] = {}
    last_emit: dict[str, int] = {}
    events = []
    for raw_tick, reading in enumerate(raw_stream):
        sensor_id, value = reading[0], reading[1]
        wallclock = reading[2] if len(reading) > 2 else None
        latest[sensor_id] = (raw_tick, value)
        for rule in rules:
            if not any(g.sensor_id == sensor_id for g in rule.guards):
                continue
            ok = True
            for g in rule.guards:
                seen = latest.get(g.sensor_id)
                if seen is None or raw_tick - seen[0] > rule.window - 1 or not g.holds(seen[1]):
                    ok = False
                    break
            if not ok:
                continue
            prev = last_emit.get(rule.emitted_kind)
            if prev is not None and raw_tick - prev < rule.debounce:
                continue
            last_emit[rule.emitted_kind] = raw_tick
            events.append(
                Event(Timestamp(len(events), wallclock), sensor_id, rule.emitted_kind, value)
            )
    return EventLog(day_id, tuple(events))

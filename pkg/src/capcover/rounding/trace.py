"""Pipeline trace events and their line-per-event text form."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..field import format_factor, format_rational, parse_factor

_KINDS = ("init", "absorb", "drop", "open", "capacity", "select", "oprime", "dropped", "summary")


@dataclass
class Event:
    kind: str
    fields: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.fields[key]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return ",".join(f"{k}:{_fmt(v)}" for k, v in value.items()) or "-"
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value) or "-"
    if hasattr(value, "a") and hasattr(value, "b"):
        return format_factor(value)
    return str(value)


def format_event(ev: Event) -> str:
    return " ".join([ev.kind] + [f"{k}={_fmt(v)}" for k, v in ev.fields.items()])


def format_trace(events) -> str:
    return "".join(format_event(ev) + "\n" for ev in events)


# field name -> parser for the trace text format
def _rat(s):
    return Fraction(s)


def _int(s):
    return int(s)


def _ints(s):
    return [] if s == "-" else [int(t) for t in s.split(",")]


def _int_rat_map(s):
    if s == "-":
        return {}
    out = {}
    for item in s.split(","):
        k, v = item.split(":")
        out[int(k)] = Fraction(v)
    return out


def _factors(s):
    return [] if s == "-" else [parse_factor(t) for t in s.split(",")]


_PARSERS = {
    "heavy": _ints,
    "light": _ints,
    "ybar": _int_rat_map,
    "flow": _rat,
    "k": _rat,
    "F": _rat,
    "case": str,
    "from": _int_rat_map,
    "after": _int,
    "ac": _int_rat_map,
    "cluster": _int,
    "balls": _ints,
    "factors": _factors,
    "ball": _int,
    "group": _ints,
    "point": _int,
    "H1": _int,
    "O": _int,
    "Oprime": _int,
    "selected": _int,
    "cost": _int,
    "alpha": _rat,
}

# singular ids in these events
_SCALAR = {("absorb", "heavy"), ("absorb", "light"), ("drop", "light"), ("open", "light")}


def parse_trace(text: str) -> list:
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split(" ")
        kind = parts[0]
        if kind not in _KINDS:
            raise ValueError(f"trace line {lineno}: unknown event {kind!r}")
        fields = {}
        for tok in parts[1:]:
            key, sep, raw = tok.partition("=")
            if not sep or key not in _PARSERS:
                raise ValueError(f"trace line {lineno}: bad field {tok!r}")
            if (kind, key) in _SCALAR:
                fields[key] = int(raw)
            else:
                fields[key] = _PARSERS[key](raw)
        events.append(Event(kind, fields))
    return events

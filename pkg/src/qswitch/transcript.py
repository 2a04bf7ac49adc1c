"""Protocol transcripts and their line-delimited serialization.

One event per line.  The ``text`` format is tab separated::

    seq  step  actor  action  payload-json

and the ``json`` format writes one JSON object per line.  The last line is a
``summary`` record holding the outcome, abort step, fidelities and results.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Mapping

SUCCESS = "success"
ABORT = "abort"


def _clean(value):
    """JSON-friendly, deterministic version of a payload value."""
    if isinstance(value, Mapping):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return float(repr(value))
    if hasattr(value, "label"):
        return value.label
    if hasattr(value, "value") and not isinstance(value, (int, float, str, bool)):
        return value.value
    return value


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class Event:
    seq: int
    step: str
    actor: str
    action: str
    payload: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"seq": self.seq, "step": self.step, "actor": self.actor,
                "action": self.action, "payload": _clean(dict(self.payload))}


@dataclass(frozen=True)
class ProtocolTranscript:
    events: tuple
    outcome: str
    abort_step: str | None
    fidelities: Mapping[str, float]
    results: Mapping[str, Any]

    @property
    def ok(self) -> bool:
        return self.outcome == SUCCESS

    def find(self, action: str | None = None, actor: str | None = None,
             step: str | None = None) -> list:
        return [e for e in self.events
                if (action is None or e.action == action)
                and (actor is None or e.actor == actor)
                and (step is None or e.step == step)]

    def summary(self) -> dict:
        return {"outcome": self.outcome, "abort_step": self.abort_step,
                "fidelities": dict(self.fidelities), "results": dict(self.results)}

    def to_lines(self, fmt: str = "text") -> list:
        if fmt == "json":
            lines = [dumps(e.to_dict()) for e in self.events]
            lines.append(dumps({"summary": self.summary()}))
            return lines
        if fmt != "text":
            raise ValueError(f"unknown transcript format {fmt!r}")
        lines = [f"{e.seq}\t{e.step}\t{e.actor}\t{e.action}\t{dumps(e.payload)}"
                 for e in self.events]
        lines.append(f"{len(self.events)}\tEND\t-\tsummary\t{dumps(self.summary())}")
        return lines

    def serialize(self, fmt: str = "text") -> str:
        return "\n".join(self.to_lines(fmt)) + "\n"


def parse_text(text: str) -> list:
    """Inverse of the ``text`` format: a list of event dicts (summary last)."""
    rows = []
    for line in text.splitlines():
        if not line:
            continue
        seq, step, actor, action, payload = line.split("\t", 4)
        rows.append({"seq": int(seq), "step": step, "actor": actor, "action": action,
                     "payload": json.loads(payload)})
    return rows


class Transcript:
    """Mutable builder used while a protocol runs."""

    def __init__(self):
        self.events: list = []
        self.fidelities: dict = {}
        self.results: dict = {}
        self.outcome = SUCCESS
        self.abort_step = None

    def add(self, step: str, actor: str, action: str, payload: Mapping | None = None) -> Event:
        if self.outcome == ABORT:
            raise RuntimeError("transcript already aborted")
        event = Event(len(self.events), step, actor, action,
                      MappingProxyType(dict(payload or {})))
        self.events.append(event)
        return event

    def extend(self, other: ProtocolTranscript, prefix: str = "") -> None:
        for e in other.events:
            self.add(prefix + e.step, e.actor, e.action, e.payload)

    def abort(self, step: str, actor: str, reason: str, payload: Mapping | None = None) -> None:
        self.add(step, actor, "abort", {"reason": reason, **(payload or {})})
        self.outcome = ABORT
        self.abort_step = step

    def finish(self) -> ProtocolTranscript:
        results = {} if self.outcome == ABORT else self.results
        fidelities = {} if self.outcome == ABORT else self.fidelities
        return ProtocolTranscript(tuple(self.events), self.outcome, self.abort_step,
                                  MappingProxyType(dict(fidelities)),
                                  MappingProxyType(dict(results)))

"""Scenario scripts: timed event lists in JSON-lines form.

Each line is one object: ``{"t": seconds, "event": name, ...args}``.
Times must be non-decreasing.  Operator-side events (``set_emotion``,
``set_au``, ``set_neck``, ``set_eyes``) steer the head; environment
events (``play_tone``, ``move_object``) place stimuli around the
avatar.  Every event is validated against the module that will consume
it at load time, so a broken script fails before a run starts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

from ..expression import EMOTIONS, validate_au_frame
from ..perception import position_azimuth

OPERATOR_EVENTS = frozenset({"set_emotion", "set_au", "set_neck", "set_eyes"})
ENVIRONMENT_EVENTS = frozenset({"play_tone", "move_object"})


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioEvent:
    t: float
    kind: str
    params: dict[str, Any] = field(default_factory=dict)


def _validate(kind: str, params: dict, where: str) -> None:
    if kind == "set_emotion":
        if params.get("name") not in EMOTIONS:
            raise ScenarioError(f"{where}: unknown emotion {params.get('name')!r}")
    elif kind == "set_au":
        frame = params.get("intensities")
        if not isinstance(frame, dict):
            raise ScenarioError(f"{where}: set_au needs an 'intensities' object")
        try:
            validate_au_frame({int(k): float(v) for k, v in frame.items()})
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
    elif kind == "set_neck":
        for key in ("yaw", "pitch", "roll"):
            value = params.get(key, 0.0)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ScenarioError(f"{where}: set_neck {key} must be a finite number")
    elif kind == "set_eyes":
        for key in ("yaw_left", "yaw_right", "pitch"):
            value = params.get(key, 0.0)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ScenarioError(f"{where}: set_eyes {key} must be a finite number")
    elif kind == "play_tone":
        try:
            position_azimuth(int(params.get("position", 0)))
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
        if params.get("duration_s", 0.25) <= 0:
            raise ScenarioError(f"{where}: tone duration must be > 0")
    elif kind == "move_object":
        path = params.get("path")
        if not isinstance(path, list) or len(path) < 2:
            raise ScenarioError(f"{where}: move_object needs a path of >= 2 waypoints")
        for point in path:
            if len(point) != 3 or not all(math.isfinite(c) for c in point):
                raise ScenarioError(f"{where}: waypoints must be finite [x, y, z]")
            if point[2] <= 0:
                raise ScenarioError(f"{where}: waypoints must stay in front of the head (z > 0)")
        if params.get("duration_s", 0.0) <= 0:
            raise ScenarioError(f"{where}: move_object needs duration_s > 0")
    else:
        raise ScenarioError(f"{where}: unknown event kind {kind!r}")


def parse_scenario(text: str, name: str = "<scenario>") -> list[ScenarioEvent]:
    events: list[ScenarioEvent] = []
    last_t = -math.inf
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        where = f"{name}:{lineno}"
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{where}: not valid JSON ({exc})") from exc
        if not isinstance(record, dict) or "t" not in record or "event" not in record:
            raise ScenarioError(f"{where}: each line needs 't' and 'event'")
        t = float(record["t"])
        if not math.isfinite(t) or t < 0:
            raise ScenarioError(f"{where}: t must be finite and >= 0")
        if t < last_t:
            raise ScenarioError(f"{where}: event times must be non-decreasing")
        last_t = t
        kind = record["event"]
        params = {k: v for k, v in record.items() if k not in ("t", "event")}
        _validate(kind, params, where)
        events.append(ScenarioEvent(t=t, kind=kind, params=params))
    return events


def load_scenario(path: str) -> list[ScenarioEvent]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read(), name=path)


def packaged_scenario(name: str) -> list[ScenarioEvent]:
    """Load one of the scenarios shipped with the package
    (``greeting``, ``object_follow``, ``tone_right``)."""
    text = resources.files("telehead.data.scenarios").joinpath(f"{name}.jsonl").read_text("utf-8")
    return parse_scenario(text, name=f"<packaged:{name}>")


def scenario_end_time(events: list[ScenarioEvent]) -> float:
    """Last event time plus the tail any timed stimulus still needs."""
    end = 0.0
    for event in events:
        tail = 0.0
        if event.kind == "play_tone":
            tail = float(event.params.get("duration_s", 0.25))
        elif event.kind == "move_object":
            tail = float(event.params.get("duration_s", 0.0))
        end = max(end, event.t + tail)
    return end

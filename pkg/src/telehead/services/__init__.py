"""Executable glue: daemons, scenario player, session record/replay."""

from .gaze import GazeCommand, gaze_allocate
from .scenario import ScenarioError, ScenarioEvent, load_scenario, packaged_scenario
from .session import SessionError, SessionWriter, read_session
from .runtime import OfflineSession

__all__ = [
    "GazeCommand",
    "gaze_allocate",
    "ScenarioError",
    "ScenarioEvent",
    "load_scenario",
    "packaged_scenario",
    "SessionError",
    "SessionWriter",
    "read_session",
    "OfflineSession",
]

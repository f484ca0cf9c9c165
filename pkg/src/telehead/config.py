"""Shared configuration tree.

One JSON file configures everything: loop rates, per-unit servo gains
and plant constants, ear and eye models, alignment delays, bus
address, and optionally a fitted expression mapping.  ``load_config``
deep-merges a user file over the defaults so files only need to name
what they change.

The default gains and plant constants below are the frozen baseline
the regression suite asserts against (unit step settles within 2% in
under a second on every motor class); change them only together with
those tests.
"""

from __future__ import annotations

import copy
import json
from typing import Any

from .motor import PidGains, PlantParams, ServoMotor
from .rig import MOTOR_NAMES, RigTable, default_rig

DEFAULTS: dict[str, Any] = {
    "control": {
        "control_period_ms": 1.0,   # inner servo loop
        "comm_cycle_ms": 10.0,      # daemon-to-daemon exchange cycle
    },
    "servo": {
        # per unit system: normalized wire motors vs angular (deg) motors
        "norm": {
            "gains": {"kp": 2.0, "ki": 0.0, "kd": 0.0},
            "plant": {"max_speed": 4.0, "time_constant": 0.02},
        },
        "deg": {
            "gains": {"kp": 0.08, "ki": 0.0, "kd": 0.0},
            "plant": {"max_speed": 300.0, "time_constant": 0.02},
        },
        "input_limit": 1.0,
    },
    "ears": {
        "forward_tilt_deg": 30.0,
        "forward_exponent": 2.0,
        "rear_floor": 0.1,
        "rolloff_reference_m": 1.0,
    },
    "eyes": {
        "baseline_m": 0.062,
        "focal_length_px": 320.0,
        "image_width": 640,
        "image_height": 480,
    },
    "camera": {
        "fps": 30.0,
    },
    "audio": {
        "sample_rate": 48000,
    },
    "delays": {
        # audio sent to the head waits for the motors; audio coming back
        # waits for the (slower) camera path
        "operator_audio_ms": 40.0,
        "avatar_audio_ms": 20.0,
    },
    "bus": {
        "host": "127.0.0.1",
        "port": 7741,
        "queue_maxlen": 256,
    },
    "console": {
        "enabled": False,
        "host": "127.0.0.1",
        "port": 7742,
    },
    "mapping": None,    # optional MappingParams.to_config() tree
    "rig_table": None,  # optional path to an overriding rig table file
}


def rig_from_config(config: dict) -> RigTable:
    from .rig import load_rig_table

    path = config.get("rig_table")
    return load_rig_table(path) if path else default_rig()


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str | None = None) -> dict:
    """Defaults, optionally overlaid with a JSON config file."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            user = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(user, dict):
        raise ValueError(f"{path}: config root must be an object")
    return _merge(DEFAULTS, user)


def save_config(config: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")


def build_motors(config: dict, rig: RigTable | None = None) -> dict[int, ServoMotor]:
    """Construct the 21 servo motors per the config's unit-class settings."""
    rig = rig or default_rig()
    motors: dict[int, ServoMotor] = {}
    for motor_id in range(1, len(MOTOR_NAMES) + 1):
        unit = rig.motor_unit(motor_id)
        section = config["servo"][unit]
        gains = PidGains(**section["gains"])
        plant = PlantParams(
            max_speed=section["plant"]["max_speed"],
            time_constant=section["plant"]["time_constant"],
            position_limits=rig.motor_range(motor_id),
        )
        motors[motor_id] = ServoMotor(
            MOTOR_NAMES[motor_id - 1],
            gains,
            plant,
            input_limit=config["servo"]["input_limit"],
        )
    return motors

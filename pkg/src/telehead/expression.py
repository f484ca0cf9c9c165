"""Action-Unit layer and the operator-expression mapping.

Action Units (AUs) are the canonical elementary facial movements; the
head realizes each supported AU as one or more rig motions (two AUs are
approximations: the nose wrinkler is built from three nearby points and
the chin raiser borrows the jaw-close point).  On top of that sit the
seven stock emotion presets, and the affine map that turns a raw
operator expression vector into per-motor targets:

    motor_targets = offset + weights @ expression

with a least-squares fitter for calibrating ``offset`` and ``weights``
from recorded pairs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import rig as rig_mod
from .rig import RigTable, default_rig

SUPPORTED_AUS = frozenset({1, 2, 4, 5, 6, 7, 9, 10, 12, 14, 15, 17, 20, 22, 23, 24, 25, 26})

AU_DESCRIPTIONS = {
    1: "Inner brow raiser",
    2: "Outer brow raiser",
    4: "Brow lowerer",
    5: "Upper lid raiser",
    6: "Cheek raiser",
    7: "Lid tightener",
    9: "Nose wrinkler",
    10: "Upper lip raiser",
    12: "Lip corner puller",
    14: "Dimpler",
    15: "Lip corner depressor",
    17: "Chin raiser",
    20: "Lip stretcher",
    22: "Lip funneler",
    23: "Lip tightener",
    24: "Lip pressor",
    25: "Lips part",
    26: "Jaw drop",
}

EMOTIONS = ("Happiness", "Sadness", "Surprise", "Fear", "Anger", "Disgust", "Contempt")

# Order in which AUs win motor conflicts (earlier wins).  The only rule
# the presets force is that the inner-brow raiser beats the brow
# lowerer; the rest generalizes it: raisers/openers before tighteners
# and pressors, with the two approximated AUs (9, 17) yielding to
# direct ones.
DEFAULT_AU_PRIORITY = (1, 2, 5, 6, 10, 12, 14, 15, 20, 25, 26, 22, 23, 24, 9, 17, 7, 4)


class ExpressionError(ValueError):
    pass


class FitRankError(ExpressionError):
    """Calibration samples do not span the expression space."""


# ---------------------------------------------------------------------------
# AU -> motion compilation


def _parse_versioned_tsv(text: str, ncols: int, label: str):
    version = "unversioned"
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            if "version=" in line:
                version = line.split("version=", 1)[1].strip()
            continue
        fields = line.split("\t")
        if len(fields) != ncols:
            raise ExpressionError(f"{label} line {lineno}: expected {ncols} columns")
        rows.append((lineno, fields))
    return version, rows


def parse_au_map(text: str) -> dict[int, tuple[int, ...]]:
    _, rows = _parse_versioned_tsv(text, 3, "AU map")
    table: dict[int, tuple[int, ...]] = {}
    for lineno, (au_s, motions_s, _desc) in rows:
        au = int(au_s)
        motions = tuple(int(m) for m in motions_s.split(","))
        if au in table:
            raise ExpressionError(f"AU map line {lineno}: duplicate AU {au}")
        table[au] = motions
    if set(table) != SUPPORTED_AUS:
        raise ExpressionError("AU map must cover exactly the supported AU set")
    return table


_AU_MAP: dict[int, tuple[int, ...]] | None = None


def au_motion_map() -> dict[int, tuple[int, ...]]:
    global _AU_MAP
    if _AU_MAP is None:
        text = resources.files("telehead.data").joinpath("au_motion_map_v1.tsv").read_text("utf-8")
        _AU_MAP = parse_au_map(text)
    return _AU_MAP


def validate_au_frame(frame: dict[int, float]) -> None:
    for au, intensity in frame.items():
        if au not in SUPPORTED_AUS:
            raise ExpressionError(f"unsupported AU id {au}")
        if not math.isfinite(intensity) or not 0.0 <= intensity <= 1.0:
            raise ExpressionError(f"AU {au} intensity {intensity!r} outside [0, 1]")


def au_to_motions(frame: dict[int, float]) -> dict[int, float]:
    """Compile an AU frame into motion targets.

    Each AU contributes its mapped motions at the AU's intensity;
    overlapping contributions combine by max, which keeps every output
    within [0, 1] and makes the compilation idempotent under repeats.
    """
    validate_au_frame(frame)
    table = au_motion_map()
    out: dict[int, float] = {}
    for au in sorted(frame):
        intensity = frame[au]
        for motion in table[au]:
            if intensity > out.get(motion, 0.0):
                out[motion] = intensity
    return out


def resolve_au_conflicts(
    frame: dict[int, float],
    *,
    priority: tuple[int, ...] = DEFAULT_AU_PRIORITY,
    rig: RigTable | None = None,
) -> dict[int, float]:
    """Drop lower-priority AUs whose motions would fight over a motor.

    AUs are admitted in priority order; an AU is zeroed (omitted) when
    any of its motions drives the opposite terminal of a motor already
    claimed by an admitted AU.  Zero-intensity entries are inert and
    pass through.  The result always compiles conflict-free, and the
    operation is idempotent.
    """
    validate_au_frame(frame)
    rig = rig or default_rig()
    table = au_motion_map()
    rank = {au: i for i, au in enumerate(priority)}

    def terminals(au: int) -> set[tuple[int, int]]:
        found = set()
        for motion in table[au]:
            for motor, slots in rig.terminals.items():
                for sign, mid in slots.items():
                    if mid == motion:
                        found.add((motor, sign))
        return found

    admitted: dict[int, float] = {}
    claimed: set[tuple[int, int]] = set()
    for au in sorted(frame, key=lambda a: (rank.get(a, len(priority)), a)):
        intensity = frame[au]
        if intensity == 0.0:
            admitted[au] = intensity
            continue
        mine = terminals(au)
        if any((motor, -sign) in claimed for motor, sign in mine):
            continue  # loses the motor to a higher-priority AU
        admitted[au] = intensity
        claimed |= mine
    return {au: frame[au] for au in sorted(admitted)}


# ---------------------------------------------------------------------------
# Emotion presets


def parse_presets(text: str) -> dict[str, dict[int, float]]:
    _, rows = _parse_versioned_tsv(text, 2, "presets")
    presets: dict[str, dict[int, float]] = {}
    for lineno, (name, pairs) in rows:
        if name in presets:
            raise ExpressionError(f"presets line {lineno}: duplicate emotion {name}")
        vector: dict[int, float] = {}
        for pair in pairs.split():
            motion_s, _, value_s = pair.partition(":")
            vector[int(motion_s)] = float(value_s)
        presets[name] = vector
    if tuple(presets) != EMOTIONS:
        raise ExpressionError("preset file must define the 7 emotions in canonical order")
    return presets


def format_presets(presets: dict[str, dict[int, float]]) -> str:
    """Canonical text form; parse(format(p)) == p exactly."""
    lines = [
        "# telehead emotion presets\tversion=1",
        "# emotion\tmotion:intensity pairs (space separated, ascending motion id)",
    ]
    for name in EMOTIONS:
        pairs = " ".join(f"{m}:{presets[name][m]:g}" if presets[name][m] != int(presets[name][m])
                         else f"{m}:{presets[name][m]:.1f}"
                         for m in sorted(presets[name]))
        lines.append(f"{name}\t{pairs}")
    return "\n".join(lines) + "\n"


_PRESETS: dict[str, dict[int, float]] | None = None


def _presets() -> dict[str, dict[int, float]]:
    global _PRESETS
    if _PRESETS is None:
        text = resources.files("telehead.data").joinpath("emotion_presets_v1.tsv").read_text("utf-8")
        _PRESETS = parse_presets(text)
    return _PRESETS


def emotion_preset(name: str) -> dict[int, float]:
    """Motion target vector of one of the seven stock expressions."""
    presets = _presets()
    if name not in presets:
        raise ExpressionError(f"unknown emotion {name!r}; expected one of {EMOTIONS}")
    return dict(presets[name])


# ---------------------------------------------------------------------------
# Operator expression -> motor targets (affine mapping)


def default_channels() -> tuple[str, ...]:
    """Default tracker-channel registry: one channel per supported AU
    plus jaw opening and eye pose, all normalized to [0, 1]."""
    aus = tuple(f"au_{au:02d}" for au in sorted(SUPPORTED_AUS))
    return aus + ("jaw_open", "eye_yaw_left", "eye_yaw_right", "eye_pitch")


@dataclass(frozen=True)
class MappingParams:
    """Affine expression-to-motor map: ``targets = offset + weights @ f``."""

    offset: np.ndarray  # shape (n_motors,)
    weights: np.ndarray  # shape (n_motors, n_channels)
    channels: tuple[str, ...] = field(default_factory=default_channels)

    def __post_init__(self):
        offset = np.asarray(self.offset, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "weights", weights)
        if offset.ndim != 1 or weights.ndim != 2:
            raise ExpressionError("offset must be a vector and weights a matrix")
        if weights.shape[0] != offset.shape[0]:
            raise ExpressionError(
                f"weights rows ({weights.shape[0]}) must match offset length ({offset.shape[0]})"
            )
        if weights.shape[1] != len(self.channels):
            raise ExpressionError(
                f"weights columns ({weights.shape[1]}) must match channel count ({len(self.channels)})"
            )
        if not (np.isfinite(offset).all() and np.isfinite(weights).all()):
            raise ExpressionError("mapping parameters must be finite")

    @property
    def n_motors(self) -> int:
        return self.offset.shape[0]

    def to_config(self) -> dict:
        return {
            "channels": list(self.channels),
            "offset": self.offset.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_config(cls, node: dict) -> "MappingParams":
        return cls(
            offset=np.array(node["offset"], dtype=float),
            weights=np.array(node["weights"], dtype=float),
            channels=tuple(node["channels"]),
        )


def neutral_mapping(n_channels: int | None = None) -> MappingParams:
    """All-zero mapping: every expression maps to the neutral face."""
    channels = default_channels() if n_channels is None else tuple(
        f"ch_{i:02d}" for i in range(n_channels)
    )
    n = rig_mod.MOTOR_COUNT
    return MappingParams(np.zeros(n), np.zeros((n, len(channels))), channels)


def map_expression(
    values: np.ndarray,
    params: MappingParams,
    *,
    rig: RigTable | None = None,
    gain: float = 1.0,
) -> np.ndarray:
    """Map an expression vector to per-motor targets.

    ``gain`` scales the deviation from the neutral offset (1.0 = faithful
    reproduction; >1 exaggerates).  Targets are clamped into each
    motor's reachable range when a rig is supplied (the default).
    """
    f = np.asarray(values, dtype=float)
    if f.shape != (params.weights.shape[1],):
        raise ExpressionError(
            f"expression vector has shape {f.shape}, expected ({params.weights.shape[1]},)"
        )
    if not np.isfinite(f).all():
        raise ExpressionError("expression vector must be finite")
    targets = params.offset + gain * (params.weights @ f)
    rig = default_rig() if rig is None else rig
    if params.n_motors == rig_mod.MOTOR_COUNT:
        lo = np.array([rig.motor_range(m)[0] for m in range(1, rig_mod.MOTOR_COUNT + 1)])
        hi = np.array([rig.motor_range(m)[1] for m in range(1, rig_mod.MOTOR_COUNT + 1)])
        targets = np.clip(targets, lo, hi)
    return targets


def map_expression_raw(values: np.ndarray, params: MappingParams, *, gain: float = 1.0) -> np.ndarray:
    """Affine map without range clamping (useful for linearity checks)."""
    f = np.asarray(values, dtype=float)
    return params.offset + gain * (params.weights @ f)


def fit_mapping(
    samples: list[tuple[np.ndarray, np.ndarray]],
    *,
    channels: tuple[str, ...] | None = None,
    require_full_rank: bool = True,
) -> tuple[MappingParams, float]:
    """Least-squares fit of the affine map from (expression, targets) pairs.

    Needs at least ``n_channels + 1`` samples whose expression vectors
    span the channel space; otherwise raises :class:`FitRankError`
    unless ``require_full_rank=False``, in which case the minimum-norm
    solution over the centered data is returned (an all-constant sample
    set then degenerates to offset = mean target, weights = 0).

    Returns the fitted parameters and the residual: the Frobenius norm
    of the prediction error over all samples and motors.
    """
    if not samples:
        raise ExpressionError("fit_mapping needs at least one sample")
    F = np.array([np.asarray(f, dtype=float) for f, _ in samples])
    W = np.array([np.asarray(w, dtype=float) for _, w in samples])
    if F.ndim != 2 or W.ndim != 2 or F.shape[0] != W.shape[0]:
        raise ExpressionError("samples must be equally many (f, w) pairs")
    count, m = F.shape
    if channels is None:
        channels = default_channels() if m == len(default_channels()) else tuple(
            f"ch_{i:02d}" for i in range(m)
        )

    f_mean = F.mean(axis=0)
    w_mean = W.mean(axis=0)
    Fc = F - f_mean
    rank = int(np.linalg.matrix_rank(Fc)) if count > 1 else 0
    if require_full_rank:
        if count < m + 1:
            raise FitRankError(f"need at least {m + 1} samples, got {count}")
        if rank < m:
            raise FitRankError(
                f"expression samples span only {rank} of {m} channel dimensions"
            )

    # Centered least squares: solve Fc @ A.T ~= Wc, then recover the offset.
    A_t, _, _, _ = np.linalg.lstsq(Fc, W - w_mean, rcond=None)
    weights = A_t.T
    offset = w_mean - weights @ f_mean
    residual = float(np.linalg.norm(F @ weights.T + offset - W))
    return MappingParams(offset, weights, channels), residual


def load_calibration_samples(path: str) -> list[tuple[np.ndarray, np.ndarray]]:
    """Read calibration pairs from a JSON-lines file.

    Each line is an object with ``f`` (expression vector) and ``w``
    (desired motor targets).
    """
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                record = json.loads(line)
                samples.append(
                    (np.array(record["f"], dtype=float), np.array(record["w"], dtype=float))
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ExpressionError(f"{path}:{lineno}: bad calibration record: {exc}") from exc
    return samples

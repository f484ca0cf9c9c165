"""Deterministic per-motor servo simulation.

Each motor is a chain of three step functions, mirroring how the driver
board splits the work:

* a PID stage that turns angle error into a PWM duty ratio plus a
  direction bit,
* a linear target interpolator that smooths stepwise commands arriving
  at the (slow) communication cycle into a ramp for the (fast) control
  cycle,
* a first-order plant that models the motor itself.

Everything here is pure-functional over small frozen dataclasses; the
``ServoMotor`` wrapper just threads the state through time.  Identical
command/time sequences therefore produce bit-identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PidGains:
    """Non-negative feedback gains, settable per motor."""

    kp: float
    ki: float = 0.0
    kd: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(kp=self.kp, ki=self.ki, kd=self.kd)
        if self.kp < 0.0 or self.ki < 0.0 or self.kd < 0.0:
            raise ValueError("PID gains must be non-negative")


@dataclass(frozen=True)
class ServoState:
    """Instantaneous servo state.

    ``input_ratio`` and ``direction`` hold the duty and direction bit of
    the most recent PID step so a state trace doubles as an I/O trace.
    """

    angle: float = 0.0
    velocity: float = 0.0
    integral_error: float = 0.0
    last_error: float = 0.0
    input_ratio: float = 0.0
    direction: int = 0


@dataclass(frozen=True)
class InterpolatorState:
    """Ramp description between two latched commands.

    The working target moves from ``latched_target`` toward
    ``commanded_target`` at ``target_velocity`` and then holds.
    """

    latched_target: float = 0.0
    commanded_target: float = 0.0
    target_velocity: float = 0.0
    latch_time: float = 0.0


@dataclass(frozen=True)
class PlantParams:
    """First-order motor model.

    Duty maps linearly to a speed setpoint (``max_speed`` at duty 1.0);
    velocity relaxes toward it with ``time_constant``; angle integrates
    velocity and stops hard at ``position_limits``.
    """

    max_speed: float
    time_constant: float
    position_limits: tuple[float, float]

    def __post_init__(self) -> None:
        _require_finite(
            max_speed=self.max_speed,
            time_constant=self.time_constant,
            lo=self.position_limits[0],
            hi=self.position_limits[1],
        )
        if self.max_speed <= 0.0:
            raise ValueError("max_speed must be > 0")
        if self.time_constant <= 0.0:
            raise ValueError("time_constant must be > 0")
        if self.position_limits[0] > self.position_limits[1]:
            raise ValueError("position_limits must be ordered (lo, hi)")


def pid_step(
    state: ServoState,
    target: float,
    gains: PidGains,
    input_limit: float,
    dt: float,
) -> tuple[float, int, ServoState]:
    """One PID update: returns ``(duty, direction, new_state)``.

    The raw control signal is ``kp*e + ki*integral(e) + kd*de/dt``; the
    applied duty is its magnitude clamped to ``input_limit`` and the
    direction bit is 0 for a non-negative raw signal, 1 otherwise.  The
    integral term freezes while the output is saturated so it cannot
    wind up against the clamp.
    """
    _require_finite(target=target, input_limit=input_limit, dt=dt)
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not 0.0 <= input_limit <= 1.0:
        raise ValueError(f"input_limit must be within [0, 1], got {input_limit}")

    error = target - state.angle
    integral = state.integral_error + error * dt
    derivative = (error - state.last_error) / dt
    raw = gains.kp * error + gains.ki * integral + gains.kd * derivative

    if abs(raw) >= input_limit:
        duty = input_limit
        integral = state.integral_error  # anti-windup: hold while saturated
    else:
        duty = abs(raw)
    direction = 0 if raw >= 0.0 else 1

    new_state = replace(
        state,
        integral_error=integral,
        last_error=error,
        input_ratio=duty,
        direction=direction,
    )
    return duty, direction, new_state


def interpolate_target(interp: InterpolatorState, now: float) -> float:
    """Working target at time ``now``: ramp then hold at the command.

    Saturates at ``commanded_target`` from either side, so decreasing
    commands behave symmetrically to increasing ones.
    """
    if now < interp.latch_time:
        raise ValueError(f"now={now} precedes latch_time={interp.latch_time}")
    raw = interp.latched_target + interp.target_velocity * (now - interp.latch_time)
    if interp.target_velocity >= 0.0:
        return min(raw, interp.commanded_target)
    return max(raw, interp.commanded_target)


def latch_command(
    interp: InterpolatorState,
    commanded_target: float,
    period: float,
    now: float,
) -> InterpolatorState:
    """Latch a new commanded target received over a cycle of ``period``.

    The ramp restarts from the currently interpolated target and its
    slope is chosen so the command is reached after exactly one
    communication period.
    """
    _require_finite(commanded_target=commanded_target, period=period, now=now)
    if period <= 0.0:
        raise ValueError(f"period must be > 0, got {period}")
    current = interpolate_target(interp, now)
    return InterpolatorState(
        latched_target=current,
        commanded_target=commanded_target,
        target_velocity=(commanded_target - current) / period,
        latch_time=now,
    )


def plant_step(
    state: ServoState,
    duty: float,
    direction: int,
    params: PlantParams,
    dt: float,
) -> ServoState:
    """Advance the motor model by ``dt`` seconds under the given input.

    Velocity relaxes exponentially toward the signed speed setpoint;
    angle integrates velocity.  Hitting a position limit pins the angle
    and zeroes the velocity (hard stop).
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    sign = 1.0 if direction == 0 else -1.0
    setpoint = sign * duty * params.max_speed
    decay = math.exp(-dt / params.time_constant)
    velocity = setpoint + (state.velocity - setpoint) * decay
    angle = state.angle + velocity * dt
    lo, hi = params.position_limits
    if angle < lo:
        angle, velocity = lo, 0.0
    elif angle > hi:
        angle, velocity = hi, 0.0
    return replace(state, angle=angle, velocity=velocity)


class ServoMotor:
    """One simulated motor: interpolator -> PID -> plant.

    ``command`` latches targets at the communication cycle; ``tick``
    advances the internal control loop to an absolute time.  The
    per-tick change of the working target is bounded by
    ``|target_velocity| * dt``, which is what keeps the motion smooth
    even though commands arrive an order of magnitude slower.
    """

    def __init__(
        self,
        name: str,
        gains: PidGains,
        plant: PlantParams,
        *,
        input_limit: float = 1.0,
        initial_angle: float = 0.0,
    ):
        self.name = name
        self.gains = gains
        self.plant = plant
        self.input_limit = input_limit
        self.state = ServoState(angle=initial_angle)
        self.interp = InterpolatorState(
            latched_target=initial_angle, commanded_target=initial_angle
        )
        self.time = 0.0

    @property
    def working_target(self) -> float:
        return interpolate_target(self.interp, self.time)

    def command(
        self,
        target: float,
        period: float,
        *,
        now: float | None = None,
        input_limit: float | None = None,
    ) -> None:
        """Latch a new target; optionally update the duty limit with it."""
        if input_limit is not None:
            if not 0.0 <= input_limit <= 1.0:
                raise ValueError(f"input_limit must be within [0, 1], got {input_limit}")
            self.input_limit = input_limit
        self.interp = latch_command(
            self.interp, target, period, self.time if now is None else now
        )

    def tick(self, now: float) -> ServoState:
        """Advance the control loop to absolute time ``now``."""
        dt = now - self.time
        if dt <= 0.0:
            raise ValueError(f"tick must move time forward (now={now}, time={self.time})")
        target = interpolate_target(self.interp, now)
        duty, direction, state = pid_step(
            self.state, target, self.gains, self.input_limit, dt
        )
        self.state = plant_step(state, duty, direction, self.plant, dt)
        self.time = now
        return self.state

# Step response of one simulated servo.
#
# A motor is a chain of three pieces: a linear interpolator that ramps
# the commanded target over one communication cycle, a PID stage that
# turns the remaining error into a PWM duty plus a direction bit, and a
# first-order plant.  This script commands a unit step to a normalized
# wire motor and prints how the angle converges.

import numpy as np

from telehead.config import build_motors, load_config

config = load_config()
motors = build_motors(config)
motor = motors[4]  # upper-eyelid motor, normalized units

comm_s = config["control"]["comm_cycle_ms"] / 1000.0
control_s = config["control"]["control_period_ms"] / 1000.0

motor.command(1.0, comm_s)

times, angles, duties = [], [], []
for k in range(1, int(1.0 / control_s) + 1):
    state = motor.tick(k * control_s)
    times.append(k * control_s)
    angles.append(state.angle)
    duties.append(state.input_ratio)

times = np.array(times)
angles = np.array(angles)

settle_mask = np.abs(angles - 1.0) <= 0.02
settle_time = times[settle_mask][0] if settle_mask.any() else None

print("t [s]   angle    duty")
for t in (0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0):
    i = np.searchsorted(times, t) - 1
    print(f"{times[i]:5.2f}  {angles[i]:7.4f}  {duties[i]:5.3f}")

print(f"\n2% settling time: {settle_time:.3f} s (frozen default gains)")
print(f"peak overshoot:   {max(0.0, angles.max() - 1.0):.4f}")

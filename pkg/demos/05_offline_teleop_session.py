# A complete teleoperation session, offline and deterministic.
#
# Both daemons run in one process on the loopback bus under a virtual
# clock.  The scripted greeting drives the face through the operator
# side; the avatar side runs the 21 servo loops and streams joint
# states back.  The whole exchange is recorded, then replayed into a
# fresh avatar to confirm the simulation is bit-for-bit reproducible.

import tempfile
from pathlib import Path

from telehead.rig import MOTOR_NAMES
from telehead.services.runtime import OfflineSession, verify_replay
from telehead.services.scenario import packaged_scenario

events = packaged_scenario("greeting")
print(f"greeting scenario: {len(events)} events over {events[-1].t:.1f} s")

record = Path(tempfile.mkdtemp()) / "greeting.session"
session = OfflineSession(scenario=events, record_path=record)
result = session.run()

print(f"ran {result.cycles} cycles "
      f"({len(result.joint_states)} joint-state messages recorded)\n")

print("peak excursion of the motors the greeting animates:")
for motor_id in (5, 10, 11, 14, 16, 17, 18, 20):
    history = result.position_history(motor_id)
    peak = max(history, key=abs)
    print(f"  {motor_id:2d} {MOTOR_NAMES[motor_id - 1]:<16} {peak:+.3f}")

identical, compared, mismatches = verify_replay(record)
print(f"\nreplay check: {compared} joint-state messages, "
      f"{'bit-identical' if identical else f'{mismatches} MISMATCHES'}")

# the same scenario can drive a live loopback session with the browser
# console attached:  telehead operator run --offline --console --scenario greeting

# The facial rig and its Action-Unit layer.
#
# 31 named head motions share 21 motors: several motors drive two
# motions through forward/reverse rotation, so some combinations are
# mechanically impossible.  This script compiles the seven stock
# emotion presets down to motor targets, then shows the AU layer
# resolving one of those impossible combinations.

from telehead.expression import (
    EMOTIONS,
    au_to_motions,
    emotion_preset,
    resolve_au_conflicts,
)
from telehead.rig import MOTOR_NAMES, default_rig

rig = default_rig()

print("motor targets per preset (motors 4..18 are the wire motors)\n")
header = "motor            " + "".join(f"{e[:5]:>7}" for e in EMOTIONS)
print(header)
for motor_id in range(4, 19):
    row = f"{motor_id:2d} {MOTOR_NAMES[motor_id - 1]:<15}"
    for emotion in EMOTIONS:
        targets = rig.motions_to_motor_targets(emotion_preset(emotion), policy="strict")
        value = targets[motor_id]
        row += f"{value:7.1f}" if value else "      ."
    print(row)

print("\nevery preset compiles under the strict conflict policy: no dual-use")
print("motor is ever pulled both ways at once.\n")

# The inner-brow raiser (AU1) and the brow lowerer (AU4) sit on the
# forward and reverse rotations of the same two motors.
frame = {1: 1.0, 4: 1.0}
resolved = resolve_au_conflicts(frame)
print(f"AU frame {frame} resolves to {resolved}")
print(f"compiled motions: {au_to_motions(resolved)}")
conflicts = rig.detect_conflicts(au_to_motions(frame))
print(f"(unresolved it would fight over motors {[m for m, _ in conflicts]})")

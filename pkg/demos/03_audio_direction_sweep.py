# The eight-position hearing check.
#
# The same tone is played from eight spots on a 1 m circle around the
# head (position 5 is dead ahead, 1 is straight behind, 45-degree
# steps).  Each ear applies a distance rolloff and a forward-tilted
# cardioid directivity, standing in for the auricle.  Laterally placed
# sources should separate the ears strongly; front/rear sources should
# not; rear-side sources should be noticeably quieter than front-side
# ones.

from telehead.perception import format_sweep_table, sweep_positions

rows = sweep_positions(distance_m=1.0, tone_hz=440.0, duration_s=0.25)
print(format_sweep_table(rows))

by_position = {r.position: r for r in rows}
gap = lambda r: abs(r.rms_left - r.rms_right)
energy = lambda r: r.rms_left**2 + r.rms_right**2

print("left/right separation, lateral vs axial positions:")
for side, axial in ((6, 5), (7, 5), (4, 1), (3, 1)):
    print(
        f"  position {side} (az {by_position[side].azimuth_deg:+6.1f}) gap {gap(by_position[side]):.4f}"
        f"   vs position {axial} gap {gap(by_position[axial]):.6f}"
    )

print("\nfront sides vs rear sides (total energy):")
print(f"  +45: {energy(by_position[6]):.4f}   +135: {energy(by_position[8]):.4f}")
print(f"  -45: {energy(by_position[4]):.4f}   -135: {energy(by_position[2]):.4f}")

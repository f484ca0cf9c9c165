import math

import numpy as np
import pytest

from telehead.perception import (
    EarModel,
    EyeGeometry,
    PerceptionError,
    SoundSource,
    default_ears,
    disparity,
    ear_gains,
    format_sweep_table,
    position_azimuth,
    project_stereo,
    render_stereo,
    sine_tone,
    sweep_positions,
    wrap_azimuth,
)


def _source(azimuth, distance=1.0, **kw):
    return SoundSource(azimuth_deg=azimuth, distance_m=distance, **kw)


def test_wrap_azimuth():
    assert wrap_azimuth(0.0) == 0.0
    assert wrap_azimuth(190.0) == -170.0
    assert wrap_azimuth(-180.0) == 180.0
    assert wrap_azimuth(360.0) == 0.0


def test_front_source_hits_both_ears_equally():
    gl, gr = ear_gains(_source(0.0))
    assert gl == pytest.approx(gr, abs=1e-12)


def test_right_source_louder_on_the_right():
    gl, gr = ear_gains(_source(90.0))
    assert gr > gl


def test_rear_sides_quieter_than_front_sides():
    front = ear_gains(_source(45.0))
    rear = ear_gains(_source(135.0))
    assert sum(rear) < sum(front)


def test_mirror_symmetry():
    left_side = ear_gains(_source(-60.0))
    right_side = ear_gains(_source(60.0))
    assert left_side[0] == pytest.approx(right_side[1], abs=1e-12)
    assert left_side[1] == pytest.approx(right_side[0], abs=1e-12)


def test_head_yaw_shifts_the_scene():
    # turning the head right by 30 deg is like moving the source left 30 deg
    turned = ear_gains(_source(30.0), head_yaw_deg=30.0)
    ahead = ear_gains(_source(0.0))
    assert turned[0] == pytest.approx(ahead[0])
    assert turned[1] == pytest.approx(ahead[1])


def test_gains_decrease_with_distance():
    for azimuth in (0.0, 45.0, 120.0):
        near = ear_gains(_source(azimuth, 0.5))
        far = ear_gains(_source(azimuth, 1.0))
        farther = ear_gains(_source(azimuth, 2.0))
        assert near[0] > far[0] > farther[0]
        assert near[1] > far[1] > farther[1]


def test_gains_stay_in_unit_interval():
    for azimuth in range(-180, 181, 15):
        for distance in (0.1, 1.0, 10.0):
            gl, gr = ear_gains(_source(float(azimuth), distance))
            assert 0.0 < gl <= 1.0
            assert 0.0 < gr <= 1.0


def test_ear_model_validation():
    with pytest.raises(PerceptionError):
        EarModel(orientation_deg=0.0, rear_floor=0.0)
    with pytest.raises(PerceptionError):
        SoundSource(azimuth_deg=0.0, distance_m=0.0)


def test_render_silence_is_silent():
    source = _source(30.0, samples=np.zeros(4800, dtype=np.float32), sample_rate=48_000)
    frames = render_stereo(source, duration_s=0.1)
    assert len(frames) == 10
    for frame in frames:
        assert not frame.left.any()
        assert not frame.right.any()


def test_render_front_tone_identical_channels():
    tone = sine_tone(440.0, 0.05)
    source = _source(0.0, samples=tone)
    frames = render_stereo(source, duration_s=0.05)
    for frame in frames:
        assert np.array_equal(frame.left, frame.right)


def test_render_preserves_rate_and_length():
    tone = sine_tone(440.0, 0.123)
    source = _source(20.0, samples=tone, sample_rate=48_000)
    frames = render_stereo(source, duration_s=0.123)
    assert all(f.sample_rate == 48_000 for f in frames)
    total = sum(len(f.left) for f in frames)
    assert total == int(round(0.123 * 48_000))
    assert [f.sequence for f in frames] == list(range(len(frames)))


def test_render_rejects_short_waveform():
    source = _source(0.0, samples=np.zeros(10, dtype=np.float32))
    with pytest.raises(PerceptionError):
        render_stereo(source, duration_s=1.0)


def test_position_indexing():
    assert position_azimuth(5) == 0.0
    assert position_azimuth(1) == 180.0
    assert position_azimuth(6) == 45.0
    assert position_azimuth(4) == -45.0
    assert position_azimuth(7) == 90.0
    assert position_azimuth(3) == -90.0
    assert position_azimuth(8) == 135.0
    assert position_azimuth(2) == -135.0
    with pytest.raises(PerceptionError):
        position_azimuth(0)


def test_sweep_reproduces_direction_orderings():
    rows = {r.position: r for r in sweep_positions(duration_s=0.1)}

    def lr_gap(row):
        return abs(row.rms_left - row.rms_right)

    def energy(row):
        return row.rms_left**2 + row.rms_right**2

    # lateral positions separate the ears, front/rear do not
    for side in (3, 4, 6, 7):
        for axial in (1, 5):
            assert lr_gap(rows[side]) > lr_gap(rows[axial]) * 3
    # rear sides are quieter than front sides
    assert energy(rows[2]) < energy(rows[4])
    assert energy(rows[8]) < energy(rows[6])
    # nearest-side ear dominates
    assert rows[6].rms_right > rows[6].rms_left
    assert rows[4].rms_left > rows[4].rms_right


def test_sweep_table_format():
    rows = sweep_positions(positions=(5, 6), duration_s=0.02)
    table = format_sweep_table(rows)
    lines = table.strip().split("\n")
    assert lines[0].startswith("position\tazimuth_deg")
    assert len(lines) == 3


def test_disparity_closed_form():
    geom = EyeGeometry()
    for depth in (0.3, 1.0, 2.5, 10.0):
        expected = geom.focal_length_px * geom.baseline_m / depth
        assert disparity((0.0, 0.0, depth), geom) == pytest.approx(expected, abs=1e-9)


def test_disparity_decreases_with_depth():
    geom = EyeGeometry()
    depths = np.linspace(0.3, 10.0, 50)
    values = [disparity((0.0, 0.0, d), geom) for d in depths]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] > 0.0
    assert disparity((0.0, 0.0, 1e9), geom) == pytest.approx(0.0, abs=1e-3)


def test_projection_rejects_point_behind_camera():
    geom = EyeGeometry()
    with pytest.raises(PerceptionError):
        project_stereo((0.0, 0.0, -1.0), geom)


def test_eye_rotation_shifts_projection():
    geom = EyeGeometry(eye_yaw_left_deg=10.0, eye_yaw_right_deg=10.0)
    straight = EyeGeometry()
    (ul_rot, _), _ = project_stereo((0.0, 0.0, 2.0), geom)
    (ul_str, _), _ = project_stereo((0.0, 0.0, 2.0), straight)
    # looking right moves a centered point left in the image
    assert ul_rot < ul_str


def test_eye_geometry_range_validation():
    with pytest.raises(PerceptionError):
        EyeGeometry(eye_yaw_left_deg=40.0)
    with pytest.raises(PerceptionError):
        EyeGeometry(eye_pitch_deg=10.0)


def test_vertical_projection_sign():
    geom = EyeGeometry()
    (_, v_up), _ = project_stereo((0.0, 0.5, 2.0), geom)
    (_, v_center), _ = project_stereo((0.0, 0.0, 2.0), geom)
    assert v_up < v_center  # higher points land higher in the image

"""Acceptance gate: every release criterion at its stated tolerance.

Each test is one criterion; the conftest summary hook prints one
PASS/FAIL line per criterion at the end of the run.  Reference vectors
are frozen here, independently of the package's data files.
"""

import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from telehead.bus import (
    AudioChunkMsg,
    CameraFrameMsg,
    DelayBuffer,
    FrameDecodeError,
    JointEntry,
    JointStateMsg,
    SchemaError,
    chunk_audio,
    decode_frame,
    decode_payload,
    encode_frame,
    encode_payload,
    reassemble_audio,
    topic_by_name,
)
from telehead.config import load_config
from telehead.expression import (
    MappingParams,
    au_to_motions,
    default_channels,
    emotion_preset,
    fit_mapping,
    map_expression,
    map_expression_raw,
    resolve_au_conflicts,
)
from telehead.motor import (
    InterpolatorState,
    PidGains,
    ServoState,
    interpolate_target,
    latch_command,
    pid_step,
)
from telehead.perception import EyeGeometry, disparity, sweep_positions
from telehead.rig import MOTOR_COUNT, NeckPose, default_rig
from telehead.services.gaze import gaze_allocate
from telehead.services.runtime import OfflineSession, verify_replay
from telehead.services.scenario import packaged_scenario


# ---------------------------------------------------------------------------
# reference data frozen from the published motion tables

PRESET_VECTORS = {
    "Happiness": {16: 1.0, 17: 1.0, 23: 1.0, 24: 1.0},
    "Sadness": {10: 1.0, 11: 1.0, 12: 1.0, 13: 1.0, 25: 1.0, 26: 1.0, 28: 1.0},
    "Surprise": {4: 1.0, 8: 0.6, 9: 0.6, 12: 0.6, 13: 0.6, 18: 1.0, 19: 1.0, 27: 1.0},
    "Fear": {
        4: 1.0, 7: 0.7, 8: 0.6, 9: 0.6, 12: 0.6, 13: 0.6, 18: 1.0, 19: 1.0,
        20: 1.0, 21: 1.0, 25: 1.0, 26: 1.0, 27: 0.8,
    },
    "Anger": {4: 1.0, 7: 0.5, 14: 1.0, 15: 1.0, 18: 1.0, 19: 1.0, 22: 0.6, 28: 1.0},
    "Disgust": {7: 0.3, 14: 0.6, 15: 0.6, 18: 1.0, 19: 1.0},
    "Contempt": {20: 1.0, 23: 1.0},
}

AU_MOTION_TABLE = {
    1: {12, 13},
    2: {8, 9},
    4: {14, 15},
    5: {4},
    6: {16, 17},
    7: {5, 7},
    9: {7, 14, 15},
    10: {18},
    12: {23, 24},
    14: {20, 21},
    15: {25, 26},
    17: {28},
    20: {20, 21, 25, 26},
    22: {18, 19, 22},
    23: {22},
    24: {28},
    25: {18, 19},
    26: {27},
}


@pytest.mark.acceptance("preset fidelity: 7 emotions match the published vectors exactly")
def test_preset_fidelity():
    for emotion, expected in PRESET_VECTORS.items():
        actual = emotion_preset(emotion)
        # exact equality row by row over the full listed range 4..28
        for motion in range(4, 29):
            assert actual.get(motion) == expected.get(motion), (
                f"{emotion} motion {motion}: {actual.get(motion)} != {expected.get(motion)}"
            )
        assert actual == expected


@pytest.mark.acceptance("AU compilation: every AU maps to exactly its listed motions")
def test_au_compilation():
    for au, motions in AU_MOTION_TABLE.items():
        compiled = au_to_motions({au: 1.0})
        assert set(compiled) == motions, f"AU {au}"
        assert all(v == 1.0 for v in compiled.values())


@pytest.mark.acceptance("conflict rule: AU1 beats AU4; all presets compile strict")
def test_conflict_rule():
    assert resolve_au_conflicts({1: 1.0, 4: 1.0}) == {1: 1.0}
    rig = default_rig()
    for emotion in PRESET_VECTORS:
        rig.motions_to_motor_targets(emotion_preset(emotion), policy="strict")


# ---------------------------------------------------------------------------
# servo math


finite_err = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e4, max_value=1e4)


@pytest.mark.acceptance("servo math: duty clamp total, sign rule exact, P memoryless")
@settings(max_examples=300, deadline=None)
@given(
    error=finite_err,
    kp=st.floats(min_value=0.0, max_value=50.0),
    limit=st.floats(min_value=0.0, max_value=1.0),
)
def test_servo_duty_clamp_and_sign(error, kp, limit):
    gains = PidGains(kp=kp)
    duty, direction, _ = pid_step(ServoState(angle=0.0), error, gains, limit, 0.001)
    assert 0.0 <= duty <= limit <= 1.0
    raw = kp * error
    assert direction == (0 if raw >= 0 else 1)
    # memoryless under P-only control: history never changes the output
    dirty = ServoState(angle=0.0, integral_error=9.9, last_error=-3.3)
    duty2, direction2, _ = pid_step(dirty, error, gains, limit, 0.001)
    assert (duty2, direction2) == (duty, direction)


@pytest.mark.acceptance("servo math: interpolation is piecewise linear without overshoot")
@settings(max_examples=300, deadline=None)
@given(
    start=finite_err,
    command=finite_err,
    period=st.floats(min_value=1e-3, max_value=5.0),
    dt=st.floats(min_value=0.0, max_value=10.0),
)
def test_target_interpolation_properties(start, command, period, dt):
    interp = latch_command(
        InterpolatorState(latched_target=start, commanded_target=start), command, period, 0.0
    )
    assert interp.target_velocity == pytest.approx((command - start) / period)
    value = interpolate_target(interp, dt)
    lo, hi = min(start, command), max(start, command)
    assert lo - 1e-9 <= value <= hi + 1e-9
    ramp = start + interp.target_velocity * dt
    if (interp.target_velocity >= 0 and ramp <= command) or (
        interp.target_velocity < 0 and ramp >= command
    ):
        assert value == pytest.approx(ramp)
    else:
        assert value == command


@pytest.mark.acceptance("servo step response: frozen defaults settle to 2% inside 1 s")
def test_step_response_settles():
    from telehead.config import build_motors

    config = load_config()
    motors = build_motors(config)
    cases = [
        (4, 1.0),     # normalized dual-use motor, unit step
        (10, 1.0),    # normalized single-use motor
        (1, 35.0),    # eye yaw, full range step
        (19, 83.0),   # neck yaw, full range step
    ]
    comm_s = config["control"]["comm_cycle_ms"] / 1000.0
    control_s = config["control"]["control_period_ms"] / 1000.0
    for motor_id, step in cases:
        motor = motors[motor_id]
        motor.command(step, comm_s)
        settle = None
        ticks = int(round(1.0 / control_s))
        for k in range(1, ticks + 1):
            state = motor.tick(k * control_s)
            if settle is None and abs(state.angle - step) <= 0.02 * abs(step):
                settle = k * control_s
        assert settle is not None and settle < 1.0, f"motor {motor_id} settle={settle}"
        # it also stays settled
        assert abs(motor.state.angle - step) <= 0.02 * abs(step)


# ---------------------------------------------------------------------------
# neck kinematics


@pytest.mark.acceptance("neck kinematics: inverse/forward identity to 1e-9 over 10k poses")
def test_neck_round_trip_bulk():
    rig = default_rig()
    assert rig.neck_box() == ((-83.0, 83.0), (-30.0, 40.0), (-21.0, 21.0))
    rng = np.random.default_rng(99)
    yaws = rng.uniform(-83.0, 83.0, 10_000)
    pitches = rng.uniform(-30.0, 40.0, 10_000)
    rolls = rng.uniform(-21.0, 21.0, 10_000)
    for yaw, pitch, roll in zip(yaws, pitches, rolls):
        pose = NeckPose(yaw, pitch, roll)
        back = rig.neck_forward(*rig.neck_inverse(pose))
        assert abs(back.yaw - pose.yaw) <= 1e-9
        assert abs(back.pitch - pose.pitch) <= 1e-9
        assert abs(back.roll - pose.roll) <= 1e-9
    # endpoints are reachable exactly
    for pose in (
        NeckPose(83.0, 0.0, 0.0),
        NeckPose(-83.0, 0.0, 0.0),
        NeckPose(0.0, 40.0, 0.0),
        NeckPose(0.0, -30.0, 0.0),
        NeckPose(0.0, 0.0, 21.0),
        NeckPose(0.0, 0.0, -21.0),
    ):
        assert rig.neck_forward(*rig.neck_inverse(pose)) == pose


# ---------------------------------------------------------------------------
# audio direction experiment


@pytest.mark.acceptance("audio direction: 8-position sweep orderings at 1.0 m in < 10 s")
def test_audio_direction_experiment():
    started = time.monotonic()
    rows = {r.position: r for r in sweep_positions(distance_m=1.0)}
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"sweep took {elapsed:.1f}s"

    def gap(row):
        return abs(row.rms_left - row.rms_right)

    def energy(row):
        return row.rms_left**2 + row.rms_right**2

    lateral = [rows[p] for p in (3, 4, 6, 7)]   # +-45 and +-90
    axial = [rows[p] for p in (1, 5)]           # 180 and 0
    for lat in lateral:
        for ax in axial:
            assert gap(lat) >= 3.0 * gap(ax), (
                f"|L-R| at {lat.azimuth_deg} deg not 3x that at {ax.azimuth_deg} deg"
            )
    assert energy(rows[2]) < energy(rows[4])   # -135 vs -45
    assert energy(rows[8]) < energy(rows[6])   # +135 vs +45


# ---------------------------------------------------------------------------
# stereo parallax


@pytest.mark.acceptance("stereo parallax: closed form to 1e-9 and monotone over 0.3-10 m")
def test_stereo_parallax():
    geom = EyeGeometry()
    depths = np.linspace(0.3, 10.0, 500)
    values = [disparity((0.0, 0.0, float(d)), geom) for d in depths]
    for d, value in zip(depths, values):
        assert abs(value - geom.focal_length_px * geom.baseline_m / d) <= 1e-9
    assert all(a > b for a, b in zip(values, values[1:]))
    assert all(v > 0 for v in values)


# ---------------------------------------------------------------------------
# expression mapping


@pytest.mark.acceptance("mapping: zero case, affine pre-clamp, synthetic fit to 1e-6")
def test_mapping_criteria():
    rng = np.random.default_rng(2)
    m = len(default_channels())
    offset = rng.uniform(0.0, 0.4, MOTOR_COUNT)
    weights = rng.normal(size=(MOTOR_COUNT, m)) * 0.1
    params = MappingParams(offset=offset, weights=weights)

    # zero case: all-zero expression lands exactly on the offset
    assert np.allclose(map_expression(np.zeros(m), params), offset, atol=1e-12)

    # affine pre-clamp
    f1, f2 = rng.uniform(0, 0.5, m), rng.uniform(0, 0.5, m)
    w0 = map_expression_raw(np.zeros(m), params)
    lhs = map_expression_raw(f1 + f2, params) - w0
    rhs = (map_expression_raw(f1, params) - w0) + (map_expression_raw(f2, params) - w0)
    assert np.allclose(lhs, rhs, atol=1e-12)

    # synthetic recovery
    samples = []
    for _ in range(3 * m):
        f = rng.uniform(0, 1, m)
        samples.append((f, offset + weights @ f))
    fitted, residual = fit_mapping(samples)
    assert np.max(np.abs(fitted.offset - offset)) <= 1e-6
    assert np.max(np.abs(fitted.weights - weights)) <= 1e-6


# ---------------------------------------------------------------------------
# protocol


@pytest.mark.acceptance("protocol: round-trips, exact chunking, delay cycles, 10k-input fuzz")
def test_protocol_criteria():
    # round-trip identity for every schema
    joint = JointStateMsg(
        timestamp_ns=123,
        entries=tuple(JointEntry(f"m{i:02d}", 0.1 * i, -0.01 * i, 0.5) for i in range(21)),
    )
    audio_samples = np.random.default_rng(1).uniform(-1, 1, (480, 2)).astype(np.float32)
    audio = AudioChunkMsg(sequence=7, timestamp_ns=70_000_000, sample_rate=48_000,
                          samples=audio_samples)
    camera = CameraFrameMsg(sequence=3, timestamp_ns=99, width=640, height=480,
                            points=((1, 320.0, 240.0), (2, 10.5, 20.25)))
    for topic_name, msg in (
        ("joint_states", joint),
        ("joint_targets", joint),
        ("audio_avatar", audio),
        ("camera_left", camera),
    ):
        topic = topic_by_name(topic_name)
        assert decode_payload(topic, encode_payload(msg)) == msg
        frame = encode_frame(topic.id, encode_payload(msg))
        topic_id, payload, consumed = decode_frame(frame)
        assert (topic_id, consumed) == (topic.id, len(frame))
        assert decode_payload(topic, payload) == msg

    # 10 ms chunking exactness at 48 kHz
    pcm = np.random.default_rng(5).uniform(-1, 1, (48_000, 2)).astype(np.float32)
    chunks = chunk_audio(pcm, 10.0, 48_000)
    assert all(c.frame_count == 480 for c in chunks)
    assert len(chunks) == 100

    # reassembly is bit-exact, padding excluded
    ragged = np.random.default_rng(6).uniform(-1, 1, (48_123, 2)).astype(np.float32)
    rebuilt, missing = reassemble_audio(chunk_audio(ragged, 10.0, 48_000))
    assert missing == []
    assert np.array_equal(rebuilt, ragged)

    # a 20 ms delay releases 10 ms chunks exactly two cycles late
    cycle_ns = 10_000_000
    buffer = DelayBuffer(20.0)
    for chunk in chunks[:10]:
        buffer.push(chunk)
    released_at = {}
    for step in range(14):
        for msg in buffer.release(step * cycle_ns):
            released_at[msg.sequence] = step * cycle_ns
    assert all(
        released_at[c.sequence] == c.timestamp_ns + 2 * cycle_ns for c in chunks[:10]
    )

    # fuzz: 10k random byte strings, structured errors only
    rng = np.random.default_rng(2025)
    for i in range(10_000):
        blob = rng.integers(0, 256, size=rng.integers(0, 96), dtype=np.uint8).tobytes()
        try:
            decode_frame(blob)
        except FrameDecodeError:
            pass
        try:
            decode_payload(topic_by_name("audio_avatar"), blob)
        except SchemaError:
            pass


# ---------------------------------------------------------------------------
# end to end


@pytest.mark.acceptance("end-to-end: deterministic greeting, bit-identical replay, 60-deg gaze split")
def test_end_to_end_offline(tmp_path):
    record_a = tmp_path / "a.session"
    record_b = tmp_path / "b.session"
    OfflineSession(scenario=packaged_scenario("greeting"), record_path=record_a).run()
    OfflineSession(scenario=packaged_scenario("greeting"), record_path=record_b).run()
    assert record_a.read_bytes() == record_b.read_bytes()

    identical, compared, mismatches = verify_replay(record_a)
    assert compared > 0 and identical, f"{mismatches} mismatches over {compared}"

    command = gaze_allocate(60.0)
    assert command.eye_yaw_left == 35.0
    assert command.eye_yaw_right == 35.0
    assert command.neck.yaw == pytest.approx(25.0, abs=1e-12)

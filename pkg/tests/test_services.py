import numpy as np
import pytest

from telehead.config import load_config
from telehead.expression import emotion_preset
from telehead.rig import default_rig
from telehead.services.gaze import gaze_allocate
from telehead.services.runtime import OfflineSession, replay_joint_states, verify_replay
from telehead.services.scenario import (
    ScenarioError,
    load_scenario,
    packaged_scenario,
    parse_scenario,
    scenario_end_time,
)
from telehead.services.session import SessionError, SessionWriter, read_session
from telehead.bus.messages import encode_payload


# ---------------------------------------------------------------------------
# gaze allocation


def test_gaze_within_eye_range_only_moves_eyes():
    cmd = gaze_allocate(20.0)
    assert cmd.eye_yaw_left == 20.0
    assert cmd.neck.yaw == 0.0
    assert not cmd.clamped


def test_gaze_beyond_eyes_spills_to_neck():
    cmd = gaze_allocate(60.0)
    assert cmd.eye_yaw_left == 35.0
    assert cmd.neck.yaw == pytest.approx(25.0)
    assert cmd.total_yaw == pytest.approx(60.0)


def test_gaze_zero_is_zero():
    cmd = gaze_allocate(0.0)
    assert cmd.eye_yaw_left == 0.0 and cmd.neck.yaw == 0.0 and cmd.eye_pitch == 0.0


def test_gaze_out_of_combined_range_clamps_with_flag():
    cmd = gaze_allocate(130.0)
    assert cmd.clamped
    assert cmd.total_yaw == pytest.approx(118.0)


def test_gaze_elevation_allocation():
    cmd = gaze_allocate(0.0, 20.0)
    assert cmd.eye_pitch == 8.0
    assert cmd.neck.pitch == pytest.approx(12.0)


# ---------------------------------------------------------------------------
# scenarios


def test_packaged_scenarios_load():
    for name in ("greeting", "object_follow", "tone_right"):
        events = packaged_scenario(name)
        assert events
        assert scenario_end_time(events) > 0


def test_scenario_rejects_bad_time_order():
    text = '{"t": 1.0, "event": "set_emotion", "name": "Happiness"}\n' \
           '{"t": 0.5, "event": "set_emotion", "name": "Sadness"}'
    with pytest.raises(ScenarioError):
        parse_scenario(text)


def test_scenario_rejects_unknown_emotion():
    with pytest.raises(ScenarioError):
        parse_scenario('{"t": 0, "event": "set_emotion", "name": "Bliss"}')


def test_scenario_rejects_bad_au():
    with pytest.raises(ScenarioError):
        parse_scenario('{"t": 0, "event": "set_au", "intensities": {"3": 0.5}}')


def test_scenario_rejects_object_behind_head():
    with pytest.raises(ScenarioError):
        parse_scenario(
            '{"t": 0, "event": "move_object", "path": [[0,0,1],[0,0,-1]], "duration_s": 1}'
        )


# ---------------------------------------------------------------------------
# offline end-to-end


@pytest.fixture(scope="module")
def happiness_run():
    events = parse_scenario('{"t": 0.0, "event": "set_emotion", "name": "Happiness"}')
    session = OfflineSession(scenario=events, duration_s=2.0)
    return session.run()


def test_offline_joint_states_flow(happiness_run):
    assert len(happiness_run.joint_states) == happiness_run.cycles
    assert len(happiness_run.joint_targets) == happiness_run.cycles


def test_offline_converges_to_preset(happiness_run):
    rig = default_rig()
    expected = rig.motions_to_motor_targets(emotion_preset("Happiness"))
    final = happiness_run.final_positions()
    for motor_id, target in expected.items():
        assert final[motor_id] == pytest.approx(target, abs=0.02), f"motor {motor_id}"


def test_offline_neutral_when_idle():
    result = OfflineSession(duration_s=0.5).run()
    assert all(abs(v) < 1e-9 for v in result.final_positions().values())


def test_greeting_moves_jaw_and_mouth_corners():
    result = OfflineSession(scenario=packaged_scenario("greeting")).run()
    jaw = result.position_history(18)
    assert max(jaw) > 0.3          # jaw opens
    mouth_up_l = result.position_history(16)
    assert max(mouth_up_l) > 0.5   # mouth corners rise
    pull_l = result.position_history(14)
    assert max(map(abs, pull_l)) > 0.1  # dimple pulls corners
    lid = result.position_history(5)
    assert min(lid) < -0.5         # blink (lower lid close is the - terminal)


def test_object_follow_saturates_eyes_then_neck():
    result = OfflineSession(scenario=packaged_scenario("object_follow")).run()
    eye_targets = result.target_history(1)
    neck_targets = result.target_history(19)
    # at the sweep extremes the eyes are pinned at their limit and the
    # neck carries the remaining 25 degrees
    assert max(eye_targets) == pytest.approx(35.0, abs=1e-6)
    assert min(eye_targets) == pytest.approx(-35.0, abs=1e-6)
    assert max(neck_targets) == pytest.approx(25.0, abs=0.5)
    assert min(neck_targets) == pytest.approx(-25.0, abs=0.5)
    # and the combined gaze reaches the scripted 60 degrees
    combined = [e + n for e, n in zip(eye_targets, neck_targets)]
    assert max(combined) == pytest.approx(60.0, abs=0.5)


def test_tone_scenario_produces_audio_levels():
    result = OfflineSession(scenario=packaged_scenario("tone_right")).run()
    assert result.audio_levels
    loud = [lvl for lvl in result.audio_levels if lvl.rms_left + lvl.rms_right > 1e-4]
    assert loud
    assert all(lvl.rms_right > lvl.rms_left for lvl in loud)


def test_operator_survives_missing_avatar_traffic():
    # an operator cycling with no joint_states inbound must not fail
    from telehead.bus.core import MessageBus
    from telehead.clock import VirtualClock
    from telehead.services.operator import OperatorSim

    bus = MessageBus()
    clock = VirtualClock()
    operator = OperatorSim(load_config(), bus, clock)
    for k in range(10):
        clock.advance_to_ns(k * 10_000_000)
        operator.on_cycle()
    assert operator.latest_joint_state is None


# ---------------------------------------------------------------------------
# record / replay


def test_record_and_replay_bit_identical(tmp_path):
    record = tmp_path / "greeting.session"
    OfflineSession(scenario=packaged_scenario("greeting"), record_path=record).run()
    identical, compared, mismatches = verify_replay(record)
    assert compared > 0
    assert identical, f"{mismatches} replay mismatches"


def test_two_runs_identical_records(tmp_path):
    a, b = tmp_path / "a.session", tmp_path / "b.session"
    OfflineSession(scenario=packaged_scenario("greeting"), record_path=a).run()
    OfflineSession(scenario=packaged_scenario("greeting"), record_path=b).run()
    assert a.read_bytes() == b.read_bytes()


def test_truncated_session_file_reports_offset(tmp_path):
    record = tmp_path / "cut.session"
    OfflineSession(duration_s=0.2, record_path=record).run()
    blob = record.read_bytes()
    cut = tmp_path / "cut2.session"
    cut.write_bytes(blob[: len(blob) - 5])
    with pytest.raises(SessionError) as err:
        list(read_session(cut))
    assert err.value.offset > 0


def test_corrupt_session_header_rejected(tmp_path):
    bad = tmp_path / "bad.session"
    bad.write_bytes(b"NOTASESSION")
    with pytest.raises(SessionError):
        list(read_session(bad))


def test_replay_of_recorded_targets_only(tmp_path):
    record = tmp_path / "happy.session"
    events = parse_scenario('{"t": 0.0, "event": "set_emotion", "name": "Happiness"}')
    result = OfflineSession(scenario=events, duration_s=1.5, record_path=record).run()
    replayed = replay_joint_states(record)
    original = [encode_payload(m) for m in result.joint_states]
    again = [encode_payload(m) for m in replayed]
    assert original == again


def test_expression_stream_zero_publishes_offsets():
    from telehead.expression import MappingParams, default_channels
    from telehead.services.operator import ExpressionStream

    m = len(default_channels())
    offsets = np.linspace(0.05, 0.4, 21)
    mapping = MappingParams(offset=offsets, weights=np.zeros((21, m)))
    stream = ExpressionStream([(0.0, np.zeros(m))])
    result = OfflineSession(
        duration_s=1.5, mapping=mapping, expressions=stream
    ).run()
    first_targets = result.joint_targets[0]
    assert np.allclose([e.position for e in first_targets.entries], offsets)
    final = result.final_positions()
    for motor_id, want in zip(range(1, 22), offsets):
        assert final[motor_id] == pytest.approx(want, abs=0.02)


def test_config_can_override_rig_ranges(tmp_path):
    from importlib import resources
    from telehead.config import load_config, rig_from_config

    text = resources.files("telehead.data").joinpath("head_rig_v1.tsv").read_text("utf-8")
    text = text.replace("29\t19\tdeg\t-83\t83\tHead turn", "29\t19\tdeg\t-10\t10\tHead turn")
    override = tmp_path / "narrow_rig.tsv"
    override.write_text(text)
    config = load_config()
    config["rig_table"] = str(override)
    rig = rig_from_config(config)
    assert rig.motion_range(29) == (-10.0, 10.0)
    assert rig.clamp_motion(29, 50.0) == 10.0

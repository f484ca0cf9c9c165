import numpy as np
import pytest

from telehead.bus import AudioChunkMsg, DelayBuffer, chunk_audio, reassemble_audio
from telehead.bus.audio import frames_per_chunk


def stereo_noise(frames, seed=0):
    return np.random.default_rng(seed).uniform(-1, 1, (frames, 2)).astype(np.float32)


def test_chunk_size_arithmetic():
    assert frames_per_chunk(48_000, 10.0) == 480
    assert frames_per_chunk(16_000, 20.0) == 320
    with pytest.raises(ValueError):
        frames_per_chunk(44_100, 0.1)


def test_hundred_ms_makes_ten_chunks():
    pcm = stereo_noise(4800)
    chunks = chunk_audio(pcm, 10.0, 48_000)
    assert len(chunks) == 10
    assert [c.sequence for c in chunks] == list(range(10))
    assert all(c.frame_count == 480 for c in chunks)
    assert all(not c.padded for c in chunks)
    assert [c.timestamp_ns for c in chunks] == [i * 10_000_000 for i in range(10)]


def test_partial_final_chunk_padded_and_flagged():
    pcm = stereo_noise(500)
    chunks = chunk_audio(pcm, 10.0, 48_000)
    assert len(chunks) == 2
    assert chunks[0].padded is False
    assert chunks[1].padded is True
    assert chunks[1].valid_frames == 20
    assert not chunks[1].samples[20:].any()


def test_round_trip_bit_exact():
    pcm = stereo_noise(4321, seed=9)
    chunks = chunk_audio(pcm, 10.0, 48_000)
    rebuilt, missing = reassemble_audio(chunks)
    assert missing == []
    assert rebuilt.dtype == np.float32
    assert np.array_equal(rebuilt, pcm)


def test_mono_input_duplicated():
    mono = np.linspace(-1, 1, 480, dtype=np.float32)
    chunks = chunk_audio(mono, 10.0, 48_000)
    assert np.array_equal(chunks[0].samples[:, 0], chunks[0].samples[:, 1])


def test_reassemble_reports_gaps():
    chunks = chunk_audio(stereo_noise(1440), 10.0, 48_000)
    rebuilt, missing = reassemble_audio([chunks[0], chunks[2]])
    assert missing == [1]
    assert len(rebuilt) == 960


def test_reassemble_rejects_reordered():
    chunks = chunk_audio(stereo_noise(1440), 10.0, 48_000)
    with pytest.raises(ValueError):
        reassemble_audio([chunks[1], chunks[0]])


def _chunk(seq, ts):
    return AudioChunkMsg(
        sequence=seq,
        timestamp_ns=ts,
        sample_rate=48_000,
        samples=np.zeros((480, 2), dtype=np.float32),
    )


def test_zero_delay_passthrough_in_order():
    buf = DelayBuffer(0.0)
    msgs = [_chunk(i, i * 10_000_000) for i in range(5)]
    for m in msgs:
        buf.push(m)
    assert buf.release(40_000_000) == msgs


def test_twenty_ms_delay_releases_two_cycles_late():
    cycle_ns = 10_000_000
    buf = DelayBuffer(20.0)
    msgs = [_chunk(i, i * cycle_ns) for i in range(10)]
    for m in msgs:
        buf.push(m)
    released = {}
    for step in range(16):
        now = step * cycle_ns
        for msg in buf.release(now):
            released[msg.sequence] = now
    for msg in msgs:
        assert released[msg.sequence] == msg.timestamp_ns + 2 * cycle_ns


def test_delay_preserves_spacing():
    buf = DelayBuffer(35.0)
    stamps = [0, 7_000_000, 9_000_000, 30_000_000]
    for i, ts in enumerate(stamps):
        buf.push(_chunk(i, ts))
    release_times = []
    for now in range(0, 100_000_000, 1_000_000):
        for msg in buf.release(now):
            release_times.append(now)
    deltas_in = [b - a for a, b in zip(stamps, stamps[1:])]
    deltas_out = [b - a for a, b in zip(release_times, release_times[1:])]
    assert deltas_out == deltas_in


def test_delay_ordering_validation():
    buf = DelayBuffer(10.0)
    buf.push(_chunk(0, 100))
    with pytest.raises(ValueError):
        buf.push(_chunk(1, 50))


def test_audio_and_video_alignment_scenario():
    # audio is fast, video slow by 30 ms; delaying audio 30 ms lines
    # their release times up within one cycle
    cycle_ns = 10_000_000
    video_latency_ns = 30_000_000
    audio_buf = DelayBuffer(30.0)
    video_buf = DelayBuffer(0.0)
    audio_release, video_release = {}, {}
    for step in range(30):
        now = step * cycle_ns
        capture = now
        audio_buf.push(_chunk(step, capture))
        if now >= video_latency_ns:
            # video arriving late: captured 30 ms ago
            video_buf.push(_chunk(step - 3, capture - video_latency_ns), capture_ns=capture)
        for msg in audio_buf.release(now):
            audio_release[msg.sequence] = now
        for msg in video_buf.release(now):
            video_release[msg.sequence] = now
    shared = sorted(set(audio_release) & set(video_release))
    assert shared
    for seq in shared:
        assert abs(audio_release[seq] - video_release[seq]) <= cycle_ns

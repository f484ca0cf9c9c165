"""Audio chunking: fixed-duration blocks aligned to the bus cycle."""

from __future__ import annotations

import numpy as np

from .messages import AudioChunkMsg


def frames_per_chunk(sample_rate: int, cycle_ms: float) -> int:
    """Exact frame count for one cycle; rejects non-integral splits."""
    exact = sample_rate * cycle_ms / 1000.0
    count = int(round(exact))
    if count <= 0 or abs(exact - count) > 1e-9:
        raise ValueError(
            f"cycle of {cycle_ms} ms does not hold a whole number of frames "
            f"at {sample_rate} Hz"
        )
    return count


def chunk_audio(
    samples: np.ndarray,
    cycle_ms: float,
    sample_rate: int,
    *,
    start_sequence: int = 0,
    start_timestamp_ns: int = 0,
) -> list[AudioChunkMsg]:
    """Split a stereo PCM block into per-cycle chunks.

    ``samples`` is float32 with shape (n, 2); a mono vector is
    duplicated onto both channels.  Every chunk holds exactly one
    cycle of frames; a final partial chunk is zero-padded with its
    ``valid_frames`` recording how much is real.
    """
    if cycle_ms <= 0:
        raise ValueError(f"cycle_ms must be > 0, got {cycle_ms}")
    pcm = np.asarray(samples, dtype=np.float32)
    if pcm.ndim == 1:
        pcm = np.stack([pcm, pcm], axis=1)
    if pcm.ndim != 2 or pcm.shape[1] != 2:
        raise ValueError(f"samples must have shape (n, 2) or (n,), got {pcm.shape}")

    per_chunk = frames_per_chunk(sample_rate, cycle_ms)
    cycle_ns = int(round(cycle_ms * 1e6))
    chunks = []
    for seq, offset in enumerate(range(0, len(pcm), per_chunk)):
        block = pcm[offset : offset + per_chunk]
        valid = block.shape[0]
        if valid < per_chunk:
            padded = np.zeros((per_chunk, 2), dtype=np.float32)
            padded[:valid] = block
            block = padded
        chunks.append(
            AudioChunkMsg(
                sequence=start_sequence + seq,
                timestamp_ns=start_timestamp_ns + seq * cycle_ns,
                sample_rate=sample_rate,
                samples=block,
                valid_frames=valid,
            )
        )
    return chunks


def reassemble_audio(chunks: list[AudioChunkMsg]) -> tuple[np.ndarray, list[int]]:
    """Concatenate chunk payloads back into a waveform, padding excluded.

    Returns ``(samples, missing_sequences)``: sequence numbers must be
    strictly increasing, and any gaps are reported rather than hidden.
    """
    if not chunks:
        return np.zeros((0, 2), dtype=np.float32), []
    missing: list[int] = []
    previous = None
    parts = []
    for chunk in chunks:
        if previous is not None:
            if chunk.sequence <= previous:
                raise ValueError(
                    f"chunk sequences must increase (got {chunk.sequence} after {previous})"
                )
            missing.extend(range(previous + 1, chunk.sequence))
        parts.append(chunk.samples[: chunk.valid_frames])
        previous = chunk.sequence
    return np.concatenate(parts, axis=0), missing

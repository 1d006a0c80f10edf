"""WAV loading, fixed 1/30 s framing, and speech/non-speech filtering.

Only PCM RIFF WAV (8/16-bit) is supported; callers pre-convert anything
else.  Resampling is linear interpolation, which is adequate because every
downstream feature lives well below Nyquist at both 16 and 48 kHz.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

DEFAULT_WINDOW_S = 1.0 / 30.0


class AudioError(Exception):
    pass


@dataclass(frozen=True)
class AudioBuffer:
    samples: np.ndarray  # float64, normalized to [-1, 1]
    sample_rate: int

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class Frame:
    index: int
    start_s: float
    samples: np.ndarray
    rms_energy: float
    is_speech: bool = False


@dataclass(frozen=True)
class VadConfig:
    absolute_floor: float = 1e-4
    median_ratio: float = 0.5  # adaptive floor = max(abs floor, ratio * median RMS)
    min_voice_band_fraction: float = 0.4
    voice_band_low_hz: float = 300.0
    voice_band_high_hz: float = 2500.0


def load_audio(path, target_rate: int) -> AudioBuffer:
    """Read a PCM WAV file as a mono buffer at target_rate."""
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            sampwidth = wf.getsampwidth()
            rate = wf.getframerate()
            n_frames = wf.getnframes()
            raw = wf.readframes(n_frames)
    except (OSError, wave.Error) as exc:
        raise AudioError(f"cannot read WAV file {path}: {exc}") from exc

    if sampwidth == 1:
        data = np.frombuffer(raw, dtype=np.uint8).astype(np.float64)
        data = (data - 128.0) / 128.0
    elif sampwidth == 2:
        data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    else:
        raise AudioError(f"unsupported sample width {8 * sampwidth} bits (PCM 8/16 only)")

    if data.size == 0:
        raise AudioError(f"zero-length audio in {path}")
    if n_channels > 1:
        data = data.reshape(-1, n_channels).mean(axis=1)

    if rate != target_rate:
        duration = data.size / rate
        n_out = int(round(duration * target_rate))
        t_out = np.arange(n_out) / target_rate
        t_in = np.arange(data.size) / rate
        data = np.interp(t_out, t_in, data)

    return AudioBuffer(samples=np.clip(data, -1.0, 1.0), sample_rate=target_rate)


def frame_signal(audio: AudioBuffer, window_s: float = DEFAULT_WINDOW_S) -> list[Frame]:
    """Cut the buffer into non-overlapping windows.

    A trailing partial window shorter than half the window is dropped,
    otherwise it is zero-padded to full length.
    """
    if window_s <= 0:
        raise ValueError("window_s must be positive")
    step = window_s * audio.sample_rate
    if step < 1:
        raise ValueError("window_s too small for the sample rate")

    # Boundaries are computed from time, not a fixed sample stride, so the
    # frame count never drifts on long files.
    frames: list[Frame] = []
    n = len(audio.samples)
    index = 0
    while True:
        lo = round(index * step)
        hi = round((index + 1) * step)
        if lo >= n:
            break
        chunk = audio.samples[lo:hi]
        if hi > n:
            # trailing partial window: drop below half-length, else pad
            if len(chunk) < (hi - lo) / 2:
                break
            chunk = np.concatenate([chunk, np.zeros(hi - n)])
        rms = float(np.sqrt(np.mean(chunk ** 2)))
        frames.append(Frame(index=index, start_s=index * window_s,
                            samples=chunk, rms_energy=rms))
        index += 1
    return frames


def _voice_band_fraction(samples: np.ndarray, rate: int,
                         low_hz: float, high_hz: float) -> float:
    spectrum = np.abs(np.fft.rfft(samples)) ** 2
    total = spectrum.sum()
    if total <= 0:
        return 0.0
    freqs = np.fft.rfftfreq(len(samples), d=1.0 / rate)
    band = spectrum[(freqs >= low_hz) & (freqs <= high_hz)].sum()
    return float(band / total)


def filter_speech(frames: Sequence[Frame], config: VadConfig,
                  sample_rate: int) -> list[Frame]:
    """Mark frames as speech/non-speech; timing and ordering are preserved.

    The energy floor adapts to the recording: max(absolute floor,
    median_ratio * median frame RMS), so per-recording gain differences do
    not change the outcome.
    """
    if not frames:
        return []
    median_rms = float(np.median([f.rms_energy for f in frames]))
    floor = max(config.absolute_floor, config.median_ratio * median_rms)

    out = []
    for f in frames:
        speech = f.rms_energy >= floor
        if speech:
            frac = _voice_band_fraction(f.samples, sample_rate,
                                        config.voice_band_low_hz,
                                        config.voice_band_high_hz)
            speech = frac >= config.min_voice_band_fraction
        out.append(replace(f, is_speech=speech))
    return out

"""Alignment scoring against interpolated ground-truth markers, WER, and a
deterministic synthetic benchmark.

The reference corpora behind the original accuracy figures are not
distributable, so the benchmark synthesizes a speech-phoneme stream and a
corrupted transcript from a clean reference text, at a corruption level
matching the high-WER regime this tool targets.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .labels import DETECTABLE
from .phoneme_audio import TimedPhoneme
from .phoneme_text import (PronouncingDictionary, SUBSTITUTIONS, WordPhonemes,
                           phonemize, to_detectable)


@dataclass(frozen=True)
class GroundTruthMarker:
    time_s: float
    word_index: int


@dataclass(frozen=True)
class ErrorCurve:
    margins_s: tuple
    fraction_within: tuple

    def at(self, margin_s: float) -> float:
        return self.fraction_within[self.margins_s.index(margin_s)]


@dataclass(frozen=True)
class CorruptionConfig:
    p_word_drop: float = 0.35
    p_word_substitute: float = 0.35
    p_phoneme_noise: float = 0.1
    silence_gaps: tuple = ()  # (start_s, duration_s) pairs
    rng_seed: int = 1
    # timeline shape
    word_interval_s: float = 0.8
    phoneme_rate: float = 30.0  # phoneme slots per second within a word
    duplication: int = 2  # speech redundancy per text phoneme
    timing_jitter: float = 0.25  # fractional jitter on intervals/durations
    # an ASR-style split: a substituted word drags in a second word
    p_substitute_split: float = 1.0


def check_markers(markers: Sequence[GroundTruthMarker]) -> None:
    if len(markers) < 2:
        raise ValueError("need at least 2 ground-truth markers")
    for a, b in zip(markers, markers[1:]):
        if b.time_s <= a.time_s or b.word_index <= a.word_index:
            raise ValueError("markers must strictly increase in time and word index")


def interpolate_truth(markers: Sequence[GroundTruthMarker],
                      total_words: int) -> np.ndarray:
    """Per-word true timestamps: linear between markers, clamped outside."""
    check_markers(markers)
    if any(m.word_index >= total_words for m in markers):
        raise ValueError("marker word_index beyond transcript length")
    idx = np.array([m.word_index for m in markers], dtype=float)
    times = np.array([m.time_s for m in markers], dtype=float)
    return np.interp(np.arange(total_words, dtype=float), idx, times)


def error_curve(aligned: Sequence, truth: np.ndarray,
                margins: Sequence[float] = tuple(range(1, 101)),
                use_raw: bool = False,
                ) -> tuple[ErrorCurve, list[tuple[float, float]]]:
    """Fraction of words aligned within each margin, plus the per-time error
    trace (x = true audio time, y = absolute error)."""
    if len(aligned) != len(truth):
        raise ValueError("aligned words and truth cover different word counts")
    ts = np.array([w.raw_timestamp_s if use_raw else w.timestamp_s for w in aligned])
    errors = np.abs(ts - truth)
    fractions = tuple(float(np.mean(errors <= m)) for m in margins)
    trace = [(float(t), float(e)) for t, e in zip(truth, errors)]
    return ErrorCurve(margins_s=tuple(margins), fraction_within=fractions), trace


def avg_matching_error(aligned: Sequence, truth: np.ndarray,
                       use_raw: bool = False) -> float:
    ts = np.array([w.raw_timestamp_s if use_raw else w.timestamp_s for w in aligned])
    return float(np.mean(np.abs(ts - truth))) if len(truth) else 0.0


def word_error_rate(reference: Sequence[str], hypothesis: Sequence[str]) -> float:
    """Word-level edit distance over reference length.

    An empty reference with a nonempty hypothesis has no finite WER and is
    reported as the inf sentinel.
    """
    if not reference:
        return math.inf if hypothesis else 0.0
    hyp = np.array(hypothesis, dtype=object)
    n = len(hyp)
    ramp = np.arange(n + 1)
    prev = ramp.astype(np.int64)
    for i, ref in enumerate(reference, 1):
        nodep = np.minimum(prev[:-1] + (hyp != ref), prev[1:] + 1)
        cand = np.concatenate(([i], nodep - ramp[1:]))
        prev = np.minimum.accumulate(cand) + ramp
    return float(prev[-1]) / len(reference)


_INLINE_MARKER_RE = re.compile(r"\[t=([0-9.]+)\]")


def parse_inline_markers(text: str) -> tuple[str, list[GroundTruthMarker]]:
    """Extract `[t=SECONDS]` markers; each points at the next word."""
    markers = []
    clean_parts = []
    word_count = 0
    for piece in text.split():
        m = _INLINE_MARKER_RE.fullmatch(piece)
        if m:
            markers.append(GroundTruthMarker(time_s=float(m.group(1)),
                                             word_index=word_count))
        else:
            clean_parts.append(piece)
            word_count += 1
    return " ".join(clean_parts), markers


def read_marker_file(path) -> list[GroundTruthMarker]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected time<TAB>word_index")
            out.append(GroundTruthMarker(time_s=float(parts[0]),
                                         word_index=int(parts[1])))
    check_markers(out)
    return out


def write_marker_file(markers: Sequence[GroundTruthMarker], path) -> None:
    with open(path, "w") as fh:
        for m in markers:
            fh.write(f"{m.time_s:.3f}\t{m.word_index}\n")


@dataclass
class Benchmark:
    speech: list[TimedPhoneme]
    corrupted_transcript: str
    truth_markers: list[GroundTruthMarker]
    # exact per-word truth for the corrupted transcript, for diagnostics
    corrupted_word_times: list[float] = field(default_factory=list)
    reference_words: list[str] = field(default_factory=list)
    corrupted_words: list[str] = field(default_factory=list)


def synthesize_benchmark(reference_text: str, config: CorruptionConfig,
                         dictionary: PronouncingDictionary,
                         subs: dict = SUBSTITUTIONS,
                         marker_interval_s: float = 10.0) -> Benchmark:
    """Deterministic synthetic corpus generator.

    Phonemes of the reference are laid on a timeline (duplicated, with
    optional label noise and timing jitter), silence gaps shift the
    timeline, and the transcript is independently corrupted with word drops
    and similar-sounding substitutions.  Everything derives from rng_seed.
    """
    words = phonemize(reference_text, dictionary, subs)
    if not any(w.detectable for w in words):
        raise ValueError("reference text produced no detectable phonemes")
    rng = random.Random(config.rng_seed)

    # substitution pool, keyed by a word's first detectable phoneme
    pool: dict = {}
    for entry, phonemes in sorted(dictionary.entries.items()):
        det = to_detectable(phonemes, subs)
        if det:
            pool.setdefault(det[0], []).append(entry)

    gaps = sorted(config.silence_gaps)
    gap_i = 0
    t = 0.0
    speech: list[TimedPhoneme] = []
    word_times: list[float] = []
    for w in words:
        while gap_i < len(gaps) and t >= gaps[gap_i][0]:
            t += gaps[gap_i][1]
            gap_i += 1
        word_times.append(t)
        interval = config.word_interval_s
        if config.timing_jitter:
            interval *= 1.0 + config.timing_jitter * rng.uniform(-1, 1)
        slots = len(w.detectable) * config.duplication
        if slots:
            slot_dur = min(1.0 / config.phoneme_rate, interval / slots)
            pos = t
            for label in w.detectable:
                for _ in range(config.duplication):
                    emitted = label
                    if config.p_phoneme_noise and rng.random() < config.p_phoneme_noise:
                        emitted = rng.choice(DETECTABLE)
                    dur = slot_dur
                    if config.timing_jitter:
                        dur *= 1.0 + config.timing_jitter * rng.uniform(-1, 1)
                    speech.append(TimedPhoneme(label=emitted, start_s=pos,
                                               end_s=pos + dur))
                    pos += dur
        t += interval

    corrupted: list[str] = []
    corrupted_times: list[float] = []
    for w, wt in zip(words, word_times):
        if rng.random() < config.p_word_drop:
            continue
        surface = w.token.normalized
        if rng.random() < config.p_word_substitute:
            candidates = pool.get(w.detectable[0] if w.detectable else None, [])
            candidates = [c for c in candidates if c != surface]
            if candidates:
                surface = rng.choice(candidates)
            if rng.random() < config.p_substitute_split:
                extra_pool = pool.get(rng.choice(DETECTABLE), [])
                if extra_pool:
                    corrupted.append(surface.lower())
                    corrupted_times.append(wt)
                    surface = rng.choice(extra_pool)
        corrupted.append(surface.lower())
        corrupted_times.append(wt)

    markers: list[GroundTruthMarker] = []
    end_t = t
    k = 0.0
    last_word = -1
    while k <= end_t:
        idx = next((i for i, wt in enumerate(corrupted_times) if wt >= k), None)
        if idx is not None and idx > last_word and \
                (not markers or corrupted_times[idx] > markers[-1].time_s):
            # marker carries the word's exact time, sampled every ~10 s
            markers.append(GroundTruthMarker(time_s=corrupted_times[idx],
                                             word_index=idx))
            last_word = idx
        k += marker_interval_s
    final = len(corrupted_times) - 1
    if final > last_word and (not markers or corrupted_times[final] > markers[-1].time_s):
        markers.append(GroundTruthMarker(time_s=corrupted_times[final],
                                         word_index=final))

    return Benchmark(speech=speech,
                     corrupted_transcript=" ".join(corrupted),
                     truth_markers=markers,
                     corrupted_word_times=corrupted_times,
                     reference_words=[w.token.normalized.lower() for w in words],
                     corrupted_words=list(corrupted))


def write_curve_csv(curve: ErrorCurve, path) -> None:
    with open(path, "w") as fh:
        fh.write("margin_s,fraction\n")
        for m, f in zip(curve.margins_s, curve.fraction_within):
            fh.write(f"{m},{f:.6f}\n")


def write_trace_csv(trace: Sequence[tuple[float, float]], path) -> None:
    with open(path, "w") as fh:
        fh.write("audio_time_s,error_s\n")
        for t, e in trace:
            fh.write(f"{t:.3f},{e:.3f}\n")


def write_svg_plot(points: Sequence[tuple[float, float]], path, *,
                   width: int = 800, height: int = 400,
                   shaded_regions: Sequence[tuple[float, float]] = (),
                   x_label: str = "", y_label: str = "") -> None:
    """Minimal deterministic SVG line plot with optional shaded x-ranges."""
    if not points:
        points = [(0.0, 0.0)]
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, x1 = min(xs), max(xs) or 1.0
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 40

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    for start, dur in shaded_regions:
        rx0, rx1 = sx(max(start, x0)), sx(min(start + dur, x1))
        if rx1 > rx0:
            parts.append(f'<rect x="{rx0:.1f}" y="{pad}" width="{rx1 - rx0:.1f}" '
                         f'height="{height - 2 * pad}" fill="#cccccc"/>')
    poly = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in points)
    parts.append(f'<polyline points="{poly}" fill="none" stroke="black" stroke-width="1"/>')
    parts.append(f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
                 f'y2="{height - pad}" stroke="black"/>')
    parts.append(f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>')
    if x_label:
        parts.append(f'<text x="{width // 2}" y="{height - 8}" font-size="12" '
                     f'text-anchor="middle">{x_label}</text>')
    if y_label:
        parts.append(f'<text x="12" y="{height // 2}" font-size="12" '
                     f'text-anchor="middle" transform="rotate(-90 12 {height // 2})">'
                     f'{y_label}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")

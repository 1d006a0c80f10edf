"""Per-frame phoneme classification and same-label merging.

Monophthongs are identified from the first three resonances of an all-pole
model of the frame (formants F1-F3) by weighted nearest-neighbor lookup in
a reference table.  The fricatives SH and S are identified from spectral
band energies: SH lives in 2500-3000 Hz, S in 3000-4000 Hz, everything
else in 300-2500 Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional, Sequence

import numpy as np

from .audio_ingest import Frame
from .labels import DETECTABLE_SET, MONOPHTHONGS

PRE_EMPHASIS = 0.97
MIN_FORMANT_HZ = 90.0
MAX_FORMANT_BANDWIDTH_HZ = 600.0

SH_BAND = (2500.0, 3000.0)
S_BAND = (3000.0, 4000.0)
LOW_BAND = (300.0, 2500.0)


@dataclass(frozen=True)
class FormantFrame:
    f1: float
    f2: float
    f3: float
    voiced_confidence: float  # diagnostic only, 1 - spectral flatness


@dataclass(frozen=True)
class BandEnergies:
    low: float
    sh_band: float
    s_band: float
    total: float


@dataclass(frozen=True)
class FormantReferenceTable:
    entries: dict  # symbol -> (f1, f2, f3), one entry per monophthong
    weights: tuple = (1.0, 0.5, 0.25)
    distance_threshold: float = 350.0

    def __post_init__(self):
        missing = set(MONOPHTHONGS) - set(self.entries)
        if missing:
            raise ValueError(f"reference table missing entries: {sorted(missing)}")
        if any(w <= 0 for w in self.weights) or self.distance_threshold <= 0:
            raise ValueError("weights and distance_threshold must be positive")


@dataclass(frozen=True)
class ClassifierConfig:
    fricative_margin: float = 1.0
    model_order: Optional[int] = None  # None: derived from the sample rate


@dataclass(frozen=True)
class TimedPhoneme:
    label: str
    start_s: float
    end_s: float


def load_formant_table(path=None) -> FormantReferenceTable:
    """Read a `SYMBOL f1 f2 f3` table; defaults to the shipped one."""
    if path is None:
        text = resources.files("phonalign.data").joinpath("formants.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    entries = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"bad formant table line: {line!r}")
        entries[parts[0].upper()] = tuple(float(x) for x in parts[1:])
    return FormantReferenceTable(entries=entries)


def default_model_order(sample_rate: int) -> int:
    # 12 poles at 16 kHz, 24 at 48 kHz, linear in between.
    return max(8, round(6 + 3 * sample_rate / 8000))


def _levinson(r: np.ndarray, order: int) -> Optional[np.ndarray]:
    """Levinson-Durbin recursion; returns LPC polynomial [1, a1..ap]."""
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    if err <= 0:
        return None
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1:0:-1])
        k = -acc / err
        a[1:i + 1] += k * a[i - 1::-1][:i]
        err *= 1.0 - k * k
        if err <= 0:
            return None
    return a


def _spectral_flatness(samples: np.ndarray) -> float:
    power = np.abs(np.fft.rfft(samples)) ** 2
    power = power[power > 0]
    if power.size == 0:
        return 1.0
    geo = math.exp(float(np.mean(np.log(power))))
    return float(geo / np.mean(power))


def estimate_formants(frame: Frame, sample_rate: int,
                      model_order: Optional[int] = None) -> Optional[FormantFrame]:
    """First three qualifying resonances of an all-pole fit, or None."""
    if model_order is None:
        model_order = default_model_order(sample_rate)
    x = np.asarray(frame.samples, dtype=np.float64)
    if np.allclose(x, x[0]):
        return None
    x = np.append(x[0], x[1:] - PRE_EMPHASIS * x[:-1])
    x = x * np.hanning(len(x))

    r = np.correlate(x, x, mode="full")[len(x) - 1:len(x) + model_order]
    a = _levinson(r, model_order)
    if a is None:
        return None

    roots = np.roots(a)
    roots = roots[roots.imag > 0]
    freqs = np.angle(roots) * sample_rate / (2 * math.pi)
    bws = -np.log(np.abs(roots)) * sample_rate / math.pi
    ok = (freqs > MIN_FORMANT_HZ) & (freqs < sample_rate / 2 - 50) \
        & (bws < MAX_FORMANT_BANDWIDTH_HZ) & (bws > 0)
    freqs = np.sort(freqs[ok])
    if len(freqs) < 3:
        return None
    return FormantFrame(f1=float(freqs[0]), f2=float(freqs[1]), f3=float(freqs[2]),
                        voiced_confidence=1.0 - _spectral_flatness(frame.samples))


def classify_monophthong(formants: FormantFrame,
                         table: FormantReferenceTable) -> Optional[str]:
    """Weighted nearest reference entry, or None beyond the distance
    threshold.  Ties go to the earlier symbol in the canonical order."""
    w1, w2, w3 = table.weights
    best_label, best_dist = None, math.inf
    for symbol in MONOPHTHONGS:
        f1r, f2r, f3r = table.entries[symbol]
        dist = math.sqrt((w1 * (formants.f1 - f1r)) ** 2
                         + (w2 * (formants.f2 - f2r)) ** 2
                         + (w3 * (formants.f3 - f3r)) ** 2)
        if dist < best_dist:
            best_label, best_dist = symbol, dist
    if best_dist > table.distance_threshold:
        return None
    return best_label


def band_energies(frame: Frame, sample_rate: int) -> BandEnergies:
    """Magnitude-spectrum energy in the three detection bands, normalized
    by total frame energy."""
    spectrum = np.abs(np.fft.rfft(frame.samples)) ** 2
    total = float(spectrum.sum())
    if total <= 0:
        return BandEnergies(0.0, 0.0, 0.0, 0.0)
    freqs = np.fft.rfftfreq(len(frame.samples), d=1.0 / sample_rate)

    def band(lo, hi):
        return float(spectrum[(freqs >= lo) & (freqs <= hi)].sum() / total)

    return BandEnergies(low=band(*LOW_BAND), sh_band=band(*SH_BAND),
                        s_band=band(*S_BAND), total=total)


def classify_frame(frame: Frame, sample_rate: int, table: FormantReferenceTable,
                   config: ClassifierConfig = ClassifierConfig()) -> Optional[str]:
    """One of the 12 detectable labels, or None.

    Fricatives win when their band energy dominates the low band; otherwise
    the formant path decides.  A tie between the two fricative bands goes
    to SH.
    """
    bands = band_energies(frame, sample_rate)
    if max(bands.sh_band, bands.s_band) > bands.low * config.fricative_margin:
        return "S" if bands.s_band > bands.sh_band else "SH"
    formants = estimate_formants(frame, sample_rate, config.model_order)
    if formants is None:
        return None
    return classify_monophthong(formants, table)


def merge_phonemes(labels: Iterable[tuple[int, Optional[str]]],
                   window_s: float) -> list[TimedPhoneme]:
    """Collapse maximal runs of adjacent equal labels into timed phonemes.

    None labels and index gaps break runs.
    """
    out: list[TimedPhoneme] = []
    run_label = None
    run_start = run_end = -1
    prev_index = None

    def flush():
        if run_label is not None:
            out.append(TimedPhoneme(label=run_label,
                                    start_s=run_start * window_s,
                                    end_s=(run_end + 1) * window_s))

    for index, label in labels:
        if prev_index is not None and index <= prev_index:
            raise ValueError("frame indices must be strictly increasing")
        adjacent = prev_index is not None and index == prev_index + 1
        if label == run_label and label is not None and adjacent:
            run_end = index
        else:
            flush()
            run_label, run_start, run_end = label, index, index
        prev_index = index
    flush()
    return [p for p in out if p.label is not None]


def write_timed_phonemes(phonemes: Sequence[TimedPhoneme], path) -> None:
    with open(path, "w") as fh:
        for p in phonemes:
            fh.write(f"{p.start_s:.3f}\t{p.end_s:.3f}\t{p.label}\n")


def read_timed_phonemes(path) -> list[TimedPhoneme]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[2] not in DETECTABLE_SET:
                raise ValueError(f"{path}:{lineno}: bad timed-phoneme line")
            out.append(TimedPhoneme(label=parts[2], start_s=float(parts[0]),
                                    end_s=float(parts[1])))
    return out

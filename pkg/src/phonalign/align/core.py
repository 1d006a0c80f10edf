"""Global alignment of text phonemes to speech phonemes and word timestamping.

The cost model follows the asymmetric scheme used throughout this project:
copies and deletions cost -1, insertions and replacements cost +1, and no
transpositions exist.  `align_quadratic` is the straightforward full-matrix
reference; `align_linear_space` is a divide-and-conquer variant whose memory
scales with the shorter sequence, for hour-scale runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import _backend

COPY = "copy"
DELETE = "delete"
INSERT = "insert"
REPLACE = "replace"

_EPS = 1e-9


class EditOp(NamedTuple):
    kind: str
    speech_index: Optional[int]
    text_index: Optional[int]


@dataclass(frozen=True)
class AlignConfig:
    copy_cost: float = -1.0
    delete_cost: float = -1.0
    insert_cost: float = 1.0
    replace_cost: float = 1.0
    # "first" anchors a word at its first matched phoneme, "median" at the
    # median start time of all matched phonemes.
    timestamp_mode: str = "first"

    def op_cost(self, kind: str) -> float:
        return {
            COPY: self.copy_cost,
            DELETE: self.delete_cost,
            INSERT: self.insert_cost,
            REPLACE: self.replace_cost,
        }[kind]


@dataclass
class Alignment:
    ops: list[EditOp]
    score: float
    copies: int
    deletions: int
    insertions: int
    replacements: int

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (self.copies, self.deletions, self.insertions, self.replacements)

    @classmethod
    def from_ops(cls, ops: list[EditOp], config: AlignConfig) -> "Alignment":
        counts = {COPY: 0, DELETE: 0, INSERT: 0, REPLACE: 0}
        score = 0.0
        for op in ops:
            counts[op.kind] += 1
            score += config.op_cost(op.kind)
        return cls(ops, score, counts[COPY], counts[DELETE],
                   counts[INSERT], counts[REPLACE])

    def check_identities(self, n_speech: int, n_text: int) -> None:
        """Bookkeeping identities: every element of both inputs is consumed
        exactly once."""
        if self.copies + self.deletions + self.replacements != n_speech:
            raise AssertionError("speech consumption identity violated")
        if self.copies + self.insertions + self.replacements != n_text:
            raise AssertionError("text consumption identity violated")


@dataclass(frozen=True)
class AlignedWord:
    word_index: int
    surface: str
    timestamp_s: float
    matched_phoneme_count: int
    interpolated: bool
    raw_timestamp_s: float = field(default=math.nan)


def _encode(speech: Sequence, text: Sequence) -> tuple[np.ndarray, np.ndarray]:
    vocab: dict = {}
    for lab in speech:
        vocab.setdefault(lab, len(vocab))
    for lab in text:
        vocab.setdefault(lab, len(vocab))
    a = np.fromiter((vocab[x] for x in speech), dtype=np.int16, count=len(speech))
    b = np.fromiter((vocab[x] for x in text), dtype=np.int16, count=len(text))
    return a, b


def _traceback(d: np.ndarray, a: np.ndarray, b: np.ndarray, config: AlignConfig,
               off_a: int = 0, off_b: int = 0) -> list[EditOp]:
    """Recover ops from a full cost matrix; ties break Copy > Replace >
    Delete > Insert (diagonal beats up beats left)."""
    ops: list[EditOp] = []
    i, j = a.shape[0], b.shape[0]
    while i > 0 or j > 0:
        here = d[i, j]
        if i > 0 and j > 0:
            equal = a[i - 1] == b[j - 1]
            diag_cost = config.copy_cost if equal else config.replace_cost
            if abs(d[i - 1, j - 1] + diag_cost - here) < _EPS:
                kind = COPY if equal else REPLACE
                ops.append(EditOp(kind, off_a + i - 1, off_b + j - 1))
                i -= 1
                j -= 1
                continue
        if i > 0 and abs(d[i - 1, j] + config.delete_cost - here) < _EPS:
            ops.append(EditOp(DELETE, off_a + i - 1, None))
            i -= 1
            continue
        ops.append(EditOp(INSERT, None, off_b + j - 1))
        j -= 1
    ops.reverse()
    return ops


def _costs(config: AlignConfig) -> tuple[float, float, float, float]:
    return (config.copy_cost, config.replace_cost,
            config.delete_cost, config.insert_cost)


def align_quadratic(speech: Sequence, text: Sequence,
                    config: AlignConfig = AlignConfig()) -> Alignment:
    """Reference full-matrix alignment with traceback."""
    a, b = _encode(speech, text)
    d = _backend.full_matrix(a, b, *_costs(config))
    ops = _traceback(np.asarray(d), a, b, config)
    alignment = Alignment.from_ops(ops, config)
    alignment.check_identities(len(speech), len(text))
    return alignment


# Below this many cells a subproblem is solved with the full matrix.
_BASE_CELLS = 16384


def _solve(a: np.ndarray, b: np.ndarray, off_a: int, off_b: int,
           config: AlignConfig, ops: list[EditOp]) -> None:
    m, n = a.shape[0], b.shape[0]
    if m <= 2 or n <= 2 or m * n <= _BASE_CELLS:
        d = _backend.full_matrix(a, b, *_costs(config))
        ops.extend(_traceback(np.asarray(d), a, b, config, off_a, off_b))
        return
    mid = m // 2
    fwd = np.asarray(_backend.last_row(a[:mid], b, *_costs(config)))
    bwd = np.asarray(_backend.last_row(
        np.ascontiguousarray(a[mid:][::-1]),
        np.ascontiguousarray(b[::-1]), *_costs(config)))
    split = int(np.argmin(fwd + bwd[::-1]))
    _solve(np.ascontiguousarray(a[:mid]), np.ascontiguousarray(b[:split]),
           off_a, off_b, config, ops)
    _solve(np.ascontiguousarray(a[mid:]), np.ascontiguousarray(b[split:]),
           off_a + mid, off_b + split, config, ops)


def align_linear_space(speech: Sequence, text: Sequence,
                       config: AlignConfig = AlignConfig()) -> Alignment:
    """Divide-and-conquer alignment; same scores as align_quadratic with
    memory proportional to the text row, never the matrix."""
    a, b = _encode(speech, text)
    ops: list[EditOp] = []
    _solve(a, b, 0, 0, config, ops)
    alignment = Alignment.from_ops(ops, config)
    alignment.check_identities(len(speech), len(text))
    return alignment


def assign_word_timestamps(alignment: Alignment, speech_phonemes: Sequence,
                           words: Sequence,
                           config: AlignConfig = AlignConfig(),
                           ) -> tuple[list[AlignedWord], int]:
    """Map matched phonemes back to per-word timestamps.

    A word anchors at its first Copy/Replace-matched text phoneme; words
    with no match are linearly interpolated between neighboring anchors
    (clamped at the ends).  A final monotonic pass lifts any regressing
    timestamp up to its predecessor; the clamp count is returned alongside.
    """
    starts = []
    total = 0
    for w in words:
        starts.append(total)
        total += len(w.detectable)
    starts_arr = np.asarray(starts)

    matched: list[list[float]] = [[] for _ in words]
    for op in alignment.ops:
        if op.kind not in (COPY, REPLACE):
            continue
        if op.text_index >= total or op.speech_index >= len(speech_phonemes):
            raise IndexError("alignment indices inconsistent with inputs")
        w = int(np.searchsorted(starts_arr, op.text_index, side="right")) - 1
        matched[w].append(speech_phonemes[op.speech_index].start_s)

    raw = np.full(len(words), np.nan)
    counts = np.zeros(len(words), dtype=int)
    for k, times in enumerate(matched):
        counts[k] = len(times)
        if times:
            if config.timestamp_mode == "median":
                raw[k] = float(np.median(times))
            else:
                raw[k] = times[0]

    anchored = ~np.isnan(raw)
    ts = raw.copy()
    if anchored.any():
        idx = np.arange(len(words))
        ts = np.interp(idx, idx[anchored], raw[anchored])
    else:
        ts = np.zeros(len(words))

    clamps = 0
    out: list[AlignedWord] = []
    prev = -math.inf
    for k, w in enumerate(words):
        t = float(ts[k])
        if t < prev:
            t = prev
            clamps += 1
        prev = t
        out.append(AlignedWord(
            word_index=w.token.word_index,
            surface=w.token.surface,
            timestamp_s=t,
            matched_phoneme_count=int(counts[k]),
            interpolated=not bool(anchored[k]),
            raw_timestamp_s=float(ts[k]),
        ))
    return out, clamps

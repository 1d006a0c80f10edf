import math
import random
from dataclasses import dataclass, replace

import numpy as np
import pytest

from phonalign import evaluation as ev
from phonalign.evaluation import (CorruptionConfig, GroundTruthMarker,
                                  error_curve, interpolate_truth,
                                  parse_inline_markers, read_marker_file,
                                  synthesize_benchmark, word_error_rate,
                                  write_marker_file)


@dataclass(frozen=True)
class FakeAligned:
    timestamp_s: float
    raw_timestamp_s: float = 0.0


def M(t, i):
    return GroundTruthMarker(time_s=t, word_index=i)


def test_interpolate_exact_at_markers():
    truth = interpolate_truth([M(2.0, 1), M(10.0, 5)], 8)
    assert truth[1] == 2.0 and truth[5] == 10.0


def test_interpolate_affine_between_markers():
    truth = interpolate_truth([M(0.0, 0), M(8.0, 4)], 5)
    assert np.allclose(truth, [0.0, 2.0, 4.0, 6.0, 8.0])


def test_interpolate_clamps_outside():
    truth = interpolate_truth([M(5.0, 2), M(9.0, 4)], 7)
    assert truth[0] == truth[1] == 5.0
    assert truth[5] == truth[6] == 9.0


def test_interpolate_collinear_markers_drop_out():
    # a middle marker on the same line changes nothing
    with_mid = interpolate_truth([M(0.0, 0), M(5.0, 5), M(10.0, 10)], 11)
    without = interpolate_truth([M(0.0, 0), M(10.0, 10)], 11)
    assert np.allclose(with_mid, without)


def test_interpolate_errors():
    with pytest.raises(ValueError):
        interpolate_truth([M(1.0, 0)], 5)
    with pytest.raises(ValueError):
        interpolate_truth([M(1.0, 0), M(0.5, 3)], 5)  # time not increasing
    with pytest.raises(ValueError):
        interpolate_truth([M(1.0, 3), M(2.0, 1)], 5)  # index not increasing
    with pytest.raises(ValueError):
        interpolate_truth([M(1.0, 0), M(2.0, 9)], 5)  # index out of range


def test_error_curve_counting():
    truth = np.array([0.0, 10.0, 20.0])
    aligned = [FakeAligned(0.5), FakeAligned(12.5), FakeAligned(29.0)]
    curve, trace = error_curve(aligned, truth, margins=(1, 3, 10))
    assert curve.fraction_within == (pytest.approx(1 / 3),
                                     pytest.approx(2 / 3), 1.0)
    assert curve.at(3) == pytest.approx(2 / 3)
    assert trace == [(0.0, 0.5), (10.0, 2.5), (20.0, 9.0)]


def test_error_curve_monotone_nondecreasing():
    rng = random.Random(4)
    truth = np.array([rng.uniform(0, 100) for _ in range(50)])
    aligned = [FakeAligned(t + rng.uniform(-30, 30)) for t in truth]
    curve, _ = error_curve(aligned, truth)
    for a, b in zip(curve.fraction_within, curve.fraction_within[1:]):
        assert b >= a
    assert curve.fraction_within[-1] == 1.0


def test_error_curve_length_mismatch():
    with pytest.raises(ValueError):
        error_curve([FakeAligned(0.0)], np.array([0.0, 1.0]))


def test_avg_matching_error():
    truth = np.array([0.0, 10.0])
    aligned = [FakeAligned(1.0, raw_timestamp_s=2.0),
               FakeAligned(11.0, raw_timestamp_s=14.0)]
    assert ev.avg_matching_error(aligned, truth) == pytest.approx(1.0)
    assert ev.avg_matching_error(aligned, truth, use_raw=True) == pytest.approx(3.0)


def test_wer_identical_is_zero():
    words = "the quick brown fox".split()
    assert word_error_rate(words, words) == 0.0


def test_wer_single_substitution():
    assert word_error_rate(["a", "b", "c"], ["a", "x", "c"]) == pytest.approx(1 / 3)


def test_wer_insert_delete():
    assert word_error_rate(["a", "b"], ["a", "b", "c"]) == pytest.approx(0.5)
    assert word_error_rate(["a", "b", "c"], ["a", "c"]) == pytest.approx(1 / 3)
    assert word_error_rate(["a"], []) == 1.0
    assert word_error_rate([], ["a"]) == math.inf
    assert word_error_rate([], []) == 0.0


def _wer_oracle(ref, hyp):
    """Plain-loop Levenshtein for cross-checking."""
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, 1):
        cur = [i]
        for j, h in enumerate(hyp, 1):
            cur.append(min(prev[j - 1] + (r != h), prev[j] + 1, cur[-1] + 1))
        prev = cur
    return prev[-1] / len(ref)


def test_wer_matches_loop_oracle():
    rng = random.Random(7)
    vocab = ["a", "b", "c", "d"]
    for _ in range(300):
        ref = [rng.choice(vocab) for _ in range(rng.randrange(1, 12))]
        hyp = [rng.choice(vocab) for _ in range(rng.randrange(0, 12))]
        assert word_error_rate(ref, hyp) == pytest.approx(_wer_oracle(ref, hyp))


def test_wer_transcript_fixture_pair(manual_transcript, asr_transcript):
    ref = manual_transcript.lower().split()
    hyp = asr_transcript.lower().split()
    assert word_error_rate(ref, hyp) > 0.5


def test_parse_inline_markers():
    clean, markers = parse_inline_markers("a [t=1.5] b c [t=9.0] d")
    assert clean == "a b c d"
    assert markers == [M(1.5, 1), M(9.0, 3)]
    clean, markers = parse_inline_markers("no markers here")
    assert clean == "no markers here" and markers == []


def test_marker_file_roundtrip(tmp_path):
    markers = [M(1.25, 0), M(10.0, 7)]
    path = tmp_path / "m.tsv"
    write_marker_file(markers, path)
    back = read_marker_file(path)
    assert back == [M(1.25, 0), M(10.0, 7)]


def test_marker_file_rejects_bad_rows(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("1.0\n")
    with pytest.raises(ValueError):
        read_marker_file(path)
    path.write_text("5.0\t3\n1.0\t4\n")  # time decreases
    with pytest.raises(ValueError):
        read_marker_file(path)


def test_benchmark_deterministic(reference_text, dictionary):
    cfg = CorruptionConfig(rng_seed=11)
    a = synthesize_benchmark(reference_text, cfg, dictionary)
    b = synthesize_benchmark(reference_text, cfg, dictionary)
    assert a.corrupted_transcript == b.corrupted_transcript
    assert a.speech == b.speech
    assert a.truth_markers == b.truth_markers
    c = synthesize_benchmark(reference_text, replace(cfg, rng_seed=12), dictionary)
    assert c.corrupted_transcript != a.corrupted_transcript


def test_benchmark_noiseless_speech_matches_reference(reference_text, dictionary):
    from phonalign.phoneme_text import phonemize
    cfg = CorruptionConfig(p_word_drop=0.0, p_word_substitute=0.0,
                           p_phoneme_noise=0.0, timing_jitter=0.0)
    bench = synthesize_benchmark(reference_text, cfg, dictionary)
    expected = []
    for w in phonemize(reference_text, dictionary):
        for lab in w.detectable:
            expected.extend([lab] * cfg.duplication)
    assert [p.label for p in bench.speech] == expected
    assert bench.corrupted_words == bench.reference_words
    starts = [p.start_s for p in bench.speech]
    assert starts == sorted(starts)


def test_benchmark_drop_everything(reference_text, dictionary):
    cfg = CorruptionConfig(p_word_drop=1.0)
    bench = synthesize_benchmark(reference_text, cfg, dictionary)
    assert bench.corrupted_transcript == ""
    assert bench.speech  # audio side is untouched by transcript corruption


def test_benchmark_markers_are_exact_word_times(reference_text, dictionary):
    cfg = CorruptionConfig(rng_seed=3)
    bench = synthesize_benchmark(reference_text, cfg, dictionary)
    ev.check_markers(bench.truth_markers)
    for m in bench.truth_markers:
        assert m.time_s == bench.corrupted_word_times[m.word_index]
    assert bench.truth_markers[-1].word_index == len(bench.corrupted_word_times) - 1


def test_benchmark_silence_gap_shifts_timeline(reference_text, dictionary):
    base = CorruptionConfig(p_word_drop=0.0, p_word_substitute=0.0,
                            p_phoneme_noise=0.0, timing_jitter=0.0)
    plain = synthesize_benchmark(reference_text, base, dictionary)
    gapped = synthesize_benchmark(reference_text,
                                  replace(base, silence_gaps=((5.0, 3.0),)),
                                  dictionary)
    # words before the gap keep their times; later words shift by the gap
    times_a = plain.corrupted_word_times
    times_b = gapped.corrupted_word_times
    before = [i for i, t in enumerate(times_a) if t < 5.0]
    after = [i for i, t in enumerate(times_a) if t >= 5.0]
    assert all(times_b[i] == times_a[i] for i in before)
    assert all(times_b[i] == pytest.approx(times_a[i] + 3.0) for i in after)


def test_benchmark_wer_in_target_band(reference_text, dictionary):
    for seed in (1, 2, 3):
        bench = synthesize_benchmark(reference_text,
                                     CorruptionConfig(rng_seed=seed), dictionary)
        wer = word_error_rate(bench.reference_words, bench.corrupted_words)
        assert 0.6 <= wer <= 0.8


def test_svg_and_csv_writers_deterministic(tmp_path):
    curve = ev.ErrorCurve(margins_s=(1, 2), fraction_within=(0.5, 1.0))
    points = [(0.0, 0.1), (1.0, 0.4), (2.0, 0.2)]
    for name, write in (("c.csv", lambda p: ev.write_curve_csv(curve, p)),
                        ("t.csv", lambda p: ev.write_trace_csv(points, p)),
                        ("p.svg", lambda p: ev.write_svg_plot(
                            points, p, shaded_regions=[(0.5, 0.5)],
                            x_label="x", y_label="y"))):
        p1, p2 = tmp_path / ("1" + name), tmp_path / ("2" + name)
        write(p1)
        write(p2)
        assert p1.read_bytes() == p2.read_bytes()
    svg = (tmp_path / "1p.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg and "#cccccc" in svg

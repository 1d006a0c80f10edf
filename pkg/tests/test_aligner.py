import random
from functools import lru_cache

import pytest

from phonalign.align import (AlignConfig, align_linear_space, align_quadratic,
                             assign_word_timestamps)
from phonalign.labels import DETECTABLE
from phonalign.phoneme_audio import TimedPhoneme
from phonalign.phoneme_text import WordPhonemes, WordToken

CFG = AlignConfig()


def oracle_min_cost(speech, text, cfg=CFG):
    """Independent top-down enumeration of all global edit scripts."""
    speech = tuple(speech)
    text = tuple(text)

    @lru_cache(maxsize=None)
    def best(i, j):
        if i == len(speech) and j == len(text):
            return 0.0
        options = []
        if i < len(speech) and j < len(text):
            step = cfg.copy_cost if speech[i] == text[j] else cfg.replace_cost
            options.append(step + best(i + 1, j + 1))
        if i < len(speech):
            options.append(cfg.delete_cost + best(i + 1, j))
        if j < len(text):
            options.append(cfg.insert_cost + best(i, j + 1))
        return min(options)

    return best(0, 0)


def random_pair(rng, max_s, max_t, alphabet=DETECTABLE):
    s = [rng.choice(alphabet) for _ in range(rng.randrange(max_s + 1))]
    t = [rng.choice(alphabet) for _ in range(rng.randrange(max_t + 1))]
    return s, t


def test_empty_alignment():
    a = align_quadratic([], [], CFG)
    assert a.score == 0 and a.ops == []


def test_small_example_score_and_counts():
    speech = ["IY", "IY", "S"]
    text = ["IY", "S"]
    assert oracle_min_cost(speech, text) == -3
    a = align_quadratic(speech, text, CFG)
    assert a.score == -3
    assert a.counts == (2, 1, 0, 0)


def test_identical_sequences_all_copies():
    seq = ["IY", "S", "AA", "ER"] * 5
    a = align_quadratic(seq, seq, CFG)
    assert a.copies == len(seq)
    assert a.score == -len(seq)


def test_empty_text_all_deletions():
    speech = ["IY", "S", "SH"]
    a = align_linear_space(speech, [], CFG)
    assert a.deletions == len(speech)
    assert a.score == -len(speech)


def test_optimality_against_enumeration_oracle():
    rng = random.Random(12)
    for _ in range(250):
        s, t = random_pair(rng, 10, 6)
        expected = oracle_min_cost(s, t)
        assert align_quadratic(s, t, CFG).score == expected
        assert align_linear_space(s, t, CFG).score == expected


def test_linear_space_matches_quadratic_scores():
    rng = random.Random(5)
    for _ in range(300):
        s, t = random_pair(rng, 40, 25)
        assert align_linear_space(s, t, CFG).score == align_quadratic(s, t, CFG).score


def test_bookkeeping_identities_random():
    rng = random.Random(99)
    for _ in range(200):
        s, t = random_pair(rng, 60, 30)
        a = align_linear_space(s, t, CFG)
        a.check_identities(len(s), len(t))


def test_indices_strictly_increasing():
    rng = random.Random(3)
    for _ in range(50):
        s, t = random_pair(rng, 40, 20)
        a = align_linear_space(s, t, CFG)
        s_idx = [op.speech_index for op in a.ops if op.speech_index is not None]
        t_idx = [op.text_index for op in a.ops if op.text_index is not None]
        assert s_idx == sorted(set(s_idx)) and len(s_idx) == len(s)
        assert t_idx == sorted(set(t_idx)) and len(t_idx) == len(t)


def test_score_bounds():
    rng = random.Random(17)
    for _ in range(100):
        s, t = random_pair(rng, 30, 20)
        a = align_linear_space(s, t, CFG)
        assert -(len(s) + len(t)) <= a.score <= len(s) + len(t)


def test_cost_shift_preserves_structure():
    # shifting every cost by a constant keeps identities and monotonicity
    shifted = AlignConfig(copy_cost=1.0, delete_cost=1.0,
                          insert_cost=3.0, replace_cost=3.0)
    rng = random.Random(8)
    for _ in range(50):
        s, t = random_pair(rng, 25, 15)
        a = align_linear_space(s, t, shifted)
        a.check_identities(len(s), len(t))
        t_idx = [op.text_index for op in a.ops if op.text_index is not None]
        assert t_idx == sorted(t_idx)


def _word(index, labels, surface=None):
    token = WordToken(surface=surface or f"w{index}", normalized=f"W{index}",
                      word_index=index, char_offset=0)
    return WordPhonemes(token=token, full_phonemes=(), detectable=tuple(labels))


def _speech(labels, window=1 / 30):
    return [TimedPhoneme(label=lab, start_s=k * window, end_s=(k + 1) * window)
            for k, lab in enumerate(labels)]


def test_word_timestamp_from_first_match():
    words = [_word(0, ["IY", "S"])]
    speech = [TimedPhoneme("IY", 12.000, 12.033), TimedPhoneme("S", 12.033, 12.066)]
    a = align_quadratic([p.label for p in speech], ["IY", "S"], CFG)
    aligned, clamps = assign_word_timestamps(a, speech, words, CFG)
    assert aligned[0].timestamp_s == pytest.approx(12.000)
    assert not aligned[0].interpolated
    assert clamps == 0


def test_unanchored_word_interpolates_midpoint():
    # words 0 and 2 anchor, word 1 has no phonemes at all
    words = [_word(0, ["IY"]), _word(1, []), _word(2, ["S"])]
    speech = [TimedPhoneme("IY", 100.0, 100.1), TimedPhoneme("S", 110.0, 110.1)]
    a = align_quadratic([p.label for p in speech], ["IY", "S"], CFG)
    aligned, _ = assign_word_timestamps(a, speech, words, CFG)
    assert aligned[0].timestamp_s == pytest.approx(100.0)
    assert aligned[1].timestamp_s == pytest.approx(105.0)
    assert aligned[1].interpolated
    assert aligned[2].timestamp_s == pytest.approx(110.0)


def test_leading_unanchored_words_take_first_anchor():
    words = [_word(0, []), _word(1, []), _word(2, ["S"])]
    speech = [TimedPhoneme("S", 42.0, 42.1)]
    a = align_quadratic(["S"], ["S"], CFG)
    aligned, _ = assign_word_timestamps(a, speech, words, CFG)
    assert aligned[0].timestamp_s == pytest.approx(42.0)
    assert aligned[1].timestamp_s == pytest.approx(42.0)
    assert all(w.interpolated for w in aligned[:2])


def test_timestamps_monotone_after_clamp():
    rng = random.Random(21)
    for _ in range(30):
        labels = [rng.choice(DETECTABLE) for _ in range(60)]
        speech = _speech(labels)
        words = []
        k = 0
        idx = 0
        while k < len(labels):
            step = rng.randrange(1, 4)
            words.append(_word(idx, labels[k:k + step]))
            idx += 1
            k += step
        noisy = [rng.choice(DETECTABLE) for _ in range(40)]
        a = align_linear_space(noisy, [p for w in words for p in w.detectable], CFG)
        aligned, clamps = assign_word_timestamps(a, _speech(noisy), words, CFG)
        ts = [w.timestamp_s for w in aligned]
        assert ts == sorted(ts)
        assert clamps >= 0


def test_median_timestamp_mode():
    cfg = AlignConfig(timestamp_mode="median")
    words = [_word(0, ["IY", "IY", "IY"])]
    speech = [TimedPhoneme("IY", 1.0, 1.1), TimedPhoneme("IY", 2.0, 2.1),
              TimedPhoneme("IY", 9.0, 9.1)]
    a = align_quadratic([p.label for p in speech], ["IY", "IY", "IY"], cfg)
    aligned, _ = assign_word_timestamps(a, speech, words, cfg)
    assert aligned[0].timestamp_s == pytest.approx(2.0)


def test_inconsistent_indices_raise():
    words = [_word(0, ["IY"])]
    speech = [TimedPhoneme("IY", 0.0, 0.1)]
    a = align_quadratic(["IY", "S"], ["IY", "S"], CFG)
    with pytest.raises(IndexError):
        assign_word_timestamps(a, speech, words, CFG)

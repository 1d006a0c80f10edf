"""Command-line pipeline: extract, phonemize, align, evaluate, bench.

Every stage reads and writes plain-text files so stages can be re-run or
substituted independently.  Exit codes: 0 success, 1 usage/config error,
2 input parse error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

from . import align as al
from . import audio_ingest, evaluation, phoneme_audio, phoneme_text
from .configio import ConfigError, PipelineConfig
from .phoneme_audio import FormantReferenceTable

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3


class StageError(Exception):
    def __init__(self, stage: str, message: str, code: int = EXIT_PARSE):
        super().__init__(f"[{stage}] {message}")
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_json(payload: dict, path, deterministic: bool) -> None:
    if not deterministic:
        payload = dict(payload, generated_at=datetime.datetime.now().isoformat())
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_dictionary(cli_path, cfg: PipelineConfig):
    path = cli_path or cfg.paths.get("dictionary")
    if path is None:
        from importlib import resources
        path = resources.files("phonalign.data").joinpath("cmudict_small.txt")
    return phoneme_text.load_dictionary(path)


def _load_table(cfg: PipelineConfig, path=None) -> FormantReferenceTable:
    table = phoneme_audio.load_formant_table(path or cfg.paths.get("formant_table"))
    return FormantReferenceTable(entries=table.entries,
                                 weights=cfg.formant_weights,
                                 distance_threshold=cfg.formant_distance_threshold)


def cmd_extract(args, cfg: PipelineConfig, out: Path) -> int:
    try:
        audio = audio_ingest.load_audio(args.audio, cfg.audio_rate)
    except audio_ingest.AudioError as exc:
        raise StageError("ingest", str(exc))
    frames = audio_ingest.frame_signal(audio, cfg.window_s)
    frames = audio_ingest.filter_speech(frames, cfg.vad, audio.sample_rate)
    table = _load_table(cfg, args.formant_table)

    labeled = [(f.index, phoneme_audio.classify_frame(f, audio.sample_rate, table,
                                                      cfg.classifier))
               for f in frames if f.is_speech]
    phonemes = phoneme_audio.merge_phonemes(labeled, cfg.window_s)

    phoneme_audio.write_timed_phonemes(phonemes, out / "speech_phonemes.tsv")
    speech_frames = sum(1 for f in frames if f.is_speech)
    minutes = audio.duration_seconds / 60.0
    stats = {
        "frames": len(frames),
        "speech_fraction": speech_frames / len(frames) if frames else 0.0,
        "phonemes": len(phonemes),
        "phonemes_per_minute": len(phonemes) / minutes if minutes else 0.0,
    }
    _write_json(stats, out / "extract_stats.json", args.deterministic)
    if not phonemes:
        print("warning: no phonemes detected (silent or non-speech audio)",
              file=sys.stderr)
    return EXIT_OK


def cmd_phonemize(args, cfg: PipelineConfig, out: Path) -> int:
    try:
        dictionary = _load_dictionary(args.dictionary, cfg)
    except phoneme_text.DictionaryError as exc:
        raise StageError("phonemize", f"dictionary: {exc}")
    try:
        text = Path(args.transcript).read_text()
    except OSError as exc:
        raise StageError("phonemize", str(exc))
    text, _markers = evaluation.parse_inline_markers(text)
    words = phoneme_text.phonemize(text, dictionary)
    phoneme_text.write_word_phonemes(words, out / "text_phonemes.tsv")
    stats = {
        "words": len(words),
        "oov_words": sum(1 for w in words if w.oov),
        "zero_phoneme_words": sum(1 for w in words if not w.detectable),
    }
    _write_json(stats, out / "phonemize_stats.json", args.deterministic)
    return EXIT_OK


def _run_alignment(speech, words, cfg: PipelineConfig, out: Path,
                   deterministic: bool) -> tuple:
    text_labels = [p for w in words for p in w.detectable]
    speech_labels = [p.label for p in speech]
    alignment = al.align_linear_space(speech_labels, text_labels, cfg.align)
    try:
        alignment.check_identities(len(speech_labels), len(text_labels))
    except AssertionError as exc:
        raise StageError("align", str(exc), EXIT_INTERNAL)
    aligned, clamps = al.assign_word_timestamps(alignment, speech, words, cfg.align)

    with open(out / "aligned_words.tsv", "w") as fh:
        for w in aligned:
            fh.write(f"{w.word_index}\t{w.timestamp_s:.3f}\t"
                     f"{int(w.interpolated)}\t{w.surface}\n")
    anchored = sum(1 for w in aligned if not w.interpolated)
    summary = {
        "score": alignment.score,
        "copies": alignment.copies,
        "deletions": alignment.deletions,
        "insertions": alignment.insertions,
        "replacements": alignment.replacements,
        "speech_phonemes": len(speech_labels),
        "text_phonemes": len(text_labels),
        "anchored_fraction": anchored / len(aligned) if aligned else 0.0,
        "monotonic_clamps": clamps,
    }
    _write_json(summary, out / "align_summary.json", deterministic)
    return aligned, alignment, summary


def cmd_align(args, cfg: PipelineConfig, out: Path) -> int:
    try:
        speech = phoneme_audio.read_timed_phonemes(args.speech)
        words = phoneme_text.read_word_phonemes(args.words or args.text)
    except (OSError, ValueError) as exc:
        raise StageError("align", str(exc))
    _run_alignment(speech, words, cfg, out, args.deterministic)
    return EXIT_OK


def _read_aligned(path) -> list:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 fields")
            out.append(al.AlignedWord(
                word_index=int(parts[0]), surface=parts[3],
                timestamp_s=float(parts[1]), matched_phoneme_count=0,
                interpolated=bool(int(parts[2])),
                raw_timestamp_s=float(parts[1])))
    return out


def _evaluate(aligned, markers, out: Path, deterministic: bool,
              gaps=(), extra: dict | None = None) -> dict:
    truth = evaluation.interpolate_truth(markers, len(aligned))
    curve, trace = evaluation.error_curve(aligned, truth)
    evaluation.write_curve_csv(curve, out / "error_curve.csv")
    evaluation.write_trace_csv(trace, out / "error_trace.csv")
    evaluation.write_svg_plot(list(zip(curve.margins_s, curve.fraction_within)),
                              out / "error_curve.svg",
                              x_label="error margin (s)",
                              y_label="fraction correct")
    evaluation.write_svg_plot(trace, out / "error_trace.svg", shaded_regions=gaps,
                              x_label="audio time (s)", y_label="error (s)")
    metrics = {
        "avg_matching_error_s": evaluation.avg_matching_error(aligned, truth),
        "fraction_within_10s": curve.at(10),
        "fraction_within_20s": curve.at(20),
        "fraction_within_30s": curve.at(30),
    }
    if extra:
        metrics.update(extra)
    _write_json(metrics, out / "metrics.json", deterministic)
    return metrics


def cmd_evaluate(args, cfg: PipelineConfig, out: Path) -> int:
    try:
        aligned = _read_aligned(args.aligned)
        markers = evaluation.read_marker_file(args.markers)
        _evaluate(aligned, markers, out, args.deterministic)
    except (OSError, ValueError) as exc:
        raise StageError("evaluate", str(exc))
    return EXIT_OK


def cmd_bench(args, cfg: PipelineConfig, out: Path) -> int:
    try:
        dictionary = _load_dictionary(args.dictionary, cfg)
        reference_text = Path(args.reference).read_text()
    except (OSError, phoneme_text.DictionaryError) as exc:
        raise StageError("bench", str(exc))

    corrupt = cfg.corrupt
    if args.seed is not None:
        corrupt = evaluation.CorruptionConfig(
            **{**corrupt.__dict__, "rng_seed": args.seed})
    bench = evaluation.synthesize_benchmark(reference_text, corrupt, dictionary,
                                            marker_interval_s=cfg.marker_interval_s)

    phoneme_audio.write_timed_phonemes(bench.speech, out / "speech_phonemes.tsv")
    (out / "corrupted_transcript.txt").write_text(bench.corrupted_transcript + "\n")
    evaluation.write_marker_file(bench.truth_markers, out / "truth_markers.tsv")

    words = phoneme_text.phonemize(bench.corrupted_transcript, dictionary)
    phoneme_text.write_word_phonemes(words, out / "text_phonemes.tsv")

    aligned, alignment, summary = _run_alignment(bench.speech, words, cfg, out,
                                                 args.deterministic)
    wer = evaluation.word_error_rate(bench.reference_words, bench.corrupted_words)
    truth = evaluation.interpolate_truth(bench.truth_markers, len(aligned))
    extra = {
        "wer_reference_vs_corrupted": wer,
        "avg_matching_error_preclamp_s": evaluation.avg_matching_error(
            aligned, truth, use_raw=True),
        "target_fractions_10_20_30": [0.60, 0.75, 0.90],
    }
    metrics = _evaluate(aligned, bench.truth_markers, out, args.deterministic,
                        gaps=corrupt.silence_gaps, extra=extra)
    achieved = [metrics["fraction_within_10s"], metrics["fraction_within_20s"],
                metrics["fraction_within_30s"]]
    print("bench: WER=%.3f fractions(10/20/30s)=%s targets=%s" %
          (wer, [round(x, 3) for x in achieved], extra["target_fractions_10_20_30"]))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="phonalign")
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--deterministic", action="store_true",
                        help="omit wall-clock fields from JSON outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="audio -> timed phonemes")
    p.add_argument("audio")
    p.add_argument("--formant-table")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("phonemize", help="transcript -> word phonemes")
    p.add_argument("transcript")
    p.add_argument("--dictionary")
    p.set_defaults(func=cmd_phonemize)

    p = sub.add_parser("align", help="speech + text phonemes -> word timestamps")
    p.add_argument("speech")
    p.add_argument("text")
    p.add_argument("--words", help="word file (defaults to the text-phoneme file)")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("evaluate", help="aligned words + markers -> error curves")
    p.add_argument("aligned")
    p.add_argument("--markers", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="synthetic end-to-end benchmark")
    p.add_argument("reference")
    p.add_argument("--dictionary")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return args.func(args, cfg, out)
    except StageError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except AssertionError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

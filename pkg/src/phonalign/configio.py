"""Plain-text `key = value` configuration for the pipeline.

Unknown keys are rejected, and every numeric value is validated against the
preconditions of the module that consumes it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .align import AlignConfig
from .audio_ingest import DEFAULT_WINDOW_S, VadConfig
from .evaluation import CorruptionConfig
from .phoneme_audio import ClassifierConfig


class ConfigError(Exception):
    pass


_FLOAT_KEYS = {
    "window_s",
    "vad.absolute_floor", "vad.median_ratio", "vad.min_voice_band_fraction",
    "vad.voice_band_low_hz", "vad.voice_band_high_hz",
    "classifier.fricative_margin",
    "formant.w1", "formant.w2", "formant.w3", "formant.distance_threshold",
    "align.copy_cost", "align.delete_cost", "align.insert_cost", "align.replace_cost",
    "corrupt.p_word_drop", "corrupt.p_word_substitute", "corrupt.p_phoneme_noise",
    "corrupt.timing_jitter", "corrupt.word_interval_s", "corrupt.phoneme_rate",
    "corrupt.p_substitute_split", "corrupt.marker_interval_s",
}
_INT_KEYS = {"audio_rate", "classifier.model_order", "corrupt.rng_seed",
             "corrupt.duplication"}
_STR_KEYS = {"align.timestamp_mode", "corrupt.silence_gaps",
             "paths.audio", "paths.transcript", "paths.dictionary",
             "paths.formant_table", "paths.out_dir"}
_KNOWN = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


def parse_kv_file(path) -> dict:
    values: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            if key not in _KNOWN:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                if key in _FLOAT_KEYS:
                    values[key] = float(raw)
                elif key in _INT_KEYS:
                    values[key] = int(raw)
                else:
                    values[key] = raw
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {raw!r}") from exc
    return values


def _parse_gaps(raw: str) -> tuple:
    # "start:duration,start:duration"
    gaps = []
    for piece in raw.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            start, dur = piece.split(":")
            gaps.append((float(start), float(dur)))
        except ValueError as exc:
            raise ConfigError(f"bad silence gap {piece!r} (want start:duration)") from exc
    return tuple(gaps)


@dataclass
class PipelineConfig:
    window_s: float = DEFAULT_WINDOW_S
    audio_rate: int = 16000
    vad: VadConfig = field(default_factory=VadConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    formant_weights: tuple = (1.0, 0.5, 0.25)
    formant_distance_threshold: float = 350.0
    align: AlignConfig = field(default_factory=AlignConfig)
    corrupt: CorruptionConfig = field(default_factory=CorruptionConfig)
    marker_interval_s: float = 10.0
    paths: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        return cls.from_values(parse_kv_file(path))

    @classmethod
    def from_values(cls, v: dict) -> "PipelineConfig":
        cfg = cls()
        cfg.window_s = v.get("window_s", cfg.window_s)
        cfg.audio_rate = v.get("audio_rate", cfg.audio_rate)
        cfg.vad = VadConfig(
            absolute_floor=v.get("vad.absolute_floor", 1e-4),
            median_ratio=v.get("vad.median_ratio", 0.5),
            min_voice_band_fraction=v.get("vad.min_voice_band_fraction", 0.4),
            voice_band_low_hz=v.get("vad.voice_band_low_hz", 300.0),
            voice_band_high_hz=v.get("vad.voice_band_high_hz", 2500.0),
        )
        cfg.classifier = ClassifierConfig(
            fricative_margin=v.get("classifier.fricative_margin", 1.0),
            model_order=v.get("classifier.model_order"),
        )
        cfg.formant_weights = (v.get("formant.w1", 1.0), v.get("formant.w2", 0.5),
                               v.get("formant.w3", 0.25))
        cfg.formant_distance_threshold = v.get("formant.distance_threshold", 350.0)
        cfg.align = AlignConfig(
            copy_cost=v.get("align.copy_cost", -1.0),
            delete_cost=v.get("align.delete_cost", -1.0),
            insert_cost=v.get("align.insert_cost", 1.0),
            replace_cost=v.get("align.replace_cost", 1.0),
            timestamp_mode=v.get("align.timestamp_mode", "first"),
        )
        cfg.corrupt = CorruptionConfig(
            p_word_drop=v.get("corrupt.p_word_drop", 0.35),
            p_word_substitute=v.get("corrupt.p_word_substitute", 0.35),
            p_phoneme_noise=v.get("corrupt.p_phoneme_noise", 0.1),
            silence_gaps=_parse_gaps(v.get("corrupt.silence_gaps", "")),
            rng_seed=v.get("corrupt.rng_seed", 1),
            word_interval_s=v.get("corrupt.word_interval_s", 0.8),
            phoneme_rate=v.get("corrupt.phoneme_rate", 30.0),
            duplication=v.get("corrupt.duplication", 2),
            timing_jitter=v.get("corrupt.timing_jitter", 0.25),
            p_substitute_split=v.get("corrupt.p_substitute_split", 1.0),
        )
        cfg.marker_interval_s = v.get("corrupt.marker_interval_s", 10.0)
        cfg.paths = {k.split(".", 1)[1]: val for k, val in v.items()
                     if k.startswith("paths.")}
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.window_s <= 0:
            raise ConfigError("window_s must be positive")
        if self.audio_rate <= 0:
            raise ConfigError("audio_rate must be positive")
        if not 0 <= self.vad.min_voice_band_fraction <= 1:
            raise ConfigError("vad.min_voice_band_fraction must be in [0, 1]")
        if self.vad.absolute_floor < 0 or self.vad.median_ratio < 0:
            raise ConfigError("vad floors must be non-negative")
        if any(w <= 0 for w in self.formant_weights):
            raise ConfigError("formant weights must be positive")
        if self.formant_distance_threshold <= 0:
            raise ConfigError("formant.distance_threshold must be positive")
        if self.classifier.model_order is not None and self.classifier.model_order < 8:
            raise ConfigError("classifier.model_order must be >= 8")
        if self.align.timestamp_mode not in ("first", "median"):
            raise ConfigError("align.timestamp_mode must be 'first' or 'median'")
        for name in ("p_word_drop", "p_word_substitute", "p_phoneme_noise",
                     "p_substitute_split"):
            p = getattr(self.corrupt, name)
            if not 0 <= p <= 1:
                raise ConfigError(f"corrupt.{name} must be in [0, 1]")
        if self.corrupt.duplication < 1 or self.corrupt.phoneme_rate <= 0 \
                or self.corrupt.word_interval_s <= 0:
            raise ConfigError("corrupt timeline parameters must be positive")

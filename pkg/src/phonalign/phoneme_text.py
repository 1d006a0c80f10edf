"""Transcript to detectable-phoneme conversion.

Pipeline per word: tokenize, verbalize numerals, pronounce via the CMU-style
dictionary (longest-prefix stemming for out-of-vocabulary words), map
undetected phonemes onto detectable ones, and filter to the 12-label
alphabet.  Words that end up with no phonemes are kept so they can still be
timestamped by interpolation downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .labels import DETECTABLE_SET

ARPABET = frozenset("""
AA AE AH AO AW AY B CH D DH EH ER EY F G HH IH IY JH K L M N NG OW OY P R S
SH T TH UH UW V W Y Z ZH
""".split())

# Phonemes the audio side cannot detect directly, mapped onto the nearest
# detectable label.
SUBSTITUTIONS = {
    "AW": "AH",
    "AY": "AH",
    "EY": "AE",
    "OW": "UH",
    "OY": "AO",
    "Z": "S",
    "CH": "SH",
}

_MARKER_RE = re.compile(r"\[t=[0-9.]+\]")
_STRESS_RE = re.compile(r"[0-9]+$")


class DictionaryError(Exception):
    pass


@dataclass(frozen=True)
class WordToken:
    surface: str
    normalized: str
    word_index: int
    char_offset: int


@dataclass(frozen=True)
class WordPhonemes:
    token: WordToken
    full_phonemes: tuple
    detectable: tuple
    oov: bool = False
    stemmed_to: Optional[str] = None


@dataclass
class PronouncingDictionary:
    entries: dict = field(default_factory=dict)

    def lookup(self, word: str) -> Optional[tuple]:
        return self.entries.get(word.upper())

    def __len__(self):
        return len(self.entries)


def load_dictionary(path) -> PronouncingDictionary:
    """Parse a CMU-format dictionary: `WORD  PH1 PH2 ...`, `;;;` comments,
    `(2)`-suffixed alternate pronunciations (only the first is kept)."""
    entries: dict = {}
    try:
        fh = open(path, encoding="latin-1")
    except OSError as exc:
        raise DictionaryError(f"cannot read dictionary {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith(";;;"):
                continue
            parts = line.split()
            word = parts[0].upper()
            alt = re.match(r"^(.*)\((\d+)\)$", word)
            if alt:
                continue  # alternate pronunciation; first one wins
            if len(parts) < 2:
                continue
            entries.setdefault(word, tuple(parts[1:]))
    if not entries:
        raise DictionaryError(f"no entries parsed from {path}")
    return PronouncingDictionary(entries=entries)


def tokenize(text: str) -> list[WordToken]:
    """Whitespace split, punctuation strip, hyphen split; inline time
    markers are skipped entirely."""
    tokens: list[WordToken] = []
    for m in re.finditer(r"\S+", text):
        piece = m.group(0)
        if _MARKER_RE.fullmatch(piece):
            continue
        core = re.sub(r"^[^0-9A-Za-z]+|[^0-9A-Za-z]+$", "", piece)
        if not core:
            continue
        offset = m.start() + piece.index(core[0])
        for part in core.split("-"):
            if not part:
                continue
            tokens.append(WordToken(
                surface=part,
                normalized=part.upper(),
                word_index=len(tokens),
                char_offset=text.index(part, offset) if part in text[offset:] else offset,
            ))
    return tokens


_ONES = ("zero one two three four five six seven eight nine ten eleven twelve "
         "thirteen fourteen fifteen sixteen seventeen eighteen nineteen").split()
_TENS = ("", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
         "eighty", "ninety")


def _int_words(n: int) -> list[str]:
    if n < 0:
        raise ValueError("negative numbers not supported")
    if n < 20:
        return [_ONES[n]]
    if n < 100:
        tens, rem = divmod(n, 10)
        return [_TENS[tens]] + ([_ONES[rem]] if rem else [])
    if n < 1000:
        hundreds, rem = divmod(n, 100)
        return [_ONES[hundreds], "hundred"] + (_int_words(rem) if rem else [])
    for scale, name in ((10 ** 9, "billion"), (10 ** 6, "million"), (1000, "thousand")):
        if n >= scale:
            head, rem = divmod(n, scale)
            return _int_words(head) + [name] + (_int_words(rem) if rem else [])
    raise AssertionError


def _year_words(n: int) -> list[str]:
    hi, lo = divmod(n, 100)
    if lo == 0:
        return _int_words(hi) + ["hundred"]
    if lo < 10:
        return _int_words(hi) + ["oh", _ONES[lo]]
    return _int_words(hi) + _int_words(lo)


def verbalize_number(token: str) -> list[str]:
    """Spoken-word expansion of a numeric token.

    Four-digit year-like values read as paired tens ("nineteen fifty");
    other integers as compound numbers; decimals as integer part, "point",
    then spoken digits.  Tokens mixing digits and letters spell their
    numeric runs digit by digit.
    """
    if not any(c.isdigit() for c in token):
        raise ValueError(f"not a numeric token: {token!r}")
    plain = token.replace(",", "")
    if re.fullmatch(r"\d+", plain):
        n = int(plain)
        if len(plain) == 4 and (1100 <= n <= 1999 or 2010 <= n <= 2999):
            return _year_words(n)
        return _int_words(n)
    if re.fullmatch(r"\d+\.\d+", plain):
        whole, frac = plain.split(".")
        return _int_words(int(whole)) + ["point"] + [_ONES[int(d)] for d in frac]
    # mixed alphanumeric: keep letter runs, spell digit runs
    words: list[str] = []
    for run in re.findall(r"[0-9]+|[A-Za-z']+", token):
        if run[0].isdigit():
            words.extend(_ONES[int(d)] for d in run)
        else:
            words.append(run.lower())
    return words


def stem_lookup(word: str, dictionary: PronouncingDictionary
                ) -> tuple[Optional[tuple], Optional[str]]:
    """Longest in-dictionary prefix of length >= 3, by stripping one
    trailing character at a time.  Returns (phonemes, stem) or (None, None)."""
    for end in range(len(word) - 1, 2, -1):
        prefix = word[:end]
        phonemes = dictionary.lookup(prefix)
        if phonemes is not None:
            return phonemes, prefix
    return None, None


def to_detectable(full_phonemes: Sequence[str],
                  subs: dict = SUBSTITUTIONS) -> tuple:
    """Strip stress, apply substitutions, keep only detectable labels."""
    out = []
    for symbol in full_phonemes:
        bare = _STRESS_RE.sub("", symbol)
        if bare not in ARPABET:
            raise ValueError(f"unknown phoneme symbol: {symbol!r}")
        bare = subs.get(bare, bare)
        if bare in DETECTABLE_SET:
            out.append(bare)
    return tuple(out)


def phonemize(text: str, dictionary: PronouncingDictionary,
              subs: dict = SUBSTITUTIONS) -> list[WordPhonemes]:
    """Full transcript conversion; per-word failures never abort the run."""
    out: list[WordPhonemes] = []

    def add(surface: str, normalized: str, char_offset: int):
        phonemes = dictionary.lookup(normalized)
        stemmed_to = None
        oov = phonemes is None
        if phonemes is None:
            phonemes, stemmed_to = stem_lookup(normalized, dictionary)
        full = phonemes or ()
        token = WordToken(surface=surface, normalized=normalized,
                          word_index=len(out), char_offset=char_offset)
        out.append(WordPhonemes(token=token, full_phonemes=tuple(full),
                                detectable=to_detectable(full, subs),
                                oov=oov, stemmed_to=stemmed_to))

    for tok in tokenize(text):
        if any(c.isdigit() for c in tok.normalized):
            try:
                words = verbalize_number(tok.normalized)
            except ValueError:
                words = []
            if words:
                for w in words:
                    add(tok.surface, w.upper(), tok.char_offset)
                continue
        add(tok.surface, tok.normalized, tok.char_offset)
    return out


def write_word_phonemes(words: Sequence[WordPhonemes], path) -> None:
    with open(path, "w") as fh:
        for w in words:
            fh.write(f"{w.token.word_index}\t{w.token.surface}\t"
                     f"{' '.join(w.detectable)}\n")


def read_word_phonemes(path) -> list[WordPhonemes]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            index, surface, labels = parts
            detectable = tuple(labels.split()) if labels else ()
            bad = [x for x in detectable if x not in DETECTABLE_SET]
            if bad:
                raise ValueError(f"{path}:{lineno}: undetectable labels {bad}")
            token = WordToken(surface=surface, normalized=surface.upper(),
                              word_index=int(index), char_offset=0)
            out.append(WordPhonemes(token=token, full_phonemes=(),
                                    detectable=detectable))
    return out

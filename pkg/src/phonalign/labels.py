"""The reduced alphabet of phonemes this toolchain detects in audio.

Ten monophthongs plus the two fricatives SH and S.  Order matters: it is
the tie-break order for nearest-formant classification.
"""

MONOPHTHONGS = ("IY", "IH", "EH", "AE", "AH", "UW", "UH", "AA", "ER", "AO")
FRICATIVES = ("SH", "S")
DETECTABLE = MONOPHTHONGS + FRICATIVES

DETECTABLE_SET = frozenset(DETECTABLE)

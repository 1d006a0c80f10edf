"""Temporal alignment of highly imperfect transcripts to their audio.

Pipeline: detect a reduced alphabet of robust phonemes in the signal,
phonemize the transcript against a pronouncing dictionary, globally align
the two phoneme sequences with an asymmetric-cost edit distance, and map
matched phonemes back to per-word timestamps.
"""

from .align import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

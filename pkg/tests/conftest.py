import sys
from pathlib import Path

import pytest

from phonalign import phoneme_audio, phoneme_text

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))  # for the synth helper module


@pytest.fixture(scope="session")
def dictionary():
    from importlib import resources
    path = resources.files("phonalign.data").joinpath("cmudict_small.txt")
    return phoneme_text.load_dictionary(path)


@pytest.fixture(scope="session")
def formant_table():
    return phoneme_audio.load_formant_table()


@pytest.fixture(scope="session")
def manual_transcript():
    return (DATA / "manual_transcript.txt").read_text()


@pytest.fixture(scope="session")
def asr_transcript():
    return (DATA / "asr_transcript.txt").read_text()


@pytest.fixture(scope="session")
def reference_text():
    return (DATA / "reference_text.txt").read_text()


def thirty_minute_text(base_text: str) -> str:
    """Cycle the base paragraph out to ~30 minutes at 0.8 s/word."""
    words = base_text.split()
    need = 2250
    return " ".join((words * (need // len(words) + 1))[:need])

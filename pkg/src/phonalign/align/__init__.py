"""Global phoneme alignment (edit-distance DP, linear-space variant).

The DP inner loop is provided by a compiled extension when available and by
a numpy fallback otherwise; set PHONALIGN_PURE=1 to force the fallback.
"""

import os

if os.environ.get("PHONALIGN_PURE"):
    from . import _purepy as _backend

    BACKEND = "purepy"
else:
    try:
        from . import _kernel as _backend

        BACKEND = "compiled"
    except ImportError:
        from . import _purepy as _backend

        BACKEND = "purepy"

last_row = _backend.last_row
full_matrix = _backend.full_matrix

from .core import (  # noqa: E402
    AlignConfig,
    AlignedWord,
    Alignment,
    EditOp,
    align_linear_space,
    align_quadratic,
    assign_word_timestamps,
)

__all__ = [
    "AlignConfig",
    "AlignedWord",
    "Alignment",
    "BACKEND",
    "EditOp",
    "align_linear_space",
    "align_quadratic",
    "assign_word_timestamps",
    "full_matrix",
    "last_row",
]

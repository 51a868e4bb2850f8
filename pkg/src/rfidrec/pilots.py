"""Fixed orthogonal pilot symbols.

Each tag prepends 4 known +/-1 symbols to its payload. The rows are mutually
orthogonal (a 4x4 Hadamard-type matrix), which lets a least-squares projection
separate the per-tag gains and pins tag identity: "tag i" throughout the
package means the tag transmitting pilot row i.
"""

from __future__ import annotations

import numpy as np

PILOT_LEN = 4

_PILOT_BASE = np.array(
    [
        [1, 1, 1, 1],
        [1, -1, 1, -1],
        [1, 1, -1, -1],
        [1, -1, -1, 1],
    ],
    dtype=np.int8,
)


def pilot_matrix(tag_count: int) -> np.ndarray:
    """First `tag_count` rows of the 4x4 orthogonal +/-1 pilot matrix."""
    if not 1 <= tag_count <= 4:
        raise ValueError(f"tag_count must be in [1, 4], got {tag_count}")
    return _PILOT_BASE[:tag_count].copy()

"""Shared numeric and serialization helpers."""

import json
import math
import os

import numpy as np

# Block size for the compensated cumulative sum. Within a block a plain
# cumsum is used (worst-case error ~ B*eps relative to the block partial),
# across blocks the running offset is carried by Kahan summation. 2048 keeps
# the worst-case entry error near 1e-12 in the log-weight tables at n = 1e6.
_CUMSUM_BLOCK = 2048


def compensated_cumsum(values):
    """Cumulative sum with blockwise error compensation.

    Same-sign inputs are assumed by the error analysis but not required.
    """
    x = np.asarray(values, dtype=np.float64)
    out = np.empty_like(x)
    offset = 0.0
    comp = 0.0
    for start in range(0, x.size, _CUMSUM_BLOCK):
        block = x[start:start + _CUMSUM_BLOCK]
        running = np.cumsum(block)
        out[start:start + block.size] = running + offset
        # Kahan update of the cross-block offset; np.sum is pairwise and
        # cheaper in error than taking running[-1].
        y = float(np.sum(block)) - comp
        t = offset + y
        comp = (t - offset) - y
        offset = t
    return out


def kahan_sum(values):
    """Compensated sum of an iterable of floats (exact per math.fsum)."""
    return math.fsum(values)


def format_float(x) -> str:
    """17 significant digits, enough for exact float round trips."""
    return "%.17g" % float(x)


def canonical_json(obj) -> str:
    """Stable-key-order JSON used for every emitted report."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def write_csv(path, header, rows):
    """CSV with a header row, LF endings, UTF-8, floats at 17 digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [
                format_float(c) if isinstance(c, float) else str(c)
                for c in row
            ]
            fh.write(",".join(cells) + "\n")


def resolve_threads(value) -> int:
    """'max' or a positive integer; defaults to the machine's core count."""
    if value is None or value == "max":
        return os.cpu_count() or 1
    n = int(value)
    if n < 1:
        raise ValueError("thread count must be >= 1")
    return n

"""Input validation helpers.

All public entry points funnel array arguments through these checks so the
numerical code can assume float64, finite entries and consistent shapes.
"""

from __future__ import annotations

import numpy as np


def check_matrix(m, name="matrix", rows=None, cols=None, allow_empty=False):
    """Coerce to a 2-D float64 array and validate shape/finiteness.

    ``allow_empty`` permits a zero column count (used for the free-part block
    when the dictionary has full rank).
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={a.ndim}")
    r, c = a.shape
    if r < 1 or (c < 1 and not allow_empty):
        raise ValueError(f"{name} must have positive dimensions, got {a.shape}")
    if a.size and not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite entries")
    if rows is not None and r != rows:
        raise ValueError(f"{name} must have {rows} rows, got {r}")
    if cols is not None and c != cols:
        raise ValueError(f"{name} must have {cols} columns, got {c}")
    return a


def check_vector(v, name="vector", size=None, allow_empty=False):
    """Coerce to a 1-D float64 array and validate length/finiteness."""
    a = np.asarray(v, dtype=float).ravel()
    if a.size == 0 and not allow_empty:
        raise ValueError(f"{name} must be nonempty")
    if a.size and not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite entries")
    if size is not None and a.size != size:
        raise ValueError(f"{name} must have length {size}, got {a.size}")
    return a


def check_no_zero_rows(d, name="dictionary", tol=0.0):
    """Reject matrices containing an (exactly or numerically) zero row."""
    if d.shape[0] and (np.abs(d).max(axis=1) <= tol).any():
        raise ValueError(f"{name} contains a zero row")
    return d

"""Finite-difference weight generation (Fornberg-style, via Vandermonde solve).

Used by the residual evaluators; generating weights on the fly avoids
hard-coded stencil tables and lets callers pick stencil width per use.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple[int, ...], m: int) -> np.ndarray:
    """Weights w such that f^(m)(x) ~= sum_k w[k] f(x + offsets[k] h) / h^m,
    exact for polynomials up to degree len(offsets)-1."""
    off = np.asarray(offsets, dtype=float)
    n = off.size
    if m >= n:
        raise ValueError("need more points than the derivative order")
    rhs = np.zeros(n)
    rhs[m] = 1.0
    mat = np.vander(off, n, increasing=True).T
    mat /= np.array([factorial(j) for j in range(n)])[:, None]
    return np.linalg.solve(mat, rhs)


def central_offsets(half_width: int) -> tuple[int, ...]:
    return tuple(range(-half_width, half_width + 1))

"""Precomputed recurrence constants shared by both kernel backends.

Keeping every square root and ratio in one place guarantees the compiled
and the pure-NumPy kernels consume bit-identical constants, which is a
precondition for their outputs being bit-identical.
"""
import math
from functools import lru_cache

import numpy as np

# Y_0^0 = 1/sqrt(4 pi)
Y00 = 0.5 / math.sqrt(math.pi)


def packed_index(l: int, m: int) -> int:
    """Index of (l, m), m >= 0, in the packed triangular layout."""
    return l * (l + 1) // 2 + m


def packed_size(lmax: int) -> int:
    return (lmax + 1) * (lmax + 2) // 2


@lru_cache(maxsize=None)
def ylm_tables(lmax: int):
    """Constants for the fully-normalized associated Legendre recurrence.

    P[m][m]   = cmm[m] * sin(theta) * P[m-1][m-1]          (Condon-Shortley in the sign)
    P[l][m]   = A[l,m] * (cos(theta) * P[l-1][m] - B[l,m] * P[l-2][m]),  l > m
    with P[0][0] = Y00 and B[m+1,m] = 0 exactly.
    """
    cmm = np.zeros(lmax + 1)
    A = np.zeros((lmax + 1, lmax + 1))
    B = np.zeros((lmax + 1, lmax + 1))
    for m in range(1, lmax + 1):
        cmm[m] = -math.sqrt((2.0 * m + 1.0) / (2.0 * m))
    for m in range(lmax + 1):
        for l in range(m + 1, lmax + 1):
            A[l, m] = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            num = (l - 1.0) * (l - 1.0) - m * m
            B[l, m] = math.sqrt(num / (4.0 * (l - 1.0) * (l - 1.0) - 1.0))
    cmm.setflags(write=False)
    A.setflags(write=False)
    B.setflags(write=False)
    return cmm, A, B


@lru_cache(maxsize=None)
def legendre_tables(lmax: int):
    """Constants for P_l(x) = alpha[l] * x * P_{l-1}(x) - beta[l] * P_{l-2}(x)."""
    alpha = np.zeros(lmax + 1)
    beta = np.zeros(lmax + 1)
    for l in range(1, lmax + 1):
        alpha[l] = (2.0 * l - 1.0) / l
        beta[l] = (l - 1.0) / l
    alpha.setflags(write=False)
    beta.setflags(write=False)
    return alpha, beta

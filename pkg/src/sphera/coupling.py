"""Clebsch-Gordan coefficients and Wigner d/D rotation matrices.

Clebsch-Gordan values come from the Racah closed form.  For small degrees
the k-sum and the squared prefactor are accumulated in exact rational
arithmetic (the only rounding is one square root and one product at the
end); very large degrees switch to log-factorial accumulation.
"""
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

_EXACT_LIMIT = 70  # l1 + l2 + l above this uses the log-gamma path


def _fact(n: int) -> int:
    return math.factorial(n)


@lru_cache(maxsize=None)
def clebsch_gordan(l1: int, m1: int, l2: int, m2: int, l: int, m: int) -> float:
    """<l1 m1; l2 m2 | l m>.

    Returns 0 for selection-rule violations (m != m1 + m2, triangle rule);
    raises for malformed quantum numbers.
    """
    for (ll, mm) in ((l1, m1), (l2, m2), (l, m)):
        if ll < 0:
            raise ValueError("degrees must be >= 0")
        if abs(mm) > ll:
            raise ValueError(f"|m| = {abs(mm)} exceeds degree l = {ll}")
    if m1 + m2 != m:
        return 0.0
    if not (abs(l1 - l2) <= l <= l1 + l2):
        return 0.0
    kmin = max(0, l2 - l - m1, l1 - l + m2)
    kmax = min(l1 + l2 - l, l1 - m1, l2 + m2)
    if kmax < kmin:
        return 0.0
    if l1 + l2 + l <= _EXACT_LIMIT:
        return _cg_exact(l1, m1, l2, m2, l, m, kmin, kmax)
    return _cg_lgamma(l1, m1, l2, m2, l, m, kmin, kmax)


def _cg_exact(l1, m1, l2, m2, l, m, kmin, kmax) -> float:
    s = Fraction(0)
    for k in range(kmin, kmax + 1):
        d = (_fact(k) * _fact(l1 + l2 - l - k) * _fact(l1 - m1 - k)
             * _fact(l2 + m2 - k) * _fact(l - l2 + m1 + k) * _fact(l - l1 - m2 + k))
        s += Fraction(-1 if k % 2 else 1, d)
    if s == 0:
        return 0.0
    q = Fraction(
        (2 * l + 1)
        * _fact(l1 + l2 - l) * _fact(l1 - l2 + l) * _fact(-l1 + l2 + l),
        _fact(l1 + l2 + l + 1),
    )
    q *= (_fact(l + m) * _fact(l - m) * _fact(l1 + m1) * _fact(l1 - m1)
          * _fact(l2 + m2) * _fact(l2 - m2))
    return float(s) * math.sqrt(float(q))


def _cg_lgamma(l1, m1, l2, m2, l, m, kmin, kmax) -> float:
    lg = math.lgamma
    logq = (
        math.log(2 * l + 1)
        + lg(l1 + l2 - l + 1) + lg(l1 - l2 + l + 1) + lg(-l1 + l2 + l + 1)
        - lg(l1 + l2 + l + 2)
        + lg(l + m + 1) + lg(l - m + 1) + lg(l1 + m1 + 1) + lg(l1 - m1 + 1)
        + lg(l2 + m2 + 1) + lg(l2 - m2 + 1)
    )
    total = 0.0
    for k in range(kmin, kmax + 1):
        logd = (lg(k + 1) + lg(l1 + l2 - l - k + 1) + lg(l1 - m1 - k + 1)
                + lg(l2 + m2 - k + 1) + lg(l - l2 + m1 + k + 1) + lg(l - l1 - m2 + k + 1))
        term = math.exp(0.5 * logq - logd)
        total += -term if k % 2 else term
    return total


def wigner_d(l: int, k: int, m: int, beta: float) -> float:
    """Wigner small-d matrix element d^l_{k,m}(beta) by the factorial sum."""
    if abs(k) > l or abs(m) > l:
        raise ValueError("orders must satisfy |k|, |m| <= l")
    c = math.cos(0.5 * beta)
    s = math.sin(0.5 * beta)
    pref = math.sqrt(_fact(l + m) * _fact(l - m) * _fact(l + k) * _fact(l - k))
    total = 0.0
    for t in range(max(0, m - k), min(l + m, l - k) + 1):
        denom = (_fact(l + m - t) * _fact(t) * _fact(k - m + t) * _fact(l - k - t))
        term = (c ** (2 * l + m - k - 2 * t)) * (s ** (k - m + 2 * t)) / denom
        total += -term if (k - m + t) % 2 else term
    return pref * total


def wigner_d_matrix(l: int, beta: float) -> np.ndarray:
    """Matrix d^l(beta) indexed [k + l, m + l]."""
    d = np.empty((2 * l + 1, 2 * l + 1))
    for k in range(-l, l + 1):
        for m in range(-l, l + 1):
            d[k + l, m + l] = wigner_d(l, k, m, beta)
    return d


def wigner_D(l: int, k: int, m: int, euler: tuple[float, float, float]) -> complex:
    """Wigner D-matrix element D^l_{k,m} for Euler angles (alpha, beta, gamma).

    Convention fixed by the z-rotation special case
    D^l_{k,m}(alpha, 0, 0) = delta_{k=m} e^{i m alpha}; a coefficient vector
    transforms as b_l^k = sum_m a_l^m D^l_{k,m}, which moves densities by
    ``geometry.euler_matrix``.
    """
    alpha, beta, gamma = euler
    return (
        complex(math.cos(k * alpha), math.sin(k * alpha))
        * wigner_d(l, k, m, beta)
        * complex(math.cos(m * gamma), math.sin(m * gamma))
    )


def wigner_D_matrix(l: int, euler: tuple[float, float, float]) -> np.ndarray:
    """Matrix D^l(euler) indexed [k + l, m + l]; unitary."""
    alpha, beta, gamma = euler
    ks = np.arange(-l, l + 1)
    ph_k = np.exp(1j * ks * alpha)
    ph_m = np.exp(1j * ks * gamma)
    return ph_k[:, None] * wigner_d_matrix(l, beta) * ph_m[None, :]

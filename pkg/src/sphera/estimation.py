"""Nonparametric estimators of harmonic coefficients and their covariances.

The basic estimator is the empirical projection
a_l^m-hat = (1/n) sum_k Y_l^m*(x_k); it is unbiased with covariance
expressible through Clebsch-Gordan sums over lower-degree coefficients.
Sums over observations are compensated (Kahan) in sample order, so results
do not depend on batching.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .coupling import clebsch_gordan
from .expansion import HarmonicCoefficients, InertiaSummary
from .sampling import SampleSet
from .special import Y00

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class CoefficientEstimate:
    """Estimated expansion (complex basis) with sample size for inference."""
    coeffs: HarmonicCoefficients
    n: int

    @property
    def max_degree(self) -> int:
        return self.coeffs.max_degree

    def c_value(self, l: int) -> float:
        """Rotational-symmetry coefficient c_l = sqrt(4 pi/(2l+1)) a_l^0."""
        return math.sqrt(FOUR_PI / (2 * l + 1)) * self.coeffs.get(l, 0).real

    def std_error(self, l: int, m: int) -> float:
        """Plug-in standard error of |a_l^m - a_l^m-hat|."""
        var = (pair_covariance(self, l, m, l, m, mode="plugin").real / self.n)
        return math.sqrt(max(var, 0.0))

    def to_json_dict(self) -> dict:
        d = self.coeffs.to_json_dict()
        d["n"] = self.n
        d["std_errors"] = [[l, m, float(self.std_error(l, m))]
                           for l in range(self.max_degree + 1) for m in range(-l, l + 1)]
        return d


def estimate_coeffs(sample: SampleSet, max_degree: int) -> CoefficientEstimate:
    """Empirical coefficients up to ``max_degree``; a_0^0 is pinned to its
    exact value 1/sqrt(4 pi) (the constant harmonic carries no information)."""
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    if sample.n < 1:
        raise ValueError("empty sample")
    ct, st, cp, sp = K.trig_from_angles(sample.theta, sample.phi)
    packed = K.conj_harmonic_sums(max_degree, ct, st, cp, sp) / float(sample.n)
    for l in range(max_degree + 1):
        i = K.packed_index(l, 0)
        packed[i] = packed[i].real
    packed[0] = Y00
    return CoefficientEstimate(HarmonicCoefficients(max_degree, "complex", packed),
                               sample.n)


@dataclass(frozen=True)
class CEstimate:
    """Estimated rotational-symmetry coefficients with standard errors."""
    values: np.ndarray       # c_l-hat, l = 0..lmax
    std_errors: np.ndarray   # sqrt(Var c_l-hat), plug-in
    n: int


def estimate_c(sample: SampleSet, lmax: int) -> CEstimate:
    """c_l-hat = (1/n) sum_k P_l(cos theta_k), for data already rotated so the
    candidate symmetry axis is the North pole.

    The plug-in variance uses n Var = sum_{h=0..l} (C^{2h,0}_{l,0;l,0})^2 c_2h - c_l^2,
    including the h = 0 term with c_0 = 1.
    """
    sums = K.legendre_sums(2 * lmax, np.cos(sample.theta)) / float(sample.n)
    c = sums[:lmax + 1].copy()
    c[0] = 1.0
    se = np.zeros(lmax + 1)
    for l in range(1, lmax + 1):
        second = 0.0
        for h in range(0, l + 1):
            cg = clebsch_gordan(l, 0, l, 0, 2 * h, 0)
            second += cg * cg * (1.0 if h == 0 else sums[2 * h])
        var = max(second - c[l] ** 2, 0.0)
        se[l] = math.sqrt(var / sample.n)
    return CEstimate(values=c, std_errors=se, n=sample.n)


def estimate_mean(sample: SampleSet) -> InertiaSummary:
    """Sample mean vector; identical (to rounding) to the route through the
    estimated degree-1 coefficients."""
    s = K.colsums(sample.xyz())
    mean = s / float(sample.n)
    r = float(np.linalg.norm(mean))
    return InertiaSummary(mean=mean, resultant=r, mean_undefined=r < 1e-10)


def expected_product(l1: int, m1: int, l2: int, m2: int, a_lookup,
                     h_max: int | None = None) -> complex:
    """E[Y_{l1}^{m1}(X) Y_{l2}^{m2}(X)*] through the Clebsch-Gordan series,
    with coefficients supplied by ``a_lookup(h, mu)``; the h-sum may be
    truncated at ``h_max`` when higher coefficients are unavailable."""
    mu = m1 - m2
    total = 0.0 + 0.0j
    sign = (-1.0) ** m2
    pref = math.sqrt((2 * l1 + 1) * (2 * l2 + 1) / FOUR_PI)
    top = l1 + l2 if h_max is None else min(h_max, l1 + l2)
    for h in range(abs(l1 - l2), top + 1):
        if abs(mu) > h:
            continue
        c0 = clebsch_gordan(l1, 0, l2, 0, h, 0)
        if c0 == 0.0:
            continue
        cm = clebsch_gordan(l1, m1, l2, -m2, h, mu)
        if cm == 0.0:
            continue
        a = a_lookup(h, mu)
        if a != 0.0:
            total += pref / math.sqrt(2 * h + 1) * c0 * cm * a
    return sign * total


def rotational_product(l1: int, l2: int, m: int, c_values) -> float:
    """E[Y_{l1}^m Y_{l2}^m*] under rotational symmetry about the pole:
    (-1)^m/(4 pi) sqrt((2l1+1)(2l2+1)) sum_k C^{k0}_{l1 0; l2 0} C^{k0}_{l1 m; l2 -m} c_k."""
    total = 0.0
    for k in range(abs(l1 - l2), l1 + l2 + 1):
        c0 = clebsch_gordan(l1, 0, l2, 0, k, 0)
        if c0 == 0.0:
            continue
        cm = clebsch_gordan(l1, m, l2, -m, k, 0)
        if cm == 0.0:
            continue
        total += c0 * cm * c_values[k]
    sign = (-1.0) ** m
    return sign / FOUR_PI * math.sqrt((2 * l1 + 1) * (2 * l2 + 1)) * total


def pair_covariance(est: CoefficientEstimate, l1: int, m1: int, l2: int, m2: int,
                    mode: str = "plugin") -> complex:
    """Per-observation covariance Cov(Y_{l1}^{m1}(X), Y_{l2}^{m2}(X)); divide
    by n for the covariance of the coefficient estimators.

    modes: 'plugin' (Clebsch-Gordan sum with estimated coefficients up to
    l1 + l2), 'null-uniform' (delta/4 pi), 'null-rotational' (plug-in c_k).
    """
    if mode == "null-uniform":
        return complex(1.0 / FOUR_PI) if (l1 == l2 and m1 == m2) else 0.0j
    if mode == "null-rotational":
        if est.max_degree < l1 + l2:
            raise ValueError(f"need coefficients up to degree {l1 + l2}, "
                             f"have {est.max_degree}")
        cvals = [est.c_value(k) for k in range(l1 + l2 + 1)]
        cvals[0] = 1.0
        second = 0.0 if m1 != m2 else rotational_product(l1, l2, m1, cvals)
        a1 = cvals[l1] * math.sqrt((2 * l1 + 1) / FOUR_PI) if m1 == 0 else 0.0
        a2 = cvals[l2] * math.sqrt((2 * l2 + 1) / FOUR_PI) if m2 == 0 else 0.0
        return complex(second - a1 * a2)
    if mode == "plugin":
        if est.max_degree < max(l1, l2):
            raise ValueError(f"need coefficients up to degree {max(l1, l2)}, "
                             f"have {est.max_degree}")
        # the h-sum is truncated at the available degree (truncation is part
        # of the plug-in contract; null modes are exact)
        second = expected_product(l1, m1, l2, m2,
                                  lambda h, mu: est.coeffs.get(h, mu),
                                  h_max=est.max_degree)
        return second - est.coeffs.get(l1, m1) * np.conj(est.coeffs.get(l2, m2))
    raise ValueError(f"unknown mode {mode!r}")

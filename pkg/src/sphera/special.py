"""Special functions: Legendre polynomials, spherical harmonics, Bessel and
Kummer functions, and the chi-square tail.

Spherical harmonics follow the physics normalization with the
Condon-Shortley phase:

    Y_l^m(theta, phi) = (-1)^m sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)
                        P_l^m(cos theta) e^{i m phi}

so Y_1^1 = -sqrt(3/8 pi) sin(theta) e^{i phi}.  Real harmonics Y_{l,m} are
the cosine type for m > 0 and the sine type for m < 0, normalized so that
x1 = sqrt(4 pi / 3) Y_{1,1}, x2 = sqrt(4 pi / 3) Y_{1,-1}.
"""
import math

import numpy as np
from scipy import special as _sp

from . import _kernels as K
from ._kernels.tables import legendre_tables, packed_index

SQRT_4PI = math.sqrt(4.0 * math.pi)
Y00 = K.Y00


def legendre_p(l: int, x):
    """Legendre polynomial P_l(x) on [-1, 1] by the three-term recurrence."""
    if l < 0:
        raise ValueError("degree must be >= 0")
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(arr) > 1.0):
        raise ValueError("argument outside [-1, 1]")
    alpha, beta = legendre_tables(max(l, 1))
    p2 = np.ones_like(arr)
    if l == 0:
        return p2 if arr.ndim else float(p2)
    p1 = arr.copy()
    for j in range(2, l + 1):
        p1, p2 = (alpha[j] * (arr * p1)) - (beta[j] * p2), p1
    return p1 if arr.ndim else float(p1)


def legendre_all(lmax: int, x: np.ndarray) -> np.ndarray:
    """P_0..P_lmax at each point; shape (len(x), lmax + 1)."""
    x = np.asarray(x, dtype=np.float64)
    alpha, beta = legendre_tables(lmax)
    out = np.empty((x.shape[0], lmax + 1))
    out[:, 0] = 1.0
    if lmax >= 1:
        out[:, 1] = x
        for j in range(2, lmax + 1):
            out[:, j] = (alpha[j] * (x * out[:, j - 1])) - (beta[j] * out[:, j - 2])
    return out


def _packed_conj_row(l: int, theta, phi) -> np.ndarray:
    th = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    ph = np.atleast_1d(np.asarray(phi, dtype=np.float64))
    ct, st, cp, sp = K.trig_from_angles(th, ph)
    vre, vim = K.conj_harmonic_values(l, ct, st, cp, sp)
    return vre + 1j * vim


def sph_harm(l: int, m: int, theta, phi):
    """Complex spherical harmonic Y_l^m; vectorized over theta/phi."""
    if abs(m) > l:
        raise ValueError(f"|m| = {abs(m)} exceeds degree l = {l}")
    vals = _packed_conj_row(l, theta, phi)[:, packed_index(l, abs(m))]
    y = np.conj(vals)  # table stores conj(Y)
    if m < 0:
        y = (-1.0) ** m * np.conj(y)
    return y if np.ndim(theta) else complex(y[0])


def real_sph_harm(l: int, m: int, theta, phi):
    """Real spherical harmonic Y_{l,m} (cosine type m>0, sine type m<0)."""
    if abs(m) > l:
        raise ValueError(f"|m| = {abs(m)} exceeds degree l = {l}")
    y = sph_harm(l, abs(m), theta, phi)
    sign = (-1.0) ** abs(m)
    if m == 0:
        out = np.real(y)
    elif m > 0:
        out = math.sqrt(2.0) * sign * np.real(y)
    else:
        out = math.sqrt(2.0) * sign * np.imag(y)
    return out if np.ndim(theta) else float(out)


def sph_bessel_j(l: int, z):
    """Spherical Bessel function j_l(z) = sqrt(pi/2z) J_{l+1/2}(z); j_l(0) = delta_{l=0}."""
    if l < 0:
        raise ValueError("degree must be >= 0")
    z_arr = np.asarray(z, dtype=np.float64)
    if np.any(z_arr < 0):
        raise ValueError("argument must be >= 0")
    out = _sp.spherical_jn(l, z_arr)
    return out if z_arr.ndim else float(out)


def bessel_i_half(l: int, kappa: float) -> float:
    """Modified Bessel function I_{l+1/2}(kappa), kappa > 0."""
    if kappa <= 0:
        raise ValueError("kappa must be > 0")
    v = _sp.iv(l + 0.5, kappa)
    if not math.isfinite(v):
        raise OverflowError(f"I_{l + 0.5}({kappa}) overflows; use log_bessel_i_half")
    return float(v)


def log_bessel_i_half(l: int, kappa: float) -> float:
    """log I_{l+1/2}(kappa), stable for large kappa (uses the scaled ive)."""
    if kappa <= 0:
        raise ValueError("kappa must be > 0")
    return float(np.log(_sp.ive(l + 0.5, kappa)) + kappa)


def bessel_ratio(l: int, kappa: float) -> float:
    """I_{l+1/2}(kappa) / I_{1/2}(kappa); the vMF harmonic coefficient c_l.

    The kappa -> 0 limit is delta_{l=0}.
    """
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if kappa == 0.0:
        return 1.0 if l == 0 else 0.0
    # scaled Bessel ratio: the e^kappa factors cancel
    return float(_sp.ive(l + 0.5, kappa) / _sp.ive(0.5, kappa))


def kummer_m(gamma: float) -> float:
    """Kummer's confluent hypergeometric M(1/2, 3/2, gamma) = int_0^1 e^{gamma t^2} dt."""
    if not math.isfinite(gamma):
        raise ValueError("gamma must be finite")
    return float(_sp.hyp1f1(0.5, 1.5, gamma))


def chi2_sf(x: float, df: int) -> float:
    """Upper-tail probability of the chi-square distribution via the
    regularized incomplete gamma function."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x < 0:
        raise ValueError("statistic must be >= 0")
    return float(_sp.gammaincc(0.5 * df, 0.5 * x))

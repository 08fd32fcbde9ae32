"""Catalog of parametric spherical densities.

Each model evaluates its normalized density and produces harmonic
coefficients, analytically where a closed form exists and by quadrature
projection otherwise.  Normalizing constants are computed lazily by
adaptive quadrature (node doubling until the relative change drops below
1e-10) and cached per model instance.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from . import _kernels as K
from .coupling import clebsch_gordan
from .expansion import HarmonicCoefficients, to_complex
from .geometry import NORTH, UnitVector, angles_from_xyz, xyz_from_angles
from .quadrature import gauss_legendre, sphere_rule
from .special import SQRT_4PI, bessel_ratio, kummer_m, legendre_all, real_sph_harm, sph_harm

FOUR_PI = 4.0 * math.pi


def _frame_tuple(frame) -> tuple:
    m = np.asarray(frame, dtype=np.float64)
    if m.shape != (3, 3):
        raise ValueError("frame must be a 3x3 matrix with orthonormal columns")
    if np.max(np.abs(m.T @ m - np.eye(3))) > 1e-12:
        raise ValueError("frame columns are not orthonormal to 1e-12")
    return tuple(tuple(float(v) for v in col) for col in m.T)  # store columns


def _frame_matrix(cols: tuple) -> np.ndarray:
    return np.array(cols).T


@dataclass(frozen=True)
class Uniform:
    pass


@dataclass(frozen=True)
class BrownianMotion:
    x0: UnitVector
    zeta: float

    def __post_init__(self):
        if self.zeta <= 0:
            raise ValueError("zeta must be > 0")


@dataclass(frozen=True)
class VonMisesFisher:
    mu: UnitVector
    kappa: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")


@dataclass(frozen=True)
class Watson:
    mu: UnitVector
    gamma: float


@dataclass(frozen=True)
class GFB6:
    """exp(kappa mu3.x + gamma (mu3.x)^2 + beta ((mu1.x)^2 - (mu2.x)^2)), unnormalized."""
    kappa: float
    beta: float
    gamma: float
    frame: tuple

    def __post_init__(self):
        object.__setattr__(self, "frame", _frame_tuple(self.frame))

    @classmethod
    def from_zetas(cls, kappa: float, zeta1: float, zeta2: float, frame) -> "GFB6":
        # trace constraint zeta3 = -(zeta1 + zeta2); the two parametrizations
        # differ by an additive constant in the exponent only
        zeta3 = -(zeta1 + zeta2)
        return cls(kappa, (zeta1 - zeta2) / 2.0, 1.5 * zeta3, frame)


@dataclass(frozen=True)
class Bingham:
    beta: float
    gamma: float
    frame: tuple

    def __post_init__(self):
        object.__setattr__(self, "frame", _frame_tuple(self.frame))


@dataclass(frozen=True)
class Kent:
    kappa: float
    beta: float
    frame: tuple

    def __post_init__(self):
        object.__setattr__(self, "frame", _frame_tuple(self.frame))


@dataclass(frozen=True)
class HarmonicSquare:
    """|Y_l^m|^2 (real=False) or the squared real harmonic Y_{l,m}^2 (real=True)."""
    l: int
    m: int
    real: bool = False

    def __post_init__(self):
        if abs(self.m) > self.l:
            raise ValueError("|m| must be <= l")
        if not self.real and self.m < 0:
            # |Y_l^-m| = |Y_l^m|
            object.__setattr__(self, "m", -self.m)


@dataclass(frozen=True)
class ExponentialFamily:
    """exp(sum c_l^m Y_l^m); c_0^0 is the normalizing constant and is always
    recomputed from the other coefficients rather than trusted."""
    coefficients: HarmonicCoefficients

    def __post_init__(self):
        if self.coefficients.basis != "complex":
            object.__setattr__(self, "coefficients", to_complex(self.coefficients))


@dataclass(frozen=True)
class ExponentialLegendre:
    """exp(sum c_l P_l(x0 . x)); rotationally symmetric about x0 (c_0 dropped)."""
    c: tuple
    axis: UnitVector

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))


@dataclass(frozen=True)
class MixtureWatson:
    """p e^{gamma1 cos^2(theta - alpha1)} + (1-p) e^{gamma2 cos^2(theta + alpha2)},
    rotationally symmetric about the North pole."""
    p: float
    gamma1: float
    gamma2: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        for a in (self.alpha1, self.alpha2):
            if not 0.0 <= a <= math.pi / 2.0:
                raise ValueError("alpha must be in [0, pi/2]")


ModelSpec = Union[Uniform, BrownianMotion, VonMisesFisher, Watson, GFB6, Bingham,
                  Kent, HarmonicSquare, ExponentialFamily, ExponentialLegendre,
                  MixtureWatson]

_ROTATIONAL = (BrownianMotion, VonMisesFisher, Watson, ExponentialLegendre, MixtureWatson)


# ---------------------------------------------------------------------------
# radial profiles g(t), t = axis . x, for rotationally symmetric models

def _bm_truncation(zeta: float) -> int:
    l = 0
    while math.exp(-l * (l + 1) / (4.0 * zeta)) * (2 * l + 1) / FOUR_PI >= 1e-14:
        l += 1
        if l > 2000:
            raise RuntimeError("Brownian-motion series does not truncate; zeta too large")
    return l


def _radial_profile(model):
    """(g, axis) with g(t) the normalized density as a function of t = axis.x."""
    if isinstance(model, VonMisesFisher):
        k = model.kappa
        if k == 0.0:
            return (lambda t: np.full_like(np.asarray(t, float), 1.0 / FOUR_PI)), model.mu
        # kappa/(4 pi sinh kappa) e^{kappa t}, written overflow-safe
        c = k / (2.0 * math.pi * (1.0 - math.exp(-2.0 * k)))
        return (lambda t: c * np.exp(k * (np.asarray(t, float) - 1.0))), model.mu
    if isinstance(model, Watson):
        g0 = model.gamma
        norm = FOUR_PI * kummer_m(g0)
        return (lambda t: np.exp(g0 * np.asarray(t, float) ** 2) / norm), model.mu
    if isinstance(model, BrownianMotion):
        lmax = _bm_truncation(model.zeta)
        ls = np.arange(lmax + 1)
        w = np.exp(-ls * (ls + 1) / (4.0 * model.zeta)) * (2 * ls + 1) / FOUR_PI

        def g(t):
            p = legendre_all(lmax, np.atleast_1d(np.asarray(t, float)))
            return p @ w
        return g, model.x0
    if isinstance(model, ExponentialLegendre):
        cs = np.array(model.c, dtype=float)
        if cs.size:
            cs = cs.copy()
            cs[0] = 0.0  # the constant is fixed by normalization
        lmax = max(cs.size - 1, 0)
        z = _radial_norm(model)

        def g(t):
            p = legendre_all(lmax, np.atleast_1d(np.asarray(t, float)))
            return np.exp(p @ cs) / z
        return g, model.axis
    if isinstance(model, MixtureWatson):
        z = _radial_norm(model)

        def g(t):
            return _mixture_profile(model, np.atleast_1d(np.asarray(t, float))) / z
        return g, NORTH
    raise TypeError(f"not rotationally symmetric: {type(model).__name__}")


def _mixture_profile(model: MixtureWatson, t: np.ndarray) -> np.ndarray:
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    c1 = t * math.cos(model.alpha1) + s * math.sin(model.alpha1)   # cos(theta - alpha1)
    c2 = t * math.cos(model.alpha2) - s * math.sin(model.alpha2)   # cos(theta + alpha2)
    return (model.p * np.exp(model.gamma1 * c1 * c1)
            + (1.0 - model.p) * np.exp(model.gamma2 * c2 * c2))


def _adaptive_line(f, tol: float = 1e-12, start: int = 64, cap: int = 8192) -> float:
    """2 pi * integral_{-1}^{1} f(t) dt with node doubling."""
    prev = None
    n = start
    while n <= cap:
        rule = gauss_legendre(n)
        val = 2.0 * math.pi * float(np.dot(rule.weights, f(rule.nodes)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        n *= 2
    raise RuntimeError("1-D normalizing quadrature failed to converge")


@lru_cache(maxsize=None)
def _radial_norm(model) -> float:
    """Normalization of the unnormalized radial profile (integral over S2)."""
    if isinstance(model, ExponentialLegendre):
        cs = np.array(model.c, dtype=float)
        if cs.size:
            cs = cs.copy()
            cs[0] = 0.0
        lmax = max(cs.size - 1, 0)
        return _adaptive_line(lambda t: np.exp(legendre_all(lmax, t) @ cs))
    if isinstance(model, MixtureWatson):
        return _adaptive_line(lambda t: _mixture_profile(model, t))
    raise TypeError(type(model).__name__)


# ---------------------------------------------------------------------------
# GFB-type quadratic exponents

def _gfb_params(model):
    if isinstance(model, GFB6):
        return model.kappa, model.beta, model.gamma, _frame_matrix(model.frame)
    if isinstance(model, Bingham):
        return 0.0, model.beta, model.gamma, _frame_matrix(model.frame)
    if isinstance(model, Kent):
        return model.kappa, model.beta, 0.0, _frame_matrix(model.frame)
    raise TypeError(type(model).__name__)


def log_unnormalized(model, xyz: np.ndarray) -> np.ndarray:
    """Exponent of the unnormalized density at unit vectors (rows of xyz)."""
    if isinstance(model, (GFB6, Bingham, Kent)):
        kappa, beta, gamma, m = _gfb_params(model)
        y = xyz @ m  # components mu_k . x
        return kappa * y[:, 2] + gamma * y[:, 2] ** 2 + beta * (y[:, 0] ** 2 - y[:, 1] ** 2)
    if isinstance(model, ExponentialFamily):
        coeff = model.coefficients
        packed = coeff.data.copy()
        packed[0] = 0.0
        th, ph = angles_from_xyz(xyz)
        ct, st, cp, sp = K.trig_from_angles(th, ph)
        return K.expansion_values(coeff.max_degree, packed, ct, st, cp, sp)
    raise TypeError(type(model).__name__)


@lru_cache(maxsize=None)
def _surface_norm(model) -> float:
    """Z = integral exp(log_unnormalized) over S2, by adaptive product quadrature."""
    prev = None
    n = 64
    while n <= 2048:
        rule = sphere_rule(n, 2 * n)
        vals = np.exp(log_unnormalized(model, xyz_from_angles(rule.theta, rule.phi)))
        z = rule.integrate(vals)
        if prev is not None and abs(z - prev) <= 1e-10 * abs(z):
            return z
        prev = z
        n *= 2
    raise RuntimeError("normalizing quadrature failed to converge "
                       "(relative change > 1e-10 after node doubling)")


# ---------------------------------------------------------------------------
# public API

def density_batch(model, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Normalized density values at the given angles."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    if isinstance(model, Uniform):
        return np.full(theta.shape, 1.0 / FOUR_PI)
    if isinstance(model, _ROTATIONAL):
        g, axis = _radial_profile(model)
        t = xyz_from_angles(theta, phi) @ axis.xyz
        return g(np.clip(t, -1.0, 1.0))
    if isinstance(model, HarmonicSquare):
        if model.real:
            return real_sph_harm(model.l, model.m, theta, phi) ** 2
        return np.abs(sph_harm(model.l, model.m, theta, phi)) ** 2
    if isinstance(model, (GFB6, Bingham, Kent, ExponentialFamily)):
        z = _surface_norm(model)
        return np.exp(log_unnormalized(model, xyz_from_angles(theta, phi))) / z
    raise TypeError(f"unknown model {type(model).__name__}")


def density(model, x: UnitVector) -> float:
    return float(density_batch(model, np.array([x.theta]), np.array([x.phi]))[0])


def funk_hecke(g, l: int) -> float:
    """c_l = 2 pi * integral_{-1}^{1} g(t) P_l(t) dt by adaptive Gauss-Legendre."""
    if l < 0:
        raise ValueError("degree must be >= 0")
    return _adaptive_line(lambda t: np.asarray(g(t), float) * legendre_all(l, t)[:, l])


def radial_coefficients(g, lmax: int, tol: float = 1e-12) -> np.ndarray:
    """c_l = 2 pi * integral g P_l for l = 0..lmax, all degrees at once."""
    prev = None
    n = max(64, lmax + 1)
    while n <= 8192:
        rule = gauss_legendre(n)
        p = legendre_all(lmax, rule.nodes)
        vals = 2.0 * math.pi * (p.T * np.asarray(g(rule.nodes), float)) @ rule.weights
        if prev is not None and np.max(np.abs(vals - prev)) <= tol:
            return vals
        prev = vals
        n *= 2
    raise RuntimeError("radial coefficient quadrature failed to converge")


def _coeffs_from_cl(cl: np.ndarray, axis: UnitVector, max_degree: int) -> HarmonicCoefficients:
    """a_l^m = c_l Y_l^m(axis)* (Funk-Hecke form of a rotationally symmetric density)."""
    packed = np.zeros(K.packed_size(max_degree), dtype=complex)
    ct, st, cp, sp = K.trig_from_angles(np.array([axis.theta]), np.array([axis.phi]))
    vre, vim = K.conj_harmonic_values(max_degree, ct, st, cp, sp)
    conj_y = vre[0] + 1j * vim[0]
    for l in range(max_degree + 1):
        for m in range(0, l + 1):
            i = K.packed_index(l, m)
            packed[i] = cl[l] * conj_y[i]
        i0 = K.packed_index(l, 0)
        packed[i0] = packed[i0].real
    return HarmonicCoefficients(max_degree, "complex", packed)


def _harmonic_square_coeffs(model: HarmonicSquare, max_degree: int) -> HarmonicCoefficients:
    """Closed Clebsch-Gordan forms for |Y_l^m|^2 and Y_{l,m}^2."""
    l, m = model.l, model.m
    ents: dict[tuple[int, int], complex] = {}

    def abs_square_zonal(mm):
        # a_{2h}^0 of |Y_l^mm|^2
        out = {}
        sign = (-1.0) ** mm
        for h in range(0, l + 1):
            v = (sign * (2 * l + 1) / SQRT_4PI / math.sqrt(4 * h + 1)
                 * clebsch_gordan(l, 0, l, 0, 2 * h, 0)
                 * clebsch_gordan(l, mm, l, -mm, 2 * h, 0))
            out[2 * h] = v
        return out

    if not model.real or m == 0:
        for deg, v in abs_square_zonal(abs(m)).items():
            if deg <= max_degree:
                ents[(deg, 0)] = ents.get((deg, 0), 0.0) + v
        return HarmonicCoefficients.from_entries(max_degree, ents)

    # Real-basis coefficients: the zonal part is shared by the squares of both
    # the cosine and the sine harmonic (their sum is 2 |Y_l^m|^2), while the
    # order-2|m| cosine part enters with opposite signs.
    mm = abs(m)
    real_ents: dict[tuple[int, int], float] = {}
    for deg, v in abs_square_zonal(mm).items():
        if deg <= max_degree:
            real_ents[(deg, 0)] = float(np.real(v))
    sgn = 1.0 if m > 0 else -1.0
    for h in range(mm, l + 1):
        v = ((2 * l + 1) / (2.0 * math.sqrt(2.0 * math.pi)) / math.sqrt(4 * h + 1)
             * clebsch_gordan(l, 0, l, 0, 2 * h, 0)
             * clebsch_gordan(l, mm, l, mm, 2 * h, 2 * mm))
        if 2 * h <= max_degree:
            real_ents[(2 * h, 2 * mm)] = real_ents.get((2 * h, 2 * mm), 0.0) + sgn * float(v)
    rc = HarmonicCoefficients.from_entries(max_degree, real_ents, basis="real")
    return to_complex(rc)


def coefficients(model, max_degree: int) -> HarmonicCoefficients:
    """Harmonic coefficients of the model density up to ``max_degree``.

    Uses the analytic route where one exists (uniform, Brownian motion, vMF,
    Watson, harmonic squares) and adaptive quadrature projection otherwise.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    if isinstance(model, Uniform):
        return _coeffs_from_cl(np.r_[1.0, np.zeros(max_degree)], NORTH, max_degree)
    if isinstance(model, VonMisesFisher):
        cl = np.array([bessel_ratio(l, model.kappa) for l in range(max_degree + 1)])
        return _coeffs_from_cl(cl, model.mu, max_degree)
    if isinstance(model, BrownianMotion):
        ls = np.arange(max_degree + 1)
        cl = np.exp(-ls * (ls + 1) / (4.0 * model.zeta))
        return _coeffs_from_cl(cl, model.x0, max_degree)
    if isinstance(model, Watson):
        g, _ = _radial_profile(model)
        cl = radial_coefficients(g, max_degree)
        cl[1::2] = 0.0  # odd coefficients vanish identically
        return _coeffs_from_cl(cl, model.mu, max_degree)
    if isinstance(model, (ExponentialLegendre, MixtureWatson)):
        g, axis = _radial_profile(model)
        cl = radial_coefficients(g, max_degree)
        return _coeffs_from_cl(cl, axis, max_degree)
    if isinstance(model, HarmonicSquare):
        return _harmonic_square_coeffs(model, max_degree)
    if isinstance(model, (GFB6, Bingham, Kent, ExponentialFamily)):
        return _projected_coefficients(model, max_degree)
    raise TypeError(f"unknown model {type(model).__name__}")


def _projected_coefficients(model, max_degree: int) -> HarmonicCoefficients:
    prev = None
    n = max(2 * (max_degree + 1), 64)
    while n <= 2048:
        rule = sphere_rule(n, 2 * n)
        vals = density_batch(model, rule.theta, rule.phi)
        packed = K.conj_harmonic_sums(max_degree, rule.ct, rule.st, rule.cp, rule.sp,
                                      weights=rule.weights * vals)
        if prev is not None and np.max(np.abs(packed - prev)) <= 1e-11:
            for l in range(max_degree + 1):
                i = K.packed_index(l, 0)
                packed[i] = packed[i].real
            return HarmonicCoefficients(max_degree, "complex", packed)
        prev = packed
        n *= 2
    raise RuntimeError("coefficient projection failed to converge")

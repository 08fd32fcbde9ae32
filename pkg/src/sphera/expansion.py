"""Harmonic-expansion data model: storage, evaluation, projection, basis
conversion, rotation, Clebsch-Gordan products, moments and symmetry patterns.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .coupling import clebsch_gordan, wigner_D_matrix
from .geometry import UnitVector
from .quadrature import SphereRule, default_projection_rule
from .special import Y00

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class HarmonicCoefficients:
    """Triangular array of expansion coefficients up to ``max_degree``.

    Complex basis: only m >= 0 is stored (packed l(l+1)/2 + m); m < 0 is
    reconstructed from the conjugate symmetry a_l^{-m} = (-1)^m conj(a_l^m),
    so that symmetry holds structurally.  Real basis: full (L+1)^2 layout
    indexed l(l+1) + m.
    """
    max_degree: int
    basis: str
    data: np.ndarray = field(repr=False)
    truncated: bool = False

    def __eq__(self, other):
        if not isinstance(other, HarmonicCoefficients):
            return NotImplemented
        return (self.max_degree == other.max_degree and self.basis == other.basis
                and np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.max_degree, self.basis, self.data.tobytes()))

    def __post_init__(self):
        if self.basis not in ("complex", "real"):
            raise ValueError(f"unknown basis {self.basis!r}")
        want = _packed_size(self.max_degree) if self.basis == "complex" else (self.max_degree + 1) ** 2
        if self.data.shape != (want,):
            raise ValueError(f"coefficient array has shape {self.data.shape}, expected ({want},)")
        self.data.setflags(write=False)

    @classmethod
    def zeros(cls, max_degree: int, basis: str = "complex") -> "HarmonicCoefficients":
        if basis == "complex":
            return cls(max_degree, basis, np.zeros(_packed_size(max_degree), dtype=complex))
        return cls(max_degree, basis, np.zeros((max_degree + 1) ** 2))

    @classmethod
    def from_entries(cls, max_degree: int, entries, basis: str = "complex",
                     tol: float = 1e-9) -> "HarmonicCoefficients":
        """Build from {(l, m): value}; complex-basis input listing both signs
        of m must satisfy conjugate symmetry within ``tol``."""
        if basis == "real":
            data = np.zeros((max_degree + 1) ** 2)
            for (l, m), v in entries.items():
                data[l * (l + 1) + m] = float(v)
            return cls(max_degree, basis, data)
        data = np.zeros(_packed_size(max_degree), dtype=complex)
        for (l, m), v in entries.items():
            if m >= 0:
                data[K.packed_index(l, m)] = v
        for (l, m), v in entries.items():
            if m < 0:
                implied = (-1.0) ** m * np.conj(v)
                stored = data[K.packed_index(l, -m)]
                if (l, -m) in entries:
                    if abs(stored - implied) > tol:
                        raise ValueError(
                            f"conjugate symmetry violated at (l={l}, m={m}): "
                            f"|a - (-1)^m conj(a^-)| = {abs(stored - implied):.3e}")
                else:
                    data[K.packed_index(l, -m)] = implied
        for l in range(max_degree + 1):
            i = K.packed_index(l, 0)
            if abs(data[i].imag) > tol:
                raise ValueError(f"a_{l}^0 must be real (imag = {data[i].imag:.3e})")
            data[i] = data[i].real
        return cls(max_degree, basis, data)

    def get(self, l: int, m: int) -> complex:
        if l > self.max_degree or abs(m) > l:
            raise ValueError(f"(l={l}, m={m}) outside stored range")
        if self.basis == "real":
            return complex(self.data[l * (l + 1) + m])
        if m >= 0:
            return complex(self.data[K.packed_index(l, m)])
        return (-1.0) ** m * np.conj(self.data[K.packed_index(l, -m)])

    def degree_power(self, l: int) -> float:
        """sum_m |a_l^m|^2, the rotation-invariant per-degree power."""
        return float(sum(abs(self.get(l, m)) ** 2 for m in range(-l, l + 1)))

    def entries(self):
        """(l, m, value) in lexicographic (l, m) order, m = -l..l."""
        for l in range(self.max_degree + 1):
            for m in range(-l, l + 1):
                yield l, m, self.get(l, m)

    def to_json_dict(self) -> dict:
        ents = [[l, m, float(np.real(v)), float(np.imag(v))] for l, m, v in self.entries()]
        return {"L": self.max_degree, "basis": self.basis, "entries": ents}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "HarmonicCoefficients":
        basis = obj["basis"]
        ents = {(int(l), int(m)): complex(re, im) for l, m, re, im in obj["entries"]}
        if basis == "real":
            ents = {k: v.real for k, v in ents.items()}
        return cls.from_entries(int(obj["L"]), ents, basis=basis)


def _packed_size(lmax: int) -> int:
    return K.packed_size(lmax)


def to_real(coeffs: HarmonicCoefficients) -> HarmonicCoefficients:
    """Complex-basis coefficients to real-basis ones.

    a_{l,0} = a_l^0,  a_{l,m} = sqrt(2) (-1)^m Re a_l^m  (m > 0),
    a_{l,-m} = -sqrt(2) (-1)^m Im a_l^m; chosen so that
    sum a_{l,m} Y_{l,m} = sum a_l^m Y_l^m with the real harmonics of
    ``special.real_sph_harm``.
    """
    if coeffs.basis != "complex":
        raise ValueError("input must be complex-basis")
    L = coeffs.max_degree
    out = np.zeros((L + 1) ** 2)
    for l in range(L + 1):
        out[l * (l + 1)] = coeffs.get(l, 0).real
        for m in range(1, l + 1):
            a = coeffs.get(l, m)
            sign = -1.0 if m % 2 else 1.0
            out[l * (l + 1) + m] = _SQRT2 * sign * a.real
            out[l * (l + 1) - m] = -_SQRT2 * sign * a.imag
    return HarmonicCoefficients(L, "real", out, truncated=coeffs.truncated)


def to_complex(coeffs: HarmonicCoefficients) -> HarmonicCoefficients:
    """Inverse of ``to_real``: a_l^m = (-1)^m (a_{l,m} - i a_{l,-m}) / sqrt(2)."""
    if coeffs.basis != "real":
        raise ValueError("input must be real-basis")
    L = coeffs.max_degree
    out = np.zeros(_packed_size(L), dtype=complex)
    for l in range(L + 1):
        out[K.packed_index(l, 0)] = coeffs.data[l * (l + 1)]
        for m in range(1, l + 1):
            sign = -1.0 if m % 2 else 1.0
            re = coeffs.data[l * (l + 1) + m]
            im = coeffs.data[l * (l + 1) - m]
            out[K.packed_index(l, m)] = sign * complex(re, -im) / _SQRT2
    return HarmonicCoefficients(L, "complex", out, truncated=coeffs.truncated)


def _packed(coeffs: HarmonicCoefficients) -> np.ndarray:
    return coeffs.data if coeffs.basis == "complex" else to_complex(coeffs).data


def evaluate(coeffs: HarmonicCoefficients, x: UnitVector) -> float:
    """Truncated series value sum_l sum_m a_l^m Y_l^m(x).

    The result is real by construction: conjugate symmetry is structural in
    the packed storage (violations are rejected when coefficients are built),
    and the kernel folds each +-m pair into its real combination.
    """
    return float(evaluate_grid(coeffs, np.array([x.theta]), np.array([x.phi]))[0])


def evaluate_grid(coeffs: HarmonicCoefficients, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    packed = _packed(coeffs)
    ct, st, cp, sp = K.trig_from_angles(theta, phi)
    return K.expansion_values(coeffs.max_degree, packed, ct, st, cp, sp)


def project(f, max_degree: int, rule: SphereRule | None = None,
            check_normalization: bool = True) -> HarmonicCoefficients:
    """Project a density onto harmonics: a_l^m = integral f Y_l^m* dOmega.

    ``f`` maps (theta, phi) arrays to density values.  The default rule is
    exact for integrands band-limited to ``max_degree``; pass a finer rule
    for sharply concentrated densities.
    """
    if rule is None:
        rule = default_projection_rule(max_degree)
    values = np.asarray(f(rule.theta, rule.phi), dtype=np.float64)
    packed = K.conj_harmonic_sums(max_degree, rule.ct, rule.st, rule.cp, rule.sp,
                                  weights=rule.weights * values)
    for l in range(max_degree + 1):
        i = K.packed_index(l, 0)
        packed[i] = packed[i].real
    if check_normalization and abs(packed[0] - Y00) > 1e-6:
        warnings.warn(
            f"a_0^0 = {packed[0].real:.8f} differs from 1/sqrt(4 pi); "
            "the input is not a normalized density or the rule is too coarse",
            stacklevel=2)
    return HarmonicCoefficients(max_degree, "complex", packed)


def rotate(coeffs: HarmonicCoefficients, euler: tuple[float, float, float]) -> HarmonicCoefficients:
    """Rotate an expansion: b_l^k = sum_m a_l^m D^l_{k,m}(euler).

    Degree blocks transform independently and per-degree power is preserved
    (the D matrices are unitary).  Points move by ``geometry.euler_matrix``.
    """
    if coeffs.basis != "complex":
        raise ValueError("rotation requires the complex basis")
    L = coeffs.max_degree
    out = np.zeros(_packed_size(L), dtype=complex)
    for l in range(L + 1):
        a = np.array([coeffs.get(l, m) for m in range(-l, l + 1)])
        b = wigner_D_matrix(l, euler) @ a
        out[K.packed_index(l, 0)] = b[l].real
        for m in range(1, l + 1):
            out[K.packed_index(l, m)] = b[m + l]
    return HarmonicCoefficients(L, "complex", out, truncated=coeffs.truncated)


def square_expand(b, max_degree: int | None = None) -> HarmonicCoefficients:
    """Coefficients of |sum b_l^m Y_l^m|^2 via the Clebsch-Gordan series.

    ``b`` is a {(l, m): complex} mapping (need not be conjugate-symmetric)
    or a complex-basis HarmonicCoefficients.  The product of two degree-L
    truncations is exactly degree 2L; a smaller ``max_degree`` flags the
    output as truncated.
    """
    if isinstance(b, HarmonicCoefficients):
        items = [(l, m, v) for l, m, v in b.entries() if v != 0]
    else:
        items = [(l, m, complex(v)) for (l, m), v in b.items() if v != 0]
    if not items:
        raise ValueError("empty expansion")
    L_in = max(l for l, _, _ in items)
    full = 2 * L_in
    L_out = full if max_degree is None else min(max_degree, full)
    acc: dict[tuple[int, int], complex] = {}
    for l1, m1, b1 in items:
        for l2, m2, b2 in items:
            w = b1 * np.conj(b2) * (-1.0) ** m2
            mu = m1 - m2
            pref = math.sqrt((2 * l1 + 1) * (2 * l2 + 1) / (4.0 * math.pi))
            for k in range(abs(l1 - l2), min(l1 + l2, L_out) + 1):
                if abs(mu) > k:
                    continue
                c0 = clebsch_gordan(l1, 0, l2, 0, k, 0)
                if c0 == 0.0:
                    continue
                cm = clebsch_gordan(l1, m1, l2, -m2, k, mu)
                if cm == 0.0:
                    continue
                term = w * pref / math.sqrt(2.0 * k + 1.0) * c0 * cm
                acc[(k, mu)] = acc.get((k, mu), 0.0) + term
    out = np.zeros(_packed_size(L_out), dtype=complex)
    for (k, mu), v in acc.items():
        if mu > 0:
            out[K.packed_index(k, mu)] += v / 2.0
        elif mu == 0:
            out[K.packed_index(k, 0)] += v.real
        else:
            out[K.packed_index(k, -mu)] += (-1.0) ** mu * np.conj(v) / 2.0
    return HarmonicCoefficients(L_out, "complex", out, truncated=L_out < full)


@dataclass(frozen=True)
class InertiaSummary:
    """Mean direction, resultant and second moments of a spherical density."""
    mean: np.ndarray
    resultant: float
    mean_undefined: bool
    inertia: np.ndarray | None = None
    covariance: np.ndarray | None = None


def mean_direction(coeffs: HarmonicCoefficients) -> InertiaSummary:
    """Mean vector from the degree-1 coefficients.

    mu1 = sqrt(2 pi/3)(a_1^-1 - a_1^1), mu2 = -i sqrt(2 pi/3)(a_1^1 + a_1^-1),
    mu3 = sqrt(4 pi/3) a_1^0.  (The sign of mu2 is fixed by direct
    integration of x2 against the expansion; see tests.)
    """
    if coeffs.basis != "complex":
        coeffs = to_complex(coeffs)
    if coeffs.max_degree < 1:
        raise ValueError("need degree >= 1 for the mean")
    c = math.sqrt(2.0 * math.pi / 3.0)
    a1 = coeffs.get(1, 1)
    am1 = coeffs.get(1, -1)
    a0 = coeffs.get(1, 0)
    mu = np.array([
        c * (am1 - a1),
        -1j * c * (a1 + am1),
        math.sqrt(4.0 * math.pi / 3.0) * a0,
    ])
    if np.max(np.abs(mu.imag)) > 1e-12:
        raise ValueError("mean has a non-negligible imaginary part; coefficients corrupt")
    mean = mu.real
    r = float(np.linalg.norm(mean))
    return InertiaSummary(mean=mean, resultant=r, mean_undefined=r < 1e-10)


def inertia(coeffs: HarmonicCoefficients) -> InertiaSummary:
    """Moment of inertia E[X X^T] from degree <= 2 real-basis coefficients,
    and the variance-covariance matrix E[X X^T] - mu mu^T."""
    if coeffs.basis != "complex":
        coeffs = to_complex(coeffs)
    if coeffs.max_degree < 2:
        raise ValueError("need degree >= 2 for the inertia matrix")
    md = mean_direction(coeffs)
    r = to_real(coeffs)

    def a(l, m):
        return float(r.data[l * (l + 1) + m])

    q = math.sqrt(4.0 * math.pi / 15.0)
    p = math.sqrt(4.0 * math.pi / 5.0) / 3.0
    e = np.array([
        [q * a(2, 2) - p * a(2, 0) + 1.0 / 3.0, q * a(2, -2), q * a(2, 1)],
        [q * a(2, -2), -q * a(2, 2) - p * a(2, 0) + 1.0 / 3.0, q * a(2, -1)],
        [q * a(2, 1), q * a(2, -1), 2.0 * p * a(2, 0) + 1.0 / 3.0],
    ])
    cov = e - np.outer(md.mean, md.mean)
    return InertiaSummary(mean=md.mean, resultant=md.resultant,
                          mean_undefined=md.mean_undefined, inertia=e, covariance=cov)


def symmetry_pattern(coeffs: HarmonicCoefficients, kind: str, tol: float = 1e-8,
                     phi0: float = 0.0) -> tuple[bool, float]:
    """Check the coefficient pattern of a symmetry; returns (holds, max violation).

    kinds: 'uniform' (a_l^m = 0, l >= 1), 'rotational' (about the North pole:
    m != 0 vanish), 'axial' (odd degrees vanish), 'equatorial'
    (odd-degree/even-order and even-degree/odd-order vanish), 'meridial'
    (e^{i m (phi0 + pi)} a_l^m real for m > 0).
    """
    if coeffs.basis != "complex":
        raise ValueError("symmetry patterns are defined on the complex basis")
    L = coeffs.max_degree
    worst = 0.0
    if kind == "uniform":
        for l in range(1, L + 1):
            for m in range(0, l + 1):
                worst = max(worst, abs(coeffs.get(l, m)))
    elif kind == "rotational":
        for l in range(1, L + 1):
            for m in range(1, l + 1):
                worst = max(worst, abs(coeffs.get(l, m)))
    elif kind == "axial":
        for l in range(1, L + 1, 2):
            for m in range(0, l + 1):
                worst = max(worst, abs(coeffs.get(l, m)))
    elif kind == "equatorial":
        for l in range(1, L + 1):
            for m in range(0, l + 1):
                if (l + m) % 2 == 1:
                    worst = max(worst, abs(coeffs.get(l, m)))
    elif kind == "meridial":
        for l in range(1, L + 1):
            for m in range(1, l + 1):
                ph = complex(math.cos(m * (phi0 + math.pi)), math.sin(m * (phi0 + math.pi)))
                worst = max(worst, abs((ph * coeffs.get(l, m)).imag))
    else:
        raise ValueError(f"unknown symmetry kind {kind!r}")
    return worst <= tol, worst

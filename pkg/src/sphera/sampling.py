"""Pseudo-random directional samples from the model catalog.

All samplers draw from per-sample-index Philox streams (see ``rng``), so a
given (parameters, seed) pair reproduces the same SampleSet bit-for-bit on
any platform and under any batching of the rejection rounds.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import UnitVector, angles_from_xyz, pole_to_axis, xyz_from_angles
from .models import GFB6, MixtureWatson, VonMisesFisher, Watson, Uniform, _frame_matrix
from .rng import uniform_block

_REJECTION_CAP = 10**6  # attempts per point before declaring an envelope bug


@dataclass(frozen=True)
class SampleSet:
    """n unit vectors with provenance (seed and generating model, if any)."""
    theta: np.ndarray
    phi: np.ndarray
    seed: int | None = None
    model: object = None

    def __post_init__(self):
        if self.theta.shape != self.phi.shape:
            raise ValueError("theta and phi must have equal length")
        self.theta.setflags(write=False)
        self.phi.setflags(write=False)

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    def xyz(self) -> np.ndarray:
        return xyz_from_angles(self.theta, self.phi)

    def point(self, i: int) -> UnitVector:
        return UnitVector(float(self.theta[i]), float(self.phi[i]))

    def rotated(self, r: np.ndarray) -> "SampleSet":
        theta, phi = angles_from_xyz(self.xyz() @ r.T)
        return SampleSet(theta, phi, seed=self.seed, model=None)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("theta,phi\n")
            for t, p in zip(self.theta, self.phi):
                fh.write(f"{t:.17g},{p:.17g}\n")

    @classmethod
    def from_csv(cls, path) -> "SampleSet":
        theta, phi = [], []
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "theta,phi":
                raise ValueError(f"expected 'theta,phi' header, got {header!r}")
            for line in fh:
                if not line.strip():
                    continue
                t, p = line.split(",")
                theta.append(float(t))
                phi.append(float(p))
        return cls(np.array(theta), np.array(phi))


def _finalize(t: np.ndarray, phi: np.ndarray, mu: UnitVector | None,
              seed: int, model) -> SampleSet:
    """Assemble points from cos(colatitude) t and azimuth, rotated to mu."""
    theta = np.arccos(np.clip(t, -1.0, 1.0))
    if mu is None or (mu.theta == 0.0 and mu.phi == 0.0):
        return SampleSet(theta, phi % (2.0 * math.pi), seed=seed, model=model)
    pts = xyz_from_angles(theta, phi) @ pole_to_axis(mu).T
    theta2, phi2 = angles_from_xyz(pts)
    return SampleSet(theta2, phi2, seed=seed, model=model)


def sample_uniform(n: int, seed: int) -> SampleSet:
    """cos(theta) ~ U(-1, 1) and phi ~ U(0, 2 pi), independently."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = uniform_block(seed, np.arange(n, dtype=np.uint64), 0)
    t = 2.0 * u[:, 0] - 1.0
    phi = 2.0 * math.pi * u[:, 1]
    return _finalize(t, phi, None, seed, Uniform())


def sample_vmf(n: int, mu: UnitVector, kappa: float, seed: int) -> SampleSet:
    """Inverse-CDF draw of cos(gamma) from exp(kappa t) on [-1, 1], uniform
    azimuth, rotated so the pole goes to mu."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    u = uniform_block(seed, np.arange(n, dtype=np.uint64), 0)
    if kappa == 0.0:
        t = 2.0 * u[:, 0] - 1.0
    else:
        t = 1.0 + np.log(u[:, 0] + (1.0 - u[:, 0]) * math.exp(-2.0 * kappa)) / kappa
    phi = 2.0 * math.pi * u[:, 1]
    return _finalize(t, phi, mu, seed, VonMisesFisher(mu, kappa))


class _PiecewiseEnvelope:
    """Piecewise-constant dominating function for 1-D rejection sampling.

    One uniform simultaneously picks the slab and the position inside it;
    the acceptance ratio is f(x) / bound(slab).
    """

    def __init__(self, edges: np.ndarray, bounds: np.ndarray):
        if np.any(bounds <= 0):
            raise ValueError("envelope bounds must be positive")
        self.lo = edges[:-1]
        self.bounds = bounds
        seg = bounds * np.diff(edges)
        self.cum = np.concatenate(([0.0], np.cumsum(seg)))

    def draw(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        target = v * self.cum[-1]
        j = np.clip(np.searchsorted(self.cum, target, side="right") - 1,
                    0, self.bounds.shape[0] - 1)
        x = self.lo[j] + (target - self.cum[j]) / self.bounds[j]
        return x, self.bounds[j]


@lru_cache(maxsize=128)
def _watson_envelope(gamma: float) -> _PiecewiseEnvelope:
    """Envelope for exp(gamma t^2) on [-1, 1]: a single uniform slab for
    moderate gamma, 32 slabs with exact per-slab maxima otherwise."""
    n_slabs = 1 if abs(gamma) <= 5.0 else 32
    edges = np.linspace(-1.0, 1.0, n_slabs + 1)
    lo, hi = edges[:-1], edges[1:]
    tsq_hi = np.maximum(lo * lo, hi * hi)
    tsq_lo = np.where((lo < 0) & (hi > 0), 0.0, np.minimum(lo * lo, hi * hi))
    bounds = np.exp(gamma * (tsq_hi if gamma > 0 else tsq_lo))
    return _PiecewiseEnvelope(edges, bounds)


def _reject_1d(seed: int, n: int, envelope: _PiecewiseEnvelope, log_f,
               counter_base: int) -> np.ndarray:
    """Per-stream rejection from density proportional to exp(log_f) under the
    envelope; attempt t of stream i consumes counter ``counter_base + t``."""
    out = np.empty(n)
    remaining = np.arange(n, dtype=np.uint64)
    t = 0
    while remaining.size:
        if t >= _REJECTION_CAP:
            raise RuntimeError("rejection sampler exceeded its iteration cap; "
                               "the envelope does not dominate the density")
        u = uniform_block(seed, remaining, counter_base + t)
        x, bound = envelope.draw(u[:, 0])
        acc = u[:, 1] * bound < np.exp(log_f(x))
        idx = remaining[acc].astype(np.intp)
        out[idx] = x[acc]
        remaining = remaining[~acc]
        t += 1
    return out


def sample_watson(n: int, mu: UnitVector, gamma: float, seed: int) -> SampleSet:
    """Rejection draw of cos(theta) from exp(gamma t^2), uniform azimuth."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u0 = uniform_block(seed, np.arange(n, dtype=np.uint64), 0)
    phi = 2.0 * math.pi * u0[:, 0]
    t = _reject_1d(seed, n, _watson_envelope(gamma), lambda x: gamma * x * x, 1)
    return _finalize(t, phi, mu, seed, Watson(mu, gamma))


@lru_cache(maxsize=64)
def _gfb_log_envelope(beta: float, gamma: float, frame: tuple) -> float:
    """sup over S2 of the quadratic exponent, from a 10^6-point grid with a
    1.01 safety factor (never assumed analytically)."""
    n = 1_000_000
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    phi = i * (math.pi * (3.0 - math.sqrt(5.0)))
    s = np.sqrt(1.0 - z * z)
    pts = np.column_stack((s * np.cos(phi), s * np.sin(phi), z))
    m = _frame_matrix(frame)
    y = pts @ m
    q = gamma * y[:, 2] ** 2 + beta * (y[:, 0] ** 2 - y[:, 1] ** 2)
    peak = float(np.max(q))
    return peak + math.log(1.01) + 1e-12 * abs(peak)


def sample_gfb6(n: int, spec: GFB6, seed: int) -> SampleSet:
    """Rejection with a vMF proposal sharing the linear term (uniform when
    kappa = 0); the acceptance ratio uses only the quadratic exponent."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = _frame_matrix(spec.frame)
    mu3 = UnitVector.from_xyz(*m[:, 2])
    log_env = _gfb_log_envelope(spec.beta, spec.gamma, spec.frame)
    rot = pole_to_axis(mu3).T
    kappa = spec.kappa

    out = np.empty((n, 3))
    remaining = np.arange(n, dtype=np.uint64)
    t = 0
    while remaining.size:
        if t >= _REJECTION_CAP:
            raise RuntimeError("rejection sampler exceeded its iteration cap; "
                               "the envelope does not dominate the density")
        u = uniform_block(seed, remaining, 2 * t)
        ua = uniform_block(seed, remaining, 2 * t + 1)
        if kappa == 0.0:
            tt = 2.0 * u[:, 0] - 1.0
        else:
            tt = 1.0 + np.log(u[:, 0] + (1.0 - u[:, 0]) * math.exp(-2.0 * kappa)) / kappa
        phi = 2.0 * math.pi * u[:, 1]
        pts = xyz_from_angles(np.arccos(np.clip(tt, -1.0, 1.0)), phi) @ rot
        y = pts @ m
        q = spec.gamma * y[:, 2] ** 2 + spec.beta * (y[:, 0] ** 2 - y[:, 1] ** 2)
        acc = np.log(np.maximum(ua[:, 0], 1e-300)) < q - log_env
        idx = remaining[acc].astype(np.intp)
        out[idx] = pts[acc]
        remaining = remaining[~acc]
        t += 1
    theta, phi = angles_from_xyz(out)
    return SampleSet(theta, phi, seed=seed, model=spec)


@lru_cache(maxsize=64)
def _mixture_component_envelope(gamma: float, alpha: float, sign: float) -> _PiecewiseEnvelope:
    """Envelope for the colatitude density exp(gamma cos^2(theta - sign*alpha)) sin(theta)
    on [0, pi]: 64 slabs, per-slab maxima from a fine grid with 5% headroom."""
    n_slabs = 64
    edges = np.linspace(0.0, math.pi, n_slabs + 1)
    grid = np.linspace(0.0, math.pi, n_slabs * 32 + 1)
    c = np.cos(grid - sign * alpha)
    f = np.exp(gamma * c * c) * np.sin(grid)
    vals = f.reshape(-1)
    bounds = np.empty(n_slabs)
    per = 32
    for j in range(n_slabs):
        bounds[j] = vals[j * per:(j + 1) * per + 1].max() * 1.05
    bounds = np.maximum(bounds, 1e-280)
    return _PiecewiseEnvelope(edges, bounds)


@lru_cache(maxsize=128)
def _component_mass(gamma: float, alpha: float, sign: float) -> float:
    """integral over [0, pi] of exp(gamma cos^2(theta - sign alpha)) sin(theta)."""
    from .quadrature import gauss_legendre
    rule = gauss_legendre(512)
    theta = 0.5 * math.pi * (rule.nodes + 1.0)
    c = np.cos(theta - sign * alpha)
    vals = np.exp(gamma * c * c) * np.sin(theta)
    return 0.5 * math.pi * float(np.dot(rule.weights, vals))


def sample_mixture_watson(n: int, p: float, gamma1: float, gamma2: float,
                          alpha1: float, alpha2: float, seed: int) -> SampleSet:
    """Mixture of two colatitude-shifted Watson-type factors about the pole.

    Each component's colatitude is drawn exactly from its shifted density
    (including the sin(theta) area factor) by 1-D rejection, so the sample
    law is exactly the mixture density; a rigid shift of a Watson draw would
    distort it by the Jacobian sin(theta)/sin(theta -+ alpha).  The mixture
    weights apply to the unnormalized exponentials, so the component choice
    uses the effective probability p Z1 / (p Z1 + (1-p) Z2).
    """
    model = MixtureWatson(p, gamma1, gamma2, alpha1, alpha2)
    z1 = _component_mass(gamma1, alpha1, 1.0)
    z2 = _component_mass(gamma2, alpha2, -1.0)
    p_eff = p * z1 / (p * z1 + (1.0 - p) * z2)
    u0 = uniform_block(seed, np.arange(n, dtype=np.uint64), 0)
    comp1 = u0[:, 0] < p_eff
    phi = 2.0 * math.pi * u0[:, 1]
    theta = np.empty(n)
    for take, gamma, alpha, sign in ((comp1, gamma1, alpha1, 1.0),
                                     (~comp1, gamma2, alpha2, -1.0)):
        idx = np.nonzero(take)[0]
        if idx.size == 0:
            continue
        env = _mixture_component_envelope(gamma, alpha, sign)
        out = np.empty(idx.size)
        remaining = np.arange(idx.size)
        t = 0
        while remaining.size:
            if t >= _REJECTION_CAP:
                raise RuntimeError("rejection sampler exceeded its iteration cap; "
                                   "the envelope does not dominate the density")
            streams = idx[remaining].astype(np.uint64)
            u = uniform_block(seed, streams, 1 + t)
            x, bound = env.draw(u[:, 0])
            cc = np.cos(x - sign * alpha)
            acc = u[:, 1] * bound < np.exp(gamma * cc * cc) * np.sin(x)
            out[remaining[acc]] = x[acc]
            remaining = remaining[~acc]
            t += 1
        theta[idx] = out
    return SampleSet(theta, phi, seed=seed, model=model)


def sample(model, n: int, seed: int) -> SampleSet:
    """Dispatch to the sampler for a catalog model."""
    if isinstance(model, Uniform):
        return sample_uniform(n, seed)
    if isinstance(model, VonMisesFisher):
        return sample_vmf(n, model.mu, model.kappa, seed)
    if isinstance(model, Watson):
        return sample_watson(n, model.mu, model.gamma, seed)
    if isinstance(model, GFB6):
        return sample_gfb6(n, model, seed)
    if isinstance(model, MixtureWatson):
        return sample_mixture_watson(n, model.p, model.gamma1, model.gamma2,
                                     model.alpha1, model.alpha2, seed)
    raise TypeError(f"no sampler for {type(model).__name__}")

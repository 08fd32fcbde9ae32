"""Girdle-fitting pipeline: equal-area spherical histogram, girdle-shift
estimate, and nonlinear least-squares fit of the mixture-Watson
concentration from even-degree Legendre coefficients.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels as K
from .quadrature import gauss_legendre
from .sampling import SampleSet
from .special import legendre_all

TWO_PI = 2.0 * math.pi


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SphereHistogram:
    """Equal-area ring/sector binning: 12 r^2 bins in 3 r iso-latitude rings,
    sectors per ring proportional to the ring circumference.  Every bin has
    solid angle exactly 4 pi / (12 r^2) by construction."""
    resolution: int
    z_edges: np.ndarray          # descending, z_edges[0] = 1, z_edges[-1] = -1
    sectors: np.ndarray          # sectors per ring
    counts: np.ndarray           # flat bin counts, rings concatenated
    n: int

    def __post_init__(self):
        for a in (self.z_edges, self.sectors, self.counts):
            a.setflags(write=False)

    @property
    def n_rings(self) -> int:
        return self.sectors.shape[0]

    @property
    def n_bins(self) -> int:
        return int(self.sectors.sum())

    @property
    def bin_area(self) -> float:
        return 4.0 * math.pi / self.n_bins

    def theta_centers(self) -> np.ndarray:
        zc = 0.5 * (self.z_edges[:-1] + self.z_edges[1:])
        return np.arccos(np.clip(zc, -1.0, 1.0))

    def ring_offsets(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.sectors)))

    def ring_counts(self) -> np.ndarray:
        off = self.ring_offsets()
        return np.array([self.counts[off[i]:off[i + 1]].sum()
                         for i in range(self.n_rings)])

    def ring_averages(self) -> np.ndarray:
        """Mean count per bin in each ring; proportional to the ring-average
        density because all bins share the same solid angle."""
        return self.ring_counts() / self.sectors


def _apportion(weights: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder apportionment with at least one sector per ring."""
    quota = weights * (total / weights.sum())
    s = np.maximum(1, np.floor(quota).astype(int))
    while s.sum() > total:  # only possible via the minimum-1 floor
        i = int(np.argmax(s))
        s[i] -= 1
    rem = total - s.sum()
    if rem > 0:
        frac = quota - np.floor(quota)
        order = np.lexsort((np.arange(len(s)), -frac))
        s[order[:rem]] += 1
    return s


def _ring_scheme(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """(z_edges, sectors): two fixed-point iterations of {centers -> sector
    apportionment by circumference -> equal-area edges}."""
    n_rings = 3 * resolution
    total = 12 * resolution * resolution
    z_edges = np.linspace(1.0, -1.0, n_rings + 1)
    sectors = None
    for _ in range(2):
        zc = 0.5 * (z_edges[:-1] + z_edges[1:])
        circ = np.sqrt(np.clip(1.0 - zc * zc, 1e-12, None))
        sectors = _apportion(circ, total)
        dz = 2.0 * sectors / total
        z_edges = np.concatenate(([1.0], 1.0 - np.cumsum(dz)))
        z_edges[-1] = -1.0
    return z_edges, sectors


def build_histogram(sample: SampleSet, resolution: int) -> SphereHistogram:
    """Deterministic equal-area binning; points on a ring boundary go to the
    lower ring (larger colatitude)."""
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    z_edges, sectors = _ring_scheme(resolution)
    z = np.cos(sample.theta)
    interior = z_edges[1:-1]
    ring = np.searchsorted(-interior, -z, side="right")
    frac = (sample.phi % TWO_PI) / TWO_PI
    sector = np.minimum((frac * sectors[ring]).astype(int), sectors[ring] - 1)
    offsets = np.concatenate(([0], np.cumsum(sectors)))
    flat = offsets[ring] + sector
    counts = np.bincount(flat, minlength=int(sectors.sum()))
    return SphereHistogram(resolution=resolution, z_edges=z_edges,
                           sectors=sectors, counts=counts, n=sample.n)


def estimate_alpha(hist: SphereHistogram) -> float:
    """Girdle shift: ring-average the histogram, take the colatitude of the
    maximum, refine by a 3-point parabola, and report |pi/2 - theta_peak|."""
    avg = hist.ring_averages().astype(float)
    if avg.max() <= 1.05 * avg.mean():
        raise FitError("flat ring profile (max/mean <= 1.05); data is not girdle-type")
    theta = hist.theta_centers()
    i = int(np.argmax(avg))
    peak = theta[i]
    if 0 < i < len(avg) - 1:
        x = theta[i - 1:i + 2]
        y = avg[i - 1:i + 2]
        a, b, _ = np.polyfit(x, y, 2)
        if a < 0:
            vertex = -b / (2.0 * a)
            if x[0] <= vertex <= x[2]:
                peak = vertex
    return float(min(abs(math.pi / 2.0 - peak), math.pi / 2.0))


@dataclass(frozen=True)
class GirdleFit:
    alpha_hat: float
    gamma_hat: float
    residual: float
    c_hat: tuple
    c_model: tuple

    def to_json_dict(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "gamma_hat": self.gamma_hat,
            "residual": self.residual,
            "c_hat": list(self.c_hat),
            "c_model": list(self.c_model),
        }


_FIT_NODES = 512


@lru_cache(maxsize=8)
def _fit_grid(n_even: int):
    rule = gauss_legendre(_FIT_NODES)
    theta = 0.5 * math.pi * (rule.nodes + 1.0)
    w = rule.weights * (0.5 * math.pi)
    p = legendre_all(2 * n_even, np.cos(theta))
    return theta, w, p


def model_c_curve(gamma: float, alpha: float, n_even: int) -> np.ndarray:
    """c_{2l}(gamma, alpha), l = 1..n_even, of the symmetric two-girdle
    density ~ e^{gamma cos^2(theta-alpha)}/2 + e^{gamma cos^2(theta+alpha)}/2."""
    theta, w, p = _fit_grid(n_even)
    c1 = np.cos(theta - alpha)
    c2 = np.cos(theta + alpha)
    f = 0.5 * (np.exp(gamma * c1 * c1) + np.exp(gamma * c2 * c2)) * np.sin(theta)
    z = float(np.dot(w, f))
    wf = w * f
    return np.array([float(np.dot(wf, p[:, 2 * l])) / z
                     for l in range(1, n_even + 1)])


def empirical_c_even(sample: SampleSet, n_even: int) -> np.ndarray:
    """c_{2l}-hat = mean of P_{2l}(cos theta_k), l = 1..n_even."""
    sums = K.legendre_sums(2 * n_even, np.cos(sample.theta)) / float(sample.n)
    return sums[2::2].copy()


def fit_gamma_to_sequence(c_hat: np.ndarray, alpha: float, sign: str = "negative",
                          max_iter: int = 200, trace: list | None = None) -> GirdleFit:
    """Damped Gauss-Newton on gamma for fixed alpha, initialized from a
    log-spaced grid scan; the finite-difference derivative uses a relative
    1e-6 central step.  Accepted steps strictly decrease the objective
    (appended to ``trace`` as (gamma, objective) when given)."""
    n_even = len(c_hat)

    def resid(g):
        return c_hat - model_c_curve(g, alpha, n_even)

    def obj(g):
        r = resid(g)
        return float(np.dot(r, r))

    grid = -np.logspace(math.log10(0.5), math.log10(200.0), 41)
    if sign == "any":
        grid = np.concatenate((grid, -grid))
    elif sign != "negative":
        raise ValueError("sign must be 'negative' or 'any'")
    objs = [obj(g) for g in grid]
    gamma = float(grid[int(np.argmin(objs))])
    best = min(objs)
    if trace is not None:
        trace.append((gamma, best))

    lam = 1e-3
    converged = False
    for _ in range(max_iter):
        h = 1e-6 * max(abs(gamma), 1e-3)
        r = resid(gamma)
        jac = (resid(gamma + h) - resid(gamma - h)) / (2.0 * h)
        jtj = float(np.dot(jac, jac))
        jtr = float(np.dot(jac, r))
        if jtj == 0.0:
            break
        accepted = False
        for _ in range(40):
            step = -jtr / (jtj * (1.0 + lam))
            cand = gamma + step
            if sign == "negative" and cand >= 0.0:
                cand = -1e-6
            val = obj(cand)
            if val < best:
                gamma, best = cand, val
                lam = max(lam / 3.0, 1e-12)
                accepted = True
                if trace is not None:
                    trace.append((gamma, best))
                break
            lam *= 10.0
            if lam > 1e12:
                break
        if not accepted or abs(step) <= 1e-10 * (1.0 + abs(gamma)):
            converged = True
            break
    if not converged and max_iter > 0:
        raise FitError(f"Gauss-Newton did not converge in {max_iter} iterations; "
                       f"best grid point gamma = {gamma:.6g} (objective {best:.3e})")
    c_model = model_c_curve(gamma, alpha, n_even)
    return GirdleFit(alpha_hat=float(alpha), gamma_hat=float(gamma),
                     residual=float(best), c_hat=tuple(float(v) for v in c_hat),
                     c_model=tuple(float(v) for v in c_model))


def fit_gamma(sample: SampleSet, alpha: float, n_even: int = 10,
              sign: str = "negative") -> GirdleFit:
    """Estimate even-degree coefficients from the sample (already in the
    symmetry frame) and fit gamma for the given alpha."""
    return fit_gamma_to_sequence(empirical_c_even(sample, n_even), alpha, sign=sign)


def fit_mixture_watson(sample: SampleSet, resolution: int = 16,
                       n_even: int = 10) -> tuple[GirdleFit, SphereHistogram]:
    """Full pipeline: histogram -> alpha-hat -> gamma-hat (girdle branch)."""
    if sample.n < 1000:
        raise FitError("pipeline requires n >= 1000")
    hist = build_histogram(sample, resolution)
    alpha = estimate_alpha(hist)
    fit = fit_gamma(sample, alpha, n_even=n_even, sign="negative")
    return fit, hist

"""Gauss-Legendre quadrature on [-1, 1] and product rules on the sphere."""
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights on [-1, 1]; Gauss-Legendre rules integrate
    polynomials of degree <= 2n-1 exactly and the weights sum to 2."""
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> QuadratureRule:
    if n < 1:
        raise ValueError("need at least one node")
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(x, w)


@dataclass(frozen=True)
class SphereRule:
    """Product rule: Gauss-Legendre in cos(theta) x uniform longitudes.

    Exact for integrands band-limited in degree below the rule resolution;
    weights sum to 4 pi.
    """
    n_theta: int
    n_phi: int
    ct: np.ndarray = field(init=False, repr=False, compare=False)
    st: np.ndarray = field(init=False, repr=False, compare=False)
    cp: np.ndarray = field(init=False, repr=False, compare=False)
    sp: np.ndarray = field(init=False, repr=False, compare=False)
    theta: np.ndarray = field(init=False, repr=False, compare=False)
    phi: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gl = gauss_legendre(self.n_theta)
        phi = 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi
        z = np.repeat(gl.nodes, self.n_phi)
        wz = np.repeat(gl.weights, self.n_phi) * (2.0 * math.pi / self.n_phi)
        ph = np.tile(phi, self.n_theta)
        for name, arr in (
            ("ct", z),
            ("st", np.sqrt(1.0 - z * z)),
            ("cp", np.cos(ph)),
            ("sp", np.sin(ph)),
            ("theta", np.arccos(z)),
            ("phi", ph),
            ("weights", wz),
        ):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=None)
def sphere_rule(n_theta: int, n_phi: int) -> SphereRule:
    return SphereRule(n_theta, n_phi)


def default_projection_rule(max_degree: int) -> SphereRule:
    """Exact for projecting integrands band-limited to ``max_degree``."""
    return sphere_rule(2 * (max_degree + 1), 4 * (max_degree + 1))

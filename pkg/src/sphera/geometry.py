"""Points and rotations on the unit sphere S2."""
import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Angle:
    """Colatitude/longitude pair; theta is clamped to [0, pi], phi reduced mod 2 pi."""
    theta: float
    phi: float

    def __post_init__(self):
        t = min(max(float(self.theta), 0.0), math.pi)
        p = float(self.phi) % TWO_PI
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "phi", p)


@dataclass(frozen=True)
class UnitVector:
    """A point on S2 with both angular and Cartesian views."""
    theta: float
    phi: float
    xyz: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ang = Angle(self.theta, self.phi)
        object.__setattr__(self, "theta", ang.theta)
        object.__setattr__(self, "phi", ang.phi)
        st = math.sin(ang.theta)
        v = np.array([st * math.cos(ang.phi), st * math.sin(ang.phi), math.cos(ang.theta)])
        v.setflags(write=False)
        object.__setattr__(self, "xyz", v)

    @classmethod
    def from_xyz(cls, x: float, y: float, z: float) -> "UnitVector":
        norm = math.sqrt(x * x + y * y + z * z)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"not a unit vector: |x| = {norm!r}")
        return cls(math.acos(min(max(z / norm, -1.0), 1.0)), math.atan2(y, x))

    def __hash__(self):
        return hash((self.theta, self.phi))


NORTH = UnitVector(0.0, 0.0)


def rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(b: float) -> np.ndarray:
    c, s = math.cos(b), math.sin(b)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def euler_matrix(euler: tuple[float, float, float]) -> np.ndarray:
    """Point-rotation matrix paired with the coefficient transform of
    ``expansion.rotate``: rotating coefficients by Euler angles ``g`` moves a
    density exactly as this matrix moves points (and mean directions).

    The z-rotation sign is fixed by the coefficient convention
    a_l^m -> e^{i m alpha} a_l^m, which corresponds to rotating points by
    R_z(-alpha); a pure beta rotation maps the pole to the +x half-plane.
    """
    alpha, beta, gamma = euler
    return rot_z(-alpha) @ rot_y(beta) @ rot_z(-gamma)


def axis_to_pole(axis: UnitVector) -> np.ndarray:
    """Rotation matrix sending ``axis`` to the North pole."""
    return rot_y(-axis.theta) @ rot_z(-axis.phi)


def pole_to_axis(axis: UnitVector) -> np.ndarray:
    """Rotation matrix sending the North pole to ``axis``."""
    return rot_z(axis.phi) @ rot_y(axis.theta)


def angles_from_xyz(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Angular view of an (n, 3) array of unit vectors."""
    z = np.clip(points[:, 2], -1.0, 1.0)
    theta = np.arccos(z)
    phi = np.arctan2(points[:, 1], points[:, 0]) % TWO_PI
    return theta, phi


def xyz_from_angles(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    st = np.sin(theta)
    return np.column_stack((st * np.cos(phi), st * np.sin(phi), np.cos(theta)))

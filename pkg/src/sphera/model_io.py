"""JSON schema for model specifications (used by the CLI --model argument).

Every model document is an object with a "model" discriminator; unit
vectors are {"theta": ..., "phi": ...} and frames are lists of three
orthonormal column vectors [mu1, mu2, mu3].
"""
import json

import numpy as np

from .expansion import HarmonicCoefficients
from .geometry import UnitVector
from . import models as M


def _uv_to_json(u: UnitVector) -> dict:
    return {"theta": u.theta, "phi": u.phi}


def _uv_from_json(obj) -> UnitVector:
    return UnitVector(float(obj["theta"]), float(obj["phi"]))


def _frame_to_json(frame_cols: tuple) -> list:
    return [list(col) for col in frame_cols]


def _frame_from_json(obj) -> np.ndarray:
    cols = np.array(obj, dtype=float)
    if cols.shape != (3, 3):
        raise ValueError("frame must be three 3-vectors (columns mu1, mu2, mu3)")
    return cols.T


def model_to_json_dict(model) -> dict:
    if isinstance(model, M.Uniform):
        return {"model": "uniform"}
    if isinstance(model, M.VonMisesFisher):
        return {"model": "vmf", "mu": _uv_to_json(model.mu), "kappa": model.kappa}
    if isinstance(model, M.Watson):
        return {"model": "watson", "mu": _uv_to_json(model.mu), "gamma": model.gamma}
    if isinstance(model, M.BrownianMotion):
        return {"model": "brownian_motion", "x0": _uv_to_json(model.x0), "zeta": model.zeta}
    if isinstance(model, M.GFB6):
        return {"model": "gfb6", "kappa": model.kappa, "beta": model.beta,
                "gamma": model.gamma, "frame": _frame_to_json(model.frame)}
    if isinstance(model, M.Bingham):
        return {"model": "bingham", "beta": model.beta, "gamma": model.gamma,
                "frame": _frame_to_json(model.frame)}
    if isinstance(model, M.Kent):
        return {"model": "kent", "kappa": model.kappa, "beta": model.beta,
                "frame": _frame_to_json(model.frame)}
    if isinstance(model, M.HarmonicSquare):
        return {"model": "harmonic_square", "l": model.l, "m": model.m, "real": model.real}
    if isinstance(model, M.ExponentialFamily):
        return {"model": "exponential_family",
                "coefficients": model.coefficients.to_json_dict()}
    if isinstance(model, M.ExponentialLegendre):
        return {"model": "exponential_legendre", "c": list(model.c),
                "axis": _uv_to_json(model.axis)}
    if isinstance(model, M.MixtureWatson):
        return {"model": "mixture_watson", "p": model.p, "gamma1": model.gamma1,
                "gamma2": model.gamma2, "alpha1": model.alpha1, "alpha2": model.alpha2}
    raise TypeError(f"unknown model {type(model).__name__}")


def model_from_json_dict(obj: dict):
    kind = obj.get("model")
    if kind == "uniform":
        return M.Uniform()
    if kind == "vmf":
        return M.VonMisesFisher(_uv_from_json(obj["mu"]), float(obj["kappa"]))
    if kind == "watson":
        return M.Watson(_uv_from_json(obj["mu"]), float(obj["gamma"]))
    if kind == "brownian_motion":
        return M.BrownianMotion(_uv_from_json(obj["x0"]), float(obj["zeta"]))
    if kind == "gfb6":
        frame = _frame_from_json(obj["frame"])
        if "zeta1" in obj or "zeta2" in obj:
            return M.GFB6.from_zetas(float(obj["kappa"]), float(obj["zeta1"]),
                                     float(obj["zeta2"]), frame)
        return M.GFB6(float(obj["kappa"]), float(obj["beta"]), float(obj["gamma"]), frame)
    if kind == "bingham":
        return M.Bingham(float(obj["beta"]), float(obj["gamma"]),
                         _frame_from_json(obj["frame"]))
    if kind == "kent":
        return M.Kent(float(obj["kappa"]), float(obj["beta"]),
                      _frame_from_json(obj["frame"]))
    if kind == "harmonic_square":
        return M.HarmonicSquare(int(obj["l"]), int(obj["m"]), bool(obj.get("real", False)))
    if kind == "exponential_family":
        return M.ExponentialFamily(HarmonicCoefficients.from_json_dict(obj["coefficients"]))
    if kind == "exponential_legendre":
        return M.ExponentialLegendre(tuple(float(v) for v in obj["c"]),
                                     _uv_from_json(obj["axis"]))
    if kind == "mixture_watson":
        return M.MixtureWatson(float(obj["p"]), float(obj["gamma1"]), float(obj["gamma2"]),
                               float(obj["alpha1"]), float(obj["alpha2"]))
    raise ValueError(f"unknown model kind {kind!r}")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_json_dict(json.load(fh))

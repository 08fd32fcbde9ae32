"""Hot numerical kernels: compiled core with a pure-NumPy fallback.

The backend is chosen once at import.  Set ``SPHERA_KERNELS=python`` or
``SPHERA_KERNELS=compiled`` to force a choice (the default prefers the
compiled core when it is built).  Both backends run the same operations
in the same order, so switching backends does not change any result bit.
"""
import os

import numpy as np

from . import fallback as _fallback
from .tables import Y00, legendre_tables, packed_index, packed_size, ylm_tables

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

_choice = os.environ.get("SPHERA_KERNELS", "").strip().lower()
if _choice == "python":
    active = _fallback
elif _choice == "compiled":
    if _compiled is None:
        raise ImportError("SPHERA_KERNELS=compiled but sphera._kernels._core is not built")
    active = _compiled
else:
    active = _compiled if _compiled is not None else _fallback

backend_name = "compiled" if active is _compiled else "python"
backends = {"python": _fallback}
if _compiled is not None:
    backends["compiled"] = _compiled


def _as_c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def trig_from_angles(theta, phi):
    """Shared precomputation: kernels receive plain arithmetic inputs only."""
    theta = _as_c(theta)
    phi = _as_c(phi)
    return np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)


def conj_harmonic_sums(lmax, ct, st, cp, sp, weights=None, backend=None):
    """Kahan sums over points of w_k * conj(Y_l^m(x_k)), packed over (l, m>=0)."""
    mod = backends[backend] if backend else active
    cmm, A, B = ylm_tables(lmax)
    n = ct.shape[0]
    w = np.ones(n) if weights is None else _as_c(weights)
    e = packed_size(lmax)
    out_re = np.zeros(e)
    out_im = np.zeros(e)
    mod.ylm_conj_sums(_as_c(ct), _as_c(st), _as_c(cp), _as_c(sp), w, lmax,
                      cmm, A, B, out_re, out_im)
    return out_re + 1j * out_im


def conj_harmonic_values(lmax, ct, st, cp, sp, weights=None, backend=None):
    """Per-point w_k * conj(Y_l^m(x_k)) as an (n, packed) pair of real matrices."""
    mod = backends[backend] if backend else active
    cmm, A, B = ylm_tables(lmax)
    n = ct.shape[0]
    w = np.ones(n) if weights is None else _as_c(weights)
    e = packed_size(lmax)
    out_re = np.empty((n, e))
    out_im = np.empty((n, e))
    mod.ylm_conj_values(_as_c(ct), _as_c(st), _as_c(cp), _as_c(sp), w, lmax,
                        cmm, A, B, out_re, out_im)
    return out_re, out_im


def expansion_values(lmax, packed, ct, st, cp, sp, backend=None):
    """Evaluate sum_{l,m} a_l^m Y_l^m at each point for a conjugate-symmetric
    packed (m>=0) coefficient array; the result is the real series value."""
    mod = backends[backend] if backend else active
    cmm, A, B = ylm_tables(lmax)
    are = _as_c(packed.real)
    aim = _as_c(packed.imag)
    out = np.empty(ct.shape[0])
    mod.eval_expansion(_as_c(ct), _as_c(st), _as_c(cp), _as_c(sp), lmax,
                       cmm, A, B, are, aim, out)
    return out


def legendre_sums(lmax, x, weights=None, backend=None):
    """Kahan sums over points of w_k * P_l(x_k) for l = 0..lmax."""
    mod = backends[backend] if backend else active
    alpha, beta = legendre_tables(lmax)
    x = _as_c(x)
    w = np.ones(x.shape[0]) if weights is None else _as_c(weights)
    out = np.zeros(lmax + 1)
    mod.legendre_sums(x, w, lmax, alpha, beta, out)
    return out


def colsums(v, backend=None):
    """Kahan column sums of an (n, d) matrix, in row order."""
    mod = backends[backend] if backend else active
    v = np.ascontiguousarray(v, dtype=np.float64)
    out = np.zeros(v.shape[1])
    mod.kahan_colsums(v, out)
    return out


def crossmoments(v, backend=None):
    """Kahan sums of rows and of row outer products of an (n, d) matrix."""
    mod = backends[backend] if backend else active
    v = np.ascontiguousarray(v, dtype=np.float64)
    d = v.shape[1]
    out_s = np.zeros(d)
    out_m2 = np.zeros((d, d))
    mod.kahan_crossmoments(v, out_s, out_m2)
    return out_s, out_m2

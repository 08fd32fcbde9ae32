"""Pure-NumPy kernel backend.

Performs exactly the same floating-point operations in exactly the same
order as the compiled backend in ``_core.pyx``: identical recurrences
per point (vectorized across points) and an identical Kahan-compensated
reduction in sample order.  The two backends therefore return bitwise
equal results.
"""
import numpy as np

from .tables import Y00 as _Y00
from .tables import packed_index

_CHUNK = 8192


def _kahan_rows(v_re, v_im, s_re, s_im, c_re, c_im):
    # sequential over rows; elementwise ops match the compiled per-entry updates
    for k in range(v_re.shape[0]):
        y = v_re[k] - c_re
        t = s_re + y
        c_re[:] = (t - s_re) - y
        s_re[:] = t
        y = v_im[k] - c_im
        t = s_im + y
        c_im[:] = (t - s_im) - y
        s_im[:] = t


def _ylm_conj_chunk(ct, st, cp, sp, w, lmax, cmm, A, B, v_re, v_im):
    """Fill v_re/v_im (rows = points, cols = packed (l, m>=0)) with w * conj(Y_l^m)."""
    pmm = np.full(ct.shape[0], _Y00)
    em_re = np.ones(ct.shape[0])
    em_im = np.zeros(ct.shape[0])
    for m in range(lmax + 1):
        if m > 0:
            pmm = (cmm[m] * st) * pmm
            tmp = (em_re * cp) - (em_im * sp)
            em_im = (em_re * sp) + (em_im * cp)
            em_re = tmp
        p2 = np.zeros(ct.shape[0])
        p1 = pmm
        pw = p1 * w
        idx = packed_index(m, m)
        v_re[:, idx] = pw * em_re
        v_im[:, idx] = -(pw * em_im)
        for l in range(m + 1, lmax + 1):
            p = A[l, m] * ((ct * p1) - (B[l, m] * p2))
            p2 = p1
            p1 = p
            pw = p * w
            idx = packed_index(l, m)
            v_re[:, idx] = pw * em_re
            v_im[:, idx] = -(pw * em_im)


def ylm_conj_sums(ct, st, cp, sp, w, lmax, cmm, A, B, out_re, out_im):
    n = ct.shape[0]
    e = out_re.shape[0]
    c_re = np.zeros(e)
    c_im = np.zeros(e)
    v_re = np.empty((min(_CHUNK, n), e))
    v_im = np.empty_like(v_re)
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        rows = stop - start
        _ylm_conj_chunk(ct[start:stop], st[start:stop], cp[start:stop],
                        sp[start:stop], w[start:stop], lmax, cmm, A, B,
                        v_re[:rows], v_im[:rows])
        _kahan_rows(v_re[:rows], v_im[:rows], out_re, out_im, c_re, c_im)


def ylm_conj_values(ct, st, cp, sp, w, lmax, cmm, A, B, out_re, out_im):
    _ylm_conj_chunk(ct, st, cp, sp, w, lmax, cmm, A, B, out_re, out_im)


def eval_expansion(ct, st, cp, sp, lmax, cmm, A, B, are, aim, out):
    n = ct.shape[0]
    pmm = np.full(n, _Y00)
    em_re = np.ones(n)
    em_im = np.zeros(n)
    acc = np.zeros(n)
    for m in range(lmax + 1):
        if m > 0:
            pmm = (cmm[m] * st) * pmm
            tmp = (em_re * cp) - (em_im * sp)
            em_im = (em_re * sp) + (em_im * cp)
            em_re = tmp
        p2 = np.zeros(n)
        p1 = pmm
        idx = packed_index(m, m)
        if m == 0:
            acc = acc + (are[idx] * p1)
        else:
            acc = acc + 2.0 * ((are[idx] * (p1 * em_re)) - (aim[idx] * (p1 * em_im)))
        for l in range(m + 1, lmax + 1):
            p = A[l, m] * ((ct * p1) - (B[l, m] * p2))
            p2 = p1
            p1 = p
            idx = packed_index(l, m)
            if m == 0:
                acc = acc + (are[idx] * p)
            else:
                acc = acc + 2.0 * ((are[idx] * (p * em_re)) - (aim[idx] * (p * em_im)))
    out[:] = acc


def _legendre_chunk(x, w, lmax, alpha, beta, v):
    v[:, 0] = w
    if lmax >= 1:
        p2 = np.ones(x.shape[0])
        p1 = x.copy()
        v[:, 1] = w * p1
        for l in range(2, lmax + 1):
            p = (alpha[l] * (x * p1)) - (beta[l] * p2)
            p2 = p1
            p1 = p
            v[:, l] = w * p
    return v


def legendre_sums(x, w, lmax, alpha, beta, out):
    n = x.shape[0]
    c = np.zeros(lmax + 1)
    v = np.empty((min(_CHUNK, n), lmax + 1))
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        rows = stop - start
        _legendre_chunk(x[start:stop], w[start:stop], lmax, alpha, beta, v[:rows])
        for k in range(rows):
            y = v[k] - c
            t = out + y
            c[:] = (t - out) - y
            out[:] = t


def kahan_colsums(v, out):
    c = np.zeros(out.shape[0])
    for k in range(v.shape[0]):
        y = v[k] - c
        t = out + y
        c[:] = (t - out) - y
        out[:] = t


def kahan_crossmoments(v, out_s, out_m2):
    d = v.shape[1]
    c_s = np.zeros(d)
    c_m = np.zeros((d, d))
    for k in range(v.shape[0]):
        y = v[k] - c_s
        t = out_s + y
        c_s[:] = (t - out_s) - y
        out_s[:] = t
        o = v[k, :, None] * v[k, None, :]
        y2 = o - c_m
        t2 = out_m2 + y2
        c_m[:] = (t2 - out_m2) - y2
        out_m2[:] = t2

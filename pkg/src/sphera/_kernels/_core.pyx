# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend.

Every arithmetic expression here is written with the same structure and
evaluation order as the NumPy fallback so both backends return bitwise
identical results.  Do not "simplify" expressions or enable fast-math.
"""
import numpy as np

cimport numpy as cnp

from .tables import Y00 as _Y00_PY

cnp.import_array()

# single source of truth for the constant so both backends share the exact double
cdef double Y00 = _Y00_PY


cdef inline Py_ssize_t pidx(Py_ssize_t l, Py_ssize_t m) nogil:
    return l * (l + 1) // 2 + m


def ylm_conj_sums(const double[::1] ct, const double[::1] st, const double[::1] cp, const double[::1] sp,
                  const double[::1] w, int lmax, const double[::1] cmm,
                  const double[:, ::1] A, const double[:, ::1] B,
                  double[::1] out_re, double[::1] out_im):
    cdef Py_ssize_t n = ct.shape[0]
    cdef Py_ssize_t e = out_re.shape[0]
    cdef Py_ssize_t k, j, l, m
    cdef double pmm, em_re, em_im, tmp, p, p1, p2, pw, wk
    cdef double y, t
    cdef cnp.ndarray[double, ndim=1] vre_a = np.empty(e)
    cdef cnp.ndarray[double, ndim=1] vim_a = np.empty(e)
    cdef cnp.ndarray[double, ndim=1] cre_a = np.zeros(e)
    cdef cnp.ndarray[double, ndim=1] cim_a = np.zeros(e)
    cdef double[::1] vre = vre_a
    cdef double[::1] vim = vim_a
    cdef double[::1] cre = cre_a
    cdef double[::1] cim = cim_a

    for k in range(n):
        wk = w[k]
        pmm = Y00
        em_re = 1.0
        em_im = 0.0
        for m in range(lmax + 1):
            if m > 0:
                pmm = (cmm[m] * st[k]) * pmm
                tmp = (em_re * cp[k]) - (em_im * sp[k])
                em_im = (em_re * sp[k]) + (em_im * cp[k])
                em_re = tmp
            p2 = 0.0
            p1 = pmm
            pw = p1 * wk
            j = pidx(m, m)
            vre[j] = pw * em_re
            vim[j] = -(pw * em_im)
            for l in range(m + 1, lmax + 1):
                p = A[l, m] * ((ct[k] * p1) - (B[l, m] * p2))
                p2 = p1
                p1 = p
                pw = p * wk
                j = pidx(l, m)
                vre[j] = pw * em_re
                vim[j] = -(pw * em_im)
        for j in range(e):
            y = vre[j] - cre[j]
            t = out_re[j] + y
            cre[j] = (t - out_re[j]) - y
            out_re[j] = t
            y = vim[j] - cim[j]
            t = out_im[j] + y
            cim[j] = (t - out_im[j]) - y
            out_im[j] = t


def ylm_conj_values(const double[::1] ct, const double[::1] st, const double[::1] cp, const double[::1] sp,
                    const double[::1] w, int lmax, const double[::1] cmm,
                    const double[:, ::1] A, const double[:, ::1] B,
                    double[:, ::1] out_re, double[:, ::1] out_im):
    cdef Py_ssize_t n = ct.shape[0]
    cdef Py_ssize_t k, j, l, m
    cdef double pmm, em_re, em_im, tmp, p, p1, p2, pw, wk

    for k in range(n):
        wk = w[k]
        pmm = Y00
        em_re = 1.0
        em_im = 0.0
        for m in range(lmax + 1):
            if m > 0:
                pmm = (cmm[m] * st[k]) * pmm
                tmp = (em_re * cp[k]) - (em_im * sp[k])
                em_im = (em_re * sp[k]) + (em_im * cp[k])
                em_re = tmp
            p2 = 0.0
            p1 = pmm
            pw = p1 * wk
            j = pidx(m, m)
            out_re[k, j] = pw * em_re
            out_im[k, j] = -(pw * em_im)
            for l in range(m + 1, lmax + 1):
                p = A[l, m] * ((ct[k] * p1) - (B[l, m] * p2))
                p2 = p1
                p1 = p
                pw = p * wk
                j = pidx(l, m)
                out_re[k, j] = pw * em_re
                out_im[k, j] = -(pw * em_im)


def eval_expansion(const double[::1] ct, const double[::1] st, const double[::1] cp, const double[::1] sp,
                   int lmax, const double[::1] cmm, const double[:, ::1] A, const double[:, ::1] B,
                   const double[::1] are, const double[::1] aim, double[::1] out):
    cdef Py_ssize_t n = ct.shape[0]
    cdef Py_ssize_t k, j, l, m
    cdef double pmm, em_re, em_im, tmp, p, p1, p2, acc

    for k in range(n):
        pmm = Y00
        em_re = 1.0
        em_im = 0.0
        acc = 0.0
        for m in range(lmax + 1):
            if m > 0:
                pmm = (cmm[m] * st[k]) * pmm
                tmp = (em_re * cp[k]) - (em_im * sp[k])
                em_im = (em_re * sp[k]) + (em_im * cp[k])
                em_re = tmp
            p2 = 0.0
            p1 = pmm
            j = pidx(m, m)
            if m == 0:
                acc = acc + (are[j] * p1)
            else:
                acc = acc + 2.0 * ((are[j] * (p1 * em_re)) - (aim[j] * (p1 * em_im)))
            for l in range(m + 1, lmax + 1):
                p = A[l, m] * ((ct[k] * p1) - (B[l, m] * p2))
                p2 = p1
                p1 = p
                j = pidx(l, m)
                if m == 0:
                    acc = acc + (are[j] * p)
                else:
                    acc = acc + 2.0 * ((are[j] * (p * em_re)) - (aim[j] * (p * em_im)))
        out[k] = acc


def legendre_sums(const double[::1] x, const double[::1] w, int lmax,
                  const double[::1] alpha, const double[::1] beta, double[::1] out):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t k, l
    cdef double p, p1, p2, y, t
    cdef cnp.ndarray[double, ndim=1] v_a = np.empty(lmax + 1)
    cdef cnp.ndarray[double, ndim=1] c_a = np.zeros(lmax + 1)
    cdef double[::1] v = v_a
    cdef double[::1] c = c_a

    for k in range(n):
        v[0] = w[k]
        if lmax >= 1:
            p2 = 1.0
            p1 = x[k]
            v[1] = w[k] * p1
            for l in range(2, lmax + 1):
                p = (alpha[l] * (x[k] * p1)) - (beta[l] * p2)
                p2 = p1
                p1 = p
                v[l] = w[k] * p
        for l in range(lmax + 1):
            y = v[l] - c[l]
            t = out[l] + y
            c[l] = (t - out[l]) - y
            out[l] = t


def kahan_colsums(const double[:, ::1] v, double[::1] out):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t d = v.shape[1]
    cdef Py_ssize_t k, j
    cdef double y, t
    cdef cnp.ndarray[double, ndim=1] c_a = np.zeros(d)
    cdef double[::1] c = c_a

    for k in range(n):
        for j in range(d):
            y = v[k, j] - c[j]
            t = out[j] + y
            c[j] = (t - out[j]) - y
            out[j] = t


def kahan_crossmoments(const double[:, ::1] v, double[::1] out_s, double[:, ::1] out_m2):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t d = v.shape[1]
    cdef Py_ssize_t k, i, j
    cdef double y, t, o
    cdef cnp.ndarray[double, ndim=1] cs_a = np.zeros(d)
    cdef cnp.ndarray[double, ndim=2] cm_a = np.zeros((d, d))
    cdef double[::1] cs = cs_a
    cdef double[:, ::1] cm = cm_a

    for k in range(n):
        for j in range(d):
            y = v[k, j] - cs[j]
            t = out_s[j] + y
            cs[j] = (t - out_s[j]) - y
            out_s[j] = t
        for i in range(d):
            for j in range(d):
                o = v[k, i] * v[k, j]
                y = o - cm[i, j]
                t = out_m2[i, j] + y
                cm[i, j] = (t - out_m2[i, j]) - y
                out_m2[i, j] = t

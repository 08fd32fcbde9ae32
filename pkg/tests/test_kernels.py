import math

import numpy as np
import pytest

from sphera import _kernels as K

needs_compiled = pytest.mark.skipif("compiled" not in K.backends,
                                    reason="compiled kernels not built")


def _angles(n, seed=0):
    rng = np.random.default_rng(seed)
    theta = np.arccos(rng.uniform(-1, 1, n))
    phi = rng.uniform(0, 2 * math.pi, n)
    return K.trig_from_angles(theta, phi)


@needs_compiled
class TestBackendParity:
    """The two backends must agree bit for bit, not just to tolerance."""

    def test_conj_sums(self):
        ct, st, cp, sp = _angles(4097, seed=1)
        w = np.random.default_rng(2).uniform(0.5, 1.5, 4097)
        for weights in (None, w):
            a = K.conj_harmonic_sums(12, ct, st, cp, sp, weights, backend="python")
            b = K.conj_harmonic_sums(12, ct, st, cp, sp, weights, backend="compiled")
            assert np.array_equal(a.view(np.float64), b.view(np.float64))

    def test_conj_values(self):
        ct, st, cp, sp = _angles(301, seed=3)
        ar, ai = K.conj_harmonic_values(7, ct, st, cp, sp, backend="python")
        br, bi = K.conj_harmonic_values(7, ct, st, cp, sp, backend="compiled")
        assert np.array_equal(ar, br) and np.array_equal(ai, bi)

    def test_eval_expansion(self):
        rng = np.random.default_rng(4)
        L = 9
        packed = rng.normal(size=K.packed_size(L)) + 1j * rng.normal(size=K.packed_size(L))
        for l in range(L + 1):
            i = K.packed_index(l, 0)
            packed[i] = packed[i].real
        ct, st, cp, sp = _angles(999, seed=5)
        a = K.expansion_values(L, packed, ct, st, cp, sp, backend="python")
        b = K.expansion_values(L, packed, ct, st, cp, sp, backend="compiled")
        assert np.array_equal(a, b)

    def test_legendre_sums(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(-1, 1, 10001)
        a = K.legendre_sums(15, x, backend="python")
        b = K.legendre_sums(15, x, backend="compiled")
        assert np.array_equal(a, b)

    def test_crossmoments(self):
        rng = np.random.default_rng(7)
        v = rng.normal(size=(2049, 7))
        sa, ma = K.crossmoments(v, backend="python")
        sb, mb = K.crossmoments(v, backend="compiled")
        assert np.array_equal(sa, sb) and np.array_equal(ma, mb)


class TestAccuracy:
    def test_kahan_matches_fsum(self):
        rng = np.random.default_rng(8)
        v = np.concatenate([rng.normal(0, 1e6, 5000), rng.normal(0, 1e-6, 5000)])
        rng.shuffle(v)
        got = K.colsums(v[:, None])[0]
        want = math.fsum(v.tolist())
        assert got == pytest.approx(want, abs=1e-9 * max(1.0, abs(want)) + 1e-9)

    def test_conj_sums_match_plain_sum(self):
        ct, st, cp, sp = _angles(2000, seed=9)
        vr, vi = K.conj_harmonic_values(8, ct, st, cp, sp)
        want = vr.sum(axis=0) + 1j * vi.sum(axis=0)
        got = K.conj_harmonic_sums(8, ct, st, cp, sp)
        assert np.max(np.abs(got - want)) < 1e-10

    def test_deterministic_across_calls(self):
        ct, st, cp, sp = _angles(512, seed=10)
        a = K.conj_harmonic_sums(6, ct, st, cp, sp)
        b = K.conj_harmonic_sums(6, ct, st, cp, sp)
        assert np.array_equal(a.view(np.float64), b.view(np.float64))

    def test_evaluation_matches_scalar_api(self):
        from sphera import special as S
        rng = np.random.default_rng(11)
        th = rng.uniform(0, math.pi, 40)
        ph = rng.uniform(0, 2 * math.pi, 40)
        vr, vi = K.conj_harmonic_values(6, *K.trig_from_angles(th, ph))
        for l, m in [(0, 0), (3, 1), (6, 4)]:
            want = np.conj(S.sph_harm(l, m, th, ph))
            got = vr[:, K.packed_index(l, m)] + 1j * vi[:, K.packed_index(l, m)]
            assert np.max(np.abs(got - want)) < 1e-14

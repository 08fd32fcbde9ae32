"""Counter-based random numbers: Philox4x32-10, vectorized in integer NumPy.

Every draw is a pure function of (seed, stream, counter), with one stream
per sample index, so output is reproducible bit-for-bit regardless of how
generation is batched or parallelized.  State transitions are integer-only;
no platform floating point enters the stream.
"""
import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


def philox4x32(c0, c1, c2, c3, k0, k1):
    """One Philox4x32-10 block per element; all inputs uint64 arrays holding
    32-bit words.  Returns four 32-bit output words."""
    for r in range(10):
        if r > 0:
            k0 = (k0 + _W0) & _MASK32
            k1 = (k1 + _W1) & _MASK32
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = ((p1 >> _S32) ^ c1 ^ k0, p1 & _MASK32,
                          (p0 >> _S32) ^ c3 ^ k1, p0 & _MASK32)
    return c0, c1, c2, c3


def _split64(v):
    v = np.asarray(v, dtype=np.uint64)
    return v & _MASK32, v >> _S32


def uniform_block(seed: int, streams, counter: int) -> np.ndarray:
    """Two U[0,1) doubles per stream for one counter value; shape (n, 2).

    Key = seed (64 bits), counter words = (counter, stream): each (seed,
    stream, counter) triple yields an independent 128-bit block.
    """
    s_lo, s_hi = _split64(streams)
    c_lo, c_hi = _split64(np.uint64(counter & 0xFFFFFFFFFFFFFFFF))
    k_lo, k_hi = _split64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    n = s_lo.shape[0]
    o0, o1, o2, o3 = philox4x32(
        np.broadcast_to(c_lo, n).copy(), np.broadcast_to(c_hi, n).copy(),
        s_lo.copy(), s_hi.copy(),
        np.broadcast_to(k_lo, n).copy(), np.broadcast_to(k_hi, n).copy())
    u = np.empty((n, 2))
    u[:, 0] = (((o0 << _S32) | o1) >> np.uint64(11)).astype(np.float64) * _INV53
    u[:, 1] = (((o2 << _S32) | o3) >> np.uint64(11)).astype(np.float64) * _INV53
    return u


def uniforms(seed: int, streams, counter_start: int, count: int) -> np.ndarray:
    """``count`` U[0,1) doubles per stream, consuming ceil(count/2) counters."""
    blocks = [uniform_block(seed, streams, counter_start + j)
              for j in range((count + 1) // 2)]
    return np.concatenate(blocks, axis=1)[:, :count]

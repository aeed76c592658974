"""Pure numpy kernels, used when the compiled extension is unavailable.

Every function here returns results bit-identical to ``_ckernels``.
"""
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _finalize(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _coins(key, positions):
    """Fair coin per tied position; counter-based so any subset can be drawn."""
    counter = (positions.astype(np.uint64) + np.uint64(1)) * GOLDEN
    return (_finalize(np.uint64(key) + counter) >> np.uint64(63)).astype(np.int64)


def _count(s1, s2, key):
    wins = int(np.count_nonzero(s1 > s2))
    tied = np.flatnonzero(s1 == s2)
    if tied.size:
        wins += int(_coins(key, tied).sum())
    return wins, int(tied.size)


def count_wins_batch(a, b, keys):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    if a.ndim != 2 or a.shape != b.shape or keys.shape != (a.shape[0],):
        raise ValueError("shape mismatch between score arrays and keys")
    wins = np.zeros(a.shape[0], dtype=np.int64)
    ties = np.zeros(a.shape[0], dtype=np.int64)
    for r in range(a.shape[0]):
        wins[r], ties[r] = _count(a[r], b[r], keys[r])
    return wins, ties


def linear_family_counts(X2, base2, y2, orig, theta, pairs, keys, kind):
    X2 = np.asarray(X2, dtype=np.float64)
    h, d = X2.shape
    if base2.shape[0] != h or y2.shape[0] != h or orig.shape[0] != h:
        raise ValueError("length mismatch between halves")
    if theta.shape[0] != d or keys.shape[0] != pairs.shape[0]:
        raise ValueError("theta or keys has the wrong length")
    if kind not in (0, 1, 2):
        raise ValueError("unknown score kind")
    if pairs.size and (pairs.min() < 0 or pairs.max() >= d):
        raise IndexError("pair index out of range")
    wins = np.zeros(pairs.shape[0], dtype=np.int64)
    ties = np.zeros(pairs.shape[0], dtype=np.int64)
    for r, (i, j) in enumerate(pairs):
        pred = base2 + (X2[:, j] - X2[:, i]) * (theta[i] - theta[j])
        if kind == 2:
            s2 = y2 * pred
        else:
            res = y2 - pred
            s2 = np.abs(res) if kind == 0 else res * res
        wins[r], ties[r] = _count(orig, s2, keys[r])
    return wins, ties

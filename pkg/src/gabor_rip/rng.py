"""Reproducible random streams.

All randomness goes through :func:`substream`, which keys a Philox4x64-10
counter-based generator with a :class:`numpy.random.SeedSequence` built from
a base seed and a tuple of integer stream keys (for example
``(trial_index,)`` or ``(cell_index, trial_index)``).  Philox and
SeedSequence are bit-stable across platforms, so results do not depend on
the machine or on how work is split between workers.
"""
import numpy as np

# stream tags keep independent consumers of one seed apart
WINDOW_STREAM = 0
SUPPORT_STREAM = 1
COEFF_STREAM = 2
NOISE_STREAM = 3
SEED_STREAM = 4

_MASK64 = (1 << 64) - 1


def _check_seed(seed):
    seed = int(seed)
    if seed < 0 or seed > _MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def substream(seed, *keys):
    """Return a Generator for stream ``keys`` under base ``seed``."""
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed, *keys):
    """Derive a child 64-bit seed deterministically from ``(seed, keys)``."""
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=(SEED_STREAM,) + tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def fisher_yates_prefix(rng, N, s):
    """First ``s`` entries of a uniform random permutation of ``range(N)``.

    Partial Fisher-Yates with a sparse swap table, one draw per position, so
    the prefix for ``s`` is also the prefix for any larger ``s`` drawn from
    the same generator state.
    """
    if s > N:
        raise ValueError(f"cannot draw {s} distinct indices from {N}")
    swaps = {}
    out = np.empty(s, dtype=np.int64)
    for i in range(s):
        j = int(rng.integers(i, N))
        vi = swaps.get(i, i)
        vj = swaps.get(j, j)
        swaps[j] = vi
        out[i] = vj
    return out

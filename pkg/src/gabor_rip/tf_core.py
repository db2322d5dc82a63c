"""Cyclic translations, modulations and time-frequency shifts on C^n.

Conventions
-----------
* ``translate(v, k)[q] = v[(q - k) mod n]``
* ``modulate(v, l)[q] = w**(l*q) * v[q]`` with ``w = exp(2j*pi/n)``
* ``tf_shift(v, (k, l)) = modulate(translate(v, k), l)``

Shift amounts are arbitrary integers and are reduced mod ``n``.  Powers of
``w`` are looked up in a table indexed by the exponent reduced mod ``n``, so
large products ``l*q`` never lose phase accuracy.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import DimensionError, InvalidParameterError
from .rng import WINDOW_STREAM, substream


@lru_cache(maxsize=64)
def _omega_table(n):
    table = np.exp(2j * np.pi * np.arange(n) / n)
    table.setflags(write=False)
    return table


def omega_powers(m, n):
    """``w**m`` for integer (array) ``m`` with the exponent reduced mod ``n``."""
    return _omega_table(n)[np.mod(m, n)]


def _as_vector(v, n=None):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionError(f"expected length {n}, got {v.shape[0]}")
    return v


def check_dimension(n):
    n = int(n)
    if n < 2:
        raise InvalidParameterError(f"n must be >= 2, got {n}")
    return n


@dataclass(frozen=True)
class TFIndex:
    """A point ``(k, ell)`` of the lattice Z_n x Z_n (translation, modulation)."""

    k: int
    ell: int

    def reduced(self, n):
        return TFIndex(self.k % n, self.ell % n)

    def idx(self, n):
        """Column index ``ell*n + k`` of this atom in the synthesis matrix."""
        r = self.reduced(n)
        return r.ell * n + r.k

    @classmethod
    def from_idx(cls, idx, n):
        if not 0 <= idx < n * n:
            raise InvalidParameterError(f"column index {idx} outside [0, {n * n})")
        ell, k = divmod(int(idx), n)
        return cls(k, ell)

    def __sub__(self, other):
        return TFIndex(self.k - other.k, self.ell - other.ell)

    def __add__(self, other):
        return TFIndex(self.k + other.k, self.ell + other.ell)


def translate(v, k):
    """Cyclic shift: ``out[q] = v[(q - k) mod n]``."""
    v = _as_vector(v)
    return np.roll(v, int(k) % v.shape[0])


def modulate(v, ell):
    """Frequency shift: ``out[q] = w**(ell*q) * v[q]``."""
    v = _as_vector(v)
    n = v.shape[0]
    return v * omega_powers(int(ell) * np.arange(n), n)


def tf_shift(v, lam):
    """Apply ``pi(k, ell) = M^ell T^k`` to ``v``."""
    if not isinstance(lam, TFIndex):
        lam = TFIndex(*lam)
    return modulate(translate(v, lam.k), lam.ell)


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class WindowKind(str, Enum):
    RADEMACHER = "rademacher"
    STEINHAUS = "steinhaus"
    ALLTOP = "alltop"
    GAUSSIAN = "gaussian"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParameterError(f"unknown window kind {value!r}") from None


@dataclass(frozen=True, eq=False)
class Window:
    """Generating vector ``g`` of a Gabor system together with its provenance.

    ``epsilon`` is the unnormalized sequence and ``g = epsilon / sqrt(n)``.
    For Gaussian windows ``g`` is normalized by its realized norm and
    ``epsilon`` is defined back from it as ``sqrt(n) * g``.
    """

    n: int
    kind: WindowKind
    seed: int
    epsilon: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.epsilon, self.g):
            arr.setflags(write=False)

    @property
    def descriptor(self):
        return f"{self.kind.value}:{self.seed}"

    @classmethod
    def custom(cls, g):
        """Wrap an arbitrary unit-norm vector (e.g. a delta) as a window."""
        g = _as_vector(g).copy()
        n = check_dimension(g.shape[0])
        return cls(n, WindowKind.CUSTOM, 0, np.sqrt(n) * g, g)


def make_window(kind, n, seed=0):
    """Build a window of the given kind.

    Parameters
    ----------
    kind : str or WindowKind
        ``rademacher``, ``steinhaus``, ``alltop`` or ``gaussian``.
    n : int
        Signal length, at least 2.  Alltop needs a prime ``n >= 5``.
    seed : int
        64-bit seed; ignored for Alltop.

    Returns
    -------
    Window
    """
    kind = WindowKind.parse(kind)
    n = check_dimension(n)
    seed = int(seed)
    if kind is WindowKind.ALLTOP:
        if n < 5 or not is_prime(n):
            raise InvalidParameterError(f"Alltop window needs a prime n >= 5, got n={n}")
        q = np.arange(n, dtype=np.int64)
        eps = omega_powers(q * q % n * q, n)
        return Window(n, kind, 0, eps, eps / np.sqrt(n))
    if kind is WindowKind.CUSTOM:
        raise InvalidParameterError("custom windows are built with Window.custom(g)")

    rng = substream(seed, WINDOW_STREAM)
    if kind is WindowKind.RADEMACHER:
        eps = (2.0 * rng.integers(0, 2, size=n) - 1.0).astype(complex)
        g = eps / np.sqrt(n)
    elif kind is WindowKind.STEINHAUS:
        eps = np.exp(2j * np.pi * rng.random(n))
        g = eps / np.sqrt(n)
    else:
        raw = rng.standard_normal(n).astype(complex)
        g = raw / np.linalg.norm(raw)
        eps = np.sqrt(n) * g
    return Window(n, kind, seed, eps, g)

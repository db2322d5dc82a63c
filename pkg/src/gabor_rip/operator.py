"""The Gabor synthesis operator Psi_g in C^{n x n^2} and its block matrices A_q.

Column ``idx = ell*n + k`` of Psi_g holds the atom ``pi(k, ell) g``, so the
first ``n`` columns are the cyclic translates of ``g``.  Coefficient vectors
of length ``n^2`` are therefore viewed as ``n x n`` arrays ``X[ell, k]``.

Fast application uses one length-``n`` transform per translation (or per
frequency for the adjoint), for O(n^2 log n) total.  The dense matrix from
:meth:`GaborOperator.build_dense` is the oracle for those fast paths.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import DimensionError, InvalidParameterError, InvalidSupportError, ResourceError
from .tf_core import TFIndex, Window, _omega_table, check_dimension, make_window, omega_powers

DEFAULT_DENSE_LIMIT = 256


class NumpyTransform:
    """DFT pair backed by :mod:`numpy.fft` (any length, not only powers of two)."""

    name = "numpy"

    @staticmethod
    def forward(a, axis=0):
        """``out[b] = sum_p a[p] w**(-b*p)``."""
        return np.fft.fft(a, axis=axis)

    @staticmethod
    def backward(a, axis=0):
        """``out[b] = sum_p a[p] w**(b*p)`` (unnormalized)."""
        n = a.shape[axis]
        return np.fft.ifft(a, axis=axis) * n


class NaiveTransform:
    """O(n^2) reference DFT by explicit matrix product."""

    name = "naive"

    @staticmethod
    def _matrix(n, sign):
        p = np.arange(n)
        return omega_powers(sign * np.outer(p, p), n)

    @classmethod
    def forward(cls, a, axis=0):
        a = np.moveaxis(np.asarray(a, dtype=complex), axis, 0)
        out = cls._matrix(a.shape[0], -1) @ a
        return np.moveaxis(out, 0, axis)

    @classmethod
    def backward(cls, a, axis=0):
        a = np.moveaxis(np.asarray(a, dtype=complex), axis, 0)
        out = cls._matrix(a.shape[0], 1) @ a
        return np.moveaxis(out, 0, axis)


_TRANSFORMS = {"numpy": NumpyTransform, "naive": NaiveTransform}


@dataclass(frozen=True, eq=False)
class SparseVector:
    """Length-``N`` complex vector stored as a sorted support and its values."""

    N: int
    support: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=complex).ravel()
        if support.shape != values.shape:
            raise DimensionError("support and values must have the same length")
        if support.size and (support.min() < 0 or support.max() >= self.N):
            raise InvalidSupportError(f"support indices must lie in [0, {self.N})")
        order = np.argsort(support, kind="stable")
        support, values = support[order], values[order]
        if np.any(np.diff(support) == 0):
            raise InvalidSupportError("support indices must be distinct")
        support.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_dense(cls, x, tol=0.0):
        """Keep entries with ``|x_i| > tol``."""
        x = np.asarray(x, dtype=complex).ravel()
        idx = np.flatnonzero(np.abs(x) > tol)
        return cls(x.shape[0], idx, x[idx])

    @classmethod
    def zeros(cls, N):
        return cls(N, np.empty(0, dtype=np.int64), np.empty(0, dtype=complex))

    def to_dense(self):
        x = np.zeros(self.N, dtype=complex)
        x[self.support] = self.values
        return x

    @property
    def nnz(self):
        return int(self.support.size)

    def in_unit_sparse_set(self, s, atol=1e-12):
        """Membership in T_s: at most ``s`` nonzeros and unit-bounded norm."""
        return self.nnz <= s and np.linalg.norm(self.values) <= 1 + atol


def as_dense(x, N):
    if isinstance(x, SparseVector):
        if x.N != N:
            raise DimensionError(f"expected a vector of length {N}, got {x.N}")
        return x.to_dense()
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.shape[0] != N:
        raise DimensionError(f"expected a vector of length {N}, got shape {x.shape}")
    return x


@dataclass(frozen=True, eq=False)
class GaborOperator:
    """Implicit Gabor synthesis matrix of a window (immutable, thread-safe).

    Parameters
    ----------
    window : Window or array_like
        Generating vector; plain arrays are wrapped with :meth:`Window.custom`.
    transform : {"numpy", "naive"}
        Backend for the length-``n`` DFTs.
    dense_limit : int
        Largest ``n`` for which :meth:`build_dense` runs without ``force``.
    """

    window: Window
    transform: str = "numpy"
    dense_limit: int = DEFAULT_DENSE_LIMIT
    _tr: type = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.window, Window):
            object.__setattr__(self, "window", Window.custom(self.window))
        if self.transform not in _TRANSFORMS:
            raise InvalidParameterError(f"unknown transform {self.transform!r}")
        object.__setattr__(self, "_tr", _TRANSFORMS[self.transform])

    @classmethod
    def from_spec(cls, kind, n, seed=0, **kwargs):
        return cls(make_window(kind, n, seed), **kwargs)

    @property
    def n(self):
        return self.window.n

    @property
    def N(self):
        return self.window.n ** 2

    @property
    def g(self):
        return self.window.g

    @cached_property
    def _translates(self):
        # G[q, k] = g[(q - k) mod n]
        n = self.n
        q = np.arange(n)
        G = self.g[(q[:, None] - q[None, :]) % n]
        G.setflags(write=False)
        return G

    @cached_property
    def shift_table(self):
        """``V[a, b] = sum_p g[p - a] conj(g[p]) w**(b*p)``.

        Every atom inner product is a phase times one entry:
        ``<pi(k, l) g, pi(k', l') g> = w**((l - l')*k') V[k - k', l - l']``.
        """
        n = self.n
        g = self.g
        a = np.arange(n)
        rolled = g[(a[None, :] - a[:, None]) % n]  # rolled[a, p] = g[p - a]
        V = self._tr.backward(rolled * np.conj(g)[None, :], axis=1)
        V.setflags(write=False)
        return V

    # ------------------------------------------------------------------ dense

    def build_dense(self, force=False):
        """Materialize Psi_g as an ``n x n^2`` array."""
        n = self.n
        if n > self.dense_limit and not force:
            raise ResourceError(
                f"dense Psi for n={n} exceeds the limit n <= {self.dense_limit}; pass force=True"
            )
        q = np.arange(n)
        mod = omega_powers(np.outer(q, q), n)  # mod[q, ell]
        D = mod[:, :, None] * self._translates[:, None, :]  # D[q, ell, k]
        return D.reshape(n, n * n)

    def atom(self, lam):
        """The column ``pi(lam) g``."""
        if not isinstance(lam, TFIndex):
            lam = TFIndex.from_idx(int(lam), self.n)
        n = self.n
        r = lam.reduced(n)
        return omega_powers(r.ell * np.arange(n), n) * np.roll(self.g, r.k)

    def atoms(self, support):
        """Columns of Psi_g at linear indices ``support`` as an ``n x s`` array."""
        support = np.asarray(support, dtype=np.int64)
        n = self.n
        ell, k = np.divmod(support, n)
        q = np.arange(n)
        return omega_powers(q[:, None] * ell[None, :], n) * self.g[(q[:, None] - k[None, :]) % n]

    # ------------------------------------------------------------------- fast

    def _sparse_cutoff(self):
        return self.n / max(math.log(self.n), 1.0)

    def synthesis_apply(self, x):
        """``Psi_g @ x`` for a dense length-``n^2`` vector or a SparseVector."""
        n = self.n
        if isinstance(x, SparseVector):
            if x.N != self.N:
                raise DimensionError(f"expected a vector of length {self.N}, got {x.N}")
            if x.nnz <= self._sparse_cutoff():
                ell, k = np.divmod(x.support, n)
                return kernels.sparse_synthesis(self.g, _omega_table(n), k, ell, x.values)
        X = as_dense(x, self.N).reshape(n, n)  # X[ell, k]
        U = self._tr.backward(X, axis=0)  # U[q, k] = sum_ell X[ell, k] w**(ell*q)
        return np.einsum("qk,qk->q", U, self._translates)

    def analysis_apply(self, y):
        """``Psi_g^* @ y``; entry ``idx(k, l)`` is ``<y, pi(k, l) g>``."""
        n = self.n
        y = np.asarray(y, dtype=complex)
        if y.ndim != 1 or y.shape[0] != n:
            raise DimensionError(f"expected a vector of length {n}, got shape {y.shape}")
        P = y[:, None] * np.conj(self._translates)  # P[q, k]
        return self._tr.forward(P, axis=0).reshape(n * n)

    def a_q_apply(self, q, z):
        """``A_q z`` where ``(A_q z)[k] = sum_l z[(k - q) mod n, l] w**(l*k)``."""
        n = self.n
        q = int(q)
        if not 0 <= q < n:
            raise InvalidParameterError(f"q must lie in [0, {n}), got {q}")
        return a_q_apply(q, z, n, transform=self.transform)

    def all_a_q_apply(self, z):
        return all_a_q_apply(z, self.n, transform=self.transform)

    # ------------------------------------------------------- inner products

    def atom_inner_product(self, lam, lam_prime):
        """``<pi(lam) g, pi(lam') g>``, linear in the first argument."""
        n = self.n
        a = lam if isinstance(lam, TFIndex) else TFIndex(*lam)
        b = lam_prime if isinstance(lam_prime, TFIndex) else TFIndex(*lam_prime)
        d = (a - b).reduced(n)
        return complex(omega_powers(d.ell * b.k, n) * self.shift_table[d.k, d.ell])

    def gram(self, support):
        """Gram matrix ``G[i, j] = <atom_j, atom_i>`` of the atoms in ``support``."""
        support = np.asarray(support, dtype=np.int64)
        return self.gram_batch(support[None, :])[0]

    def gram_batch(self, supports):
        """Stacked Gram matrices for a ``(m, s)`` array of supports."""
        supports = np.asarray(supports, dtype=np.int64)
        ell, k = np.divmod(supports, self.n)
        return kernels.gram_batch(self.shift_table, _omega_table(self.n), k, ell)

    def coherence(self):
        """Largest ``|<a_i, a_j>|`` over distinct columns.

        Moduli depend only on the lattice difference, so one pass over the
        ``n^2 - 1`` nonzero differences of :attr:`shift_table` suffices.
        """
        mag = np.abs(self.shift_table).copy()
        mag[0, 0] = -np.inf
        return float(mag.max())


def _z_grid(z, n):
    z = np.asarray(z, dtype=complex)
    if z.ndim != 1 or z.shape[0] != n * n:
        raise DimensionError(f"expected a vector of length {n * n}, got shape {z.shape}")
    return z.reshape(n, n)  # Z[ell, k]


def all_a_q_apply(z, n, transform="numpy"):
    """Rows ``q = 0..n-1`` hold ``A_q z``; one transform pass for all ``q``."""
    n = check_dimension(n)
    U = _TRANSFORMS[transform].backward(_z_grid(z, n), axis=0)  # U[k, kk]
    q = np.arange(n)
    return U[q[None, :], (q[None, :] - q[:, None]) % n]  # out[q, k] = U[k, k - q]


def a_q_apply(q, z, n, transform="numpy"):
    """``A_q z`` for the window-independent block matrix ``A_q``."""
    n = check_dimension(n)
    q = int(q)
    if not 0 <= q < n:
        raise InvalidParameterError(f"q must lie in [0, {n}), got {q}")
    U = _TRANSFORMS[transform].backward(_z_grid(z, n), axis=0)
    k = np.arange(n)
    return U[k, (k - q) % n]


def a_q_dense(q, n):
    """``A_q = (T^q | M T^q | ... | M^{n-1} T^q)`` as an ``n x n^2`` array."""
    n = check_dimension(n)
    out = np.zeros((n, n * n), dtype=complex)
    for ell in range(n):
        for k in range(n):
            # column idx(k, ell) is pi(k, ell) e_q: a single entry at k + q
            r = (k + q) % n
            out[r, ell * n + k] = omega_powers(ell * r, n)
    return out

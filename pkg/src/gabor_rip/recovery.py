"""Sparse recovery through the fast Gabor forward/adjoint operators.

Solvers: iterative hard thresholding (IHT), hard thresholding pursuit (HTP),
CoSaMP, orthogonal matching pursuit (OMP) and equality-constrained l1
minimization (basis pursuit) by Douglas-Rachford splitting.

Hard thresholding and greedy selection break magnitude ties toward the
lowest index.
"""
import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import DimensionError, DivergenceError, IllConditionedSupportError, InvalidParameterError
from .operator import SparseVector


class Algorithm(str, Enum):
    L1MIN = "bp"
    COSAMP = "cosamp"
    IHT = "iht"
    HTP = "htp"
    OMP = "omp"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParameterError(f"unknown algorithm {value!r}") from None


@dataclass(frozen=True)
class AlgorithmThresholds:
    """Sufficient condition ``delta_{kappa*s} < delta_star`` for stable recovery."""

    algorithm: Algorithm
    kappa: int
    delta_star: float


THRESHOLDS = {
    Algorithm.L1MIN: AlgorithmThresholds(Algorithm.L1MIN, 2, 3 / (4 + math.sqrt(6))),
    Algorithm.COSAMP: AlgorithmThresholds(Algorithm.COSAMP, 4, math.sqrt(2 / (5 + math.sqrt(73)))),
    Algorithm.IHT: AlgorithmThresholds(Algorithm.IHT, 3, 0.5),
    Algorithm.HTP: AlgorithmThresholds(Algorithm.HTP, 3, 1 / math.sqrt(3)),
}


def guarantee_status(algorithm, s, delta=None):
    """``"yes"``/``"no"``/``"unknown"`` for the RIP condition of ``algorithm``.

    ``delta`` maps an order to an exactly computed RIP constant (dict or
    callable); missing orders give ``"unknown"``.
    """
    th = THRESHOLDS.get(Algorithm.parse(algorithm))
    if th is None or delta is None:
        return "unknown"
    order = th.kappa * s
    try:
        value = delta(order) if callable(delta) else delta[order]
    except (KeyError, IndexError):
        return "unknown"
    if value is None:
        return "unknown"
    return "yes" if value < th.delta_star else "no"


@dataclass
class RecoveryResult:
    x_hat: SparseVector
    residual_norm: float
    iterations: int
    converged: bool
    algorithm: Algorithm
    elapsed: float = 0.0
    history: list = field(default_factory=list, repr=False)


def best_s_term_error(x, s):
    """l1 distance from ``x`` to its best ``s``-term approximation."""
    x = np.asarray(x.to_dense() if isinstance(x, SparseVector) else x, dtype=complex)
    s = int(s)
    if s < 0:
        raise InvalidParameterError("s must be nonnegative")
    if s >= x.size:
        return 0.0
    mag = np.abs(x)
    keep = _top_s(mag, s)
    mask = np.ones(x.size, dtype=bool)
    mask[keep] = False
    return float(mag[mask].sum())


def _top_s(mag, s):
    """Indices of the ``s`` largest entries, lowest index first among ties."""
    if s <= 0:
        return np.empty(0, dtype=np.int64)
    order = np.argsort(-mag, kind="stable")
    return np.sort(order[:s])


def hard_threshold(z, s):
    out = np.zeros_like(z)
    keep = _top_s(np.abs(z), s)
    out[keep] = z[keep]
    return out


def soft_threshold(z, theta):
    """Complex soft thresholding ``z * max(1 - theta/|z|, 0)``."""
    mag = np.abs(z)
    scale = np.maximum(1.0 - theta / np.maximum(mag, np.finfo(float).tiny), 0.0)
    return z * scale


def _check_y(op, y):
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1 or y.shape[0] != op.n:
        raise DimensionError(f"expected a measurement of length {op.n}, got shape {y.shape}")
    return y


def least_squares_on_support(op, y, support, min_eig=1e-10):
    """Coefficients on ``support`` minimizing ``||y - Psi_S z||_2``."""
    y = _check_y(op, y)
    support = np.asarray(support, dtype=np.int64)
    if support.size == 0:
        return np.zeros(0, dtype=complex)
    cols = op.atoms(support)
    G = cols.conj().T @ cols
    eigs = np.linalg.eigvalsh(G)
    if eigs[0] <= min_eig:
        raise IllConditionedSupportError(
            f"Gram matrix of support {support.tolist()} is singular (lambda_min={eigs[0]:.3e})"
        )
    return scipy.linalg.solve(G, cols.conj().T @ y, assume_a="her")


def _finish(op, y, x, iters, converged, algo, t0, history=None):
    if not np.all(np.isfinite(x)):
        raise DivergenceError(f"{algo.value} produced non-finite values after {iters} iterations")
    xs = SparseVector.from_dense(x)
    res = float(np.linalg.norm(y - op.synthesis_apply(xs)))
    return RecoveryResult(xs, res, iters, converged, algo, time.perf_counter() - t0, history or [])


def _zero_result(op, algo, t0):
    return RecoveryResult(SparseVector.zeros(op.N), 0.0, 1, True, algo, time.perf_counter() - t0)


def _validate_s(op, s):
    s = int(s)
    if not 1 <= s <= op.N:
        raise InvalidParameterError(f"s must lie in [1, {op.N}], got {s}")
    return s


def iht(op, y, s, max_iters=1000, tol=1e-8, adaptive_step=False, x0=None):
    """Iterative hard thresholding ``x <- H_s(x + mu * Psi^*(y - Psi x))``.

    ``mu = 1`` by default.  With ``adaptive_step`` the step is the normalized
    choice ``||g_S||^2 / ||Psi g_S||^2`` on the current support.
    """
    t0 = time.perf_counter()
    y = _check_y(op, y)
    s = _validate_s(op, s)
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    ynorm = np.linalg.norm(y)
    if ynorm == 0:
        return _zero_result(op, Algorithm.IHT, t0)
    x = np.zeros(op.N, dtype=complex) if x0 is None else np.asarray(x0, dtype=complex).copy()
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        r = y - op.synthesis_apply(x)
        if np.linalg.norm(r) <= tol * ynorm:
            converged = True
            it -= 1
            break
        grad = op.analysis_apply(r)
        step = 1.0
        if adaptive_step:
            supp = np.flatnonzero(x) if np.any(x) else _top_s(np.abs(grad), s)
            gs = np.zeros_like(grad)
            gs[supp] = grad[supp]
            denom = np.linalg.norm(op.synthesis_apply(gs)) ** 2
            if denom > 0:
                step = np.linalg.norm(gs) ** 2 / denom
        x_new = hard_threshold(x + step * grad, s)
        if not np.all(np.isfinite(x_new)):
            raise DivergenceError(f"iht diverged at iteration {it}")
        change = np.linalg.norm(x_new - x)
        x = x_new
        if change <= tol * max(np.linalg.norm(x), np.finfo(float).tiny):
            converged = np.linalg.norm(y - op.synthesis_apply(x)) <= math.sqrt(tol) * ynorm
            break
    return _finish(op, y, x, max(it, 1), converged, Algorithm.IHT, t0)


def htp(op, y, s, max_iters=1000, tol=1e-8):
    """Hard thresholding pursuit: IHT support selection, least-squares values."""
    t0 = time.perf_counter()
    y = _check_y(op, y)
    s = _validate_s(op, s)
    ynorm = np.linalg.norm(y)
    if ynorm == 0:
        return _zero_result(op, Algorithm.HTP, t0)
    x = np.zeros(op.N, dtype=complex)
    prev_support = None
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        r = y - op.synthesis_apply(x)
        support = _top_s(np.abs(x + op.analysis_apply(r)), s)
        if prev_support is not None and np.array_equal(support, prev_support):
            converged = True
            break
        x_new = np.zeros_like(x)
        x_new[support] = least_squares_on_support(op, y, support)
        change = np.linalg.norm(x_new - x)
        x = x_new
        prev_support = support
        if np.linalg.norm(y - op.synthesis_apply(x)) <= tol * ynorm:
            converged = True
            break
        if change <= tol * max(np.linalg.norm(x), np.finfo(float).tiny):
            converged = True
            break
    return _finish(op, y, x, it, converged, Algorithm.HTP, t0)


def cosamp(op, y, s, max_iters=1000, tol=1e-8):
    """CoSaMP: merge the top ``2s`` proxy entries, least squares, prune to ``s``."""
    t0 = time.perf_counter()
    y = _check_y(op, y)
    s = _validate_s(op, s)
    ynorm = np.linalg.norm(y)
    if ynorm == 0:
        return _zero_result(op, Algorithm.COSAMP, t0)
    x = np.zeros(op.N, dtype=complex)
    r = y.copy()
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        proxy = op.analysis_apply(r)
        merged = np.union1d(_top_s(np.abs(proxy), 2 * s), np.flatnonzero(x))
        merged = merged[: op.n] if merged.size > op.n else merged
        b = np.zeros_like(x)
        b[merged] = least_squares_on_support(op, y, merged)
        x_new = hard_threshold(b, s)
        change = np.linalg.norm(x_new - x)
        x = x_new
        r = y - op.synthesis_apply(x)
        if np.linalg.norm(r) <= tol * ynorm:
            converged = True
            break
        if change <= tol * max(np.linalg.norm(x), np.finfo(float).tiny):
            break
    return _finish(op, y, x, it, converged, Algorithm.COSAMP, t0)


def omp(op, y, s, tol=1e-8):
    """Orthogonal matching pursuit with at most ``s`` rounds."""
    t0 = time.perf_counter()
    y = _check_y(op, y)
    s = _validate_s(op, s)
    ynorm = np.linalg.norm(y)
    if ynorm == 0:
        return _zero_result(op, Algorithm.OMP, t0)
    support = []
    x = np.zeros(op.N, dtype=complex)
    r = y.copy()
    it = 0
    for it in range(1, s + 1):
        corr = np.abs(op.analysis_apply(r))
        corr[support] = -1.0
        support.append(int(np.argmax(corr)))
        idx = np.array(sorted(support))
        x = np.zeros_like(x)
        x[idx] = least_squares_on_support(op, y, idx)
        r = y - op.synthesis_apply(x)
        if np.linalg.norm(r) <= tol * ynorm:
            break
    converged = bool(np.linalg.norm(r) <= tol * ynorm)
    return _finish(op, y, x, it, converged, Algorithm.OMP, t0)


def basis_pursuit(op, y, max_iters=5000, tol=1e-8, gamma=None):
    """Minimize ``||z||_1`` subject to ``Psi z = y`` by Douglas-Rachford splitting.

    The affine projection uses ``Psi Psi^* = n ||g||^2 I`` (full Gabor
    systems are tight frames), so each step costs one forward and one
    adjoint application.  The returned iterate is the feasible projection
    with entries below ``1e-8 * max|x|`` dropped and, when at most ``n``
    entries remain, refit on that support.  Reaching ``max_iters``
    yields ``converged=False``, never an exception.
    """
    t0 = time.perf_counter()
    y = _check_y(op, y)
    ynorm = np.linalg.norm(y)
    if ynorm == 0:
        return _zero_result(op, Algorithm.L1MIN, t0)
    frame = op.n * float(np.vdot(op.g, op.g).real)

    def project(v):
        return v - op.analysis_apply(op.synthesis_apply(v) - y) / frame

    v = op.analysis_apply(y) / frame  # minimum-norm solution
    if gamma is None:
        gamma = 0.5 * float(np.abs(v).max())
    prev_l1 = np.inf
    converged = False
    x = v
    it = 0
    for it in range(1, max_iters + 1):
        x = project(v)
        z = soft_threshold(2 * x - v, gamma)
        v = v + z - x
        if not np.all(np.isfinite(v)):
            raise DivergenceError(f"basis pursuit diverged at iteration {it}")
        gap = np.linalg.norm(z - x)
        l1 = float(np.abs(x).sum())
        stagnant = abs(prev_l1 - l1) <= tol * max(l1, np.finfo(float).tiny)
        prev_l1 = l1
        if gap <= tol * max(np.linalg.norm(x), np.finfo(float).tiny) and stagnant:
            converged = True
            break
    x = project(v)
    x = np.where(np.abs(x) >= 1e-8 * np.abs(x).max(), x, 0.0)
    support = np.flatnonzero(x)
    if support.size <= op.n:
        # a unique l1 minimizer is the least-squares fit on its own support;
        # refitting removes the residual left by the dropped entries
        try:
            x[support] = least_squares_on_support(op, y, support)
        except IllConditionedSupportError:
            pass
    res = np.linalg.norm(y - op.synthesis_apply(x))
    converged = converged and res <= tol * ynorm
    return _finish(op, y, x, it, converged, Algorithm.L1MIN, t0)


SOLVERS = {
    Algorithm.IHT: iht,
    Algorithm.HTP: htp,
    Algorithm.COSAMP: cosamp,
    Algorithm.OMP: omp,
    Algorithm.L1MIN: basis_pursuit,
}


def solve(algorithm, op, y, s, max_iters=None, tol=1e-8):
    """Dispatch by algorithm name; ``s`` is ignored by basis pursuit."""
    algo = Algorithm.parse(algorithm)
    if algo is Algorithm.L1MIN:
        return basis_pursuit(op, y, max_iters=max_iters or 5000, tol=tol)
    if algo is Algorithm.OMP:
        return omp(op, y, s, tol=tol)
    return SOLVERS[algo](op, y, s, max_iters=max_iters or 1000, tol=tol)

"""Restricted isometry and coherence estimates, chaos matrices B(x), and an
identity checker for the block matrices A_q.

The restricted isometry constant of order ``s`` is

    delta_s = max over |S| = s of max(lambda_max(G_S) - 1, 1 - lambda_min(G_S))

where ``G_S`` is the Gram matrix of the columns in ``S``.  For a fixed support
the extremal eigenvectors attain the bound, so enumerating supports is exact.
"""
import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, InvalidSupportError, ResourceError
from .operator import SparseVector, a_q_dense, all_a_q_apply, as_dense
from .parallel import run_chunks
from .rng import SUPPORT_STREAM, fisher_yates_prefix, substream
from .tf_core import TFIndex, check_dimension, tf_shift

DEFAULT_ENUMERATION_BUDGET = 10**6
_BATCH = 4096


@dataclass
class RipEstimate:
    n: int
    s: int
    window: str
    seed: int
    mode: str  # "exact" or "montecarlo"
    delta_hat: float
    trials: int = 0
    deltas: np.ndarray = field(default=None, repr=False)
    support_count: int = 0
    worst_support: tuple = ()

    @property
    def mean_delta(self):
        return float(np.mean(self.deltas)) if self.deltas is not None and self.deltas.size else self.delta_hat

    @property
    def std_delta(self):
        return float(np.std(self.deltas)) if self.deltas is not None and self.deltas.size else 0.0

    CSV_COLUMNS = ("n", "s", "window", "seed", "mode", "trials", "delta_hat", "mean_delta", "std_delta")

    def as_row(self):
        return {
            "n": self.n,
            "s": self.s,
            "window": self.window,
            "seed": self.seed,
            "mode": self.mode,
            "trials": self.trials if self.mode == "montecarlo" else self.support_count,
            "delta_hat": self.delta_hat,
            "mean_delta": self.mean_delta,
            "std_delta": self.std_delta,
        }


def _window_fields(op):
    return op.window.kind.value, op.window.seed


def _deviation(eigs):
    """``max(lambda_max - 1, 1 - lambda_min)`` per stacked eigenvalue row."""
    return np.maximum(eigs[..., -1] - 1.0, 1.0 - eigs[..., 0])


def _check_support(support, N):
    support = np.asarray(support, dtype=np.int64).ravel()
    if support.size == 0:
        raise InvalidSupportError("support must be nonempty")
    if support.min() < 0 or support.max() >= N:
        raise InvalidSupportError(f"support indices must lie in [0, {N})")
    if np.unique(support).size != support.size:
        raise InvalidSupportError("support indices must be distinct")
    return support


def submatrix_extremal_eigs(op, support):
    """Smallest and largest eigenvalue of the Gram matrix of ``support``."""
    support = _check_support(support, op.N)
    if support.size > op.n:
        warnings.warn(f"support size {support.size} exceeds n={op.n}; Gram is singular", stacklevel=2)
    eigs = np.linalg.eigvalsh(op.gram(support))
    return float(eigs[0]), float(eigs[-1])


def _batched_deltas(op, supports):
    return _deviation(np.linalg.eigvalsh(op.gram_batch(supports)))


def exact_rip_constant(op, s, budget=DEFAULT_ENUMERATION_BUDGET):
    """Exhaustive ``delta_s`` over all ``C(n^2, s)`` supports.

    Raises
    ------
    ResourceError
        If the number of supports exceeds ``budget``; use
        :func:`monte_carlo_rip` instead.
    """
    N = op.N
    s = int(s)
    if not 1 <= s <= N:
        raise InvalidParameterError(f"s must lie in [1, {N}], got {s}")
    count = math.comb(N, s)
    if count > budget:
        raise ResourceError(
            f"C({N},{s}) = {count} supports exceed the enumeration budget {budget}; use Monte Carlo"
        )
    combos = itertools.combinations(range(N), s)
    best, worst = -np.inf, ()
    while True:
        chunk = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, _BATCH)),
                            dtype=np.int64)
        if chunk.size == 0:
            break
        supports = chunk.reshape(-1, s)
        d = _batched_deltas(op, supports)
        i = int(np.argmax(d))
        if d[i] > best:
            best, worst = float(d[i]), tuple(int(v) for v in supports[i])
    kind, seed = _window_fields(op)
    return RipEstimate(op.n, s, kind, seed, "exact", max(best, 0.0),
                       support_count=count, worst_support=worst)


def _sample_supports(N, s, seed, start, stop):
    out = np.empty((stop - start, s), dtype=np.int64)
    for row, t in enumerate(range(start, stop)):
        out[row] = fisher_yates_prefix(substream(seed, SUPPORT_STREAM, t), N, s)
    return out


def _mc_chunk(args):
    op, s, seed, start, stop = args
    supports = _sample_supports(op.N, s, seed, start, stop)
    return _batched_deltas(op, supports), supports


def monte_carlo_rip(op, s, trials, seed=0, jobs=1):
    """Lower estimate of ``delta_s`` from ``trials`` random supports.

    Trial ``t`` draws its support from the substream ``(seed, t)`` by a
    partial Fisher-Yates shuffle, so supports are nested in ``s`` for a fixed
    trial and the result does not depend on ``jobs``.
    """
    N = op.N
    s, trials = int(s), int(trials)
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    if not 1 <= s <= N:
        raise InvalidParameterError(f"s must lie in [1, {N}], got {s}")
    bounds = _chunk_bounds(trials, jobs)
    parts = run_chunks(_mc_chunk, [(op, s, seed, a, b) for a, b in bounds], jobs)
    deltas = np.concatenate([p[0] for p in parts])
    supports = np.concatenate([p[1] for p in parts])
    i = int(np.argmax(deltas))
    kind, _ = _window_fields(op)
    return RipEstimate(op.n, s, kind, op.window.seed, "montecarlo", max(float(deltas[i]), 0.0),
                       trials=trials, deltas=deltas, worst_support=tuple(int(v) for v in supports[i]))


def _chunk_bounds(total, jobs, min_chunk=64):
    jobs = max(int(jobs), 1)
    chunks = max(1, min(jobs * 4, math.ceil(total / min_chunk)))
    edges = np.linspace(0, total, chunks + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def coherence(op):
    return op.coherence()


def coherence_rip_bound(mu, s):
    """``(s - 1) * mu``, the coherence bound on ``delta_s``."""
    if mu < 0 or s < 1:
        raise InvalidParameterError("need mu >= 0 and s >= 1")
    return (s - 1) * float(mu)


def welch_bound(n, N):
    """Lower bound ``sqrt((N - n) / (n (N - 1)))`` on the coherence of ``n x N`` frames."""
    if not N > n >= 1:
        raise InvalidParameterError(f"Welch bound needs N > n >= 1, got n={n}, N={N}")
    return math.sqrt((N - n) / (n * (N - 1)))


# ---------------------------------------------------------------- chaos


@dataclass(frozen=True, eq=False)
class ChaosMatrix:
    """``B[q', q] = (A_q' x)^* (A_q z)`` off the diagonal, zero on it."""

    n: int
    B: np.ndarray = field(repr=False)
    source: object = field(default=None, repr=False)

    def quadratic_form(self, eps):
        eps = np.asarray(eps, dtype=complex)
        return complex(np.conj(eps) @ self.B @ eps)


def chaos_matrix(x, n, z=None):
    """Build ``B(x)`` or, with ``z``, the bilinear ``B(x, z)``.

    Does not depend on any window: only the vectors ``A_q x`` enter.
    """
    n = check_dimension(n)
    xd = as_dense(x, n * n)
    Ux = all_a_q_apply(xd, n)
    Uz = Ux if z is None else all_a_q_apply(as_dense(z, n * n), n)
    B = np.conj(Ux) @ Uz.T
    np.fill_diagonal(B, 0.0)
    if z is None:
        # exact Hermitian symmetry despite rounding
        B = 0.5 * (B + B.conj().T)
    return ChaosMatrix(n, B, x)


def chaos_rip_link(op, x):
    """Both sides of ``x^*(Psi^*Psi - I)x = eps^* B(x) eps / n``.

    The left side uses the dense synthesis matrix, the right side only the
    window's sign sequence and :func:`chaos_matrix`.
    """
    n = op.n
    xd = as_dense(x, op.N)
    D = op.build_dense()
    lhs = np.vdot(D @ xd, D @ xd) - np.vdot(xd, xd)
    rhs = chaos_matrix(xd, n).quadratic_form(op.window.epsilon) / n
    if abs(lhs.imag) > 1e-10 * max(1.0, abs(lhs.real)):
        raise ArithmeticError(f"quadratic form not real: {lhs}")
    return float(lhs.real), float(rhs.real)


def star_norm(x):
    x = np.asarray(x.to_dense() if isinstance(x, SparseVector) else x, dtype=complex)
    return float(np.abs(x.real).sum() + np.abs(x.imag).sum())


def operator_norm_power(M, tol=1e-8, max_iter=10_000):
    """Spectral norm by power iteration on ``M^* M``.

    Starts from the all-ones vector plus a fixed small ramp so that no
    eigenvector is missed by symmetry.
    """
    n = M.shape[1]
    v = np.ones(n, dtype=complex) + 1e-3 * np.arange(1, n + 1) * (1 + 0.5j)
    v /= np.linalg.norm(v)
    MhM = M.conj().T @ M
    est = 0.0
    for _ in range(max_iter):
        w = MhM @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        new = float(np.real(np.vdot(v, w)))
        v = w / nrm
        if abs(new - est) <= tol * max(abs(new), 1e-300):
            est = new
            break
        est = new
    return math.sqrt(max(est, 0.0))


def metric_d1_d2(x, y, n):
    """Operator-norm and Frobenius distances between ``B(x)`` and ``B(y)``."""
    n = check_dimension(n)
    D = chaos_matrix(x, n).B - chaos_matrix(y, n).B
    return operator_norm_power(D), float(np.linalg.norm(D))


def lipschitz_report(pairs, n, s):
    """Test both Lipschitz constants against both metrics.

    Returns the worst slack ``metric - constant * ||x - y||`` for each of the
    four (metric, constant) pairings; nonpositive means the bound held.
    """
    consts = {"2sqrt(sn)": 2 * math.sqrt(s * n), "2s": 2 * s}
    worst = {(m, c): -np.inf for m in ("d1", "d2") for c in consts}
    for x, y in pairs:
        d1, d2 = metric_d1_d2(x, y, n)
        dist = float(np.linalg.norm(as_dense(x, n * n) - as_dense(y, n * n)))
        for c, val in consts.items():
            worst[("d1", c)] = max(worst[("d1", c)], d1 - val * dist)
            worst[("d2", c)] = max(worst[("d2", c)], d2 - val * dist)
    return worst


# ------------------------------------------------------------- identities


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    n: int
    max_abs_deviation: float
    passed: bool
    detail: str = ""

    def as_row(self):
        return {"check_id": self.check_id, "n": self.n,
                "max_abs_deviation": self.max_abs_deviation,
                "pass": "pass" if self.passed else "fail"}


IDENTITY_CHECKS = (
    "aq_basis",          # A_q e_lambda = pi(lambda) e_q
    "sum_aq_star_aq",    # sum_q A_q^* A_q = n I
    "sum_aq_proj_aq",    # sum_q A_q P_lambda A_q^* = I
    "sparsity_bound",    # sum |x^* A_q'^* A_q y|^2 <= n |x|_0 |x|^2 |y|^2
    "bilinear_unitary",  # B(e_l', e_l)^* B(e_l', e_l) = I
    "bilinear_frob",     # ||B(e_l', e_l)||_F^2 = n
)


def _bilinear_pairs(n, rng, count):
    """Index pairs with different translations, where B(e_l', e_l) is a phased permutation."""
    pairs = []
    while len(pairs) < count:
        a, b = rng.integers(0, n * n, size=2)
        if a % n != b % n:
            pairs.append((int(a), int(b)))
    return pairs


def verify_identities(n, seed=0, atol=1e-8, samples=10):
    """Check the A_q identities densely; returns one :class:`CheckResult` per identity."""
    n = check_dimension(n)
    if n > 64:
        raise ResourceError("dense identity verification is limited to n <= 64")
    rng = substream(seed, n)
    N = n * n
    A = [a_q_dense(q, n) for q in range(n)]
    results = []

    def record(cid, dev, detail=""):
        results.append(CheckResult(cid, n, float(dev), bool(dev <= atol), detail))

    # basis action
    dev, where = 0.0, ""
    for q in range(n):
        for idx in range(N):
            lam = TFIndex.from_idx(idx, n)
            e_q = np.zeros(n, dtype=complex)
            e_q[q] = 1.0
            d = np.abs(A[q][:, idx] - tf_shift(e_q, lam)).max()
            if d > dev:
                dev, where = d, f"q={q},lambda=({lam.k},{lam.ell})"
    record("aq_basis", dev, where)

    S = sum(Aq.conj().T @ Aq for Aq in A)
    record("sum_aq_star_aq", np.abs(S - n * np.eye(N)).max())

    dev, where = 0.0, ""
    for idx in rng.choice(N, size=min(samples, N), replace=False):
        P = sum(np.outer(Aq[:, idx], Aq[:, idx].conj()) for Aq in A)
        d = np.abs(P - np.eye(n)).max()
        if d > dev:
            dev, where = d, f"lambda_idx={int(idx)}"
    record("sum_aq_proj_aq", dev, where)

    worst = -np.inf
    for _ in range(samples):
        s = int(rng.integers(1, min(n, N) + 1))
        x = np.zeros(N, dtype=complex)
        supp = rng.choice(N, size=s, replace=False)
        x[supp] = rng.standard_normal(s) + 1j * rng.standard_normal(s)
        y = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        Ax = np.array([Aq @ x for Aq in A])
        Ay = np.array([Aq @ y for Aq in A])
        lhs = float(np.sum(np.abs(np.conj(Ax) @ Ay.T) ** 2))
        rhs = n * s * np.vdot(x, x).real * np.vdot(y, y).real
        worst = max(worst, lhs - rhs)
    record("sparsity_bound", max(worst, 0.0), f"max excess {worst:.3e}")

    dev_u, dev_f = 0.0, 0.0
    for a, b in _bilinear_pairs(n, rng, samples):
        e_a = np.zeros(N, dtype=complex)
        e_b = np.zeros(N, dtype=complex)
        e_a[a], e_b[b] = 1.0, 1.0
        B = np.array([[np.vdot(A[qp] @ e_a, A[q] @ e_b) if qp != q else 0.0
                       for q in range(n)] for qp in range(n)])
        dev_u = max(dev_u, np.abs(B.conj().T @ B - np.eye(n)).max())
        dev_f = max(dev_f, abs(np.linalg.norm(B) ** 2 - n))
    record("bilinear_unitary", dev_u)
    record("bilinear_frob", dev_f)
    return results


def tf_composition_phase(lam, lam_prime, n):
    """Phase ``c`` with ``pi(lam')^* pi(lam) = c * pi(lam - lam')``, by composition."""
    lhs = np.conj(_pi_matrix(lam_prime, n)).T @ _pi_matrix(lam, n)
    rhs = _pi_matrix(TFIndex(*lam) - TFIndex(*lam_prime), n)
    j = int(np.argmax(np.abs(rhs[:, 0])))
    c = lhs[j, 0] / rhs[j, 0]
    if not np.allclose(lhs, c * rhs, atol=1e-12):
        raise ArithmeticError("time-frequency shifts failed to compose up to a phase")
    return complex(c)


def _pi_matrix(lam, n):
    lam = lam if isinstance(lam, TFIndex) else TFIndex(*lam)
    return np.stack([tf_shift(col, lam) for col in np.eye(n, dtype=complex)], axis=1)

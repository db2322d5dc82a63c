"""Channel identification: recover delay-Doppler coefficients from one probe.

A channel ``Gamma = sum_lam x_lam pi(lam)`` applied to the probe ``g`` gives
``y = Gamma g = Psi_g x``; sparse ``x`` is recovered with a solver from
:mod:`gabor_rip.recovery`.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import GaborError, InvalidParameterError
from .operator import GaborOperator, SparseVector
from .recovery import Algorithm, best_s_term_error, solve
from .rng import COEFF_STREAM, NOISE_STREAM, SUPPORT_STREAM, fisher_yates_prefix, substream
from .tf_core import Window, WindowKind, make_window


class CoefficientModel(str, Enum):
    UNIT_MODULUS = "unit"
    COMPLEX_GAUSSIAN = "gaussian"


def apply_channel(x, g):
    """Response ``Gamma g`` of the channel with delay-Doppler coefficients ``x``."""
    op = g if isinstance(g, GaborOperator) else GaborOperator(g)
    return op.synthesis_apply(x)


@dataclass(frozen=True)
class ChannelExperiment:
    """One synthetic identification problem, fully determined by its fields."""

    n: int
    s: int
    window: str = "rademacher"
    window_seed: int = 0
    seed: int = 0
    coefficients: CoefficientModel = CoefficientModel.UNIT_MODULUS
    noise_tau: float = 0.0

    def __post_init__(self):
        if self.s < 0 or self.s > self.n * self.n:
            raise InvalidParameterError(f"s must lie in [0, {self.n * self.n}], got {self.s}")
        if self.noise_tau < 0:
            raise InvalidParameterError("noise_tau must be nonnegative")
        object.__setattr__(self, "coefficients", CoefficientModel(self.coefficients))

    def make_window(self):
        return make_window(self.window, self.n, self.window_seed)

    def draw(self, window=None):
        """Return ``(operator, truth, y)`` for this configuration."""
        win = window if isinstance(window, Window) else self.make_window()
        op = GaborOperator(win)
        N = op.N
        support = fisher_yates_prefix(substream(self.seed, SUPPORT_STREAM), N, self.s)
        crng = substream(self.seed, COEFF_STREAM)
        if self.coefficients is CoefficientModel.UNIT_MODULUS:
            values = np.exp(2j * np.pi * crng.random(self.s))
        else:
            values = (crng.standard_normal(self.s) + 1j * crng.standard_normal(self.s)) / np.sqrt(2)
        truth = SparseVector(N, support, values)
        y = op.synthesis_apply(truth.to_dense())
        if self.noise_tau > 0:
            nrng = substream(self.seed, NOISE_STREAM)
            e = nrng.standard_normal(op.n) + 1j * nrng.standard_normal(op.n)
            y = y + self.noise_tau * e / np.linalg.norm(e)
        return op, truth, y


@dataclass
class ExperimentRecord:
    algo: str
    n: int
    s: int
    window: str
    seed: int
    noise: float
    rel_error: float
    residual: float
    iters: int
    converged: bool
    precision: float
    recall: float
    sigma_s_over_sqrt_s: float
    tau: float
    error: str = ""
    truth: SparseVector = None
    x_hat: SparseVector = None

    RECOVERY_COLUMNS = ("algo", "n", "s", "window", "seed", "noise", "rel_error", "residual",
                        "iters", "converged")
    CSV_COLUMNS = RECOVERY_COLUMNS + ("precision", "recall", "sigma_s_over_sqrt_s", "tau")

    def as_row(self, columns=CSV_COLUMNS):
        row = {
            "algo": self.algo, "n": self.n, "s": self.s, "window": self.window,
            "seed": self.seed, "noise": self.noise, "rel_error": self.rel_error,
            "residual": self.residual, "iters": self.iters,
            "converged": "true" if self.converged else "false",
            "precision": self.precision, "recall": self.recall,
            "sigma_s_over_sqrt_s": self.sigma_s_over_sqrt_s, "tau": self.tau,
        }
        return {c: row[c] for c in columns}


def _support_scores(truth, x_hat, rel_tol=1e-6):
    t = set(truth.support.tolist())
    if x_hat.nnz:
        cutoff = rel_tol * np.abs(x_hat.values).max()
        est = set(x_hat.support[np.abs(x_hat.values) > cutoff].tolist())
    else:
        est = set()
    hit = len(t & est)
    precision = hit / len(est) if est else (1.0 if not t else 0.0)
    recall = hit / len(t) if t else 1.0
    return precision, recall


def run_experiment(config, algorithm, window=None, max_iters=None, tol=1e-8):
    """Draw the problem, recover it, and score the estimate.

    Solver failures are captured in ``record.error`` and never raised.
    """
    algo = Algorithm.parse(algorithm)
    op, truth, y = config.draw(window)
    xd = truth.to_dense()
    s = config.s
    sigma = best_s_term_error(xd, s) / np.sqrt(s) if s > 0 else 0.0
    base = dict(algo=algo.value, n=config.n, s=s, window=WindowKind.parse(config.window).value,
                seed=config.seed, noise=config.noise_tau, sigma_s_over_sqrt_s=sigma,
                tau=config.noise_tau, truth=truth)
    xnorm = np.linalg.norm(xd)
    try:
        result = solve(algo, op, y, max(s, 1), max_iters=max_iters, tol=tol)
    except GaborError as exc:
        return ExperimentRecord(rel_error=float("inf") if xnorm else float(np.linalg.norm(y)),
                                residual=float(np.linalg.norm(y)), iters=0, converged=False,
                                precision=0.0, recall=0.0, error=f"{exc.code}: {exc}", **base)
    est = result.x_hat.to_dense()
    err = np.linalg.norm(est - xd)
    rel = float(err / xnorm) if xnorm > 0 else float(err)
    precision, recall = _support_scores(truth, result.x_hat)
    return ExperimentRecord(rel_error=rel, residual=result.residual_norm, iters=result.iterations,
                            converged=result.converged, precision=precision, recall=recall,
                            x_hat=result.x_hat, **base)

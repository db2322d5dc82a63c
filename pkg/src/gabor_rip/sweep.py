"""Phase-transition sweeps over (n, s, window, algorithm).

Problem cells are the ``(n, s, window)`` triples in canonical order; every
algorithm sees the same instances.  Trial ``t`` of cell ``c`` takes its
window seed and problem seed from substreams of ``(base_seed, c, t)``, so
the table does not depend on how trials are spread over workers.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelExperiment, run_experiment
from .errors import InvalidParameterError
from .parallel import run_chunks
from .recovery import Algorithm
from .rng import derive_seed
from .tf_core import WindowKind

COLUMNS = ("n", "s", "window", "algo", "trials", "success_rate", "mean_rel_error", "mean_iters")


@dataclass
class SweepConfig:
    ns: tuple
    ss: tuple
    windows: tuple = ("rademacher",)
    algos: tuple = ("omp",)
    trials: int = 20
    base_seed: int = 0
    noise_tau: float = 0.0
    threshold: float = 1e-4
    output: str = None
    fmt: str = "csv"

    def __post_init__(self):
        self.ns = tuple(int(n) for n in self.ns)
        self.ss = tuple(int(s) for s in self.ss)
        self.windows = tuple(WindowKind.parse(w).value for w in self.windows)
        self.algos = tuple(Algorithm.parse(a).value for a in self.algos)
        if not (self.ns and self.ss and self.windows and self.algos):
            raise InvalidParameterError("sweep lists must be nonempty")
        if self.trials < 1:
            raise InvalidParameterError("trials must be >= 1")
        if not self.threshold > 0:
            raise InvalidParameterError("success threshold must be positive")
        if self.fmt not in ("csv", "json"):
            raise InvalidParameterError(f"unknown format {self.fmt!r}")

    def cells(self):
        return list(itertools.product(self.ns, self.ss, self.windows))


def _trial(args):
    cell_index, (n, s, window), t, cfg = args
    config = ChannelExperiment(n=n, s=s, window=window,
                               window_seed=derive_seed(cfg.base_seed, cell_index, t, 0),
                               seed=derive_seed(cfg.base_seed, cell_index, t, 1),
                               noise_tau=cfg.noise_tau)
    win = config.make_window()
    return [run_experiment(config, algo, window=win) for algo in cfg.algos]


def _trial_chunk(items):
    return [_trial(item) for item in items]


def phase_transition(cfg, jobs=1):
    """Run the sweep and return table rows in (n, s, window, algo) order."""
    work = [(ci, cell, t, cfg) for ci, cell in enumerate(cfg.cells()) for t in range(cfg.trials)]
    chunk = max(1, math.ceil(len(work) / (4 * max(int(jobs), 1))))
    chunks = [work[i:i + chunk] for i in range(0, len(work), chunk)]
    records = [rec for part in run_chunks(_trial_chunk, chunks, jobs) for rec in part]

    rows = []
    for ci, (n, s, window) in enumerate(cfg.cells()):
        trials = records[ci * cfg.trials:(ci + 1) * cfg.trials]
        for ai, algo in enumerate(cfg.algos):
            recs = [tr[ai] for tr in trials]
            errs = np.array([r.rel_error for r in recs])
            ok = np.array([not r.error and r.rel_error < cfg.threshold for r in recs])
            finite = errs[np.isfinite(errs)]
            rows.append({
                "n": n, "s": s, "window": window, "algo": algo, "trials": cfg.trials,
                "success_rate": float(ok.mean()),
                "mean_rel_error": float(finite.mean()) if finite.size else float("nan"),
                "mean_iters": float(np.mean([r.iters for r in recs])),
            })
    return rows

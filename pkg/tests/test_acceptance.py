"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every criterion prints one ``criterion <id> PASS|FAIL`` line, collected in
the pytest terminal summary.  Running this file directly prints the lines
as the checks complete.
"""
import contextlib
import io as _io
import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from gabor_rip.analysis import (
    chaos_rip_link, exact_rip_constant, lipschitz_report, monte_carlo_rip, verify_identities, welch_bound,
)
from gabor_rip.cli import main
from gabor_rip.operator import GaborOperator
from gabor_rip.sweep import SweepConfig, phase_transition

import conftest

KINDS = ("rademacher", "steinhaus", "alltop", "gaussian")
NON_PRIME = ("rademacher", "steinhaus", "gaussian")


def report(cid, title, ok, detail, elapsed, budget):
    in_time = elapsed < budget
    status = "PASS" if ok and in_time else "FAIL"
    line = f"criterion {cid} {status} {title}: {detail} ({elapsed:.1f}s, budget {budget}s)"
    conftest.ACCEPTANCE.append(line)
    print(line, flush=True)
    assert ok, line
    assert in_time, line


class timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def _cli(argv):
    buf = _io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_c01_alltop_coherence():
    worst, slowest = 0.0, 0.0
    for n in (5, 7, 11, 13):
        with timer() as t:
            code, out = _cli(["coherence", "--window", "alltop", "--n", str(n), "--format", "json"])
        mu = json.loads(out)[0]["mu"]
        worst = max(worst, abs(mu - n ** -0.5) if code == 0 else math.inf)
        slowest = max(slowest, t.elapsed)
    report(1, "Alltop coherence 1/sqrt(n)", worst <= 1e-10, f"max deviation {worst:.2e}", slowest, 1)


def test_c02_welch():
    with timer() as t:
        worst = math.inf
        for kind in KINDS:
            for n in (5, 8, 16):
                if kind == "alltop" and n != 5:
                    continue  # Alltop needs a prime length
                op = GaborOperator.from_spec(kind, n, 0)
                worst = min(worst, op.coherence() - welch_bound(n, n * n))
    report(2, "coherence >= Welch bound", worst >= -1e-12, f"min margin {worst:.3e}", t.elapsed, 5)


def test_c03_delta2_equals_coherence():
    with timer() as t:
        worst = 0.0
        for kind in KINDS:
            for n in (4, 5, 8):
                if kind == "alltop" and n != 5:
                    continue
                for seed in range(5):
                    op = GaborOperator.from_spec(kind, n, seed)
                    worst = max(worst, abs(exact_rip_constant(op, 2).delta_hat - op.coherence()))
    report(3, "exact delta_2 == mu", worst <= 1e-10, f"max deviation {worst:.2e}", t.elapsed, 30)


def test_c04_coherence_rip_bound():
    with timer() as t:
        worst = -math.inf
        for kind in KINDS:
            for n in (4, 5):
                if kind == "alltop" and n != 5:
                    continue
                op = GaborOperator.from_spec(kind, n, 0)
                mu = op.coherence()
                for s in (2, 3):
                    worst = max(worst, exact_rip_constant(op, s).delta_hat - (s - 1) * mu)
    report(4, "delta_s <= (s-1) mu", worst <= 1e-10, f"max excess {worst:.3e}", t.elapsed, 60)


def test_c05_brute_force_oracle():
    with timer() as t:
        op = GaborOperator.from_spec("rademacher", 4, 0)
        D = op.build_dense()
        pairs = list(itertools.combinations(range(16), 2))
        oracle = 0.0
        for i, j in pairs:
            c = abs(np.vdot(D[:, i], D[:, j]))
            lam = (1 - c, 1 + c)  # eigenvalues of [[1, c], [conj c, 1]]
            oracle = max(oracle, lam[1] - 1, 1 - lam[0])
        got = exact_rip_constant(op, 2).delta_hat
    dev = abs(got - oracle)
    report(5, "brute-force oracle n=4 s=2", len(pairs) == 120 and dev <= 1e-12,
           f"delta_2={got:.12f} oracle={oracle:.12f} over {len(pairs)} supports", t.elapsed, 5)


def test_c06_identity_suite():
    with timer() as t:
        failures, worst = [], 0.0
        for n in range(2, 17):
            for r in verify_identities(n, atol=1e-8):
                worst = max(worst, r.max_abs_deviation)
                if not r.passed:
                    failures.append(f"{r.check_id}@n={n}")
    report(6, "six identities for n=2..16", not failures,
           f"max deviation {worst:.2e}; failures {failures or 'none'}", t.elapsed, 60)


def test_c07_chaos_link():
    rng = np.random.default_rng(7)
    with timer() as t:
        worst = 0.0
        for n in (4, 6, 8):
            for kind in ("rademacher", "steinhaus"):
                op = GaborOperator.from_spec(kind, n, n)
                for _ in range(100):
                    s = int(rng.integers(1, n + 1))
                    x = np.zeros(n * n, complex)
                    x[rng.choice(n * n, s, replace=False)] = rng.standard_normal(s) + 1j * rng.standard_normal(s)
                    x /= np.linalg.norm(x)
                    lhs, rhs = chaos_rip_link(op, x)
                    worst = max(worst, abs(lhs - rhs))
    report(7, "chaos link", worst <= 1e-10, f"max |lhs-rhs| {worst:.2e}", t.elapsed, 30)


def test_c08_fast_operator_oracle():
    rng = np.random.default_rng(8)
    with timer() as t:
        worst = 0.0
        for n in (4, 8, 16, 32):
            for i in range(20):
                op = GaborOperator.from_spec(NON_PRIME[i % 3], n, i)
                D = op.build_dense()
                x = rng.standard_normal(n * n) + 1j * rng.standard_normal(n * n)
                y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                a, b = D @ x, D.conj().T @ y
                worst = max(worst, np.linalg.norm(op.synthesis_apply(x) - a) / np.linalg.norm(a),
                            np.linalg.norm(op.analysis_apply(y) - b) / np.linalg.norm(b))
    report(8, "fast synthesis/analysis vs dense", worst <= 1e-10, f"max rel error {worst:.2e}", t.elapsed, 30)


def test_c09_metric_lipschitz():
    n, s = 6, 3
    rng = np.random.default_rng(9)
    with timer() as t:
        pairs = []
        for _ in range(200):
            supp = rng.choice(n * n, s, replace=False)
            x, y = np.zeros(n * n, complex), np.zeros(n * n, complex)
            x[supp] = rng.standard_normal(s) + 1j * rng.standard_normal(s)
            y[supp] = rng.standard_normal(s) + 1j * rng.standard_normal(s)
            pairs.append((x / np.linalg.norm(x), y / np.linalg.norm(y)))
        rep = lipschitz_report(pairs, n, s)
    d2, d1 = rep[("d2", "2sqrt(sn)")], rep[("d1", "2s")]
    cross = ", ".join(f"{m}~{c}:{v:.3f}" for (m, c), v in sorted(rep.items()))
    report(9, "d2 <= 2sqrt(sn)|x-y|, d1 <= 2s|x-y|", d2 <= 1e-8 and d1 <= 1e-8,
           f"worst slack {cross}", t.elapsed, 60)


# pinned from the first seeded run: every cell recovered 100/100
RECOVERY_FLOOR = {1: 0.90, 2: 0.90, 3: 0.90, 4: 0.80}


@pytest.mark.slow
def test_c10_recovery_suite():
    with timer() as t:
        rows = phase_transition(SweepConfig([64], [1, 2, 3, 4], ["rademacher"], ["htp", "cosamp", "bp"], 100, 0))
    bad = [r for r in rows if r["success_rate"] < RECOVERY_FLOOR[r["s"]]]
    rates = " ".join(f"{r['algo']}/s{r['s']}={r['success_rate']:.2f}" for r in rows)
    report(10, "recovery n=64 s=1..4", not bad, rates, t.elapsed, 600)


@pytest.mark.slow
def test_c11_scaling_monitor():
    with timer() as t:
        medians = []
        for n in (16, 32, 64, 128):
            ests = [monte_carlo_rip(GaborOperator.from_spec("rademacher", n, seed), 2, 500, seed=seed).delta_hat
                    for seed in range(5)]
            medians.append(float(np.median(ests)))
    ok = all(a > b for a, b in zip(medians, medians[1:]))
    report(11, "MC delta_2 strictly decreasing in n", ok,
           "medians " + ", ".join(f"{m:.4f}" for m in medians), t.elapsed, 600)


CLI_MATRIX = [
    ["gen-window", "--n", "16", "--window", "steinhaus", "--seed", "3"],
    ["apply", "--n", "16", "--s", "4", "--seed", "2"],
    ["adjoint", "--n", "16", "--seed", "2"],
    ["coherence", "--n", "13", "--window", "alltop"],
    ["rip-estimate", "--n", "16,32", "--s", "2,3", "--trials", "300", "--seed", "1"],
    ["rip-exact", "--n", "4,5", "--s", "2,3", "--window", "steinhaus"],
    ["verify-identities", "--n", "2,3,4,5,6,7,8"],
    ["recover", "--n", "32", "--s", "3", "--algo", "cosamp", "--seed", "4"],
    ["channel-sim", "--n", "32", "--s", "3", "--trials", "12", "--noise", "0.01", "--algo", "htp"],
    ["phase-transition", "--n", "16,32", "--s", "1,3", "--algo", "omp,htp,iht", "--trials", "6"],
]


@pytest.mark.slow
def test_c12_cli_determinism(tmp_path):
    def run(argv, jobs):
        proc = subprocess.run([sys.executable, "-m", "gabor_rip", *argv, "--jobs", str(jobs)],
                              capture_output=True, timeout=300)
        return proc.returncode, proc.stdout

    with timer() as t:
        mismatched, failed = [], []
        for argv in CLI_MATRIX:
            outs = [run(argv, j) for j in (1, 4, 1, 4)]
            if any(code != 0 for code, _ in outs):
                failed.append(argv[0])
            if len({out for _, out in outs}) != 1:
                mismatched.append(argv[0])
        # the plot command reads a table and must also be byte-stable
        table = tmp_path / "pt.csv"
        table.write_bytes(run(CLI_MATRIX[-1], 1)[1])
        svgs = []
        for i in range(2):
            out = tmp_path / f"p{i}.svg"
            subprocess.run([sys.executable, "-m", "gabor_rip", "plot", "--input", str(table), "--x", "s",
                            "--y", "success_rate", "--series", "algo", "--out", str(out)], check=True)
            svgs.append(out.read_bytes())
        if svgs[0] != svgs[1]:
            mismatched.append("plot")
    report(12, "CLI byte determinism, jobs 1 vs 4", not mismatched and not failed,
           f"{len(CLI_MATRIX) + 1} commands; mismatched {mismatched or 'none'}; failed {failed or 'none'}",
           t.elapsed, 300)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))

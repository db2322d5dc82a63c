"""Command-line front end (``gabor-rip`` / ``python -m gabor_rip``).

Exit codes: 0 on success, 1 on a domain error (an ``error,<code>,<message>``
line goes to stderr), 2 on a usage error.
"""
import argparse
import sys

from . import analysis, io
from .channel import ChannelExperiment, ExperimentRecord, run_experiment
from .errors import GaborError, InvalidParameterError
from .operator import GaborOperator
from .parallel import default_jobs, run_chunks
from .plot import MissingColumnError, render_svg_scatter
from .rng import derive_seed
from .sweep import COLUMNS as SWEEP_COLUMNS, SweepConfig, phase_transition
from .tf_core import make_window

WINDOWS = ("rademacher", "steinhaus", "alltop", "gaussian")
ALGOS = ("iht", "htp", "cosamp", "omp", "bp")


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(choices):
    def parse(text):
        vals = [v.strip().lower() for v in str(text).split(",") if v.strip()]
        bad = [v for v in vals if v not in choices]
        if bad or not vals:
            raise argparse.ArgumentTypeError(f"invalid choice(s) {bad or text!r}; pick from {choices}")
        return vals
    return parse


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--jobs", type=int, default=default_jobs(),
                        help="worker processes (default $GABOR_RIP_JOBS or 1)")

    win = argparse.ArgumentParser(add_help=False)
    win.add_argument("--n", type=int, required=True)
    win.add_argument("--window", choices=WINDOWS, default="rademacher")
    win.add_argument("--seed", type=int, default=0)

    multi = argparse.ArgumentParser(add_help=False)
    multi.add_argument("--n", type=_int_list, required=True)
    multi.add_argument("--s", type=_int_list, required=True)
    multi.add_argument("--window", choices=WINDOWS, default="rademacher")
    multi.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="gabor-rip", description="Gabor measurement systems for compressive sensing")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("gen-window", parents=[common, win], help="write a window as index,re,im")

    sp = sub.add_parser("apply", parents=[common, win], help="synthesis y = Psi x")
    sp.add_argument("--input", help="x as index,re,im (length n^2); default random s-sparse")
    sp.add_argument("--s", type=int, default=3)

    sp = sub.add_parser("adjoint", parents=[common, win], help="analysis Psi^* y")
    sp.add_argument("--input", help="y as index,re,im (length n); default the window itself")

    sub.add_parser("coherence", parents=[common, win], help="coherence of Psi")

    sp = sub.add_parser("rip-estimate", parents=[common, multi], help="Monte Carlo delta_s")
    sp.add_argument("--trials", type=int, default=1000)

    sp = sub.add_parser("rip-exact", parents=[common, multi], help="exhaustive delta_s")
    sp.add_argument("--budget", type=int, default=analysis.DEFAULT_ENUMERATION_BUDGET)

    sp = sub.add_parser("verify-identities", parents=[common], help="check the A_q identities")
    sp.add_argument("--n", type=_int_list, required=True)
    sp.add_argument("--seed", type=int, default=0)

    for name, helptext in (("recover", "one recovery run"), ("channel-sim", "channel identification trials")):
        sp = sub.add_parser(name, parents=[common, win], help=helptext)
        sp.add_argument("--s", type=int, required=True)
        sp.add_argument("--algo", choices=ALGOS, default="htp")
        sp.add_argument("--noise", type=float, default=0.0)
        sp.add_argument("--trials", type=int, default=1)
        sp.add_argument("--coeff", choices=("unit", "gaussian"), default="unit")

    sp = sub.add_parser("phase-transition", parents=[common], help="success-rate sweep")
    sp.add_argument("--n", type=_int_list, required=True)
    sp.add_argument("--s", type=_int_list, required=True)
    sp.add_argument("--window", type=_str_list(WINDOWS), default=["rademacher"])
    sp.add_argument("--algo", type=_str_list(ALGOS), default=["omp"])
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--noise", type=float, default=0.0)
    sp.add_argument("--threshold", type=float, default=1e-4)

    sp = sub.add_parser("plot", help="SVG scatter from a CSV table")
    sp.add_argument("--input", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--series")
    sp.add_argument("--title", default="")
    sp.add_argument("--out", required=True)
    return p


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _operator(args):
    return GaborOperator(make_window(args.window, args.n, args.seed))


def _cmd_gen_window(args):
    return io.render_vector(make_window(args.window, args.n, args.seed).g, args.format)


def _cmd_apply(args):
    op = _operator(args)
    if args.input:
        x = io.parse_vector(_read(args.input))
    else:
        _, truth, _ = ChannelExperiment(args.n, args.s, args.window, args.seed, args.seed).draw()
        x = truth.to_dense()
    return io.render_vector(op.synthesis_apply(x), args.format)


def _cmd_adjoint(args):
    op = _operator(args)
    y = io.parse_vector(_read(args.input)) if args.input else op.g
    return io.render_vector(op.analysis_apply(y), args.format)


def _cmd_coherence(args):
    mu = _operator(args).coherence()
    if args.format == "json":
        return io.render_table([{"mu": mu}], ("mu",), "json")
    return f"mu,{io.format_value(mu)}\n"


def _cmd_rip_estimate(args):
    rows = []
    for n in args.n:
        op = GaborOperator(make_window(args.window, n, args.seed))
        for s in args.s:
            rows.append(analysis.monte_carlo_rip(op, s, args.trials, args.seed, jobs=args.jobs).as_row())
    return io.render_table(rows, analysis.RipEstimate.CSV_COLUMNS, args.format)


def _cmd_rip_exact(args):
    rows = []
    for n in args.n:
        op = GaborOperator(make_window(args.window, n, args.seed))
        for s in args.s:
            rows.append(analysis.exact_rip_constant(op, s, budget=args.budget).as_row())
    return io.render_table(rows, analysis.RipEstimate.CSV_COLUMNS, args.format)


def _cmd_verify(args):
    results = [r for n in args.n for r in analysis.verify_identities(n, seed=args.seed)]
    text = io.render_table([r.as_row() for r in results],
                           ("check_id", "n", "max_abs_deviation", "pass"), args.format)
    failed = [r for r in results if not r.passed]
    if failed:
        f = failed[0]
        return text, GaborError(f"{f.check_id} failed at n={f.n} ({f.detail}) deviation {f.max_abs_deviation:.3e}")
    return text


def _channel_trial(item):
    args, t = item
    seed = args.seed if args.command == "recover" else derive_seed(args.seed, t)
    config = ChannelExperiment(args.n, args.s, args.window, args.seed, seed,
                               coefficients=args.coeff, noise_tau=args.noise)
    return run_experiment(config, args.algo)


def _cmd_channel(args):
    if args.trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    ChannelExperiment(args.n, args.s, args.window, noise_tau=args.noise)  # validate before fan-out
    make_window(args.window, args.n, args.seed)
    trials = 1 if args.command == "recover" else args.trials
    records = run_chunks(_channel_trial, [(args, t) for t in range(trials)], args.jobs)
    columns = ExperimentRecord.RECOVERY_COLUMNS if args.command == "recover" else ExperimentRecord.CSV_COLUMNS
    return io.render_table([r.as_row(columns) for r in records], columns, args.format)


def _cmd_phase(args):
    cfg = SweepConfig(args.n, args.s, args.window, args.algo, args.trials, args.seed,
                      args.noise, args.threshold, args.out, args.format)
    return io.render_table(phase_transition(cfg, jobs=args.jobs), SWEEP_COLUMNS, args.format)


def _cmd_plot(args):
    _, rows = io.parse_table(_read(args.input))
    try:
        return render_svg_scatter(rows, args.x, args.y, args.series, args.title)
    except MissingColumnError as exc:
        raise UsageError(f"column {exc.args[0]!r} not in {args.input}") from None


COMMANDS = {
    "gen-window": _cmd_gen_window,
    "apply": _cmd_apply,
    "adjoint": _cmd_adjoint,
    "coherence": _cmd_coherence,
    "rip-estimate": _cmd_rip_estimate,
    "rip-exact": _cmd_rip_exact,
    "verify-identities": _cmd_verify,
    "recover": _cmd_channel,
    "channel-sim": _cmd_channel,
    "phase-transition": _cmd_phase,
    "plot": _cmd_plot,
}


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _error_line(code, message):
    msg = " ".join(str(message).split()).replace(",", ";")
    sys.stderr.write(f"error,{code},{msg}\n")


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "jobs", 1) < 1:
        parser.print_usage(sys.stderr)
        _error_line("usage", "--jobs must be >= 1")
        return 2
    try:
        outcome = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _error_line("usage", exc)
        return 2
    except GaborError as exc:
        _error_line(exc.code, exc)
        return 1
    except (ValueError, ArithmeticError) as exc:
        _error_line("invalid-parameter", exc)
        return 1
    except OSError as exc:
        _error_line("io", exc)
        return 1
    failure = None
    if isinstance(outcome, tuple):
        outcome, failure = outcome
    _emit(outcome, args.out)
    if failure is not None:
        _error_line("identity-failed", failure)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

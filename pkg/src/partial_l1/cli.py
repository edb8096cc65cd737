"""Command-line front end.

    partial-l1 theory   --k 6 --n 40 --keta 3 --m 10..15 [--variant hidden]
    partial-l1 simulate --k 6 --n 40 --keta 3 --m 12 --trials 10000 --seed 42
    partial-l1 ldp      --alpha 0.5,0.6 --beta 0.2 --eta 0.5
    partial-l1 pt       --beta 0.1,0.2,0.3 --eta 0
    partial-l1 sweep    --k 6 --n 40 --keta 3 --m 8..22 [--trials N] [--plot-script fig.py]

Exit status: 0 ok, 2 usage/validation, 3 numerical non-convergence,
4 solver anomaly.  Reports carry the tool version and full resolved
configuration so a file alone is enough to reproduce it.
"""

import argparse
import csv
import io
import json
import os
import sys

from . import __version__, asymptotics, perf
from .errors import BracketError, DomainError, EmptyRun, NonConvergence, RankDeficient, SolverAnomaly
from .geometry import ProblemDims
from .montecarlo import DEFAULT_CLASSIFY_TOL, run_simulation
from .specfun import DEFAULT_TOL

WORKERS_ENV = "PARTIAL_L1_WORKERS"
DEFAULT_SEED = 0

THEORY_COLUMNS = ["variant", "k", "m", "n", "keta", "p_err", "consistency_gap", "tol"]
SIMULATE_COLUMNS = THEORY_COLUMNS + ["trials", "failures", "ambiguous", "p_hat", "ci_low",
                                     "ci_high", "seed"]
LDP_COLUMNS = ["alpha", "beta", "eta", "rate", "rho_star", "mu_star", "g_star", "regime"]
PT_COLUMNS = ["beta", "eta", "alpha_w"]
SWEEP_COLUMNS = ["m", "p_err_theory"]
SWEEP_SIM_COLUMNS = SWEEP_COLUMNS + ["p_hat", "ci_low", "ci_high"]

EXIT_USAGE, EXIT_NUMERIC, EXIT_SOLVER = 2, 3, 4


class UsageError(Exception):
    pass


def parse_int_range(text):
    """'12' -> [12]; '10..15' -> [10, ..., 15]."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            values = list(range(lo, hi + 1))
        else:
            values = [int(text)]
    except ValueError:
        raise UsageError(f"bad integer or range {text!r} (expected N or A..B)") from None
    if not values:
        raise UsageError(f"empty range {text!r}")
    return values


def parse_float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None
    if not values:
        raise UsageError(f"empty list {text!r}")
    return values


def fmt(x):
    if isinstance(x, float):
        return f"{x:.6g}"
    return x


def _dims(args, m):
    dims = ProblemDims(args.k, m, args.n, args.keta)
    if args.variant == perf.HIDDEN:
        dims.hidden_equivalent()
    return dims


def _theory_row(report):
    d = report.dims
    return {"variant": report.variant, "k": d.k, "m": d.m, "n": d.n, "keta": d.k_eta,
            "p_err": report.p_err, "consistency_gap": report.consistency_gap,
            "tol": report.tolerance}


def _term_rows(report):
    rows = [{"l": t.l, "log_count": t.log_count, "phi_int": t.phi_int.value,
             "log_phi_int": t.phi_int.log_value, "phi_ext": t.phi_ext.value,
             "log_phi_ext": t.phi_ext.log_value, "log_term": t.log_term} for t in report.terms]
    if report.cone_term is not None:
        rows.append({"l": report.evaluated_dims.n, "phi_int": report.cone_term.value,
                     "log_phi_int": report.cone_term.log_value, "phi_ext": 1.0,
                     "log_term": report.cone_term.log_value})
    return rows


def cmd_theory(args):
    rows, extra = [], {}
    for m in parse_int_range(args.m):
        report = perf.p_err(_dims(args, m), args.variant, args.tol)
        rows.append(_theory_row(report))
        if args.terms:
            extra[str(m)] = _term_rows(report)
    return THEORY_COLUMNS, rows, ({"terms": extra} if args.terms else {})


def cmd_simulate(args):
    if args.trials < 1:
        raise EmptyRun("--trials must be at least 1")
    if args.classify_tol <= 0:
        raise UsageError("--classify-tol must be positive")
    rows = []
    for m in parse_int_range(args.m):
        dims = _dims(args, m)
        theory = perf.p_err(dims, args.variant, args.tol)
        sim = run_simulation(dims, args.variant, args.trials, args.seed, args.workers,
                             tol=args.classify_tol, check_witness=args.witness)
        print(f"m={m}: {args.trials} trials in {sim.wall_time:.1f}s", file=sys.stderr)
        row = _theory_row(theory)
        row.update(trials=sim.trials, failures=sim.failures, ambiguous=sim.ambiguous,
                   p_hat=sim.p_hat, ci_low=sim.ci_low, ci_high=sim.ci_high, seed=sim.seed)
        rows.append(row)
    return SIMULATE_COLUMNS, rows, {}


def cmd_ldp(args):
    rate_fn = asymptotics.ldp_rate_hidden if args.variant == perf.HIDDEN else asymptotics.ldp_rate_partial
    rows = []
    for alpha in parse_float_list(args.alpha):
        res = rate_fn(asymptotics.AsymptoticPoint(alpha, args.beta, args.eta))
        rows.append({"alpha": alpha, "beta": args.beta, "eta": args.eta, "rate": res.rate,
                     "rho_star": res.rho_star, "mu_star": res.mu_star, "g_star": res.g_star,
                     "regime": res.regime})
    return LDP_COLUMNS, rows, {}


def cmd_pt(args):
    pt_fn = asymptotics.pt_curve_hidden if args.variant == perf.HIDDEN else asymptotics.pt_curve
    rows = [{"beta": b, "eta": args.eta, "alpha_w": pt_fn(b, args.eta)}
            for b in parse_float_list(args.beta)]
    return PT_COLUMNS, rows, {}


PLOT_TEMPLATE = """\
# Plots a sweep file written by `partial-l1 sweep`.  Requires matplotlib.
import csv
import matplotlib.pyplot as plt

with open({path!r}) as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
m = [int(r["m"]) for r in rows]
plt.plot(m, [float(r["p_err_theory"]) for r in rows], "-o", label="theory")
if rows and "p_hat" in rows[0]:
    plt.plot(m, [float(r["p_hat"]) for r in rows], "s", label="simulation")
plt.xlabel("m")
plt.ylabel("failure probability ({variant})")
plt.title("k={k}, n={n}, k_eta={keta}")
plt.legend()
plt.savefig({png!r})
"""


def cmd_sweep(args):
    with_sim = args.trials is not None
    if with_sim and args.trials < 1:
        raise EmptyRun("--trials must be at least 1")
    if args.classify_tol <= 0:
        raise UsageError("--classify-tol must be positive")
    rows = []
    for m in parse_int_range(args.m):
        dims = _dims(args, m)
        row = {"m": m, "p_err_theory": perf.p_err(dims, args.variant, args.tol).p_err}
        if with_sim:
            sim = run_simulation(dims, args.variant, args.trials, args.seed, args.workers,
                                 tol=args.classify_tol)
            row.update(p_hat=sim.p_hat, ci_low=sim.ci_low, ci_high=sim.ci_high)
        rows.append(row)
    if args.plot_script:
        data = args.output or "sweep.csv"
        png = os.path.splitext(data)[0] + ".png"
        with open(args.plot_script, "w") as fh:
            fh.write(PLOT_TEMPLATE.format(path=data, png=png, variant=args.variant, k=args.k,
                                          n=args.n, keta=args.keta))
    return (SWEEP_SIM_COLUMNS if with_sim else SWEEP_COLUMNS), rows, {}


def render(columns, rows, meta, extra, output_format):
    if output_format == "json":
        doc = {"meta": meta, "columns": columns, "rows": rows, **extra}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# partial-l1 {meta['version']}\n")
    buf.write(f"# config: {json.dumps(meta['config'], sort_keys=True)}\n")
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: fmt(row[c]) for c in columns})
    return buf.getvalue()


def _default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def build_parser():
    parser = argparse.ArgumentParser(prog="partial-l1", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_output(p):
        p.add_argument("--format", dest="output_format", choices=["csv", "json"], default="csv")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")

    def dims_args(p, m_default=None):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--keta", type=int, required=True)
        p.add_argument("--m", required=m_default is None, default=m_default,
                       help="number of equations, N or range A..B")
        p.add_argument("--variant", choices=list(perf.VARIANTS), default=perf.PARTIAL)
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    def sim_args(p, trials_default):
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--workers", type=int, default=_default_workers(),
                       help=f"worker processes (default ${WORKERS_ENV} or 1)")
        p.add_argument("--classify-tol", type=float, default=DEFAULT_CLASSIFY_TOL,
                       help="relative sup-norm error counted as recovery; up to 10x is ambiguous")

    p = sub.add_parser("theory", help="exact failure probabilities")
    dims_args(p)
    p.add_argument("--terms", action="store_true", help="include per-face terms (JSON only)")
    common_output(p)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("simulate", help="Monte Carlo LP simulation next to theory")
    dims_args(p)
    sim_args(p, 1000)
    p.add_argument("--witness", action="store_true", help="also run the null-space witness LP")
    common_output(p)
    p.set_defaults(func=cmd_simulate)

    for name, func, helptext in (("ldp", cmd_ldp, "large-deviation rates"),
                                 ("pt", cmd_pt, "phase-transition curve")):
        p = sub.add_parser(name, help=helptext)
        if name == "ldp":
            p.add_argument("--alpha", required=True, help="comma-separated alpha values")
            p.add_argument("--beta", type=float, required=True)
        else:
            p.add_argument("--beta", required=True, help="comma-separated beta values")
        p.add_argument("--eta", type=float, default=0.0)
        p.add_argument("--variant", choices=list(perf.VARIANTS), default=perf.PARTIAL)
        common_output(p)
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="figure-ready CSV over a range of m")
    dims_args(p)
    sim_args(p, None)
    p.add_argument("--plot-script", help="also write a matplotlib script that plots the sweep")
    common_output(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    # worker count never changes results, so it stays out of the report
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output", "workers")}
    meta = {"tool": "partial-l1", "version": __version__, "config": config}
    try:
        columns, rows, extra = args.func(args)
    except (UsageError, DomainError, EmptyRun) as exc:
        print(f"partial-l1 {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergence, BracketError) as exc:
        print(f"partial-l1 {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SolverAnomaly, RankDeficient) as exc:
        print(f"partial-l1 {args.command}: solver anomaly: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    text = render(columns, rows, meta, extra, args.output_format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface.

Four subcommands: ``t`` and ``f`` compute one replication Bayes factor
from reported statistics, ``batch`` processes a CSV of study pairs, and
``sim`` emits the scenario-grid tables. Data go to stdout (or
``--output``); warnings and errors go to stderr. Exit codes: 0 success,
2 validation problem, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys

from .bayesfactor import RepBFResult, repbf_f, repbf_t
from .errors import NumericalError, ReplicationBFError, ValidationError
from .posterior import FTestStudy, TTestStudy
from .simulate import (
    ScenarioGrid,
    default_grid_sim1,
    default_grid_sim2,
    default_grid_sim3,
    run_simulation_1,
    run_simulation_2,
    run_simulation_3,
)

BATCH_COLUMNS = [
    "id", "test",
    "stat_orig", "df_num_orig", "df_den_orig", "n_orig", "n2_orig",
    "stat_rep", "df_num_rep", "df_den_rep", "n_rep", "n2_rep",
]
BATCH_RESULT_COLUMNS = ["br0", "log10_br0", "mc_se_log", "interpretation", "status"]

_BATCH_HELP = """\
batch CSV schema (header required, comma separated, '.' decimals, UTF-8, LF):
  id          free-form row label
  test        't' or 'f'
  f rows      stat_* = F value, df_num_* = effect df, df_den_* = error df,
              n_* = total sample size, n2_* left empty
  t rows      stat_* = t value, df_num_* empty, df_den_* = df,
              n_* = group 1 size, n2_* = group 2 size (empty or 0 = one-sample)
Output repeats the input columns and appends br0, log10_br0, mc_se_log,
interpretation, status. Rows failing validation or numerics are reported in
status; the run continues.
"""


class _FlagError(ValidationError):
    pass


def _require(cond: bool, flag: str, msg: str) -> None:
    if not cond:
        raise _FlagError(f"{flag}: {msg}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--estimator", default="importance",
                   choices=["importance", "monte_carlo", "quadrature"],
                   help="marginal-likelihood estimator (default importance)")
    p.add_argument("--draws", type=int, default=100_000,
                   help="importance-sampling draws (default 100000)")
    p.add_argument("--seed", type=int, default=42,
                   help="master seed; all randomness derives from it (default 42)")
    p.add_argument("--chains", type=int, default=4, help="MCMC chains (default 4)")
    p.add_argument("--keep", type=int, default=25_000,
                   help="kept MCMC draws per chain (default 25000)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repbf",
        description="Replication Bayes factors for t tests and fixed-effect ANOVA F tests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_f = sub.add_parser("f", help="replication Bayes factor for an F-test pair")
    p_f.add_argument("--f-orig", type=float, required=True, help="original F value")
    p_f.add_argument("--df-effect", type=float, required=True,
                     help="effect (numerator) df, shared by both studies")
    p_f.add_argument("--df-error-orig", type=float, required=True)
    p_f.add_argument("--n-orig", type=int, required=True, help="original total N")
    p_f.add_argument("--f-rep", type=float, required=True, help="replication F value")
    p_f.add_argument("--df-error-rep", type=float, required=True)
    p_f.add_argument("--n-rep", type=int, required=True, help="replication total N")
    p_f.add_argument("--df-effect-rep", type=float, default=None,
                     help="replication effect df if it differs from --df-effect")
    p_f.add_argument("--format", default="text", choices=["text", "json"])
    _add_common(p_f)

    p_t = sub.add_parser("t", help="replication Bayes factor for a t-test pair")
    p_t.add_argument("--t-orig", type=float, required=True)
    p_t.add_argument("--df-orig", type=float, required=True,
                     help="original df (non-integer Welch df accepted)")
    p_t.add_argument("--n1-orig", type=int, required=True)
    p_t.add_argument("--n2-orig", type=int, default=0,
                     help="group 2 size; omit for one-sample designs")
    p_t.add_argument("--t-rep", type=float, required=True)
    p_t.add_argument("--df-rep", type=float, required=True)
    p_t.add_argument("--n1-rep", type=int, required=True)
    p_t.add_argument("--n2-rep", type=int, default=0)
    p_t.add_argument("--t-posterior", default="exact", choices=["exact", "normal"],
                     help="posterior handling: exact MCMC (default) or normal approximation")
    p_t.add_argument("--format", default="text", choices=["text", "json"])
    _add_common(p_t)

    p_b = sub.add_parser(
        "batch", help="process a CSV of study pairs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=_BATCH_HELP,
    )
    p_b.add_argument("input", help="input CSV path")
    p_b.add_argument("--output", default="-", help="output CSV path (default stdout)")
    _add_common(p_b)

    p_s = sub.add_parser("sim", help="emit a simulation grid as CSV")
    p_s.add_argument("which", type=int, choices=[1, 2, 3])
    p_s.add_argument("--output", default="-", help="output CSV path (default stdout)")
    p_s.add_argument("--seed", type=int, default=42)
    p_s.add_argument("--draws", type=int, default=20_000)
    p_s.add_argument("--estimator", default="quadrature",
                     choices=["importance", "monte_carlo", "quadrature"],
                     help="estimator for sims 1 and 3 (sim 2 compares its own; "
                          "default quadrature, which is exact and noise-free)")
    p_s.add_argument("--strict", action="store_true",
                     help="exit 3 if any cell fails instead of flagging its row")
    p_s.add_argument("--groups", type=_int_list, default=None,
                     help="comma list of group counts (sim 1)")
    p_s.add_argument("--n-orig", type=_int_list, default=None,
                     help="comma list of original per-group sizes")
    p_s.add_argument("--n-rep", type=_int_list, default=None,
                     help="comma list of replication per-group sizes")
    p_s.add_argument("--es-orig", type=_float_list, default=None,
                     help="comma list of original f squared values (sim 1)")
    p_s.add_argument("--es-rep", type=_float_list, default=None,
                     help="comma list of replication f squared values (sim 1)")
    p_s.add_argument("--d-orig", type=_float_list, default=None,
                     help="comma list of original Cohen's d values (sims 2-3)")
    p_s.add_argument("--d-rep", type=_float_list, default=None,
                     help="comma list of replication Cohen's d values (sims 2-3)")
    return parser


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _print_result(result: RepBFResult, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(result.as_dict()) + "\n")
        return
    rows = [
        ("B_r0", f"{result.br0:.6g}"),
        ("log10(B_r0)", f"{result.log10_br0:.6g}"),
        ("interpretation", result.interpretation),
        ("log numerator", f"{result.log_numerator:.6g}"),
        ("log denominator", f"{result.log_denominator:.6g}"),
        ("mc_se_log", f"{result.mc_se_log:.6g}"),
        ("estimator", result.estimator),
        ("draws", str(result.n_draws)),
        ("seed", str(result.seed)),
    ]
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        out.write(f"{key:<{width}}  {val}\n")


def _cmd_f(args, out) -> int:
    _require(args.f_orig >= 0, "--f-orig", "must be >= 0")
    _require(args.f_rep >= 0, "--f-rep", "must be >= 0")
    _require(args.df_effect >= 1, "--df-effect", "must be >= 1")
    _require(args.df_error_orig >= 1, "--df-error-orig", "must be >= 1")
    _require(args.df_error_rep >= 1, "--df-error-rep", "must be >= 1")
    _require(args.n_orig >= args.df_effect + 2, "--n-orig", "must be >= df_effect + 2")
    _require(args.n_rep >= args.df_effect + 2, "--n-rep", "must be >= df_effect + 2")
    _require(args.draws >= 2, "--draws", "must be >= 2")
    _require(args.seed >= 0, "--seed", "must be a nonnegative integer")
    df_effect_rep = args.df_effect if args.df_effect_rep is None else args.df_effect_rep
    orig = FTestStudy(args.f_orig, args.df_effect, args.df_error_orig, args.n_orig)
    rep = FTestStudy(args.f_rep, df_effect_rep, args.df_error_rep, args.n_rep)
    result = repbf_f(
        orig, rep, estimator=args.estimator, n_draws=args.draws, seed=args.seed,
        n_chains=args.chains, n_keep=args.keep,
    )
    _print_result(result, args.format, out)
    return 0


def _cmd_t(args, out) -> int:
    _require(args.df_orig > 0, "--df-orig", "must be positive")
    _require(args.df_rep > 0, "--df-rep", "must be positive")
    _require(args.n1_orig >= 2, "--n1-orig", "must be >= 2")
    _require(args.n1_rep >= 2, "--n1-rep", "must be >= 2")
    _require(args.n2_orig == 0 or args.n2_orig >= 2, "--n2-orig", "must be 0 or >= 2")
    _require(args.n2_rep == 0 or args.n2_rep >= 2, "--n2-rep", "must be 0 or >= 2")
    _require(args.draws >= 2, "--draws", "must be >= 2")
    _require(args.seed >= 0, "--seed", "must be a nonnegative integer")
    orig = TTestStudy(args.t_orig, args.df_orig, args.n1_orig, args.n2_orig)
    rep = TTestStudy(args.t_rep, args.df_rep, args.n1_rep, args.n2_rep)
    result = repbf_t(
        orig, rep, estimator=args.estimator, n_draws=args.draws, seed=args.seed,
        n_chains=args.chains, n_keep=args.keep, t_posterior=args.t_posterior,
    )
    _print_result(result, args.format, out)
    return 0


def _parse_batch_row(row: dict):
    test = (row.get("test") or "").strip().lower()
    if test not in ("t", "f"):
        raise ValidationError(f"test must be 't' or 'f', got {row.get('test')!r}")

    def num(col, required=True, integer=False, default=None):
        raw = (row.get(col) or "").strip()
        if not raw:
            if required:
                raise ValidationError(f"column {col} is required for test={test}")
            return default
        try:
            return int(raw) if integer else float(raw)
        except ValueError as exc:
            raise ValidationError(f"column {col}: not a number: {raw!r}") from exc

    if test == "f":
        orig = FTestStudy(
            num("stat_orig"), num("df_num_orig"), num("df_den_orig"),
            num("n_orig", integer=True),
        )
        rep = FTestStudy(
            num("stat_rep"), num("df_num_rep"), num("df_den_rep"),
            num("n_rep", integer=True),
        )
    else:
        orig = TTestStudy(
            num("stat_orig"), num("df_den_orig"),
            num("n_orig", integer=True),
            num("n2_orig", required=False, integer=True, default=0) or 0,
        )
        rep = TTestStudy(
            num("stat_rep"), num("df_den_rep"),
            num("n_rep", integer=True),
            num("n2_rep", required=False, integer=True, default=0) or 0,
        )
    return test, orig, rep


def _cmd_batch(args, out) -> int:
    try:
        handle = open(args.input, newline="", encoding="utf-8")
    except OSError as exc:
        raise _FlagError(f"input: cannot read {args.input}: {exc}") from exc
    with handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [c for c in BATCH_COLUMNS if c not in header]
        if missing:
            raise _FlagError(f"input: header lacks required columns {missing}")
        in_rows = list(reader)

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BATCH_COLUMNS + BATCH_RESULT_COLUMNS)
    for row in in_rows:
        base = [_fmt(row.get(c, "")) for c in BATCH_COLUMNS]
        try:
            test, orig, rep = _parse_batch_row(row)
            fn = repbf_f if test == "f" else repbf_t
            res = fn(orig, rep, estimator=args.estimator, n_draws=args.draws,
                     seed=args.seed, n_chains=args.chains, n_keep=args.keep)
            writer.writerow(base + [
                _fmt(res.br0), _fmt(res.log10_br0), _fmt(res.mc_se_log),
                res.interpretation, "ok",
            ])
        except ReplicationBFError as exc:
            writer.writerow(base + ["", "", "", "", f"error: {exc}"])
    return 0


_SIM_COLUMNS = {
    1: ["n_groups", "n_orig", "f2_orig", "n_rep", "f2_rep",
        "br0", "log10_br0", "mc_se_log", "interpretation", "status"],
    2: ["n_orig", "d_orig", "n_rep", "d_rep", "br0_mc", "br0_is",
        "log10_br0_mc", "log10_br0_is", "mc_se_log_mc", "mc_se_log_is",
        "ess_is", "status"],
    3: ["row_type", "n_orig", "d_orig", "n_rep", "d_rep",
        "br0_t", "br0_f", "ratio_t_f", "status",
        "pearson_r_log10", "mean_ratio_t_f"],
}


def _sim_grid(args) -> ScenarioGrid:
    default = {1: default_grid_sim1, 2: default_grid_sim2, 3: default_grid_sim3}[args.which]()
    changes = {}
    if args.n_orig is not None:
        changes["n_orig_per_group"] = args.n_orig
    if args.n_rep is not None:
        changes["n_rep_per_group"] = args.n_rep
    if args.which == 1:
        if args.groups is not None:
            changes["n_groups"] = args.groups
        if args.es_orig is not None:
            changes["es_orig"] = args.es_orig
        if args.es_rep is not None:
            changes["es_rep"] = args.es_rep
    else:
        if args.d_orig is not None:
            changes["es_orig"] = args.d_orig
        if args.d_rep is not None:
            changes["es_rep"] = args.d_rep
    if not changes:
        return default
    fields = {
        "design": default.design,
        "n_orig_per_group": default.n_orig_per_group,
        "n_rep_per_group": default.n_rep_per_group,
        "es_orig": default.es_orig,
        "es_rep": default.es_rep,
        "n_groups": default.n_groups,
        "skip_smaller_reps": default.skip_smaller_reps,
    }
    fields.update(changes)
    return ScenarioGrid(**fields)


def _cmd_sim(args, out) -> int:
    _require(args.seed >= 0, "--seed", "must be a nonnegative integer")
    _require(args.draws >= 2, "--draws", "must be >= 2")
    grid = _sim_grid(args)
    columns = _SIM_COLUMNS[args.which]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)

    if args.which == 1:
        rows = run_simulation_1(grid, estimator=args.estimator,
                                n_draws=args.draws, seed=args.seed)
    elif args.which == 2:
        rows = run_simulation_2(grid, n_draws=args.draws, seed=args.seed)
    else:
        rows, summary = run_simulation_3(grid, estimator=args.estimator,
                                         n_draws=args.draws, seed=args.seed)
        for r in rows:
            r["row_type"] = "cell"
            r["pearson_r_log10"] = None
            r["mean_ratio_t_f"] = None

    for r in rows:
        writer.writerow([_fmt(r.get(c)) for c in columns])
    if args.which == 3:
        footer = {c: None for c in columns}
        footer.update(
            row_type="summary", status="ok",
            pearson_r_log10=summary["pearson_r_log10"],
            mean_ratio_t_f=summary["mean_ratio_t_f"],
        )
        writer.writerow([_fmt(footer.get(c)) for c in columns])

    failed = [r for r in rows if r.get("status") != "ok"]
    if failed and args.strict:
        print(f"numerical failure in {len(failed)} grid cell(s)", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"f": _cmd_f, "t": _cmd_t, "batch": _cmd_batch, "sim": _cmd_sim}
    needs_file = args.command in ("batch", "sim") and args.output != "-"
    try:
        with contextlib.ExitStack() as stack:
            if needs_file:
                out = stack.enter_context(
                    open(args.output, "w", newline="", encoding="utf-8")
                )
            else:
                out = sys.stdout
            return handlers[args.command](args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

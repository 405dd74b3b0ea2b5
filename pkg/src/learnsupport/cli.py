"""Command-line entry point: ``learnsupport <subcommand> [options]``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import estimators as est
from . import harness
from .distributions import FormatError, build_hard_instance, save_distribution, zipf_distribution
from .predictors import save_predictor_table
from .sampling import AliasSampler, load_counts, make_rng


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _sibling(out: str, suffix: str) -> Path:
    p = Path(out)
    return p.with_name(f"{p.stem}{suffix}{p.suffix or '.csv'}")


def _parse_bases(spec: str) -> list[float]:
    """``2:20`` (inclusive integer range) or a comma list such as ``2,3,4.5``."""
    if ":" in spec:
        lo, hi = spec.split(":")
        return [float(b) for b in range(int(lo), int(hi) + 1)]
    return [float(b) for b in spec.split(",") if b.strip()]


def _config(args, **extra) -> harness.ExperimentConfig:
    overrides = dict(master_seed=args.seed, **extra)
    if args.config:
        return harness.load_config(args.config, **overrides)
    return harness.ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def cmd_gen_zipf(args) -> None:
    d = zipf_distribution(args.domain, args.exponent)
    if args.out is None:
        sys.stdout.write("id,prob\n" + "".join(f"{i},{p:.16e}\n" for i, p in zip(d.ids, d.probs)))
    else:
        save_distribution(d, args.out)


def cmd_gen_hard_instance(args) -> None:
    pair = build_hard_instance(args.k, args.n)
    out = args.out or f"hard_k{args.k}.csv"
    save_distribution(pair.P, _sibling(out, "_P"))
    save_distribution(pair.Q, _sibling(out, "_Q"))
    print(f"k={pair.k} n={pair.n} eps={pair.eps!r} support_P={pair.P.support_size} "
          f"support_Q={pair.Q.support_size} before_padding_P={pair.main_support[0]} "
          f"before_padding_Q={pair.main_support[1]}", file=sys.stderr)


def cmd_gen_predictor(args) -> None:
    d = harness.resolve_distribution(args.distribution)
    seed = 0 if args.seed is None else args.seed
    pred = harness.resolve_predictor(args.predictor, d, seed)
    if pred is None:
        raise harness.ConfigError("predictor: 'none' has no table")
    out = args.out
    if out is None:
        sys.stdout.write("id,predicted_prob\n" + "".join(f"{i},{v:.16e}\n" for i, v in pred.items()))
    else:
        save_predictor_table(pred, out)


def cmd_estimate(args) -> None:
    if args.counts:
        counts = load_counts(args.counts)
        if args.n is None:
            raise harness.ConfigError("n: required with --counts")
        d, n = None, args.n
    else:
        if not args.distribution or not args.sample_size:
            raise harness.ConfigError("estimate: give --counts, or --distribution with --sample-size")
        d = harness.resolve_distribution(args.distribution, args.n)
        n = args.n or d.n
        seed = 0 if args.seed is None else args.seed
        counts = AliasSampler(d).draw(args.sample_size, make_rng(seed, 0, 0))
    L = args.degree if args.degree is not None else est.default_degree(n)
    lines = []
    if args.estimator in ("learned", "cr"):
        if not args.predictor:
            raise harness.ConfigError("predictor: required by the learned and cr estimators")
        if d is None and not args.predictor.startswith("table:"):
            raise harness.ConfigError("predictor: only table:<path> works with --counts")
        pred = harness.resolve_predictor(args.predictor, d, 0 if args.seed is None else args.seed, n)
    if args.estimator == "learned":
        values = pred.predict(counts.ids)
        if args.base is None:
            sel = est.select_base(counts, values, n, L)
            b = sel.b_final
        else:
            b = args.base
        rep = est.learned_estimate(counts, values, n, b, L)
        lines.append("j,left,right,mode,estimate,occupancy,sanity_ok")
        lines += [f"{iv.j},{iv.left!r},{iv.right!r},{iv.mode},{iv.estimate!r},{iv.occupancy},"
                  f"{int(iv.sanity_ok)}" for iv in rep.intervals]
        raw, clamped = rep.estimate, rep.clamped_estimate
        print(f"base={b!r} degree={L} failing_fraction={rep.failing_fraction!r}", file=sys.stderr)
    elif args.estimator == "wy":
        rep = est.wy_estimate(counts, n, L)
        raw, clamped = rep.estimate, rep.clamped_estimate
    elif args.estimator == "cr":
        raw = est.cr_estimate(counts, pred, n)
        clamped = est.clamp_estimate(raw, counts.distinct, n)
    else:
        raw = float(counts.distinct)
        clamped = raw
    lines.append("estimator,estimate_raw,estimate_clamped,distinct_seen,sample_size,n")
    lines.append(f"{args.estimator},{float(raw)!r},{float(clamped)!r},{counts.distinct},"
                 f"{counts.total},{n}")
    _emit("\n".join(lines) + "\n", args.out)


def cmd_experiment(args) -> None:
    cfg = _config(args, workers=args.workers, trials=args.trials)
    rows, summary = harness.run_experiment(cfg)
    if args.out is None:
        sys.stdout.write(harness.format_csv(harness.ROW_HEADER, rows))
        sys.stdout.write("\n" + harness.format_csv(harness.SUMMARY_HEADER, summary))
    else:
        harness.write_csv(args.out, harness.ROW_HEADER, rows)
        harness.write_csv(_sibling(args.out, "_summary"), harness.SUMMARY_HEADER, summary)


def cmd_base_sweep(args) -> None:
    cfg = _config(args, workers=args.workers, trials=args.trials)
    rows = harness.base_sweep(cfg, _parse_bases(args.bases))
    _emit(harness.format_csv(harness.SWEEP_HEADER, rows), args.out)


def build_parser() -> argparse.ArgumentParser:
    def global_flags(p, default):
        p.add_argument("--seed", type=int, default=default, help="master seed")
        p.add_argument("--out", default=default, help="output path (stdout if omitted)")
        p.add_argument("--config", default=default, help="flat key=value config file")

    # Global flags are accepted before or after the subcommand; the subcommand
    # copy suppresses defaults so it cannot clobber an earlier value.
    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, argparse.SUPPRESS)
    parser = argparse.ArgumentParser(prog="learnsupport",
                                     description="Support-size estimation toolkit.")
    global_flags(parser, None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-zipf", parents=[common], help="write a Zipf distribution file")
    p.add_argument("--domain", type=int, required=True)
    p.add_argument("--exponent", type=float, required=True)
    p.set_defaults(func=cmd_gen_zipf)

    p = sub.add_parser("gen-hard-instance", parents=[common],
                       help="write a pair of moment-matching distributions (_P and _Q files)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_gen_hard_instance)

    p = sub.add_parser("gen-predictor", parents=[common], help="write a predictor table")
    p.add_argument("--distribution", required=True,
                   help="zipf:<m>:<s>, hard:<k>:<n>:<P|Q>, tokens:<path> or a distribution file")
    p.add_argument("--predictor", required=True, help="oracle, noisy:<b>, empirical:<fraction>")
    p.set_defaults(func=cmd_gen_predictor)

    p = sub.add_parser("estimate", parents=[common], help="estimate the support size of one sample")
    p.add_argument("--counts", default=None, help="id,count sample file")
    p.add_argument("--distribution", default=None, help="draw a sample from this distribution")
    p.add_argument("--sample-size", type=int, default=None)
    p.add_argument("--n", type=int, default=None, help="minimum-probability bound 1/n")
    p.add_argument("--estimator", choices=harness.ESTIMATORS, default="learned")
    p.add_argument("--predictor", default=None)
    p.add_argument("--base", type=float, default=None, help="fixed base (default: automatic)")
    p.add_argument("--degree", type=int, default=None)
    p.set_defaults(func=cmd_estimate)

    for name, func, help_ in (("experiment", cmd_experiment, "multi-trial experiment"),
                              ("base-sweep", cmd_base_sweep, "error versus base")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        if name == "base-sweep":
            p.add_argument("--bases", default="2:20", help="lo:hi or comma list")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("experiment", "base-sweep") and not args.config:
        parser.error("--config is required for this subcommand")
    try:
        args.func(args)
    except (harness.ConfigError, FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

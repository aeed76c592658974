"""Command-line front end: ``swaptest {test,simulate,power,multitest,experiment}``."""
from __future__ import annotations

import argparse
import csv
import json
import sys

from . import __version__
from .core import FeaturePair, ValidationError, format_csv, load_vector, read_csv, write_csv
from .engine import TestConfig, run_test
from .harness import WORKERS_ENV, ExperimentConfig, run_experiment
from .multiplicity import PvalueBatch, benjamini_yekutieli
from .power import PowerQuery, min_gap_binary, min_gap_linear, odc_deviation_binary, odc_deviation_linear, rho_n
from .scores import CLASSIFICATION_MARGIN, LINEAR_RESIDUAL, SQUARED_RESIDUAL, ScoreFunction
from .simgen import GENERATOR_KINDS, GeneratorSpec, normalized_ramp


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_test(args):
    data = read_csv(args.data)
    if args.shuffle_seed is not None:
        data = data.shuffled(args.shuffle_seed)
    pair = FeaturePair.from_one_based(args.i, args.j)
    score = ScoreFunction(args.score, load_vector(args.theta_hat))
    cfg = TestConfig(tau=args.tau, tau_x=args.tau_x, alpha=args.alpha, seed=args.seed)
    _emit(run_test(data, pair, score, cfg).to_dict())


def cmd_simulate(args):
    params = {}
    if args.kind == "linear":
        if args.theta_star is None:
            raise ValidationError("--theta-star is required for the linear generator")
        params = {"theta_star": load_vector(args.theta_star).tolist(), "sigma": args.sigma}
    elif args.kind == "quadratic-null":
        params = {"d": args.d}
    elif args.kind == "gmm":
        mu = load_vector(args.mu) if args.mu is not None else normalized_ramp(args.d)
        params = {"mu": mu.tolist(), "q": args.q}
    else:
        if args.w is None:
            raise ValidationError("--w is required for the subset-binary generator")
        params = {"d": args.d, "m": args.m, "w": load_vector(args.w).tolist(), "sigma": args.sigma}
    data = GeneratorSpec(args.kind, params, args.seed).generate(args.n)
    if args.output:
        write_csv(data, args.output)
    else:
        sys.stdout.write(format_csv(data))


def cmd_power(args):
    q = PowerQuery(args.n, args.alpha, args.beta, args.tau)
    pair = FeaturePair.from_one_based(args.i, args.j)
    theta_hat = load_vector(args.theta_hat)
    out = {"setting": args.setting, "rho_n": rho_n(q)}
    if args.setting == "linear":
        if args.theta_star is None:
            raise ValidationError("--theta-star is required for the linear setting")
        theta_star = load_vector(args.theta_star)
        out["odc_deviation"] = odc_deviation_linear(theta_star, theta_hat, args.sigma, pair)
        gap = min_gap_linear(q, theta_star, theta_hat, args.sigma, pair)
    else:
        out["rho_n"] = rho_n(PowerQuery(args.n, args.alpha, args.beta, 0.0))
        if args.mu is not None:
            out["odc_deviation"] = odc_deviation_binary(load_vector(args.mu), theta_hat, pair)
        gap = min_gap_binary(q, theta_hat, pair)
    out["min_gap"] = gap
    out["feasible"] = gap is not None
    _emit(out)


def _read_pvalues(path):
    ids, pvals = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for record in reader:
            lineno = reader.line_num
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != 2:
                raise ValidationError(f"{path}: line {lineno}: expected 2 fields (id,p), got {len(record)}")
            key, text = record[0].strip(), record[1].strip()
            try:
                p = float(text)
            except ValueError:
                if lineno == 1 and not ids:
                    continue  # header
                raise ValidationError(f"{path}: line {lineno}: p-value is not a number: {text!r}") from None
            if not 0.0 < p <= 1.0:
                raise ValidationError(f"{path}: line {lineno}: p-value {p} outside (0, 1]")
            ids.append(key)
            pvals.append(p)
    if not ids:
        raise ValidationError(f"{path}: no p-values found")
    return ids, pvals


def cmd_multitest(args):
    ids, pvals = _read_pvalues(args.batch)
    rejected = benjamini_yekutieli(PvalueBatch.from_pairs(ids, pvals, args.q))
    order = sorted(range(len(ids)), key=lambda k: (pvals[k], ids[k]))
    _emit(
        {
            "q": args.q,
            "m": len(ids),
            "n_rejected": len(rejected),
            "rejected": [ids[k] for k in order if ids[k] in rejected],
        }
    )


def cmd_experiment(args):
    cfg = ExperimentConfig.from_json(args.config)
    if args.output:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "output": args.output})
    if args.replicates:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "replicates": args.replicates})
    res = run_experiment(cfg, workers=args.workers)
    if not cfg.output:
        _emit(res.summary)
    else:
        _emit({"output": cfg.output, "experiment": cfg.experiment})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swaptest", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test one feature pair on a CSV dataset")
    t.add_argument("data", help="CSV with header x1,...,xd,y")
    t.add_argument("--i", type=int, required=True, help="first feature (1-based)")
    t.add_argument("--j", type=int, required=True, help="second feature (1-based)")
    t.add_argument(
        "--score",
        default=LINEAR_RESIDUAL,
        choices=[LINEAR_RESIDUAL, SQUARED_RESIDUAL, CLASSIFICATION_MARGIN],
    )
    t.add_argument("--theta-hat", required=True, help="JSON array or single-column CSV path")
    t.add_argument("--tau", type=float, default=0.0)
    t.add_argument("--tau-x", type=float, default=0.0)
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--seed", type=int, default=0, help="seed of the tie-breaking coins")
    t.add_argument("--shuffle-seed", type=int, default=None, help="permute rows before pairing")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="write a synthetic dataset as CSV")
    s.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--d", type=int, default=10)
    s.add_argument("--m", type=int, default=5, help="ones per row (subset-binary)")
    s.add_argument("--theta-star", help="JSON array or CSV path (linear)")
    s.add_argument("--w", help="JSON array or CSV path (subset-binary)")
    s.add_argument("--mu", help="JSON array or CSV path (gmm; default normalized 1..d)")
    s.add_argument("--q", type=float, default=0.5, help="P(y = +1) (gmm)")
    s.add_argument("--sigma", type=float, default=1.0, help="noise standard deviation")
    s.add_argument("-o", "--output", help="output CSV (default stdout)")
    s.set_defaults(func=cmd_simulate)

    p = sub.add_parser("power", help="power and minimum detectable gap calculator")
    p.add_argument("--setting", required=True, choices=["linear", "binary"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--theta-hat", required=True)
    p.add_argument("--theta-star", help="required for --setting linear")
    p.add_argument("--sigma", type=float, default=1.0, help="noise level (linear)")
    p.add_argument("--mu", help="mixture mean, for the ODC deviation (binary)")
    p.set_defaults(func=cmd_power)

    m = sub.add_parser("multitest", help="Benjamini-Yekutieli over a CSV of (id, p)")
    m.add_argument("batch")
    m.add_argument("--q", type=float, default=0.1)
    m.set_defaults(func=cmd_multitest)

    e = sub.add_parser("experiment", help="run a JSON-configured simulation experiment")
    e.add_argument("config")
    e.add_argument("--workers", type=int, default=None, help=f"default: ${WORKERS_ENV} or 1")
    e.add_argument("--output", help="override the config's output directory")
    e.add_argument("--replicates", type=int, default=None, help="override the replicate count")
    e.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"swaptest {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

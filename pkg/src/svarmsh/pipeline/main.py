import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from src.svarmsh.inference import DEFAULT_IMPORTANCE_DRAWS, MDD_BATCHES, SDDR_BATCHES
from src.svarmsh.pipeline.commands import (
    cmd_compare,
    cmd_estimate,
    cmd_identify,
    cmd_mdd,
    cmd_sddr,
    cmd_simulate,
)
from src.svarmsh.pipeline.run_config import RunConfig
from src.svarmsh.pipeline.truth import TruthConfig


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="INI run configuration.")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--chains", type=int)
    parser.add_argument("--draws", type=int)
    parser.add_argument("--burn", type=int)
    parser.add_argument("--scheme", help="Preset name or file:<Q.csv>,<q.csv>.")
    parser.add_argument("--restricted-rows", dest="restricted_rows", help="'all' or one-based rows, e.g. 4.")
    parser.add_argument("--out", type=Path, help="Output directory.")
    parser.add_argument("--data", type=Path, help="Data CSV, overriding [data] path.")


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="svarmsh",
        description="Bayesian SVARs identified through Markov-switching heteroskedasticity.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log progress to stderr.")
    verbs = parser.add_subparsers(dest="verb", required=True)

    estimate = verbs.add_parser("estimate", help="Run the Gibbs sampler and summarize the posterior.")
    _add_run_flags(estimate)

    sddr = verbs.add_parser("sddr", help="Savage-Dickey density ratios for relative-variance hypotheses.")
    _add_run_flags(sddr)
    sddr.add_argument(
        "--hypothesis",
        dest="hypotheses",
        action="append",
        default=None,
        help="e.g. identification:all-pairs, homoskedasticity:each, homoskedasticity:joint:all.",
    )
    sddr.add_argument("--store", type=Path, help="Draw store; defaults to <out>/draws.")
    sddr.add_argument("--batches", type=int, default=SDDR_BATCHES)

    mdd = verbs.add_parser("mdd", help="Log marginal data densities of one draw store per scheme.")
    _add_run_flags(mdd)
    mdd.add_argument("stores", nargs="*", type=Path, help="Draw store directories.")
    mdd.add_argument("--importance-draws", dest="importance_draws", type=int, default=DEFAULT_IMPORTANCE_DRAWS)
    mdd.add_argument("--batches", type=int, default=MDD_BATCHES)

    simulate = verbs.add_parser("simulate", help="Simulate a data set from known parameters.")
    simulate.add_argument("--truth", type=Path, help="JSON truth file; defaults to a two-variable system.")
    simulate.add_argument("--T", dest="T", type=int)
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--out", type=Path, default=Path("simulated"))

    identify = verbs.add_parser("identify", help="Uniqueness of A0 from a draw store or a variance file.")
    identify.add_argument("source", type=Path, help="Draw store directory or M x N variance CSV.")
    identify.add_argument("--target", help="Equation (name or one-based index) to carry the largest relative variance.")
    identify.add_argument("--tol", type=float, default=1e-6)
    identify.add_argument("--out", type=Path, default=Path("results"))

    compare = verbs.add_parser("compare", help="Rank saved MDD results.")
    compare.add_argument("results", nargs="+", type=Path, help="mdd.json files.")
    compare.add_argument("--out", type=Path, default=Path("results"))

    return parser.parse_args(argv)


def _run_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    return config.with_overrides(
        seed=args.seed,
        chains=args.chains,
        draws=args.draws,
        burn=args.burn,
        scheme=args.scheme,
        restricted_rows=args.restricted_rows,
        out=args.out,
        data=args.data,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the svarmsh command."""
    args = _parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")

    try:
        if args.verb == "estimate":
            cmd_estimate(_run_config(args))
        elif args.verb == "sddr":
            hypotheses = args.hypotheses or ["identification:all-pairs", "homoskedasticity:each"]
            cmd_sddr(_run_config(args), hypotheses, store_dir=args.store, n_batches=args.batches)
        elif args.verb == "mdd":
            cmd_mdd(
                _run_config(args),
                args.stores,
                n_importance=args.importance_draws,
                n_batches=args.batches,
            )
        elif args.verb == "simulate":
            truth = TruthConfig.from_json(args.truth) if args.truth else TruthConfig.default()
            cmd_simulate(truth, args.out, T=args.T, seed=args.seed)
        elif args.verb == "identify":
            cmd_identify(args.source, args.out, target=args.target, tol=args.tol)
        elif args.verb == "compare":
            cmd_compare(args.results, args.out)
    except ValueError as e:
        # configuration, data format and model precondition errors
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError) as e:
        print(f"FATAL ERROR: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

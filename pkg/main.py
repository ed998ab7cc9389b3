# main script to run the cqmeta experiments

import sys
from pathlib import Path
from typing import List, Optional
import argparse
import logging

from cqmeta.cqmeta.core.experiments import EXIT_CONVERGENCE, EXIT_INPUT, ExperimentRunner
from cqmeta.cqmeta.exceptions import ConvergenceError, CqMetaError, ParameterError
from cqmeta.cqmeta.models.data_models import Command, RunConfig, SweepGrid, default_threads

EPILOG = """\
bell_sweep CSV columns:
  family, n_qubits, M, param, pe_solver, pe_formula, meta_converse,
  closed_form, status, max_deviation, error
figure1 CSV columns:
  t, objective_mu0star, objective_mu0avg

exit codes: 0 success, 1 code certified neither / negative result,
            2 input error, 3 solver did not converge
"""


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Meta-converse bounds and quasi-perfect codes for classical-quantum channels",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=[c.value for c in Command], help="The experiment to run")
    parser.add_argument("--channel", type=str, help="Channel descriptor (JSON) for certify")
    parser.add_argument("--code", type=str, help="Code descriptor (JSON) for certify")
    parser.add_argument("--problem", type=str, help="M-ary problem descriptor (JSON) for solve")
    parser.add_argument("--mu", type=str, default="maximally_mixed",
                        help="maximally_mixed, output_average, closed_form or a JSON matrix file")
    parser.add_argument("--out", type=str, help="Output file (stdout when omitted)")
    parser.add_argument("--format", choices=["csv", "json"], default=None,
                        help="Output format (csv for figure1 and bell_sweep, json otherwise)")
    parser.add_argument("--tol", type=float, default=1e-8, help="HYKL tolerance of the solver")
    parser.add_argument("--max-iter", type=int, default=20000, help="Solver iteration budget")
    parser.add_argument("--grid", type=str, help="Noise grid name:start:stop:steps for bell_sweep")
    parser.add_argument("--family", choices=["ideal", "depolarizing", "erasure"], default="ideal")
    parser.add_argument("--n-qubits", type=int, default=2, help="Number of qubits N of the Bell code")
    parser.add_argument("--m-values", type=str, default="4,6,8,16", help="Comma separated code sizes")
    parser.add_argument("--t-steps", type=int, default=121, help="Grid points of figure1 on [0, 1.2]")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (default CQMETA_THREADS)")
    parser.add_argument("--log-level", type=str, default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("-v", "--verbose", action="store_true", help="Shortcut for --log-level INFO")
    return parser.parse_args(argv)


def build_config(args: argparse.Namespace) -> RunConfig:
    command = Command(args.command)
    output_format = args.format
    if output_format is None:
        output_format = "csv" if command in (Command.FIGURE1, Command.BELL_SWEEP) else "json"
    try:
        m_values = [int(v) for v in args.m_values.split(",") if v.strip()]
    except ValueError:
        raise ParameterError(f"--m-values must be comma separated integers, got {args.m_values!r}") from None
    return RunConfig(
        command=command,
        channel_path=Path(args.channel) if args.channel else None,
        code_path=Path(args.code) if args.code else None,
        problem_path=Path(args.problem) if args.problem else None,
        mu_spec=args.mu,
        sweep=SweepGrid.parse(args.grid) if args.grid else None,
        output_path=Path(args.out) if args.out else None,
        output_format=output_format,
        tolerance=args.tol,
        max_iter=args.max_iter,
        threads=args.threads if args.threads is not None else default_threads(),
        family=args.family,
        n_qubits=args.n_qubits,
        m_values=m_values,
        t_steps=args.t_steps,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    level = "INFO" if args.verbose and args.log_level == "WARNING" else args.log_level
    logging.basicConfig(level=getattr(logging, level), format="%(levelname)s %(name)s: %(message)s")
    logger = logging.getLogger("cqmeta")

    try:
        runner = ExperimentRunner(build_config(args))
        return runner.run()
    except ConvergenceError as e:
        logger.error(str(e))
        return EXIT_CONVERGENCE
    except (CqMetaError, OSError) as e:
        logger.error(str(e))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

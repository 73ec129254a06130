"""lacunaria: experiments on psi-lacunary sequences, semigroup BMO and Sidon sets in free groups.

Each subcommand runs one experiment and writes a single report to stdout
(JSON by default, CSV with --format csv); logs go to stderr. Exit codes:
0 success, 1 usage/input/budget/convergence error, 2 the mathematical
check ran and failed.
"""

import os
import sys
import logging
import argparse
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from src.analysis.lacunary import lacunarity_constants, verify_schur_bound
from src.analysis.semigroup_bmo import (
    bmo_estimate, bmo_lower_witness, corollary1_check, support_t_grid, theorem1_certificate, torus_bmo_sweep
)
from src.common.config import ExperimentConfig, budget_scope, parse_grid
from src.common.error_handler import handle_errors, log_experiment
from src.common.errors import ConfigError, LacunariaError
from src.common.formats import read_element, read_phi, read_word_list
from src.groups.lengths import (
    check_conditionally_negative, check_subadditive, check_symmetry_unitality, length_from_name
)
from src.groups.words import enumerate_ball, format_word
from src.reports.report_service import ReportService
from src.sidon.folding import is_free_basis
from src.sidon.sidon_sets import (
    SymmetricWordSpec, count_intersection, freeness_bruteforce, generate_qn, greedy_lacunary_cover,
    lambda_infty_witness, qn_image_ball, unconditionality_witness
)

__version__ = '0.1.0'

PROG = 'lacunaria'
LOG_LEVEL_ENV_VAR = 'LACUNARIA_LOG_LEVEL'

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2

logger = logging.getLogger(__name__)


@dataclass
class Outcome:
    """What a subcommand hands back to the reporter."""
    payload: Dict[str, Any]
    passed: bool = True
    rows: List[Dict[str, Any]] = field(default_factory=list)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _require(config: ExperimentConfig, name: str, flag: str) -> str:
    value = getattr(config, name)
    if not value:
        raise ConfigError(f"--{flag} is required for this subcommand")
    return value


@log_experiment('cn-check')
@handle_errors('cn-check')
def run_cn_check(config: ExperimentConfig) -> Outcome:
    psi = length_from_name(config.psi)
    ball = enumerate_ball(config.rank, config.ball)
    verdict = check_conditionally_negative(psi, ball)
    symmetry = check_symmetry_unitality(psi, ball)
    subadditivity = check_subadditive(psi, ball)
    payload = {
        'psi': psi.name,
        'words': len(ball),
        'cn': verdict.to_dict(),
        'symmetry': symmetry.to_dict(),
        'subadditivity': subadditivity.to_dict(),
    }
    rows = []
    if verdict.witness is not None:
        rows = [{'word': format_word(w), 'coefficient': float(a)}
                for w, a in zip(verdict.witness.words, verdict.witness.coefficients)]
    return Outcome(payload, verdict.passed and symmetry.passed, rows)


@log_experiment('lacunarity')
@handle_errors('lacunarity')
def run_lacunarity(config: ExperimentConfig) -> Outcome:
    psi = length_from_name(config.psi)
    seq = read_word_list(_require(config, 'seq', 'seq'), letters=config.letters)
    report = lacunarity_constants(psi, seq)
    return Outcome(report.to_dict(), report.passed)


@log_experiment('schur')
@handle_errors('schur')
def run_schur(config: ExperimentConfig) -> Outcome:
    psi = length_from_name(config.psi)
    seq = read_word_list(_require(config, 'seq', 'seq'), letters=config.letters)
    report = verify_schur_bound(psi, seq, config.t_grid())
    return Outcome(report.to_dict(), report.passed, report.rows)


@log_experiment('bmo')
@handle_errors('bmo')
def run_bmo(config: ExperimentConfig) -> Outcome:
    psi = length_from_name(config.psi)
    x = read_element(_require(config, 'element', 'element'), letters=config.letters)
    grid = config.t_grid()
    estimate = bmo_estimate(psi, x, grid, R=config.radius)
    payload = estimate.to_dict()
    payload['lower_witness'] = bmo_lower_witness(psi, x, grid)
    if config.torus:
        payload['torus'] = torus_bmo_sweep(x, grid, config.samples, psi).to_dict()
    consistent = estimate.certified_upper is None or estimate.certified_upper >= estimate.bmo_lower - 1e-8
    return Outcome(payload, consistent, estimate.rows)


@log_experiment('torus')
@handle_errors('torus')
def run_torus(config: ExperimentConfig) -> Outcome:
    psi = length_from_name(config.psi)
    x = read_element(_require(config, 'element', 'element'), letters=config.letters)
    grid = config.t_grid()
    if grid is None:
        grid = support_t_grid(psi, x)
    sweep = torus_bmo_sweep(x, grid, config.samples, psi)
    payload = sweep.to_dict()
    payload['lower_witness'] = bmo_lower_witness(psi, x, grid)
    payload['certified_upper'] = theorem1_certificate(psi, x)
    rows = [{'t': float(t), 'value': v} for t, v in zip(grid, sweep.values)]
    return Outcome(payload, True, rows)


@log_experiment('corollary')
@handle_errors('corollary')
def run_corollary(config: ExperimentConfig) -> Outcome:
    psi = length_from_name(config.psi)
    x = read_element(_require(config, 'element', 'element'), letters=config.letters)
    report = corollary1_check(psi, x, config.p, coefficient_norm=config.coefficient_norm)
    return Outcome(report.to_dict(), report.passed)


@log_experiment('qn')
@handle_errors('qn')
def run_qn(config: ExperimentConfig) -> Outcome:
    phi = read_phi(config.phi) if config.phi else None
    words = generate_qn(SymmetricWordSpec(config.n, config.m, phi))
    literals = [format_word(w) for w in words]
    payload = {'n': config.n, 'm': config.m, 'count': len(words), 'words': literals}
    return Outcome(payload, True, [{'word': w} for w in literals])


@log_experiment('freeness')
@handle_errors('freeness')
def run_freeness(config: ExperimentConfig) -> Outcome:
    words = read_word_list(_require(config, 'words', 'words'), letters=config.letters)
    report = is_free_basis(words)
    payload = report.to_dict()
    passed = report.free
    if config.oracle:
        oracle = freeness_bruteforce(words, config.oracle)
        payload['oracle'] = oracle.to_dict()
        passed = passed and oracle.free_up_to_M
    return Outcome(payload, passed)


@log_experiment('count')
@handle_errors('count')
def run_count(config: ExperimentConfig) -> Outcome:
    report = count_intersection(config.n, config.m)
    payload = report.to_dict()
    if config.cover_delta:
        parts = greedy_lacunary_cover(length_from_name(config.psi), qn_image_ball(config.n, config.m),
                                      config.cover_delta)
        payload['cover'] = {'delta': config.cover_delta, 'parts': len(parts), 'sizes': [len(p) for p in parts]}
    return Outcome(payload)


@log_experiment('witness')
@handle_errors('witness')
def run_witness(config: ExperimentConfig) -> Outcome:
    words = read_word_list(_require(config, 'words', 'words'), letters=config.letters)
    if config.kind == 'sidon':
        report = unconditionality_witness(words, config.trials, config.radius, config.seed, config.dim)
    elif config.kind == 'lambda':
        report = lambda_infty_witness(words, config.trials, config.radius, config.seed, config.dim)
    else:
        raise ConfigError(f"Unknown witness kind '{config.kind}' (use sidon or lambda)")
    rows = [{'trial': i, 'ratio': r} for i, r in enumerate(report.ratios)]
    return Outcome(report.to_dict(), True, rows)


SUBCOMMANDS: Dict[str, Callable[[ExperimentConfig], Outcome]] = {
    'cn-check': run_cn_check,
    'lacunarity': run_lacunarity,
    'schur': run_schur,
    'bmo': run_bmo,
    'torus': run_torus,
    'corollary': run_corollary,
    'qn': run_qn,
    'freeness': run_freeness,
    'count': run_count,
    'witness': run_witness,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--config', help='JSON file whose keys mirror the flags')
    common.add_argument('--format', dest='output_format', choices=['json', 'csv'], help='Report format')
    common.add_argument('--letters', action='store_true', default=None, help='Accept a/b/A/B word literals')
    common.add_argument('--verbose', action='store_true', default=None, help='Debug logging on stderr')
    common.add_argument('--seed', type=int, help='Random seed')

    parser = _Parser(prog=PROG, description=__doc__.splitlines()[0])
    parser.add_argument('--version', action='version', version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest='subcommand', required=True)

    p = sub.add_parser('cn-check', parents=[common], help='Conditional negativity on a ball')
    p.add_argument('--psi', help='word, abs, pow:<alpha> or table:<path>')
    p.add_argument('--rank', type=int)
    p.add_argument('--ball', type=int, help='Ball radius')

    for name, help_text in (('lacunarity', 'Lacunarity constants of a sequence'),
                            ('schur', 'Row/column sums of a_{k,j} against c_delta')):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument('--psi')
        p.add_argument('--seq', help='Word list file')
        if name == 'schur':
            p.add_argument('--grid', help='t-grid as min:max:n')

    p = sub.add_parser('bmo', parents=[common], help='BMO lower and certified upper bounds')
    p.add_argument('--psi')
    p.add_argument('--element', help='Element JSON file')
    p.add_argument('--radius', type=int, help='Truncation radius R')
    p.add_argument('--grid', help='t-grid as min:max:n')
    p.add_argument('--torus', action='store_true', default=None, help='Also run the torus estimator')
    p.add_argument('--samples', type=int, help='Torus sample count')

    p = sub.add_parser('torus', parents=[common], help='BMO on the circle by dense sampling')
    p.add_argument('--psi')
    p.add_argument('--element', help='Element JSON file')
    p.add_argument('--grid', help='t-grid as min:max:n')
    p.add_argument('--samples', type=int, help='Sample count')

    p = sub.add_parser('corollary', parents=[common], help='Even-p moment inequality')
    p.add_argument('--psi')
    p.add_argument('--element', help='Element JSON file')
    p.add_argument('--p', type=int, help='Even exponent')
    p.add_argument('--coefficient-norm', dest='coefficient_norm', choices=['operator', 'schatten'])

    p = sub.add_parser('qn', parents=[common], help='Generate Q_n')
    p.add_argument('--n', type=int)
    p.add_argument('--m', type=int)
    p.add_argument('--phi', help='Index map file')

    p = sub.add_parser('freeness', parents=[common], help='Free basis certificate')
    p.add_argument('--words', help='Word list file')
    p.add_argument('--oracle', type=int, help='Brute-force products up to M factors')

    p = sub.add_parser('count', parents=[common], help='#(pi(Q_n) in the ball of radius 2nm)')
    p.add_argument('--n', type=int)
    p.add_argument('--m', type=int)
    p.add_argument('--psi')
    p.add_argument('--cover-delta', dest='cover_delta', type=float, help='Greedy lacunary cover constant')

    p = sub.add_parser('witness', parents=[common], help='Empirical Sidon / Lambda-infinity ratios')
    p.add_argument('--kind', choices=['sidon', 'lambda'])
    p.add_argument('--words', help='Word list file')
    p.add_argument('--trials', type=int)
    p.add_argument('--radius', type=int, help='Truncation radius R')
    p.add_argument('--dim', type=int, help='Coefficient dimension')
    return parser


def configure_logging(verbose: bool = False):
    level = logging.DEBUG if verbose else os.environ.get(LOG_LEVEL_ENV_VAR, 'INFO').upper()
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {k: v for k, v in vars(args).items() if k not in ('config', 'subcommand', 'verbose', 'grid')}
    grid = getattr(args, 'grid', None)
    if grid:
        overrides.update(parse_grid(grid))
    return ExperimentConfig.load(args.config, overrides)


def main(argv: Optional[Sequence[str]] = None) -> int:
    stdout = sys.stdout
    subcommand = None
    try:
        args = build_parser().parse_args(argv)
        subcommand = args.subcommand
        configure_logging(bool(args.verbose))
        config = load_config(args)
        reporter = ReportService(__version__, config.to_dict(), config.output_format, stdout)
        logger.info(f"Running {subcommand}")
        with budget_scope(config.budget()):
            outcome = SUBCOMMANDS[subcommand](config)
        reporter.emit(subcommand, outcome.payload, outcome.rows)
        if not outcome.passed:
            logger.info(f"{subcommand}: check failed")
            return EXIT_FAILED
        return EXIT_OK
    except (LacunariaError, OSError, ValueError, LookupError, ArithmeticError) as e:
        logger.error(f"{subcommand or PROG} failed: {type(e).__name__}: {e}")
        ReportService(__version__, stream=stdout).emit_error(subcommand, e)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())

"""psi-lacunary sequences: constants, the a_{k,j} kernel and its Schur bound.

A sequence (h_k) is psi-lacunary with constant delta > 0 when
psi(h_{k+1}) >= (1 + delta) psi(h_k) and, for distinct k, k',
psi(h_k^-1 h_k') >= delta max(psi(h_k), psi(h_k')). Such sequences satisfy the
row/column bound sup_j sum_k a_{k,j} <= c_delta uniformly in t > 0.
"""

import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.common.errors import (
    DuplicateElementError, ProposalError, SequenceTooShortError, ZeroLengthError
)
from src.groups.lengths import LengthFunction
from src.groups.words import Word, alphabet, as_word, format_word, invert, multiply, power

logger = logging.getLogger(__name__)

SCHUR_SLACK = 1e-9
GRID_POINTS = 49


def c_delta_constant(delta: float) -> float:
    """c_delta = 1 + 1/delta + 1/(1 - exp(-delta^2)); infinite for delta <= 0, 2 in the delta -> inf limit."""
    if delta <= 0:
        return math.inf
    if math.isinf(delta):
        return 2.0
    return 1.0 + 1.0 / delta + 1.0 / -math.expm1(-delta * delta)


@dataclass
class LacunaryReport:
    delta_growth: float
    delta_separation: float
    delta: float
    c_delta: float
    passed: bool

    @classmethod
    def vacuous(cls) -> 'LacunaryReport':
        """Report for a one-element sequence, where both conditions hold vacuously."""
        return cls(math.inf, math.inf, math.inf, c_delta_constant(math.inf), True)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _checked_sequence(psi: LengthFunction, seq: Sequence, minimum: int = 2) -> Tuple[List[Word], np.ndarray]:
    words = [as_word(h) for h in seq]
    if len(words) < minimum:
        raise SequenceTooShortError(f"lacunarity needs at least {minimum} elements, got {len(words)}")
    values = np.array([psi(h) for h in words])
    for h, value in zip(words, values):
        if value <= 0:
            raise ZeroLengthError(f"psi('{format_word(h)}') = {value}; delta is undefined")
    seen = set()
    for h in words:
        if h in seen:
            raise DuplicateElementError(f"duplicate element '{format_word(h)}' in sequence")
        seen.add(h)
    return words, values


def pairwise_lengths(psi: LengthFunction, seq: Sequence) -> np.ndarray:
    """D[k][j] = psi(h_k^-1 h_j)."""
    words = [as_word(h) for h in seq]
    inverses = [invert(h) for h in words]
    return np.array([[psi(multiply(hk_inv, hj)) for hj in words] for hk_inv in inverses])


def lacunarity_constants(psi: LengthFunction, seq: Sequence) -> LacunaryReport:
    """Growth and separation constants of a finite sequence, and c_delta.

    Separation is taken over distinct indices only.

    Raises:
        SequenceTooShortError: fewer than two elements
        ZeroLengthError: some psi(h_k) = 0
        DuplicateElementError: a repeated element
    """
    words, values = _checked_sequence(psi, seq)
    delta_growth = float(np.min(values[1:] / values[:-1] - 1.0))

    distances = pairwise_lengths(psi, words)
    ratios = distances / np.maximum.outer(values, values)
    np.fill_diagonal(ratios, np.inf)
    delta_separation = float(np.min(ratios))

    delta = min(delta_growth, delta_separation)
    passed = delta > 0
    report = LacunaryReport(delta_growth, delta_separation, delta, c_delta_constant(delta), passed)
    logger.debug(f"Lacunarity of {len(words)} words under {psi.name}: {report}")
    return report


def _coefficients(distances: np.ndarray, values: np.ndarray, t: float) -> np.ndarray:
    defect = -np.expm1(-t * values)
    return np.exp(-t * distances) * np.outer(defect, defect)


def coefficient_matrix(psi: LengthFunction, seq: Sequence, t: float) -> np.ndarray:
    """a_{k,j} = exp(-t psi(h_k^-1 h_j)) (1 - exp(-t psi(h_k))) (1 - exp(-t psi(h_j))).

    psi(h_k^-1) is read as psi(h_k), which is the same number for symmetric psi.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    words = [as_word(h) for h in seq]
    values = np.array([psi(h) for h in words])
    return _coefficients(pairwise_lengths(psi, words), values, t)


def default_t_grid(values: Sequence[float], points: int = GRID_POINTS) -> np.ndarray:
    """Log-spaced grid over [1e-6 / max psi, 1e3 / min psi], ignoring zero values."""
    positive = [float(v) for v in values if v > 0]
    if not positive:
        return np.geomspace(1e-6, 1e3, points)
    return np.geomspace(1e-6 / max(positive), 1e3 / min(positive), points)


@dataclass
class SchurReport:
    worst_row_sum: float
    worst_col_sum: float
    c_delta: float
    margin: float
    t_worst: float
    passed: bool
    lacunarity: LacunaryReport
    rows: List[Dict[str, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'worst_row_sum': self.worst_row_sum,
            'worst_col_sum': self.worst_col_sum,
            'c_delta': self.c_delta,
            'margin': self.margin,
            't_worst': self.t_worst,
            'passed': self.passed,
            'lacunarity': self.lacunarity.to_dict(),
        }


def verify_schur_bound(psi: LengthFunction, seq: Sequence, t_grid: Optional[Sequence[float]] = None) -> SchurReport:
    """Check max row and column sums of (a_{k,j}) against c_delta over a t-grid.

    One-element sequences use the vacuous report (c_delta = 2).

    Raises:
        LacunarityError / DuplicateElementError: as lacunarity_constants
    """
    if len(seq) == 1:
        words, values = _checked_sequence(psi, seq, minimum=1)
        report = LacunaryReport.vacuous()
    else:
        words, values = _checked_sequence(psi, seq)
        report = lacunarity_constants(psi, words)

    grid = default_t_grid(values) if t_grid is None else np.asarray(t_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0):
        raise ValueError("t-grid must be nonempty with positive points")

    distances = pairwise_lengths(psi, words)
    defect = -np.expm1(-grid[:, None] * values[None, :])
    kernel = np.exp(-grid[:, None, None] * distances[None, :, :]) * defect[:, :, None] * defect[:, None, :]
    row_sums = kernel.sum(axis=2).max(axis=1)
    col_sums = kernel.sum(axis=1).max(axis=1)

    worst = np.maximum(row_sums, col_sums)
    worst_row = float(row_sums.max())
    worst_col = float(col_sums.max())
    margin = report.c_delta - max(worst_row, worst_col)
    passed = report.passed and max(worst_row, worst_col) <= report.c_delta + SCHUR_SLACK

    rows = [{'t': float(t), 'max_row_sum': float(r), 'max_col_sum': float(c)}
            for t, r, c in zip(grid, row_sums, col_sums)]
    logger.info(f"Schur bound over {grid.size} t-values: worst sums {worst_row:.6f}/{worst_col:.6f}, "
                f"c_delta {report.c_delta:.6f}")
    return SchurReport(worst_row, worst_col, report.c_delta, margin, float(grid[int(np.argmax(worst))]),
                       passed, report, rows)


def _doubling_words(rank: int, count: int, rng: np.random.Generator) -> List[Word]:
    # lengths 1, 2, 4, ...; each word starts with a letter different from the
    # previous word's first letter, so h_{k-1}^-1 h_k does not cancel
    letters = alphabet(rank)
    words: List[Word] = []
    for k in range(count):
        length = 2 ** k
        first_choices = [g for g in letters if not words or g != words[-1][0]]
        out = [first_choices[int(rng.integers(len(first_choices)))]]
        while len(out) < length:
            choices = [g for g in letters if g != -out[-1]]
            out.append(choices[int(rng.integers(len(choices)))])
        words.append(Word(out))
    return words


def propose_lacunary_sequence(rank: int, psi: LengthFunction, K: int, seed: int = 0,
                              max_attempts: int = 64) -> Tuple[List[Word], LacunaryReport]:
    """Build a K-term candidate sequence and verify it with lacunarity_constants.

    On the integers the candidate is a^2, a^4, ..., a^(2^K); on F_r (r >= 2)
    it is a run of random reduced words of doubling length.

    Raises:
        SequenceTooShortError: K < 2
        ProposalError: no candidate verified within max_attempts
    """
    if K < 2:
        raise SequenceTooShortError(f"a lacunary sequence needs K >= 2, got {K}")

    rng = np.random.default_rng(seed)
    attempts = 1 if rank == 1 else max_attempts
    for attempt in range(attempts):
        if rank == 1:
            seq = [power(1, 2 ** k) for k in range(1, K + 1)]
        else:
            seq = _doubling_words(rank, K, rng)
        try:
            report = lacunarity_constants(psi, seq)
        except (ZeroLengthError, DuplicateElementError) as e:
            logger.debug(f"Candidate {attempt} rejected: {e}")
            continue
        if report.passed:
            logger.info(f"Proposed lacunary sequence in F_{rank} with K={K}, delta={report.delta:.4f}")
            return seq, report
        logger.debug(f"Candidate {attempt} has delta {report.delta}")
    raise ProposalError(f"no psi-lacunary candidate of length {K} in F_{rank} after {attempts} attempts")

"""Length functions psi on free-group words and their verification.

A length function is checked on finite subsets only: conditional negativity
through the Gram matrix restricted to mean-zero coefficient vectors,
subadditivity pair by pair, and the symmetry/unitality identities.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import helmert

from src.analysis.spectral import max_symmetric_eigenpair
from src.common.errors import (
    AsymmetricLengthError, ConfigError, RankError, SequenceTooShortError, UnknownWordError
)
from src.groups.words import IDENTITY, Word, as_word, format_word, invert, multiply, word_rank

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-12
CN_RELATIVE_TOL = 1e-9


@dataclass(frozen=True)
class LengthFunction:
    """A function psi: Word -> [0, inf) with declared symmetry and unitality."""
    name: str
    evaluate: Callable[[Word], float]
    declared_symmetric: bool = True
    declared_unital: bool = True

    def __call__(self, u) -> float:
        return float(self.evaluate(as_word(u)))


def word_length_psi() -> LengthFunction:
    """Reduced word length on F_r."""
    return LengthFunction('word', lambda u: float(len(u)))


def _abs_value(u: Word) -> float:
    if word_rank(u) > 1:
        raise RankError(f"|k| is defined on the integers only, got word '{format_word(u)}'")
    return float(len(u))


def abs_length() -> LengthFunction:
    """psi(a^k) = |k| on the integers (rank-one words)."""
    return LengthFunction('abs', _abs_value)


def power_length(alpha: float) -> LengthFunction:
    """psi(a^k) = |k|^alpha on the integers; conditionally negative iff alpha <= 2."""
    if alpha <= 0:
        raise ConfigError(f"power length needs alpha > 0, got {alpha}")
    return LengthFunction(f"pow:{alpha:g}", lambda u: _abs_value(u) ** alpha)


def table_length(table: Mapping[Word, float], name: str = 'table') -> LengthFunction:
    """A length function tabulated on finitely many words.

    psi(e) defaults to 0 when e is not listed. Declared symmetry and unitality
    are read off the table itself.
    """
    values: Dict[Word, float] = {as_word(w): float(v) for w, v in table.items()}
    values.setdefault(IDENTITY, 0.0)

    def evaluate(u: Word) -> float:
        try:
            return values[u]
        except KeyError:
            raise UnknownWordError(f"{name} has no value for word '{format_word(u)}'")

    symmetric = all(abs(v - values[invert(w)]) <= IDENTITY_TOL
                    for w, v in values.items() if invert(w) in values)
    unital = abs(values[IDENTITY]) <= IDENTITY_TOL
    return LengthFunction(name, evaluate, declared_symmetric=symmetric, declared_unital=unital)


def length_from_name(spec: str) -> LengthFunction:
    """Resolve a CLI length name: word, abs, pow:<alpha> or table:<path>."""
    if spec == 'word':
        return word_length_psi()
    if spec == 'abs':
        return abs_length()
    if spec.startswith('pow:'):
        try:
            alpha = float(spec[4:])
        except ValueError:
            raise ConfigError(f"Malformed power length '{spec}'")
        return power_length(alpha)
    if spec.startswith('table:'):
        from src.common.formats import read_length_table
        path = spec[6:]
        return table_length(read_length_table(path), name=f"table:{path}")
    raise ConfigError(f"Unknown length function '{spec}' (use word, abs, pow:<alpha> or table:<path>)")


def _distinct(words: Iterable) -> List[Word]:
    seen = set()
    out = []
    for w in words:
        w = as_word(w)
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def gram_matrix(psi: LengthFunction, S: Sequence) -> np.ndarray:
    """M[i][j] = psi(S[i]^-1 S[j]).

    Raises:
        AsymmetricLengthError: if M differs from its transpose by more than 1e-12
    """
    words = [as_word(s) for s in S]
    inverses = [invert(w) for w in words]
    n = len(words)
    matrix = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            matrix[i, j] = psi(multiply(inverses[i], words[j]))

    if n:
        gap = np.abs(matrix - matrix.T)
        i, j = np.unravel_index(np.argmax(gap), gap.shape)
        if gap[i, j] > IDENTITY_TOL:
            raise AsymmetricLengthError(
                f"{psi.name} is not symmetric on S: psi(g^-1 h) = {matrix[i, j]} but psi(h^-1 g) = {matrix[j, i]} "
                f"for g = '{format_word(words[i])}', h = '{format_word(words[j])}'"
            )
    return (matrix + matrix.T) / 2


@dataclass
class CnWitness:
    """Mean-zero coefficients a_g with sum a_g conj(a_h) psi(g^-1 h) > 0."""
    words: Tuple[Word, ...]
    coefficients: np.ndarray
    value: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'words': [format_word(w) for w in self.words],
            'coefficients': [float(a) for a in self.coefficients],
            'value': float(self.value),
        }


@dataclass
class CnVerdict:
    passed: bool
    max_eigenvalue: float
    witness: Optional[CnWitness]
    tolerance: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'max_eigenvalue': self.max_eigenvalue,
            'tolerance': self.tolerance,
            'witness': self.witness.to_dict() if self.witness else None,
        }


def quadratic_form(psi: LengthFunction, words: Sequence, coefficients: np.ndarray) -> float:
    """sum_{g,h} conj(a_g) a_h psi(g^-1 h), evaluated from scratch."""
    matrix = gram_matrix(psi, words)
    a = np.asarray(coefficients)
    return float(np.real(np.conj(a) @ matrix @ a))


def check_conditionally_negative(psi: LengthFunction, S: Sequence, tol: Optional[float] = None) -> CnVerdict:
    """Check sum conj(a_g) a_h psi(g^-1 h) <= 0 over mean-zero a supported on S.

    The form is restricted to {sum a_g = 0} through a Helmert orthonormal basis
    and its top eigenvalue compared with `tol` (default 1e-9 times the matrix
    max-norm, floored at 1e-9). Duplicate words in S are dropped first.

    Raises:
        SequenceTooShortError: if S has fewer than two distinct words
        ConvergenceError: if the eigenvalue iteration hits its cap
    """
    words = _distinct(S)
    n = len(words)
    if n < 2:
        raise SequenceTooShortError(f"CN check needs at least two distinct words, got {n}")
    if IDENTITY not in words:
        logger.debug("CN check run on a set without the identity")

    matrix = gram_matrix(psi, words)
    basis = helmert(n)
    restricted = basis @ matrix @ basis.T
    restricted = (restricted + restricted.T) / 2

    scale = max(1.0, float(np.max(np.abs(matrix))))
    tol = CN_RELATIVE_TOL * scale if tol is None else float(tol)

    value, vector = max_symmetric_eigenpair(restricted)
    passed = value <= tol
    logger.info(f"CN check for {psi.name} on {n} words: max restricted eigenvalue {value:.3e} (tol {tol:.1e})")

    witness = None
    if not passed:
        coefficients = basis.T @ vector
        witness = CnWitness(tuple(words), coefficients, float(coefficients @ matrix @ coefficients))
    return CnVerdict(passed, float(value), witness, tol)


@dataclass
class SubadditivityVerdict:
    passed: bool
    violation: Optional[Tuple[Word, Word]] = None
    excess: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'violation': [format_word(w) for w in self.violation] if self.violation else None,
            'excess': self.excess,
        }


def check_subadditive(psi: LengthFunction, S: Sequence) -> SubadditivityVerdict:
    """psi(uv) <= psi(u) + psi(v) + 1e-12 for all u, v in S; first violation wins."""
    words = [as_word(s) for s in S]
    values = [psi(w) for w in words]
    for u, pu in zip(words, values):
        for v, pv in zip(words, values):
            excess = psi(multiply(u, v)) - pu - pv
            if excess > IDENTITY_TOL:
                return SubadditivityVerdict(False, (u, v), float(excess))
    return SubadditivityVerdict(True)


@dataclass
class SymmetryVerdict:
    passed: bool
    unital: bool
    symmetric: bool
    violation: Optional[Word] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'unital': self.unital,
            'symmetric': self.symmetric,
            'violation': format_word(self.violation) if self.violation is not None else None,
        }


def check_symmetry_unitality(psi: LengthFunction, S: Sequence) -> SymmetryVerdict:
    """psi(e) = 0 and psi(g) = psi(g^-1) for g in S, both to 1e-12."""
    unital = abs(psi(IDENTITY)) <= IDENTITY_TOL
    violation = None
    for w in S:
        w = as_word(w)
        if abs(psi(w) - psi(invert(w))) > IDENTITY_TOL:
            violation = w
            break
    symmetric = violation is None
    return SymmetryVerdict(unital and symmetric, unital, symmetric, violation)

"""Symmetric word sets Q_n, their freeness, and Sidon-type witness ratios.

Q_n collects the symmetric words g_{k_1} ... g_{k_n} g_{phi(k_n)} ... g_{phi(k_1)}
of length 2n in F_infinity (phi = identity by default). Q_n is a free subset
of F_infinity; its image under pi(g_k) = a^k b a^-k is not a finite union of
lacunary sequences in F_2, which the counting experiment exhibits.
"""

import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.analysis.algebra import (
    GroupAlgebraElement, haagerup_pisier_bound, operator_norm_lower, rcp_norms
)
from src.common.config import resolve_cap
from src.common.errors import (
    BudgetExceededError, ConfigError, DuplicateElementError, LacunariaError,
    ZeroLengthError
)
from src.groups.lengths import LengthFunction
from src.groups.words import (
    IDENTITY, Homomorphism, Word, alphabet, apply_homomorphism, as_word, canonical_key,
    format_word, invert, is_reduced, multiply
)
from src.sidon.folding import is_free_basis

logger = logging.getLogger(__name__)

WITNESS_PAIRINGS = ('certified', 'empirical')


@dataclass(frozen=True)
class SymmetricWordSpec:
    """Parameters of Q_n: half-length n, index bound m, optional odd injection phi."""
    n: int
    m: int
    phi: Optional[Mapping[int, int]] = None

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigError(f"Q_n needs n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        if self.phi is None:
            return
        table: Dict[int, int] = {}
        for k, image in self.phi.items():
            k, image = int(k), int(image)
            if k == 0 or image == 0:
                raise ConfigError("phi cannot involve index 0")
            for key, value in ((k, image), (-k, -image)):
                if table.get(key, value) != value:
                    raise ConfigError(f"phi must satisfy phi(-k) = -phi(k); conflict at k={key}")
                table[key] = value
        for k in alphabet(self.m):
            if k not in table:
                raise ConfigError(f"phi has no value for index {k}")
        images = [table[k] for k in alphabet(self.m)]
        if len(set(images)) != len(images):
            raise ConfigError("phi must be injective on {+-1, ..., +-m}")
        object.__setattr__(self, 'phi', table)

    def image(self, k: int) -> int:
        return k if self.phi is None else self.phi[k]

    @property
    def candidates(self) -> int:
        """(2m)(2m-1)^(n-1) index sequences."""
        return 2 * self.m * (2 * self.m - 1) ** (self.n - 1)


def _index_sequences(n: int, m: int) -> Iterator[Tuple[int, ...]]:
    letters = alphabet(m)

    def extend(prefix: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == n:
            yield prefix
            return
        for k in letters:
            if not prefix or k != -prefix[-1]:
                yield from extend(prefix + (k,))
    return extend(())


def generate_qn(spec: SymmetricWordSpec, cap: Optional[int] = None) -> List[Word]:
    """Q_n in a deterministic order, keeping only reduced candidates.

    Raises:
        BudgetExceededError: if the candidate count exceeds the sequence cap
    """
    cap = resolve_cap(cap, 'sequence_cap')
    if spec.candidates > cap:
        raise BudgetExceededError(f"Q_{spec.n} with m={spec.m} has {spec.candidates} candidates, cap is {cap}")
    words: Dict[Word, None] = {}
    dropped = 0
    for ks in _index_sequences(spec.n, spec.m):
        letters = ks + tuple(spec.image(k) for k in reversed(ks))
        if not is_reduced(letters):
            dropped += 1
            continue
        words.setdefault(as_word(letters), None)
    if dropped:
        logger.debug(f"Dropped {dropped} non-reduced Q_{spec.n} candidates")
    return list(words)


@dataclass
class BruteForceReport:
    free_up_to_M: bool
    monotone: bool
    M: int
    products_checked: int
    counterexample: Optional[List[Word]] = None
    monotonicity_violation: Optional[List[Word]] = None

    def to_dict(self) -> Dict[str, Any]:
        def render(factors):
            return [format_word(w) for w in factors] if factors is not None else None
        return {
            'free_up_to_M': self.free_up_to_M,
            'monotone': self.monotone,
            'M': self.M,
            'products_checked': self.products_checked,
            'counterexample': render(self.counterexample),
            'monotonicity_violation': render(self.monotonicity_violation),
        }


def freeness_bruteforce(words: Sequence, M: int, cap: Optional[int] = None) -> BruteForceReport:
    """Enumerate all reduced products x_j ... x_1 (2 <= j <= M) over words and inverses.

    Factors range over the group elements of words ∪ words^-1, so a set
    closed under inversion (Q_n is) is read as the symmetric set it is, and
    consecutive factors only need x_{k+1} != x_k^-1 as group elements. Every
    product is checked against e and against the length growth
    |x_j ... x_1| > |x_{j-1} ... x_1|; factors in reports are listed as
    x_1, ..., x_j.

    Raises:
        ValueError: if M < 2
        BudgetExceededError: if #(words ∪ words^-1)^M exceeds the product cap
    """
    if M < 2:
        raise ValueError(f"the brute-force oracle needs M >= 2, got {M}")
    words = [as_word(w) for w in words]
    cap = resolve_cap(cap, 'product_cap')
    factors_pool: Dict[Word, None] = {}
    for w in words:
        factors_pool.setdefault(w, None)
        factors_pool.setdefault(invert(w), None)
    pool = list(factors_pool)
    if len(pool) ** M > cap:
        raise BudgetExceededError(f"{len(pool) ** M} products for {len(pool)} factors at M={M}, cap is {cap}")

    position = {x: i for i, x in enumerate(pool)}
    inverse_of = [position[invert(x)] for x in pool]
    report = BruteForceReport(True, True, M, 0)

    # level j holds every reduced factor sequence x_1..x_j with its product x_j ... x_1
    level: List[Tuple[Tuple[int, ...], Word]] = [((i,), x) for i, x in enumerate(pool)]
    for _ in range(2, M + 1):
        next_level = []
        for factors, product in level:
            forbidden = inverse_of[factors[-1]]
            for i, x in enumerate(pool):
                if i == forbidden:
                    continue
                extended = multiply(x, product)
                report.products_checked += 1
                chain = factors + (i,)
                if extended == IDENTITY:
                    report.free_up_to_M = False
                    report.counterexample = [pool[f] for f in chain]
                    logger.info(f"Brute-force oracle found a relation among {len(words)} words "
                                f"with {len(chain)} factors")
                    return report
                if report.monotone and len(extended) <= len(product):
                    report.monotone = False
                    report.monotonicity_violation = [pool[f] for f in chain]
                next_level.append((chain, extended))
        level = next_level
    logger.info(f"Brute-force oracle: no relation up to {M} factors ({report.products_checked} products), "
                f"monotone={report.monotone}")
    return report


def pi_homomorphism() -> Homomorphism:
    """pi(g_k) = a^k b a^-k into F_2 (a = 1, b = 2), with pi(g_-k) = pi(g_k)^-1."""
    return Homomorphism(rule=lambda k: [1] * k + [2] + [-1] * k, name='pi')


def count_index_bound(n: int, m: int) -> int:
    """Largest |k_j| occurring in a word of Q_n whose pi-image has length <= 2nm.

    |pi(w)| = 2n + 2|k_1| + 2 sum_j ||k_{j+1}| - |k_j||, and every |k_j| is at
    most |k_1| plus the sum of the gaps.
    """
    return n * (m - 1)


def free_group_ball_size(radius: int) -> int:
    """#P_{<=radius} in F_2, 2 * 3^radius - 1."""
    return 2 * 3 ** radius - 1


@dataclass
class CountReport:
    n: int
    m: int
    count: int
    ratio_to_mn: float
    ball_exponent: float
    index_bound: int
    candidates: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def qn_image_ball(n: int, m: int, cap: Optional[int] = None) -> List[Word]:
    """pi(Q_n) intersected with the ball of radius 2nm in F_2, deduplicated."""
    bound = count_index_bound(n, m)
    if bound < 1:
        return []
    pi = pi_homomorphism()
    radius = 2 * n * m
    images: Dict[Word, None] = {}
    for w in generate_qn(SymmetricWordSpec(n, bound), cap=cap):
        image = apply_homomorphism(pi, w)
        if len(image) <= radius:
            images.setdefault(image, None)
    return sorted(images, key=canonical_key)


def count_intersection(n: int, m: int, cap: Optional[int] = None) -> CountReport:
    """#(pi(Q_n) cap P_{<=2nm}) with the normalizations count / m^n and log #P_{<=2nm} / 2nm.

    Raises:
        BudgetExceededError: if Q_n with index bound n(m-1) exceeds the sequence cap
    """
    if n < 1 or m < 1:
        raise ConfigError(f"counting needs n >= 1 and m >= 1, got n={n}, m={m}")
    bound = count_index_bound(n, m)
    candidates = 2 * bound * (2 * bound - 1) ** (n - 1) if bound >= 1 else 0
    count = len(qn_image_ball(n, m, cap=cap))
    radius = 2 * n * m
    report = CountReport(n, m, count, count / m ** n, math.log(free_group_ball_size(radius)) / radius,
                         bound, candidates)
    logger.info(f"#(pi(Q_{n}) in P_<={radius}) = {count} for m={m}")
    return report


def greedy_lacunary_cover(psi: LengthFunction, words: Iterable, delta: float) -> List[List[Word]]:
    """Split words into psi-lacunary sequences with constant delta, first fit in increasing psi.

    A word joins a part when psi grows by a factor 1 + delta over the part's
    last element and psi(u^-1 w), psi(w^-1 u) >= delta max(psi(u), psi(w)) for
    every u already in the part.

    Raises:
        ValueError: if delta <= 0
        ZeroLengthError: if some word has psi-length zero
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    ordered = sorted({as_word(w) for w in words}, key=lambda w: (psi(w), canonical_key(w)))
    parts: List[List[Word]] = []
    for w in ordered:
        value = psi(w)
        if value <= 0:
            raise ZeroLengthError(f"psi('{format_word(w)}') = {value}")
        for part in parts:
            if value < (1 + delta) * psi(part[-1]):
                continue
            if all(min(psi(multiply(invert(u), w)), psi(multiply(invert(w), u))) >= delta * max(psi(u), value)
                   for u in part):
                part.append(w)
                break
        else:
            parts.append([w])
    logger.debug(f"Greedy cover of {len(ordered)} words needs {len(parts)} lacunary parts at delta={delta}")
    return parts


@dataclass
class WitnessReport:
    kind: str
    value: float
    trials: int
    radius: int
    dim: int
    seed: int
    pairing: str
    certified: bool
    ratios: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'value': self.value,
            'trials': self.trials,
            'radius': self.radius,
            'dim': self.dim,
            'seed': self.seed,
            'pairing': self.pairing,
            'certified': self.certified,
        }


def _distinct_words(words: Iterable) -> List[Word]:
    out = [as_word(w) for w in words]
    if not out:
        raise ValueError("witness needs at least one word")
    if len(set(out)) != len(out):
        raise DuplicateElementError("witness words must be distinct")
    return out


def _trial_coefficients(trial: int, count: int, dim: int, rng: np.random.Generator) -> List[np.ndarray]:
    if trial == 0:
        return [np.eye(dim, dtype=complex) for _ in range(count)]
    return [rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)) for _ in range(count)]


def _certified_free(words: List[Word]) -> bool:
    try:
        return is_free_basis(words).free
    except LacunariaError:
        return False


def unconditionality_witness(words: Iterable, trials: int = 64, R: int = 8, seed: int = 0, dim: int = 1,
                             pairing: str = 'certified') -> WitnessReport:
    """Largest observed ||sum eps_k c_k lambda_{h_k}|| / ||sum c_k lambda_{h_k}|| over random trials.

    The numerator is a truncated lower bound. With pairing 'certified' the
    denominator is the best upper bound available (triangle inequality, or
    Haagerup-Pisier for a certified free set), so every ratio is a lower
    bound for the true one; 'empirical' divides by the truncated estimate of
    the unsigned element instead and is reported as uncertified.

    Raises:
        ValueError: if trials < 1 or pairing is unknown
        DuplicateElementError: if the words repeat
    """
    if trials < 1:
        raise ValueError("witness needs at least one trial")
    if pairing not in WITNESS_PAIRINGS:
        raise ValueError(f"pairing must be one of {WITNESS_PAIRINGS}, got {pairing!r}")
    words = _distinct_words(words)
    free = pairing == 'certified' and _certified_free(words)

    ratios = []
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        coefficients = _trial_coefficients(trial, len(words), dim, rng)
        signs = rng.choice([-1.0, 1.0], size=len(words))
        unsigned = GroupAlgebraElement(dict(zip(words, coefficients)), dim)
        signed = GroupAlgebraElement({w: s * c for w, s, c in zip(words, signs, coefficients)}, dim)

        numerator = operator_norm_lower(signed, R)
        if pairing == 'certified':
            denominator = sum(float(np.linalg.norm(c, 2)) for c in coefficients)
            if free:
                denominator = min(denominator, haagerup_pisier_bound(unsigned, True))
        else:
            denominator = operator_norm_lower(unsigned, R)
        ratios.append(numerator / denominator if denominator > 0 else 0.0)

    report = WitnessReport('sidon', float(max(ratios)), trials, R, dim, seed, pairing, pairing == 'certified', ratios)
    logger.info(f"Unconditionality witness over {trials} trials ({pairing}): {report.value:.6f}")
    return report


def lambda_infty_witness(words: Iterable, trials: int = 64, R: int = 8, seed: int = 0, dim: int = 1) -> WitnessReport:
    """Largest observed ||x|| / max(||sum c^dagger c||, ||sum c c^dagger||)^1/2 over random trials.

    Raises:
        ValueError: if trials < 1
        DuplicateElementError: if the words repeat
    """
    if trials < 1:
        raise ValueError("witness needs at least one trial")
    words = _distinct_words(words)

    ratios = []
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        coefficients = _trial_coefficients(trial, len(words), dim, rng)
        x = GroupAlgebraElement(dict(zip(words, coefficients)), dim)
        scale = math.sqrt(max(rcp_norms(x)))
        ratios.append(operator_norm_lower(x, R) / scale if scale > 0 else 0.0)

    report = WitnessReport('lambda', float(max(ratios)), trials, R, dim, seed, 'certified', True, ratios)
    logger.info(f"Lambda-infinity witness over {trials} trials: {report.value:.6f}")
    return report

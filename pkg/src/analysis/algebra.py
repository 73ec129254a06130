"""The group algebra of a free group with small matrix coefficients.

An element x = sum_g c_g lambda_g is a finitely supported map from reduced
words to d x d complex matrices. The trace is normalized so that tau(1) = 1:
tau(x) = tr(c_e) / d.

Operator norms are only reachable numerically. TruncatedRepresentation
realizes the left regular representation on the ball P_{<=R}; the top
eigenvalue of P lambda(x)* lambda(x) P is a certified lower bound of
||x||^2 that grows with R. The Haagerup-Pisier inequality gives an upper
bound for elements supported on a free set.
"""

import math
import logging
from dataclasses import dataclass, field
from numbers import Number
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import fftconvolve

from src.analysis.spectral import DENSE_LIMIT, refine_top_eigenvalue, top_eigenvalue
from src.common.config import resolve_cap
from src.common.errors import (
    BudgetExceededError, CertificateError, DimensionMismatchError, RankError
)
from src.groups.lengths import LengthFunction
from src.groups.words import (
    IDENTITY, Word, as_word, ball_size, canonical_key, enumerate_ball, exponent_sum,
    format_word, invert, multiply, word_rank
)

logger = logging.getLogger(__name__)

MAX_DIM = 8
NORM_TOL = 1e-8
NORM_MAX_ITER = 10_000
SWEEP_TOL = 1e-7
SWEEP_MAX_ITER = 200


class GroupAlgebraElement:
    """An immutable element sum_g c_g lambda_g with d x d coefficients.

    Zero coefficients are pruned on construction. Scalars given as
    coefficients are read as multiples of the identity matrix.
    """
    __slots__ = ('_dim', '_coeffs', '_support')

    def __init__(self, coeffs: Optional[Mapping] = None, dim: int = 1):
        if not 1 <= int(dim) <= MAX_DIM:
            raise DimensionMismatchError(f"coefficient dimension must be in 1..{MAX_DIM}, got {dim}")
        self._dim = int(dim)
        table: Dict[Word, np.ndarray] = {}
        for word, coeff in (coeffs or {}).items():
            word = as_word(word)
            matrix = self._as_matrix(coeff)
            if word in table:
                matrix = table[word] + matrix
            table[word] = matrix
        self._coeffs = {w: m for w, m in table.items() if np.max(np.abs(m)) > 0}
        for m in self._coeffs.values():
            m.setflags(write=False)
        self._support = tuple(sorted(self._coeffs, key=canonical_key))

    def _as_matrix(self, coeff) -> np.ndarray:
        matrix = np.array(coeff, dtype=complex)
        if matrix.ndim == 0:
            return matrix * np.eye(self._dim, dtype=complex)
        if matrix.shape != (self._dim, self._dim):
            raise DimensionMismatchError(f"expected a {self._dim}x{self._dim} coefficient, got shape {matrix.shape}")
        return matrix

    @classmethod
    def zero(cls, dim: int = 1) -> 'GroupAlgebraElement':
        return cls({}, dim)

    @classmethod
    def delta(cls, word=IDENTITY, coeff=1.0, dim: int = 1) -> 'GroupAlgebraElement':
        """c lambda_word."""
        return cls({as_word(word): coeff}, dim)

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[Any, Any]], dim: int = 1) -> 'GroupAlgebraElement':
        """Sum of (word, coefficient) pairs; repeated words are added."""
        table: Dict[Word, np.ndarray] = {}
        template = cls({}, dim)
        for word, coeff in terms:
            word = as_word(word)
            matrix = template._as_matrix(coeff)
            table[word] = table[word] + matrix if word in table else matrix
        return cls(table, dim)

    @classmethod
    def scalar_sum(cls, words: Iterable, coefficients: Optional[Sequence[complex]] = None) -> 'GroupAlgebraElement':
        """sum_k c_k lambda_{h_k} with scalar coefficients (all 1 by default)."""
        words = [as_word(w) for w in words]
        if coefficients is None:
            coefficients = [1.0] * len(words)
        if len(coefficients) != len(words):
            raise DimensionMismatchError(f"{len(words)} words but {len(coefficients)} coefficients")
        return cls.from_terms(zip(words, coefficients), 1)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def support(self) -> Tuple[Word, ...]:
        """Support words in canonical order."""
        return self._support

    @property
    def rank(self) -> int:
        """Largest generator index used by the support (0 for multiples of lambda_e)."""
        return max((word_rank(w) for w in self._support), default=0)

    @property
    def max_length(self) -> int:
        return max((len(w) for w in self._support), default=0)

    def coefficient(self, word) -> np.ndarray:
        """c_word, or the zero matrix off the support."""
        matrix = self._coeffs.get(as_word(word))
        if matrix is None:
            return np.zeros((self._dim, self._dim), dtype=complex)
        return matrix

    def items(self) -> List[Tuple[Word, np.ndarray]]:
        return [(w, self._coeffs[w]) for w in self._support]

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_scalar(self) -> bool:
        return self._dim == 1

    def allclose(self, other: 'GroupAlgebraElement', atol: float = 1e-10) -> bool:
        """Coefficientwise comparison up to `atol`."""
        if self._dim != other.dim:
            return False
        words = set(self._support) | set(other.support)
        return all(np.allclose(self.coefficient(w), other.coefficient(w), rtol=0, atol=atol) for w in words)

    def _check_dim(self, other: 'GroupAlgebraElement'):
        if self._dim != other.dim:
            raise DimensionMismatchError(f"coefficient dimensions differ: {self._dim} vs {other.dim}")

    def __len__(self) -> int:
        return len(self._support)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return (self._dim == other.dim and self._support == other.support
                and all(np.array_equal(m, other.coefficient(w)) for w, m in self._coeffs.items()))

    __hash__ = None

    def __add__(self, other: 'GroupAlgebraElement') -> 'GroupAlgebraElement':
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        self._check_dim(other)
        return GroupAlgebraElement.from_terms(self.items() + other.items(), self._dim)

    def __neg__(self) -> 'GroupAlgebraElement':
        return GroupAlgebraElement({w: -m for w, m in self._coeffs.items()}, self._dim)

    def __sub__(self, other: 'GroupAlgebraElement') -> 'GroupAlgebraElement':
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Number):
            return GroupAlgebraElement({w: other * m for w, m in self._coeffs.items()}, self._dim)
        if isinstance(other, GroupAlgebraElement):
            return convolve(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __matmul__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return convolve(self, other)

    def __repr__(self) -> str:
        terms = ', '.join(f"'{format_word(w)}'" for w in self._support[:6])
        more = ', ...' if len(self._support) > 6 else ''
        return f"GroupAlgebraElement(dim={self._dim}, support=[{terms}{more}])"


def convolve(x: GroupAlgebraElement, y: GroupAlgebraElement, cap: Optional[int] = None) -> GroupAlgebraElement:
    """(xy)(g) = sum_h x(h) y(h^-1 g).

    Raises:
        DimensionMismatchError: if x.dim != y.dim
        BudgetExceededError: if #supp(x) * #supp(y) exceeds the product cap
    """
    if x.dim != y.dim:
        raise DimensionMismatchError(f"coefficient dimensions differ: {x.dim} vs {y.dim}")
    cap = resolve_cap(cap, 'product_cap')
    if len(x) * len(y) > cap:
        raise BudgetExceededError(f"convolution of supports {len(x)} x {len(y)} exceeds product cap {cap}")

    out: Dict[Word, np.ndarray] = {}
    for h, a in x.items():
        for k, b in y.items():
            g = multiply(h, k)
            term = a @ b
            if g in out:
                out[g] = out[g] + term
            else:
                out[g] = term
    return GroupAlgebraElement(out, x.dim)


def adjoint(x: GroupAlgebraElement) -> GroupAlgebraElement:
    """x*(g) = x(g^-1)^dagger."""
    return GroupAlgebraElement({invert(g): m.conj().T for g, m in x.items()}, x.dim)


def trace(x: GroupAlgebraElement) -> complex:
    """tau(x) = tr(x(e)) / d."""
    return complex(np.trace(x.coefficient(IDENTITY)) / x.dim)


def l2_norm(x: GroupAlgebraElement) -> float:
    """sqrt(tau(x* x)) = sqrt(sum_g ||x(g)||_F^2 / d)."""
    return math.sqrt(sum(float(np.sum(np.abs(m) ** 2)) for _, m in x.items()) / x.dim)


def apply_semigroup(psi: LengthFunction, t: float, x: GroupAlgebraElement) -> GroupAlgebraElement:
    """T_t x = sum_g exp(-t psi(g)) x(g) lambda_g."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t == 0:
        return x
    return GroupAlgebraElement({g: math.exp(-t * psi(g)) * m for g, m in x.items()}, x.dim)


def bmo_integrand(psi: LengthFunction, t: float, x: GroupAlgebraElement) -> GroupAlgebraElement:
    """T_t |x - T_t x|^2, with |y|^2 = y* y."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    y = x - apply_semigroup(psi, t, x)
    return apply_semigroup(psi, t, convolve(adjoint(y), y))


def rcp_norms(x: GroupAlgebraElement) -> Tuple[float, float]:
    """Spectral norms of sum_g c_g^dagger c_g (column) and sum_g c_g c_g^dagger (row)."""
    if x.is_zero():
        return 0.0, 0.0
    column = sum(m.conj().T @ m for _, m in x.items())
    row = sum(m @ m.conj().T for _, m in x.items())
    return float(np.linalg.norm(column, 2)), float(np.linalg.norm(row, 2))


def haagerup_pisier_bound(x: GroupAlgebraElement, free_support_certificate: bool) -> float:
    """2 max(||sum c^dagger c||^1/2, ||sum c c^dagger||^1/2), an upper bound of ||x||.

    Raises:
        CertificateError: unless the support has been certified free
    """
    if not free_support_certificate:
        raise CertificateError("Haagerup-Pisier bound needs a certificate that the support is free")
    return 2.0 * math.sqrt(max(rcp_norms(x)))


def random_element(words: Iterable, dim: int, rng: np.random.Generator, scale: float = 1.0) -> GroupAlgebraElement:
    """Standard complex Gaussian coefficients on the given words."""
    table = {}
    for w in words:
        table[as_word(w)] = scale * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    return GroupAlgebraElement(table, dim)


def moment_norm(x: GroupAlgebraElement, p: int, cap: Optional[int] = None) -> float:
    """||x||_p = tau((x* x)^(p/2))^(1/p) for even p.

    (x* x)^(p/2) is split into halves u v and tau(u v) is read off directly.

    Raises:
        ValueError: if p is not an even integer >= 2
        BudgetExceededError: if an intermediate support exceeds the support cap
    """
    if p < 2 or int(p) != p or int(p) % 2:
        raise ValueError(f"p must be an even integer >= 2, got {p}")
    cap = resolve_cap(cap, 'support_cap')
    if x.is_zero():
        return 0.0

    z = convolve(adjoint(x), x)
    half = int(p) // 2

    def _power(n: int) -> GroupAlgebraElement:
        result = GroupAlgebraElement.delta(IDENTITY, 1.0, x.dim)
        for _ in range(n):
            result = convolve(result, z)
            if len(result) > cap:
                raise BudgetExceededError(f"support of (x*x)^{n} exceeds support cap {cap}")
        return result

    u = _power(half - half // 2)
    v = u if half % 2 == 0 else _power(half // 2)
    value = sum(np.trace(a @ v.coefficient(invert(g))) for g, a in u.items()) / x.dim
    return max(float(np.real(value)), 0.0) ** (1.0 / p)


@dataclass
class _CompiledSupport:
    out_size: int
    targets: List[np.ndarray]
    ball_positions: np.ndarray


class TruncatedRepresentation:
    """The left regular representation of F_rank restricted to the ball P_{<=R}.

    Basis order is that of words.enumerate_ball. Rank-one balls are indexed
    arithmetically (a^n at 0 for n = 0, else 2|n| - 1 + [n > 0]) and never
    materialize their words.
    """

    def __init__(self, rank: int, radius: int, cap: Optional[int] = None):
        if rank < 1:
            raise RankError(f"rank must be positive, got {rank}")
        if radius < 0:
            raise ValueError(f"radius must be nonnegative, got {radius}")
        self.rank = int(rank)
        self.radius = int(radius)
        self._cap = resolve_cap(cap, 'ball_cap')
        size = ball_size(self.rank, self.radius)
        if size > self._cap:
            raise BudgetExceededError(f"ball of radius {radius} in F_{rank} has {size} words, cap is {self._cap}")
        self.size = size
        self._basis: Optional[List[Word]] = None
        self._index: Optional[Dict[Word, int]] = None
        self._compiled: Dict[Tuple[Word, ...], _CompiledSupport] = {}
        if self.rank == 1:
            exponents = np.zeros(size, dtype=np.int64)
            exponents[1::2] = -np.arange(1, self.radius + 1)
            exponents[2::2] = np.arange(1, self.radius + 1)
            self._exponents = exponents
            # position of each basis word in the order a^-R, ..., a^R
            self._natural = exponents + self.radius

    @property
    def basis(self) -> List[Word]:
        if self._basis is None:
            self._basis = enumerate_ball(self.rank, self.radius, cap=self._cap)
        return self._basis

    def index_of(self, word) -> int:
        """Position of a word in the basis.

        Raises:
            KeyError: if the word lies outside the ball
        """
        word = as_word(word)
        if len(word) > self.radius:
            raise KeyError(format_word(word))
        if self.rank == 1:
            if word_rank(word) > 1:
                raise KeyError(format_word(word))
            n = exponent_sum(word)
            return 0 if n == 0 else 2 * abs(n) - 1 + (n > 0)
        if self._index is None:
            self._index = {w: i for i, w in enumerate(self.basis)}
        return self._index[word]

    def _compile(self, support: Tuple[Word, ...]) -> _CompiledSupport:
        if support in self._compiled:
            return self._compiled[support]
        if any(word_rank(h) > self.rank for h in support):
            raise RankError(f"element uses generators beyond F_{self.rank}")

        if self.rank == 1:
            reach = self.radius + max((len(h) for h in support), default=0)
            targets = [self._exponents + exponent_sum(h) + reach for h in support]
            compiled = _CompiledSupport(2 * reach + 1, targets, self._exponents + reach)
        else:
            product_cap = resolve_cap(None, 'product_cap')
            if len(support) * self.size > product_cap:
                raise BudgetExceededError(
                    f"{len(support)} support words on a ball of {self.size} exceed product cap {product_cap}")
            if self._index is None:
                self._index = {w: i for i, w in enumerate(self.basis)}
            positions = dict(self._index)
            targets = []
            for h in support:
                targets.append(np.fromiter(
                    (positions.setdefault(multiply(h, w), len(positions)) for w in self.basis),
                    dtype=np.int64, count=self.size))
            compiled = _CompiledSupport(len(positions), targets, np.arange(self.size))
            logger.debug(f"Compiled {len(support)} support words on F_{self.rank} ball R={self.radius}: "
                         f"{compiled.out_size} output words")
        self._compiled[support] = compiled
        return compiled

    def _coefficients(self, x: GroupAlgebraElement) -> List[np.ndarray]:
        return [m for _, m in x.items()]

    def apply(self, x: GroupAlgebraElement, xi: np.ndarray) -> np.ndarray:
        """lambda(x) xi for xi of shape (size, d); the result lives on the output set of the compiled support."""
        compiled = self._compile(x.support)
        out = np.zeros((compiled.out_size, x.dim), dtype=complex)
        for target, c in zip(compiled.targets, self._coefficients(x)):
            out[target] += xi @ c.T
        return out

    def apply_adjoint(self, x: GroupAlgebraElement, eta: np.ndarray) -> np.ndarray:
        """P lambda(x)* eta, read back onto the ball."""
        compiled = self._compile(x.support)
        result = np.zeros((self.size, x.dim), dtype=complex)
        for target, c in zip(compiled.targets, self._coefficients(x)):
            result += eta[target] @ c.conj()
        return result

    def gram_operator(self, x: GroupAlgebraElement):
        """The map xi -> P lambda(x)* lambda(x) P xi on flat vectors of length size * d."""
        if self.rank == 1:
            return self.compression(convolve(adjoint(x), x))
        shape = (self.size, x.dim)

        def matvec(v: np.ndarray) -> np.ndarray:
            xi = np.asarray(v, dtype=complex).reshape(shape)
            return self.apply_adjoint(x, self.apply(x, xi)).ravel()
        return matvec

    def compression(self, y: GroupAlgebraElement):
        """The map xi -> P lambda(y) P xi on flat vectors of length size * d."""
        if self.rank == 1:
            return self._toeplitz(y)
        shape = (self.size, y.dim)

        def matvec(v: np.ndarray) -> np.ndarray:
            xi = np.asarray(v, dtype=complex).reshape(shape)
            out = self.apply(y, xi)
            return out[self._compile(y.support).ball_positions].ravel()
        return matvec

    def _toeplitz(self, y: GroupAlgebraElement):
        """Compression on the integers: a block Toeplitz product evaluated by FFT convolution."""
        if y.rank > 1:
            raise RankError(f"element uses generators beyond F_{self.rank}")
        exponents = np.array([exponent_sum(g) for g in y.support], dtype=np.int64)
        reach = int(np.max(np.abs(exponents), initial=0))
        # kernel[n + reach] = c_{a^n}; rank-one reduced words are distinct powers
        kernel = np.zeros((2 * reach + 1, y.dim, y.dim), dtype=complex)
        kernel[exponents + reach] = np.array([m for _, m in y.items()])
        natural = self._natural
        shape = (self.size, y.dim)

        def matvec(v: np.ndarray) -> np.ndarray:
            xi = np.asarray(v, dtype=complex).reshape(shape)
            ordered = np.empty_like(xi)
            ordered[natural] = xi
            full = fftconvolve(kernel, ordered[:, None, :], axes=0).sum(axis=2)
            return full[reach:reach + self.size][natural].ravel()
        return matvec

    def modulated_window(self, theta: float) -> np.ndarray:
        """Hann window on a^-R..a^R modulated by exp(-i n theta), in basis order.

        Its Rayleigh quotient for a scalar y is a smoothed value of the
        trigonometric polynomial sum_n y(a^n) e^{in theta} near theta.
        """
        if self.rank != 1:
            raise RankError("modulated windows live on the integers")
        n = self._exponents
        window = np.cos(np.pi * n / (2 * (self.radius + 1))) ** 2
        return window * np.exp(-1j * n * theta)


@dataclass
class NormEstimate:
    value: float
    converged: bool
    radius: int
    iterations: int
    vector: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {'value': self.value, 'converged': self.converged, 'radius': self.radius,
                'iterations': self.iterations}


def _representation_rank(x: GroupAlgebraElement, rank: Optional[int]) -> int:
    needed = max(x.rank, 1)
    if rank is None:
        return needed
    if rank < needed:
        raise RankError(f"element uses generator {needed} but rank {rank} was requested")
    return rank


def _representation_for(x: GroupAlgebraElement, R: int, rank: Optional[int], cap: Optional[int],
                        representation: Optional[TruncatedRepresentation]) -> TruncatedRepresentation:
    """Reuse `representation` only when both its radius and its rank are the ones asked for."""
    wanted = _representation_rank(x, rank)
    if representation is not None and representation.radius == R and representation.rank == wanted:
        return representation
    return TruncatedRepresentation(wanted, R, cap=cap)


def _counted(matvec):
    calls = [0]

    def apply(v: np.ndarray) -> np.ndarray:
        calls[0] += 1
        return matvec(v)
    return apply, calls


def estimate_operator_norm(x: GroupAlgebraElement, R: int, rank: Optional[int] = None,
                           tol: float = NORM_TOL, max_iter: int = NORM_MAX_ITER, seed: int = 0,
                           cap: Optional[int] = None,
                           representation: Optional[TruncatedRepresentation] = None) -> NormEstimate:
    """Lower bound of ||x|| from the ball of radius R.

    The top eigenvalue of P lambda(x)* lambda(x) P is estimated twice (seeds
    `seed` and `seed + 1`) and compared with the exact Rayleigh bound at
    delta_e tensor C^d, ||sum c^dagger c||; the largest of the three is the
    reported square. Never raises on non-convergence. Passing a
    `representation` of matching radius and rank reuses its compiled index
    maps across calls.

    Raises:
        BudgetExceededError: if the ball exceeds the ball cap
    """
    if x.is_zero():
        return NormEstimate(0.0, True, R, 0)
    floor = rcp_norms(x)[0]
    if x.support == (IDENTITY,):
        return NormEstimate(math.sqrt(floor), True, R, 0)
    representation = _representation_for(x, R, rank, cap, representation)
    counted, calls = _counted(representation.gram_operator(x))

    dim = representation.size * x.dim
    seeds = (seed,) if dim <= DENSE_LIMIT else (seed, seed + 1)
    runs = [top_eigenvalue(counted, dim, tol=tol, max_iter=max_iter, seed=s) for s in seeds]
    best = max(runs, key=lambda run: run.value)
    converged = all(run.converged for run in runs)
    value = math.sqrt(max(best.value, floor, 0.0))
    if not converged:
        logger.warning(f"Norm estimate at R={R} did not converge; reporting best iterate {value:.8f}")
    logger.debug(f"||x|| >= {value:.8f} at R={R} ({calls[0]} operator applications)")
    return NormEstimate(value, converged, R, calls[0], best.vector)


def estimate_positive_norm(y: GroupAlgebraElement, R: int, rank: Optional[int] = None,
                           tol: float = SWEEP_TOL, max_iter: int = SWEEP_MAX_ITER, seed: int = 0,
                           cap: Optional[int] = None,
                           representation: Optional[TruncatedRepresentation] = None,
                           guesses: Optional[Sequence[np.ndarray]] = None) -> NormEstimate:
    """Lower bound of ||y|| for self-adjoint y: the top eigenvalue of P lambda(y) P.

    For positive y this is the norm itself in the limit R -> inf. The
    iteration starts from `guesses` (flat vectors on the ball, e.g. the
    eigenvector of a nearby element) and stops at a residual of `tol`
    relative to sum_g ||c_g||. The exact bound lambda_max(c_e) at
    delta_e tensor C^d is always included. The returned `vector` can seed
    the next call.
    """
    if y.is_zero():
        return NormEstimate(0.0, True, R, 0)
    c_e = y.coefficient(IDENTITY)
    floor = float(np.linalg.eigvalsh((c_e + c_e.conj().T) / 2)[-1])
    if y.support == (IDENTITY,):
        return NormEstimate(max(floor, 0.0), True, R, 0)
    representation = _representation_for(y, R, rank, cap, representation)
    counted, calls = _counted(representation.compression(y))

    dim = representation.size * y.dim
    scale = sum(float(np.linalg.norm(m, 2)) for _, m in y.items())
    block = None if not guesses else np.column_stack([np.asarray(g).ravel() for g in guesses])
    result = refine_top_eigenvalue(counted, dim, block, tol=tol * scale, max_iter=max_iter, seed=seed)
    value = max(result.value, floor, 0.0)
    logger.debug(f"lambda_max(P y P) >= {value:.8f} at R={R} ({calls[0]} operator applications, "
                 f"converged={result.converged})")
    return NormEstimate(value, result.converged, R, calls[0], result.vector)


def operator_norm_lower(x: GroupAlgebraElement, R: int, rank: Optional[int] = None, **kwargs) -> float:
    """Certified lower bound of ||x|| in L(F_rank); nondecreasing in R."""
    return estimate_operator_norm(x, R, rank=rank, **kwargs).value


def compressed_eigenvalue_bounds(y: GroupAlgebraElement, R: int, rank: Optional[int] = None,
                                 tol: float = NORM_TOL, max_iter: int = NORM_MAX_ITER,
                                 cap: Optional[int] = None) -> Tuple[float, float]:
    """(min, max) eigenvalues of P lambda(y) P on the ball, for self-adjoint y.

    Raises:
        ValueError: if y is not self-adjoint to 1e-10
    """
    if not adjoint(y).allclose(y):
        raise ValueError("compressed eigenvalues need a self-adjoint element")
    if y.is_zero():
        return 0.0, 0.0
    representation = TruncatedRepresentation(_representation_rank(y, rank), R, cap=cap)
    matvec = representation.compression(y)
    dim = representation.size * y.dim
    low = top_eigenvalue(matvec, dim, tol=tol, max_iter=max_iter, which='SA')
    high = top_eigenvalue(matvec, dim, tol=tol, max_iter=max_iter, which='LA')
    return low.value, high.value

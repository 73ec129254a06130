"""Semigroup BMO norms of finitely supported elements.

||x||_{BMO_c} = sup_t ||T_t |x - T_t x|^2||^1/2 and the two-sided norm is the
max of the column norms of x and x*. On free groups only lower bounds are
computable (truncated representation) together with the certified upper
bound sqrt(c_delta max(||sum c^dagger c||, ||sum c c^dagger||)) available
when the support is psi-lacunary. On the integers the integrand is a
trigonometric polynomial and its sup norm is evaluated directly.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from src.analysis.algebra import (
    GroupAlgebraElement, TruncatedRepresentation, adjoint, bmo_integrand, convolve,
    estimate_positive_norm, moment_norm, rcp_norms
)
from src.analysis.lacunary import LacunaryReport, default_t_grid, lacunarity_constants
from src.common.errors import (
    CertificateError, DimensionMismatchError, DuplicateElementError, LacunarityError, RankError
)
from src.groups.lengths import LengthFunction, abs_length
from src.groups.words import IDENTITY, exponent_sum

logger = logging.getLogger(__name__)

KERNEL_TOL = 1e-15
TORUS_SAMPLES = 2 ** 16
GOLDEN_XTOL = 1e-10
COROLLARY_SLACK = 1e-9


def support_t_grid(psi: LengthFunction, x: GroupAlgebraElement) -> np.ndarray:
    """Default grid built from the psi-values of the support."""
    return default_t_grid([psi(g) for g in x.support])


def _grid(psi: LengthFunction, x: GroupAlgebraElement, t_grid: Optional[Sequence[float]]) -> np.ndarray:
    grid = support_t_grid(psi, x) if t_grid is None else np.asarray(t_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0):
        raise ValueError("t-grid must be nonempty with positive points")
    return grid


def limit_integrand(psi: LengthFunction, x: GroupAlgebraElement) -> GroupAlgebraElement:
    """lim_{t -> inf} T_t |x - T_t x|^2.

    Only the part y of x where psi > 0 survives in x - T_t x, and T_t then
    keeps the words of y* y on which psi vanishes.
    """
    y = GroupAlgebraElement({g: m for g, m in x.items() if psi(g) > KERNEL_TOL}, x.dim)
    z = convolve(adjoint(y), y)
    return GroupAlgebraElement({g: m for g, m in z.items() if psi(g) <= KERNEL_TOL}, x.dim)


@dataclass
class BmoSweep:
    """Column BMO lower bound of one element with its per-t values."""
    value: float
    t_star: float
    values: List[float]


def _window_guess(y: GroupAlgebraElement, representation: TruncatedRepresentation) -> Optional[np.ndarray]:
    """Window at the argmax of y on the circle, for scalar elements on the integers."""
    if representation.rank != 1 or not y.is_scalar() or y.is_zero():
        return None
    n_samples = 1 << int(math.ceil(math.log2(4 * representation.size)))
    theta = 2 * math.pi * int(np.argmax(_trig_values(y, n_samples))) / n_samples
    return representation.modulated_window(theta)


def bmo_c_sweep(psi: LengthFunction, x: GroupAlgebraElement, t_grid: Optional[Sequence[float]] = None,
                R: int = 8, rank: Optional[int] = None, include_limit: bool = True) -> BmoSweep:
    """Evaluate ||T_t|x - T_t x|^2||^1/2 from below on every grid point.

    Each integrand is positive, so its norm is bounded below by the top
    eigenvalue of its compression to the ball; consecutive t-values start
    from the previous eigenvector. With `include_limit` the t -> inf
    integrand is evaluated too; t_star is then inf when the limit attains
    the max.
    """
    grid = _grid(psi, x, t_grid)
    if x.is_zero():
        return BmoSweep(0.0, float(grid[0]), [0.0] * grid.size)

    representation = TruncatedRepresentation(max(x.rank, 1) if rank is None else rank, R)

    def evaluate(y: GroupAlgebraElement, previous: Optional[np.ndarray]):
        guesses = [g for g in (previous, _window_guess(y, representation)) if g is not None]
        return estimate_positive_norm(y, R, rank=representation.rank, representation=representation,
                                      guesses=guesses)

    values = []
    previous = None
    for t in grid:
        estimate = evaluate(bmo_integrand(psi, float(t), x), previous)
        previous = estimate.vector if estimate.vector is not None else previous
        values.append(math.sqrt(estimate.value))

    best = int(np.argmax(values))
    value, t_star = values[best], float(grid[best])
    if include_limit:
        limit_value = math.sqrt(evaluate(limit_integrand(psi, x), previous).value)
        if limit_value > value:
            value, t_star = limit_value, math.inf
    logger.debug(f"BMO_c sweep over {grid.size} t-values at R={R}: {value:.8f} at t={t_star}")
    return BmoSweep(value, t_star, values)


def bmo_c_estimate(psi: LengthFunction, x: GroupAlgebraElement, t_grid: Optional[Sequence[float]] = None,
                   R: int = 8, **kwargs) -> float:
    """Certified lower bound of ||x||_{BMO_c(psi)}, nondecreasing in the grid and in R."""
    return bmo_c_sweep(psi, x, t_grid, R, **kwargs).value


def support_lacunarity(psi: LengthFunction, x: GroupAlgebraElement) -> Optional[LacunaryReport]:
    """Lacunarity of supp(x) ordered by increasing psi.

    None when the support cannot be certified: it contains e, two words share
    a psi-value, or delta <= 0. A single word gets the vacuous report.
    """
    words = list(x.support)
    if not words or IDENTITY in words:
        return None
    values = [psi(g) for g in words]
    if any(v <= 0 for v in values):
        return None
    if len(words) == 1:
        return LacunaryReport.vacuous()

    ordered = [w for _, w in sorted(zip(values, words), key=lambda pair: pair[0])]
    sorted_values = sorted(values)
    if any(a == b for a, b in zip(sorted_values, sorted_values[1:])):
        logger.debug("Support has tied psi-values; no lacunarity certificate")
        return None
    try:
        report = lacunarity_constants(psi, ordered)
    except (LacunarityError, DuplicateElementError) as e:
        logger.debug(f"Support is not certifiable: {e}")
        return None
    return report if report.passed else None


def theorem1_certificate(psi: LengthFunction, x: GroupAlgebraElement) -> Optional[float]:
    """sqrt(c_delta max(rcp_norms(x))) when supp(x) is psi-lacunary, else None.

    A single term c lambda_h has BMO_c norm at most ||c||, which is returned
    directly; the zero element gets 0.
    """
    if x.is_zero():
        return 0.0
    report = support_lacunarity(psi, x)
    if report is None:
        return None
    if len(x) == 1:
        return math.sqrt(max(rcp_norms(x)))
    return math.sqrt(report.c_delta * max(rcp_norms(x)))


def bmo_lower_witness(psi: LengthFunction, x: GroupAlgebraElement, t_grid: Optional[Sequence[float]] = None,
                      include_limit: bool = True) -> float:
    """sup_t tau(T_t |x - T_t x|^2) = sup_t sum_g (1 - exp(-t psi(g)))^2 ||x(g)||_F^2 / d.

    The sum increases with t; its limit sum_{psi(g) > 0} ||x(g)||_F^2 / d is
    included unless `include_limit` is False.
    """
    if x.is_zero():
        return 0.0
    grid = _grid(psi, x, t_grid)
    values = np.array([psi(g) for g in x.support])
    weights = np.array([float(np.sum(np.abs(m) ** 2)) for _, m in x.items()]) / x.dim
    factors = np.expm1(-np.outer(grid, values)) ** 2
    best = float(np.max(factors @ weights))
    if include_limit:
        best = max(best, float(np.sum(weights[values > KERNEL_TOL])))
    return best


@dataclass
class BmoEstimate:
    bmo_c_lower: float
    bmo_c_adjoint_lower: float
    bmo_lower: float
    certified_upper: Optional[float]
    t_star: float
    radius_used: int
    lacunarity: Optional[LacunaryReport] = None
    rows: List[Dict[str, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'bmo_c_lower': self.bmo_c_lower,
            'bmo_c_adjoint_lower': self.bmo_c_adjoint_lower,
            'bmo_lower': self.bmo_lower,
            'certified_upper': self.certified_upper,
            't_star': self.t_star,
            'radius_used': self.radius_used,
            'lacunarity': self.lacunarity.to_dict() if self.lacunarity else None,
        }


def bmo_estimate(psi: LengthFunction, x: GroupAlgebraElement, t_grid: Optional[Sequence[float]] = None,
                 R: int = 8, rank: Optional[int] = None, include_limit: bool = True) -> BmoEstimate:
    """Two-sided BMO lower bound, with the lacunary upper bound when it applies."""
    grid = _grid(psi, x, t_grid)
    column = bmo_c_sweep(psi, x, grid, R, rank=rank, include_limit=include_limit)
    row = bmo_c_sweep(psi, adjoint(x), grid, R, rank=rank, include_limit=include_limit)
    t_star = column.t_star if column.value >= row.value else row.t_star

    upper = theorem1_certificate(psi, x)
    if upper is not None and upper < max(column.value, row.value) - 1e-8:
        logger.warning(f"Certified upper bound {upper:.8f} is below the computed lower bound "
                       f"{max(column.value, row.value):.8f}")

    rows = [{'t': float(t), 'bmo_c': c, 'bmo_c_adjoint': r} for t, c, r in zip(grid, column.values, row.values)]
    estimate = BmoEstimate(column.value, row.value, max(column.value, row.value), upper, t_star, R,
                           support_lacunarity(psi, x), rows)
    logger.info(f"BMO estimate at R={R}: lower {estimate.bmo_lower:.8f}, certified upper {upper}")
    return estimate


def _trig_values(z: GroupAlgebraElement, n_samples: int) -> np.ndarray:
    coefficients = np.zeros(n_samples, dtype=complex)
    for g, m in z.items():
        coefficients[exponent_sum(g) % n_samples] += m[0, 0]
    # sum_n c_n exp(i n theta_j) at theta_j = 2 pi j / N
    return np.real(np.fft.ifft(coefficients) * n_samples)


def _trig_evaluator(z: GroupAlgebraElement):
    exponents = np.array([exponent_sum(g) for g in z.support], dtype=float)
    coefficients = np.array([m[0, 0] for _, m in z.items()])
    return lambda theta: float(np.real(np.sum(coefficients * np.exp(1j * exponents * theta))))


def trig_sup(z: GroupAlgebraElement, n_samples: int = TORUS_SAMPLES) -> float:
    """max over the circle of the real trigonometric polynomial sum_n z(a^n) e^{in theta}.

    Uniform sampling through an FFT, then one golden-section refinement
    bracketed by the neighbours of the discrete argmax.
    """
    if z.is_zero():
        return 0.0
    samples = _trig_values(z, n_samples)
    j = int(np.argmax(samples))
    best = float(samples[j])

    step = 2 * math.pi / n_samples
    f = _trig_evaluator(z)
    a, b, c = (j - 1) * step, j * step, (j + 1) * step
    fa, fb, fc = -f(a), -f(b), -f(c)
    if fb < fa and fb < fc:
        result = minimize_scalar(lambda theta: -f(theta), bracket=(a, b, c), method='golden',
                                 options={'xtol': GOLDEN_XTOL})
        best = max(best, float(-result.fun))
    return best


@dataclass
class TorusEstimate:
    value: float
    t_star: float
    n_samples: int
    values: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return {'value': self.value, 't_star': self.t_star, 'n_samples': self.n_samples}


def torus_bmo_sweep(x: GroupAlgebraElement, t_grid: Optional[Sequence[float]] = None,
                    n_samples: int = TORUS_SAMPLES, psi: Optional[LengthFunction] = None,
                    include_limit: bool = True) -> TorusEstimate:
    """Exact-up-to-sampling BMO_c norm of a scalar element on the integers.

    Raises:
        RankError: if x uses a generator other than a
        DimensionMismatchError: if x has matrix coefficients
    """
    if x.rank > 1:
        raise RankError("the torus estimator needs an element supported on the integers")
    if not x.is_scalar():
        raise DimensionMismatchError("the torus estimator needs scalar coefficients")
    psi = psi or abs_length()
    grid = _grid(psi, x, t_grid)
    if x.is_zero():
        return TorusEstimate(0.0, float(grid[0]), n_samples, [0.0] * grid.size)

    values = [math.sqrt(max(trig_sup(bmo_integrand(psi, float(t), x), n_samples), 0.0)) for t in grid]
    best = int(np.argmax(values))
    value, t_star = values[best], float(grid[best])
    if include_limit:
        limit_value = math.sqrt(max(trig_sup(limit_integrand(psi, x), n_samples), 0.0))
        if limit_value > value:
            value, t_star = limit_value, math.inf
    logger.info(f"Torus BMO estimate over {grid.size} t-values: {value:.8f}")
    return TorusEstimate(value, t_star, n_samples, values)


def torus_bmo_estimate(x: GroupAlgebraElement, t_grid: Optional[Sequence[float]] = None,
                       n_samples: int = TORUS_SAMPLES, psi: Optional[LengthFunction] = None) -> float:
    """sup_t max_theta sqrt(y_t(theta)) for y_t = T_t|x - T_t x|^2 on the circle."""
    return torus_bmo_sweep(x, t_grid, n_samples, psi).value


def _normalized_schatten(matrix: np.ndarray, q: float) -> float:
    # (tr(A^q) / d)^(1/q) for positive A
    eigenvalues = np.clip(np.linalg.eigvalsh(matrix), 0.0, None)
    return float(np.mean(eigenvalues ** q) ** (1.0 / q))


def coefficient_norms(x: GroupAlgebraElement, p: int, coefficient_norm: str = 'operator') -> Tuple[float, float]:
    """Column and row sizes of the coefficients entering the moment inequality.

    'operator' gives rcp_norms(x); 'schatten' gives the normalized
    Schatten-p/2 norms of sum c^dagger c and sum c c^dagger.
    """
    if coefficient_norm == 'operator':
        return rcp_norms(x)
    if coefficient_norm != 'schatten':
        raise ValueError(f"coefficient_norm must be 'operator' or 'schatten', got {coefficient_norm!r}")
    if x.is_zero():
        return 0.0, 0.0
    column = sum(m.conj().T @ m for _, m in x.items())
    row = sum(m @ m.conj().T for _, m in x.items())
    return _normalized_schatten(column, p / 2), _normalized_schatten(row, p / 2)


@dataclass
class Corollary1Report:
    lhs: float
    rhs: float
    c_delta: float
    p: int
    coefficient_norm: str
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lhs': self.lhs,
            'rhs': self.rhs,
            'c_delta': self.c_delta,
            'p': self.p,
            'coefficient_norm': self.coefficient_norm,
            'passed': self.passed,
        }


def corollary1_check(psi: LengthFunction, x: GroupAlgebraElement, p: int,
                     coefficient_norm: str = 'operator', cap: Optional[int] = None) -> Corollary1Report:
    """Check ||x||_p^2 <= c_delta^((p-2)/p) p^2 max(column, row) for lacunary x.

    Raises:
        CertificateError: if supp(x) is not certified psi-lacunary
        ValueError: if p is not an even integer >= 2
        BudgetExceededError: if the exact moment exceeds the support cap
    """
    report = support_lacunarity(psi, x)
    if report is None:
        raise CertificateError("the moment inequality needs a psi-lacunary support")
    lhs = moment_norm(x, p, cap=cap) ** 2
    rhs = report.c_delta ** ((p - 2) / p) * p ** 2 * max(coefficient_norms(x, p, coefficient_norm))
    passed = lhs <= rhs * (1 + COROLLARY_SLACK)
    logger.info(f"Moment inequality at p={p}: {lhs:.6f} <= {rhs:.6f} is {passed}")
    return Corollary1Report(lhs, rhs, report.c_delta, int(p), coefficient_norm, passed)

"""Reduced words in free groups of any rank.

Generators are nonzero integers: index k is a generator and -k its formal
inverse. The same engine covers F_r, the lazily indexed F_infinity, and the
integers as the rank-one free group (a^n is the word of |n| letters sign(n)).
"""

import re
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.common.config import resolve_cap
from src.common.errors import BudgetExceededError, InvalidWordError, MissingImageError, WordParseError

logger = logging.getLogger(__name__)

IDENTITY_LITERAL = 'e'
LETTER_ALIASES = {'a': 1, 'b': 2, 'A': -1, 'B': -2}

_TOKEN = re.compile(r'\S+')


@dataclass(frozen=True)
class Generator:
    """A generator g_k of the free group; negative indices are inverses."""
    index: int

    def __post_init__(self):
        if int(self.index) == 0:
            raise InvalidWordError("generator index 0 is not allowed")

    def inverse(self) -> 'Generator':
        return Generator(-self.index)

    def __int__(self) -> int:
        return int(self.index)


class Word(tuple):
    """A reduced word, stored as the tuple of its signed generator indices.

    Constructing a Word always reduces its letters; the empty word is the
    identity e.
    """
    __slots__ = ()

    def __new__(cls, letters: Iterable = ()):
        return reduce(letters)

    @property
    def length(self) -> int:
        return len(self)

    def inverse(self) -> 'Word':
        return invert(self)

    def __repr__(self) -> str:
        return f"Word('{format_word(self)}')"

    def __str__(self) -> str:
        return format_word(self)


IDENTITY = tuple.__new__(Word, ())


def _word(letters: Sequence[int]) -> Word:
    # letters are known to be reduced
    return tuple.__new__(Word, letters)


def as_word(letters) -> Word:
    """Return `letters` as a Word, reducing only when it is not one already."""
    if isinstance(letters, Word):
        return letters
    return reduce(letters)


def reduce(letters: Iterable) -> Word:
    """Freely reduce a sequence of generators (ints or Generator objects).

    Raises:
        InvalidWordError: if any letter has index 0
    """
    stack: List[int] = []
    for letter in letters:
        k = int(letter)
        if k == 0:
            raise InvalidWordError("generator index 0 is not allowed")
        if stack and stack[-1] == -k:
            stack.pop()
        else:
            stack.append(k)
    return _word(stack)


def is_reduced(letters: Sequence[int]) -> bool:
    """True when no adjacent pair (k, -k) occurs and no letter is 0."""
    if any(int(k) == 0 for k in letters):
        return False
    return all(letters[i] != -letters[i + 1] for i in range(len(letters) - 1))


def multiply(u, v) -> Word:
    """Reduced product u*v."""
    u, v = as_word(u), as_word(v)
    n = min(len(u), len(v))
    k = 0
    while k < n and u[-1 - k] == -v[k]:
        k += 1
    return _word(u[:len(u) - k] + v[k:])


def invert(u) -> Word:
    """Reduced inverse: reversed letters with negated indices."""
    u = as_word(u)
    return _word(tuple(-k for k in reversed(u)))


def word_length(u) -> int:
    return len(as_word(u))


def word_rank(u) -> int:
    """Largest generator index used by the word (0 for e)."""
    return max((abs(k) for k in u), default=0)


def exponent_sum(u) -> int:
    """For rank-one words a^n this is n."""
    return int(sum(u))


def power(base: int, n: int) -> Word:
    """The word g_base^n."""
    if base == 0:
        raise InvalidWordError("generator index 0 is not allowed")
    letter = base if n >= 0 else -base
    return _word((letter,) * abs(n))


def starts_with(g, h) -> bool:
    """Whether g lies in the cone L_h of reduced words beginning with h.

    Equivalent to |h^-1 g| = |g| - |h|. Left multiplication by a reduced word
    k of length 2n increases length exactly when g does not start with the
    inverse of the right half of k.
    """
    g, h = as_word(g), as_word(h)
    return len(g) >= len(h) and g[:len(h)] == tuple(h)


def canonical_key(u) -> Tuple:
    """Sort key: length first, then lexicographic with -k < k < -(k+1)."""
    return (len(u), tuple((abs(k), k > 0) for k in u))


def alphabet(rank: int) -> List[int]:
    """Signed generator indices of F_rank in canonical order."""
    if rank < 1:
        raise ValueError(f"rank must be positive, got {rank}")
    letters = []
    for k in range(1, rank + 1):
        letters.extend((-k, k))
    return letters


def sphere_size(rank: int, d: int) -> int:
    """#P_d = 2r(2r-1)^(d-1) for d >= 1, and 1 for d = 0."""
    if d < 0:
        raise ValueError(f"radius must be nonnegative, got {d}")
    if d == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (d - 1)


def ball_size(rank: int, d: int) -> int:
    """#P_{<=d}."""
    return sum(sphere_size(rank, j) for j in range(d + 1))


def _extend(level: List[Word], letters: List[int]) -> List[Word]:
    out = []
    for w in level:
        forbidden = -w[-1] if w else 0
        for k in letters:
            if k != forbidden:
                out.append(_word(w + (k,)))
    return out


def enumerate_sphere(rank: int, d: int, cap: Optional[int] = None) -> List[Word]:
    """All reduced words of length exactly d, in canonical order.

    Raises:
        BudgetExceededError: if #P_d exceeds the ball cap
    """
    cap = resolve_cap(cap, 'ball_cap')
    size = sphere_size(rank, d)
    if size > cap:
        raise BudgetExceededError(f"sphere of radius {d} in F_{rank} has {size} words, cap is {cap}")
    letters = alphabet(rank)
    level = [IDENTITY]
    for _ in range(d):
        level = _extend(level, letters)
    return level


def enumerate_ball(rank: int, d: int, cap: Optional[int] = None) -> List[Word]:
    """All reduced words of length <= d, length-major then lexicographic.

    The predicted size is checked before anything is allocated; the guard is
    a hard error so callers always know the exact truncation radius.

    Raises:
        BudgetExceededError: if #P_{<=d} exceeds the ball cap
    """
    cap = resolve_cap(cap, 'ball_cap')
    size = ball_size(rank, d)
    if size > cap:
        raise BudgetExceededError(f"ball of radius {d} in F_{rank} has {size} words, cap is {cap}")
    letters = alphabet(rank)
    level = [IDENTITY]
    ball = list(level)
    for _ in range(d):
        level = _extend(level, letters)
        ball.extend(level)
    logger.debug(f"Enumerated ball of radius {d} in F_{rank}: {len(ball)} words")
    return ball


def random_word(rank: int, length: int, rng: np.random.Generator) -> Word:
    """Uniformly random reduced word of the given length."""
    letters = alphabet(rank)
    out: List[int] = []
    for _ in range(length):
        choices = [k for k in letters if not out or k != -out[-1]]
        out.append(choices[int(rng.integers(len(choices)))])
    return _word(out)


@dataclass(frozen=True)
class Homomorphism:
    """A homomorphism out of a free group, given on positive generators.

    Images come from the explicit `images` table or, for indices not listed,
    from `rule`. The image of -k is always the inverse of the image of k.
    """
    images: Mapping[int, Word] = field(default_factory=dict)
    rule: Optional[Callable[[int], Sequence[int]]] = None
    name: str = 'homomorphism'

    def __post_init__(self):
        table: Dict[int, Word] = {}
        for k, image in self.images.items():
            if int(k) <= 0:
                raise InvalidWordError(f"images are given on positive indices only, got {k}")
            table[int(k)] = as_word(image)
        object.__setattr__(self, 'images', table)

    def image(self, index: int) -> Word:
        """Reduced image of generator `index` (negative means inverse)."""
        if index == 0:
            raise InvalidWordError("generator index 0 is not allowed")
        k = abs(index)
        if k in self.images:
            image = self.images[k]
        elif self.rule is not None:
            image = reduce(self.rule(k))
        else:
            raise MissingImageError(f"{self.name} has no image for generator index {k}")
        return image if index > 0 else invert(image)


def apply_homomorphism(h: Homomorphism, u) -> Word:
    """Reduced image of u under h."""
    result = IDENTITY
    for k in as_word(u):
        result = multiply(result, h.image(k))
    return result


def parse_word(literal: str, letters: bool = False, line: int = 1) -> Word:
    """Parse a word literal: space-separated nonzero integers, or 'e'.

    With `letters=True`, tokens made of a, b, A, B are also accepted
    (a=1, b=2, A=-1, B=-2), either spaced ("a b A") or run together ("abA").

    Raises:
        WordParseError: with the 1-based line and column of the bad token
    """
    if literal.strip() == IDENTITY_LITERAL:
        return IDENTITY
    out: List[int] = []
    for match in _TOKEN.finditer(literal):
        token = match.group()
        column = match.start() + 1
        if letters and all(ch in LETTER_ALIASES for ch in token):
            out.extend(LETTER_ALIASES[ch] for ch in token)
            continue
        try:
            value = int(token)
        except ValueError:
            raise WordParseError(f"'{token}' is not a nonzero integer", line, column)
        if value == 0:
            raise WordParseError("generator index 0 is not allowed", line, column)
        out.append(value)
    if not out:
        raise WordParseError(f"empty literal, use '{IDENTITY_LITERAL}' for the identity", line, 1)
    return reduce(out)


def format_word(u) -> str:
    """Inverse of parse_word for integer literals."""
    if len(u) == 0:
        return IDENTITY_LITERAL
    return ' '.join(str(int(k)) for k in u)

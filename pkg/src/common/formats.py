"""Readers for the experiment input files.

Text formats are line based: blank lines and lines starting with '#' are
skipped, and parse errors report the 1-based line and column.

  word list      one word literal per line
  length table   "<word literal>\t<decimal>"
  phi table      "<k>\t<phi(k)>"
  element        JSON array of {"word": ..., "coeff": [[[re, im], ...], ...]}
                 or the scalar shorthand {"word": ..., "re": ..., "im": ...}
"""

import json
import logging
from typing import Any, Dict, Iterator, List, Tuple

import numpy as np

from src.analysis.algebra import GroupAlgebraElement
from src.common.errors import ConfigError, DimensionMismatchError, WordParseError
from src.groups.words import Word, format_word, parse_word

logger = logging.getLogger(__name__)

COMMENT = '#'


def _lines(path: str) -> Iterator[Tuple[int, str]]:
    with open(path, 'r') as f:
        for number, line in enumerate(f, start=1):
            line = line.rstrip('\r\n')
            if line.strip() and not line.lstrip().startswith(COMMENT):
                yield number, line


def read_word_list(path: str, letters: bool = False) -> List[Word]:
    """Words of a word-list file, in file order (duplicates kept)."""
    words = [parse_word(line, letters=letters, line=number) for number, line in _lines(path)]
    logger.debug(f"Read {len(words)} words from {path}")
    return words


def _split_tab(line: str, number: int) -> Tuple[str, str, int]:
    if '\t' not in line:
        raise WordParseError("expected two tab-separated fields", number, len(line) + 1)
    left, right = line.split('\t', 1)
    return left, right.strip(), len(left) + 2


def read_length_table(path: str, letters: bool = False) -> Dict[Word, float]:
    """psi values tabulated per word."""
    table: Dict[Word, float] = {}
    for number, line in _lines(path):
        literal, value, column = _split_tab(line, number)
        word = parse_word(literal, letters=letters, line=number)
        try:
            table[word] = float(value)
        except ValueError:
            raise WordParseError(f"'{value}' is not a decimal number", number, column)
    logger.debug(f"Read length table with {len(table)} entries from {path}")
    return table


def read_phi(path: str) -> Dict[int, int]:
    """An index map k -> phi(k) for the twisted Q_n."""
    phi: Dict[int, int] = {}
    for number, line in _lines(path):
        key, value, column = _split_tab(line, number)
        try:
            k = int(key)
        except ValueError:
            raise WordParseError(f"'{key}' is not an integer", number, 1)
        try:
            phi[k] = int(value)
        except ValueError:
            raise WordParseError(f"'{value}' is not an integer", number, column)
    return phi


def _coefficient(entry: Dict[str, Any], position: int) -> np.ndarray:
    if 'coeff' in entry:
        try:
            matrix = np.array([[complex(re, im) for re, im in row] for row in entry['coeff']])
        except (TypeError, ValueError):
            raise ConfigError(f"element entry {position}: coeff must be rows of [re, im] pairs")
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"element entry {position}: coefficient is not square")
        return matrix
    if 're' in entry or 'im' in entry:
        return np.array(complex(entry.get('re', 0.0), entry.get('im', 0.0)))
    raise ConfigError(f"element entry {position} has neither 'coeff' nor 're'/'im'")


def parse_element_records(records: Any, letters: bool = False) -> GroupAlgebraElement:
    """Build a GroupAlgebraElement from decoded element JSON.

    The coefficient dimension is that of the matrix entries (1 when all
    entries use the scalar shorthand); scalar entries then stand for
    multiples of the identity. Word literal errors report the entry number
    as their line.
    """
    if not isinstance(records, list):
        raise ConfigError("element file must hold a JSON array")
    terms = []
    for position, entry in enumerate(records, start=1):
        if not isinstance(entry, dict) or 'word' not in entry:
            raise ConfigError(f"element entry {position} must be an object with a 'word'")
        terms.append((parse_word(str(entry['word']), letters=letters, line=position), _coefficient(entry, position)))

    dims = {c.shape[0] for _, c in terms if c.ndim == 2}
    if len(dims) > 1:
        raise DimensionMismatchError(f"element mixes coefficient dimensions {sorted(dims)}")
    dim = dims.pop() if dims else 1
    return GroupAlgebraElement.from_terms(terms, dim)


def read_element(path: str, letters: bool = False) -> GroupAlgebraElement:
    """Read an element file."""
    try:
        with open(path, 'r') as f:
            records = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}")
    element = parse_element_records(records, letters=letters)
    logger.debug(f"Read element with {len(element)} terms (d={element.dim}) from {path}")
    return element


def element_to_records(x: GroupAlgebraElement) -> List[Dict[str, Any]]:
    """Inverse of parse_element_records; scalar elements use the shorthand."""
    records = []
    for word, matrix in x.items():
        if x.dim == 1:
            value = complex(matrix[0, 0])
            records.append({'word': format_word(word), 're': value.real, 'im': value.imag})
        else:
            records.append({
                'word': format_word(word),
                'coeff': [[[float(z.real), float(z.imag)] for z in row] for row in matrix],
            })
    return records

import unittest

import numpy as np

from src.analysis.algebra import GroupAlgebraElement
from src.common.errors import ConfigError, DimensionMismatchError, WordParseError
from src.common.formats import (
    element_to_records, parse_element_records, read_element, read_length_table, read_phi, read_word_list
)
from src.groups.lengths import length_from_name
from src.groups.words import IDENTITY, Word
from tests.test_helpers import FixtureTestCase


class TestWordList(FixtureTestCase):
    def test_comments_and_blank_lines_are_skipped(self):
        path = self.write_file('seq.txt', '# powers of a\n1 1\n\n1 1 1 1\ne\n')
        self.assertEqual(read_word_list(path), [Word([1, 1]), Word([1, 1, 1, 1]), IDENTITY])

    def test_letters(self):
        path = self.write_words('words.txt', ['ab', 'bA'])
        self.assertEqual(read_word_list(path, letters=True), [Word([1, 2]), Word([2, -1])])

    def test_error_reports_the_file_line(self):
        path = self.write_file('bad.txt', '1 2\n# comment\n3 q\n')
        with self.assertRaises(WordParseError) as ctx:
            read_word_list(path)
        self.assertEqual((ctx.exception.line, ctx.exception.column), (3, 3))


class TestTables(FixtureTestCase):
    def test_length_table(self):
        path = self.write_file('psi.tsv', '1\t1.5\n-1\t1.5\n1 2\t3\n')
        table = read_length_table(path)
        self.assertEqual(table[Word([1, 2])], 3.0)
        psi = length_from_name(f'table:{path}')
        self.assertEqual(psi([-1]), 1.5)
        self.assertEqual(psi(IDENTITY), 0.0)

    def test_length_table_errors(self):
        with self.assertRaises(WordParseError) as ctx:
            read_length_table(self.write_file('a.tsv', '1\tone\n'))
        self.assertEqual(ctx.exception.column, 3)
        with self.assertRaises(WordParseError):
            read_length_table(self.write_file('b.tsv', '1 1.0\n'))

    def test_phi(self):
        self.assertEqual(read_phi(self.write_file('phi.tsv', '1\t2\n2\t1\n')), {1: 2, 2: 1})
        with self.assertRaises(WordParseError):
            read_phi(self.write_file('bad.tsv', 'x\t1\n'))


class TestElements(FixtureTestCase):
    def test_scalar_shorthand(self):
        path = self.write_element('x.json', [{'word': '1', 're': 1.0}, {'word': '2', 're': 0.5, 'im': -1.0}])
        x = read_element(path)
        self.assertEqual(x.dim, 1)
        self.assertEqual(complex(x.coefficient([2])[0, 0]), complex(0.5, -1.0))

    def test_matrix_coefficients(self):
        records = [
            {'word': '1', 'coeff': [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
            {'word': 'e', 're': 2.0},
        ]
        x = parse_element_records(records)
        self.assertEqual(x.dim, 2)
        np.testing.assert_array_equal(x.coefficient(IDENTITY), 2.0 * np.eye(2))

    def test_mixed_dimensions(self):
        records = [
            {'word': '1', 'coeff': [[[1, 0]]]},
            {'word': '2', 'coeff': [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]},
        ]
        with self.assertRaises(DimensionMismatchError):
            parse_element_records(records)

    def test_malformed_elements(self):
        with self.assertRaises(ConfigError):
            parse_element_records({'word': '1'})
        with self.assertRaises(ConfigError):
            parse_element_records([{'word': '1'}])
        with self.assertRaises(WordParseError) as ctx:
            parse_element_records([{'word': '1', 're': 1}, {'word': 'z', 're': 1}])
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(ConfigError):
            read_element(self.write_file('broken.json', '[{"word": '))

    def test_records_reproduce_the_element(self):
        x = GroupAlgebraElement({Word([1]): np.array([[1, 2j], [0, 1]]), IDENTITY: 3.0}, dim=2)
        self.assertEqual(parse_element_records(element_to_records(x)), x)
        y = GroupAlgebraElement.scalar_sum([Word([1]), Word([-2, 1])], [1.0, 2j])
        self.assertEqual(parse_element_records(element_to_records(y)), y)


if __name__ == '__main__':
    unittest.main()

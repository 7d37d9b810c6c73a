"""
Table class with CSV I/O and access to columns, used for trajectory histories
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2013, Philippe Guglielmetti"
__credits__ = []
__license__ = "LGPL"

import csv

import numpy as np

FMT = '%.17g'  # shortest format that round trips all floats


def _read(x):
    """converts a CSV field to float when possible"""
    try:
        return float(x)
    except ValueError:
        return x


class Table(list):
    """list of rows with column titles"""

    def __init__(self, data=[], titles=None):
        super().__init__(list(row) for row in data)
        self.titles = list(titles) if titles is not None else []

    def __repr__(self):
        return '%s(%d rows, titles=%s)' % (self.__class__.__name__, len(self), self.titles)

    def __eq__(self, other):
        """compare 2 Tables contents, mainly for tests"""
        if self.titles != getattr(other, 'titles', None):
            return False
        return list(self) == list(other)

    def find_col(self, title):
        """:return: index of column with given title"""
        try:
            return self.titles.index(title)
        except ValueError:
            raise KeyError('no column %r in %s' % (title, self.titles))

    def col(self, column):
        """:return: column by title or index as a numpy array"""
        i = self.find_col(column) if isinstance(column, str) else column
        return np.array([row[i] for row in self], dtype=float)

    def cols(self, titles):
        """:return: (rows, len(titles)) array"""
        return np.column_stack([self.col(t) for t in titles])

    def addcol(self, title, values):
        self.titles.append(title)
        if not len(self):
            self.extend([] for _ in values)
        if len(values) != len(self):
            raise ValueError('column %r has %d values for %d rows' % (title, len(values), len(self)))
        for row, v in zip(self, values):
            row.append(v)
        return self

    def read_csv(self, filename, delimiter=',', encoding='utf-8'):
        """appends a .csv file to the table, first line holds the titles"""
        with open(filename, 'rt', encoding=encoding, newline='') as f:
            for i, row in enumerate(csv.reader(f, delimiter=delimiter)):
                if i == 0:
                    self.titles = [x.strip() for x in row]
                elif row:
                    self.append([_read(x) for x in row])
        return self

    def write_csv(self, filename, delimiter=',', encoding='utf-8', fmt=FMT):
        """writes the table, floats with fmt so that files are reproducible"""
        def _encode(x):
            if isinstance(x, (float, np.floating)):
                return fmt % x
            return x

        with open(filename, 'w', newline='', encoding=encoding) as f:
            writer = csv.writer(f, delimiter=delimiter, lineterminator='\n')
            if self.titles:
                writer.writerow(self.titles)
            for row in self:
                writer.writerow([_encode(x) for x in row])
        return self

"""
simple manipulation of polynomials with numpy coefficients
"""

__author__ = "Rick Muller + Philippe Guglielmetti"
__copyright__ = "Copyright 2013, Philippe Guglielmetti"
__credits__ = [
    "http://code.activestate.com/recipes/362193-manipulate-simple-polynomials-in-python/"]
__license__ = "LGPL"

import numpy as np


class Polynomial:
    def __init__(self, val):
        """:param val: iterable of the factors in ascending powers order,
        Polynomial([1,2,3]) holds 3*x^2+2*x+1, or another Polynomial
        """
        self.plist = np.array(plist(val), dtype=float)  # a polynomial is immutable
        self.plist.flags.writeable = False

    @property
    def degree(self):
        return len(_strip_leading_zeros(self.plist)) - 1

    def __call__(self, x):
        return peval(self.plist, x)

    def __eq__(self, other):
        a = _strip_leading_zeros(self.plist)
        b = _strip_leading_zeros(np.asarray(plist(other), dtype=float))
        return len(a) == len(b) and bool(np.all(a == b))

    def __repr__(self):
        return '%s(%s)' % (self.__class__.__name__, self.plist.tolist())

    def __str__(self):
        return tostring(self.plist)

    def derivative(self, order=1):
        p = self.plist
        for _ in range(order):
            p = derivative(p)
        return Polynomial(p)


def plist(term):
    """Force term to have the form of a polynomial list"""
    try:  # already a Polynomial ?
        return term.plist
    except AttributeError:
        pass
    p = np.atleast_1d(np.asarray(term, dtype=float))
    if p.ndim != 1:
        raise ValueError('polynomial coefficients must be 1D')
    return p


def peval(plist, x):
    """
    Horner evaluation of the plist at x
    :param x: float or array of any shape
    """
    x = np.asarray(x, dtype=float)
    val = np.zeros_like(x)
    for c in plist[::-1]:
        val = val * x + c
    return val


def derivative(plist):
    """
    Return a new plist corresponding to the derivative of the input plist.
    """
    if len(plist) < 2:
        return np.zeros(1)
    return np.arange(1, len(plist)) * np.asarray(plist[1:], dtype=float)


def _strip_leading_zeros(p):
    """Remove the leading (in terms of high orders of x) zeros in the polynomial"""
    nz = np.flatnonzero(p)
    return p[:nz[-1] + 1] if len(nz) else p[:1]


def tostring(p, x='x'):
    """Convert a plist into a string, highest power first"""
    p = _strip_leading_zeros(np.asarray(p, dtype=float))
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        sign = '-' if c < 0 else '+'
        c = abs(c)
        if i == 0:
            term = '%g' % c
        else:
            term = ('' if c == 1 else '%g' % c) + x + ('' if i == 1 else '^%d' % i)
        terms.append((sign, term))
    if not terms:
        return '0'
    first_sign, first = terms[0]
    s = ('-' if first_sign == '-' else '') + first
    for sign, term in terms[1:]:
        s += ' %s %s' % (sign, term)
    return s

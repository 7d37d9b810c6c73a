"""
physical units of configuration values, based on pint
"""

__author__ = "Marc Nicole + Philippe Guglielmetti"
__copyright__ = "Copyright 2015, Marc Nicole"
__credits__ = ["https://pypi.python.org/pypi/Pint/"]
__license__ = "LGPL"

import numpy as np
from pint import UnitRegistry
from pint.errors import UndefinedUnitError, DimensionalityError

ureg = UnitRegistry()
V = ureg.Quantity


class UnitError(ValueError):
    pass


def magnitude_in(value, unit, target='m'):
    """
    :param value: float or array expressed in unit
    :param unit: string understood by pint, like 'cm'
    :return: magnitude of value converted to target
    """
    try:
        q = V(np.asarray(value, dtype=float), unit)
        return q.to(target).magnitude
    except (UndefinedUnitError, DimensionalityError) as e:
        raise UnitError('cannot convert %s to %s: %s' % (unit, target, e))


def length(value, unit='m'):
    """length in meters"""
    return magnitude_in(value, unit, 'm')

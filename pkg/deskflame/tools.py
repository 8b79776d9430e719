# -*- coding: utf-8 -*-
"""
PURPOSE:
    Accessories shared by the solver modules: unit checking for values read
    from case and mechanism files, the diagnostic warning classes and their
    per-step counters, and lookup of the data shipped with the package.

CREATED BY:
    deskflame developers
"""

import os
import warnings
from collections import Counter

import numpy as np
import pint

unit_registry = pint.UnitRegistry()
quant = unit_registry.Quantity

LOOKUP_DATA = os.path.join(
    os.path.dirname(os.path.abspath(__file__)),
    'lookup_data'
)

_DIMENSIONS = {
    'dimensionless': unit_registry.dimensionless,
    'length': unit_registry.meter,
    'area': unit_registry.meter**2,
    'volume': unit_registry.meter**3,
    'time': unit_registry.second,
    'temperature': unit_registry.kelvin,
    'pressure': unit_registry.pascal,
    'velocity': unit_registry.meter / unit_registry.second,
    'molar_mass': unit_registry.kilogram / unit_registry.kilomole,
    'molar_energy': unit_registry.joule / unit_registry.kilomole,
    'viscosity': unit_registry.pascal * unit_registry.second,
    'sutherland': (unit_registry.pascal * unit_registry.second /
                   unit_registry.kelvin**0.5),
}


class DiagnosticWarning(UserWarning):
    pass


class TemperatureClampWarning(DiagnosticWarning):
    pass


class ConcentrationClipWarning(DiagnosticWarning):
    pass


class FidelityWarning(DiagnosticWarning):
    pass


class ConvergenceWarning(DiagnosticWarning):
    pass


class DiagnosticCounter:
    """
    Named event counters. The flow solver resets them at the start of each
    time step and stores a snapshot in the step report.
    """
    def __init__(self):
        self._counts = Counter()

    def increment(self, name, count=1):
        self._counts[name] += int(count)

    def reset(self):
        self._counts.clear()

    def snapshot(self):
        return dict(self._counts)

    def __getitem__(self, name):
        return self._counts[name]


diagnostics = DiagnosticCounter()


def warn(message, category, counter_name, count=1):
    """
    Issue a diagnostic warning and bump the matching counter.

    Parameters
    ----------
    message : str
    category : type
        DiagnosticWarning subclass
    counter_name : str
        Name of the counter on ``tools.diagnostics``
    count : int
        Number of events this warning stands for (e.g. clamped cells)
    """
    diagnostics.increment(counter_name, count)
    warnings.warn(message, category, stacklevel=3)


def check_pint_quantity(
        quantity,
        dimension_type,
        ensure_positive=False
):
    """
    This function checks to make sure that a quantity is an instance of a pint
    quantity, and that it has the correct units.

    Currently supported dimension types:
        dimensionless
        length
        area
        volume
        time
        temperature
        pressure
        velocity
        molar_mass
        molar_energy
        viscosity
        sutherland

    Parameters
    ----------
    quantity : pint quantity
        Pint quantity which is to be checked for dimensionality
    dimension_type : str
        Dimensionality that quantity should have
    ensure_positive : bool
        Determines whether the magnitude of the pint quantity will be checked
        for positivity

    Returns
    -------
    True if no errors are raised

    """
    if dimension_type not in _DIMENSIONS:
        raise ValueError(dimension_type + ' not a supported dimension type')

    try:
        actual_dimension_type = quantity.dimensionality
    except AttributeError:
        raise ValueError('Non-pint quantity')

    try:
        magnitude = np.asarray(quantity.magnitude, dtype=float)
    except ValueError:
        raise ValueError('Non-numeric pint quantity')

    expected = _DIMENSIONS[dimension_type].dimensionality
    if actual_dimension_type != expected:
        raise ValueError(
            str(actual_dimension_type).replace('[', '').replace(']', '') +
            ' is not ' +
            str(expected).replace('[', '').replace(']', '')
        )

    if ensure_positive and np.any(magnitude <= 0):
        raise ValueError('Input value <= 0')

    return True


def as_units(units):
    """pint Unit from a unit string; None and Unit objects pass through."""
    if units is None or isinstance(units, unit_registry.Unit):
        return units
    return unit_registry.Unit(units)


def units_product(*factors):
    """
    Product of pint units, or None when any factor is None (unknown).
    """
    if any(factor is None for factor in factors):
        return None
    result = unit_registry.dimensionless
    for factor in factors:
        result = result * as_units(factor)
    return result


def to_si(quantity, dimension_type, ensure_positive=False):
    """
    Checks a quantity and returns its magnitude in base SI units, with
    amounts of substance in kmol.
    """
    check_pint_quantity(quantity, dimension_type, ensure_positive)
    target = {
        'molar_mass': 'kg/kmol',
        'molar_energy': 'J/kmol',
        'temperature': 'K',
    }.get(dimension_type)
    if target is None:
        return quantity.to_base_units().magnitude
    return quantity.to(target).magnitude


def add_dataframe_row(
        dataframe,
        row
):
    """
    Adds a row to a pandas dataframe

    Parameters
    ----------
    dataframe : pd.DataFrame
    row : list or tuple or np.ndarray or dict
    """
    dataframe.loc[len(dataframe.index)] = row


def lookup_path(name):
    return os.path.join(LOOKUP_DATA, name)


def find_mechanisms():
    """
    Returns the set of mechanism files shipped in lookup_data.
    """
    return {item for item in os.listdir(LOOKUP_DATA)
            if item.endswith('.mech')}


def find_cases():
    """
    Returns the set of example case files shipped in lookup_data.
    """
    return {item for item in os.listdir(LOOKUP_DATA)
            if item.endswith('.cfg')}

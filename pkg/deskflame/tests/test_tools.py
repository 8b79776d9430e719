# -*- coding: utf-8 -*-
"""
PURPOSE:
    Unit tests for tools.py

CREATED BY:
    deskflame developers
"""

import warnings

import pint
import pytest
import pandas as pd
from .. import tools


def test_add_dataframe_row():
    column_names = ['time', 'kinetic_energy', 'max_T']
    added_row = [0.0, 3.5, 300.0]

    good_dataframe = pd.DataFrame(
        columns=column_names,
        data=[added_row],
        dtype=object
    )

    test_dataframe = pd.DataFrame(
        columns=column_names,
        dtype=object
    )
    tools.add_dataframe_row(test_dataframe, added_row)

    assert test_dataframe.equals(good_dataframe)


class TestCheckPintQuantity:
    ureg = pint.UnitRegistry()
    quant = ureg.Quantity

    def test_good_input(self):
        lengths = [6.3, -8]
        for length in lengths:
            assert tools.check_pint_quantity(
                self.quant(length, 'inch'),
                'length'
            )

    def test_array_magnitude(self):
        assert tools.check_pint_quantity(
            self.quant([1.0, 2.0, 3.0], 'm/s'),
            'velocity'
        )

    def test_bad_dimension_type(self):
        bad_dimension_type = 'walrus'
        error_str = bad_dimension_type + ' not a supported dimension type'
        with pytest.raises(
                ValueError,
                match=error_str
        ):
            tools.check_pint_quantity(
                self.quant(3, 'degC'),
                bad_dimension_type
            )

    @staticmethod
    def test_non_pint_quantity():
        with pytest.raises(
                ValueError,
                match='Non-pint quantity'
        ):
            tools.check_pint_quantity(
                7,
                'length'
            )

    def test_non_numeric_quantity(self):
        with pytest.raises(
                ValueError,
                match='Non-numeric pint quantity'
        ):
            tools.check_pint_quantity(
                self.quant(['asdf'], 'inch'),
                'length'
            )

    def test_ensure_positive_with_negative_magnitude(self):
        with pytest.raises(
                ValueError,
                match='Input value <= 0'
        ):
            tools.check_pint_quantity(
                self.quant(-4, 'Pa'),
                'pressure',
                ensure_positive=True
            )

    def test_incorrect_dimensionality(self):
        error_str = (
                self.ureg.kelvin.dimensionality.__str__().strip('[]') +
                ' is not ' +
                self.ureg.meter.dimensionality.__str__().strip('[]')
        )
        with pytest.raises(
            ValueError,
            match=error_str
        ):
            tools.check_pint_quantity(
                self.quant(19.2, 'K'),
                'length'
            )


class TestToSi:
    @staticmethod
    def test_length():
        assert tools.to_si(tools.quant(1.0, 'mm'), 'length') == \
            pytest.approx(1e-3, rel=1e-15)

    @staticmethod
    def test_molar_energy_per_kmol():
        assert tools.to_si(tools.quant(1.0, 'cal/mol'), 'molar_energy') == \
            pytest.approx(4184.0, rel=1e-12)

    @staticmethod
    def test_molar_mass_per_kmol():
        assert tools.to_si(tools.quant(28.0, 'g/mol'), 'molar_mass') == \
            pytest.approx(28.0, rel=1e-12)

    @staticmethod
    def test_temperature_offset_units():
        assert tools.to_si(tools.quant(25.0, 'degC'), 'temperature') == \
            pytest.approx(298.15)


class TestDiagnostics:
    @staticmethod
    def test_warn_counts_and_warns():
        tools.diagnostics.reset()
        with pytest.warns(tools.TemperatureClampWarning, match='clamped'):
            tools.warn('3 cells clamped', tools.TemperatureClampWarning,
                       'temperature_clamped', 3)
        assert tools.diagnostics['temperature_clamped'] == 3

    @staticmethod
    def test_reset_and_snapshot():
        tools.diagnostics.reset()
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            tools.warn('a', tools.FidelityWarning, 'surrogate_correction')
            tools.warn('b', tools.FidelityWarning, 'surrogate_correction')
        snapshot = tools.diagnostics.snapshot()
        assert snapshot == {'surrogate_correction': 2}
        tools.diagnostics.reset()
        assert tools.diagnostics.snapshot() == {}
        assert snapshot == {'surrogate_correction': 2}

    @staticmethod
    def test_warning_hierarchy():
        for category in (tools.TemperatureClampWarning,
                         tools.ConcentrationClipWarning,
                         tools.FidelityWarning,
                         tools.ConvergenceWarning):
            assert issubclass(category, tools.DiagnosticWarning)
        assert issubclass(tools.DiagnosticWarning, UserWarning)


class TestLookupData:
    @staticmethod
    def test_find_mechanisms():
        assert {'air.mech', 'a_to_b.mech', 'stiff_abc.mech',
                'h2o2_global.mech'} <= tools.find_mechanisms()

    @staticmethod
    def test_find_cases():
        assert {'tgv3d.cfg', 'tgv2d.cfg', 'tgv3d_reactive.cfg'} <= \
            tools.find_cases()

# -*- coding: utf-8 -*-
"""
PURPOSE:
    Unit tests for thermo.py

CREATED BY:
    deskflame developers
"""

import numpy as np
import pytest
import sympy as sp
from .. import driver, thermo, tools

CONSTANT_CP = [4.0, 0.0, 0.0, 0.0, 0.0, -20000.0, 5.0]


def constant_cp_species(name='A', molar_mass=44.0, **kwargs):
    kwargs.setdefault('viscosity', 1.8e-5)
    return thermo.SpeciesDef(
        name,
        molar_mass,
        thermo.Nasa7Coeffs(CONSTANT_CP, CONSTANT_CP, 200.0, 1000.0, 3500.0),
        **kwargs
    )


AIR = driver.parse_mechanism(tools.lookup_path('air.mech')).thermo

AIR_Y = [0.233, 0.767]


class TestNasa7:
    @staticmethod
    def test_constant_cp_polynomials():
        species = constant_cp_species()
        t = np.array([300.0, 1500.0])
        assert np.allclose(thermo.cp_R(species, t), 4.0)
        assert np.allclose(thermo.h_RT(species, t), 4.0 - 20000.0 / t)
        assert np.allclose(thermo.s_R(species, t), 4.0 * np.log(t) + 5.0)

    @staticmethod
    def test_n2_reference_values():
        cp = AIR.species_cp(298.15)[AIR.index('N2'), 0]
        h = AIR.species_h(298.15)[AIR.index('N2'), 0]
        assert cp * 28.014 / thermo.R_UNIVERSAL == pytest.approx(3.50,
                                                                 rel=5e-3)
        # formation enthalpy of N2 is zero
        assert abs(h) < 1000.0

    @staticmethod
    def test_enthalpy_and_entropy_integrate_cp():
        species = AIR.species[AIR.index('N2')]
        t = sp.symbols('T', positive=True)
        a = [sp.Float(repr(c)) for c in species.thermo.low]
        cp = sum(a[i] * t ** i for i in range(5))
        h = sp.integrate(cp, t) + a[5]
        s = sp.integrate(cp / t, t) + a[6]
        temps = np.array([300.0, 550.0, 900.0])
        for value, computed in zip(temps, zip(
                thermo.cp_R(species, temps),
                thermo.h_RT(species, temps),
                thermo.s_R(species, temps))):
            assert computed[0] == pytest.approx(float(cp.subs(t, value)))
            assert computed[1] == pytest.approx(
                float(h.subs(t, value)) / value)
            assert computed[2] == pytest.approx(float(s.subs(t, value)))

    @staticmethod
    def test_bad_range():
        with pytest.raises(
                ValueError,
                match='Bad NASA-7 range'
        ):
            thermo.Nasa7Coeffs(CONSTANT_CP, CONSTANT_CP, 1000., 300., 3500.)

    @staticmethod
    def test_discontinuous_cp():
        high = list(CONSTANT_CP)
        high[0] = 4.5
        with pytest.raises(
                ValueError,
                match='cp discontinuous at 1000'
        ):
            thermo.Nasa7Coeffs(CONSTANT_CP, high, 200., 1000., 3500.)

    @staticmethod
    def test_wrong_coefficient_count():
        with pytest.raises(
                ValueError,
                match='7 coefficients'
        ):
            thermo.Nasa7Coeffs(CONSTANT_CP[:6], CONSTANT_CP, 200., 1000.,
                               3500.)

    @staticmethod
    def test_clamp_warns_and_counts():
        tools.diagnostics.reset()
        species = constant_cp_species()
        with pytest.warns(tools.TemperatureClampWarning):
            value = thermo.h_RT(species, np.array([100.0, 300.0, 4000.0]))
        assert tools.diagnostics['temperature_clamped'] == 2
        assert value[0] == pytest.approx(4.0 - 20000.0 / 200.0)


class TestSpeciesDef:
    @staticmethod
    def test_needs_exactly_one_viscosity_model():
        with pytest.raises(
                ValueError,
                match='either Sutherland constants or a constant viscosity'
        ):
            constant_cp_species(sutherland=(1.4e-6, 111.0))

    @staticmethod
    def test_bad_molar_mass():
        with pytest.raises(
                ValueError,
                match='Molar mass of A must be > 0'
        ):
            constant_cp_species(molar_mass=0.0)


class TestMixtureState:
    @staticmethod
    def test_sum_not_one():
        with pytest.raises(
                ValueError,
                match='not 1'
        ):
            thermo.MixtureState(101325.0, 300.0, [0.5, 0.4])

    @staticmethod
    def test_negative_temperature():
        with pytest.raises(
                ValueError,
                match='must be > 0'
        ):
            thermo.MixtureState(101325.0, -1.0, [0.5, 0.5])

    @staticmethod
    def test_fraction_out_of_range():
        with pytest.raises(
                ValueError,
                match=r'outside \[0, 1\]'
        ):
            thermo.MixtureState(101325.0, 300.0, [1.5, -0.5])


class TestThermo:
    @staticmethod
    def test_duplicate_names():
        with pytest.raises(
                ValueError,
                match='Duplicate species names'
        ):
            thermo.Thermo([constant_cp_species(), constant_cp_species()])

    @staticmethod
    def test_unknown_species():
        with pytest.raises(
                ValueError,
                match='Species CH4 not in mixture'
        ):
            AIR.index('CH4')

    @staticmethod
    def test_mean_molar_mass():
        state = thermo.MixtureState(101325.0, 300.0, AIR_Y)
        expected = 1.0 / (0.233 / 31.998 + 0.767 / 28.014)
        assert AIR.mixture_W(state) == pytest.approx(expected)

    @staticmethod
    def test_ideal_gas_density():
        state = thermo.MixtureState(101325.0, 300.0, AIR_Y)
        expected = 101325.0 * AIR.mixture_W(state) / \
            (thermo.R_UNIVERSAL * 300.0)
        assert AIR.density(state) == pytest.approx(expected)
        assert AIR.density(state) == pytest.approx(1.172, rel=1e-3)

    @staticmethod
    def test_field_state_shapes():
        t = np.array([300.0, 600.0, 900.0])
        y = np.repeat(np.array(AIR_Y)[:, None], 3, axis=1)
        state = thermo.MixtureState(101325.0, t, y)
        assert AIR.mixture_h(state).shape == (3,)
        assert AIR.psi(state).shape == (3,)
        assert AIR.concentrations(state).shape == (2, 3)

    @staticmethod
    def test_viscosity_models():
        sutherland = constant_cp_species(
            'S', viscosity=None, sutherland=(1.4e-6, 110.0)
        )
        constant = constant_cp_species('C')
        mix = thermo.Thermo([sutherland, constant])
        state = thermo.MixtureState(1e5, 400.0, [0.25, 0.75])
        mu_s = 1.4e-6 * np.sqrt(400.0) / (1.0 + 110.0 / 400.0)
        assert mix.viscosity(state) == pytest.approx(
            0.25 * mu_s + 0.75 * 1.8e-5
        )

    @staticmethod
    def test_transport_closures():
        species = [constant_cp_species('A', lewis=2.0),
                   constant_cp_species('B')]
        mix = thermo.Thermo(species, prandtl=0.7)
        state = thermo.MixtureState(1e5, 500.0, [0.5, 0.5])
        cp = mix.mixture_cp(state)
        assert cp == pytest.approx(4.0 * thermo.R_UNIVERSAL / 44.0)
        assert mix.conductivity(state) == pytest.approx(1.8e-5 * cp / 0.7)
        assert mix.diffusivity(state, 'A') == pytest.approx(
            0.5 * mix.diffusivity(state, 'B')
        )


class TestTemperatureFromEnthalpy:
    @pytest.mark.parametrize('temperature', [250.0, 300.0, 999.0, 1000.0,
                                             1800.0, 3000.0])
    def test_inverts_mixture_enthalpy(self, temperature):
        state = thermo.MixtureState(101325.0, temperature, AIR_Y)
        h = AIR.mixture_h(state)
        found = AIR.T_from_h(h, 101325.0, AIR_Y, 1000.0)
        assert found == pytest.approx(temperature, abs=1e-6)

    @staticmethod
    def test_field_inversion_and_iterations():
        t = np.linspace(300.0, 2500.0, 7)
        y = np.repeat(np.array(AIR_Y)[:, None], 7, axis=1)
        h = AIR.mixture_h(thermo.MixtureState(101325.0, t, y))
        found, iterations = AIR.T_from_h(h, 101325.0, y, np.full(7, 300.0),
                                         return_iterations=True)
        assert np.allclose(found, t, atol=1e-6)
        assert np.all(iterations <= 50)

    @staticmethod
    def test_constant_cp_closed_form():
        mix = thermo.Thermo([constant_cp_species()])
        h = 4.0 * thermo.R_UNIVERSAL / 44.0 * 700.0 - \
            20000.0 * thermo.R_UNIVERSAL / 44.0
        assert mix.T_from_h(h, 1e5, [1.0], 300.0) == pytest.approx(700.0)

    @staticmethod
    def test_unreachable_enthalpy():
        with pytest.raises(
                ValueError,
                match=r'outside the range .* \(cell 1\)'
        ):
            AIR.T_from_h(np.array([0.0, 1e9]), 101325.0, AIR_Y, 300.0)

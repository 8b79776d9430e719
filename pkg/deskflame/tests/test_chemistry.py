# -*- coding: utf-8 -*-
"""
PURPOSE:
    Unit tests for chemistry.py

CREATED BY:
    deskflame developers
"""

import os
import pickle

import numpy as np
import pandas as pd
import pytest
from .. import chemistry, driver, thermo, tools

ISOMER = {'C': 2, 'H': 4, 'O': 1}


def constant_cp_species(name, a6=-20000.0, composition=None):
    coeffs = [4.0, 0.0, 0.0, 0.0, 0.0, a6, 5.0]
    return thermo.SpeciesDef(
        name,
        44.053,
        thermo.Nasa7Coeffs(coeffs, coeffs, 200.0, 1000.0, 3500.0),
        viscosity=1.8e-5,
        composition=ISOMER if composition is None else composition
    )


def nitrogen():
    return driver.parse_mechanism(
        tools.lookup_path('air.mech')
    ).species[1]


def load(name):
    return driver.parse_mechanism(tools.lookup_path(name))


class TestReaction:
    @staticmethod
    def test_equation_text():
        reaction = chemistry.Reaction({'H2': 2, 'O2': 1}, {'H2O': 2}, 1.0)
        assert reaction.equation == '2 H2 + O2 => 2 H2O'
        reversible = chemistry.Reaction({'A': 1}, {'B': 1}, 1.0,
                                        reversible=True, third_body={})
        assert reversible.equation == 'A + M <=> B + M'

    @staticmethod
    def test_bad_coefficient():
        with pytest.raises(
                ValueError,
                match='Stoichiometric coefficients must be > 0'
        ):
            chemistry.Reaction({'A': 0}, {'B': 1}, 1.0)

    @staticmethod
    def test_bad_pre_exponential():
        with pytest.raises(
                ValueError,
                match='Pre-exponential factor must be > 0'
        ):
            chemistry.Reaction({'A': 1}, {'B': 1}, 0.0)

    @staticmethod
    def test_rate_forward():
        reaction = chemistry.Reaction({'A': 1}, {'B': 1}, 2.0, 0.5, 1e7)
        t = np.array([500.0, 1000.0])
        expected = 2.0 * t ** 0.5 * np.exp(-1e7 / (thermo.R_UNIVERSAL * t))
        assert np.allclose(chemistry.rate_forward(reaction, t), expected)

    @staticmethod
    def test_rate_forward_needs_positive_temperature():
        reaction = chemistry.Reaction({'A': 1}, {'B': 1}, 2.0)
        with pytest.raises(
                ValueError,
                match='Temperature must be > 0'
        ):
            chemistry.rate_forward(reaction, 0.0)


class TestEquilibrium:
    @staticmethod
    def test_kc_from_gibbs_difference():
        species = [constant_cp_species('A'),
                   constant_cp_species('B', a6=-21000.0)]
        mix = thermo.Thermo(species)
        reaction = chemistry.Reaction({'A': 1}, {'B': 1}, 10.0,
                                      reversible=True)
        t = 800.0
        # g_B/RT - g_A/RT = -1000/T and no change in mole number
        assert chemistry.equilibrium_Kc(reaction, t, mix) == \
            pytest.approx(np.exp(1000.0 / t))
        assert chemistry.rate_reverse(reaction, t, mix) == \
            pytest.approx(10.0 / np.exp(1000.0 / t))

    @staticmethod
    def test_pressure_factor():
        species = [constant_cp_species('A'),
                   constant_cp_species('A2', composition={'C': 4, 'H': 8,
                                                         'O': 2})]
        species[1].molar_mass = 2 * 44.053
        mix = thermo.Thermo(species)
        reaction = chemistry.Reaction({'A': 2}, {'A2': 1}, 1.0,
                                      reversible=True)
        t = 1000.0
        g = mix.species_g_RT(t)[:, 0]
        expected = np.exp(-(g[1] - 2 * g[0])) * \
            (thermo.P_STANDARD / (thermo.R_UNIVERSAL * t)) ** -1
        assert chemistry.equilibrium_Kc(reaction, t, mix) == \
            pytest.approx(expected)

    @staticmethod
    def test_net_rate_vanishes_at_equilibrium():
        mechanism = chemistry.Mechanism(
            [constant_cp_species('A'), constant_cp_species('B')],
            [chemistry.Reaction({'A': 1}, {'B': 1}, 50.0, reversible=True)]
        )
        state = thermo.MixtureState(101325.0, 600.0, [0.5, 0.5])
        assert np.allclose(mechanism.production_rates(state), 0.0,
                           atol=1e-15)


class TestMechanism:
    @staticmethod
    def test_unknown_species():
        with pytest.raises(
                ValueError,
                match='uses unknown species: C'
        ):
            chemistry.Mechanism(
                [constant_cp_species('A'), constant_cp_species('B')],
                [chemistry.Reaction({'A': 1}, {'C': 1}, 1.0)]
            )

    @staticmethod
    def test_reacting_inert():
        with pytest.raises(
                ValueError,
                match='Inert species B takes part in a reaction'
        ):
            chemistry.Mechanism(
                [constant_cp_species('A'), constant_cp_species('B')],
                [chemistry.Reaction({'A': 1}, {'B': 1}, 1.0)],
                inert_species=['B']
            )

    @staticmethod
    def test_element_imbalance():
        with pytest.raises(
                ValueError,
                match=r'does not balance element\(s\) C, H, O'
        ):
            chemistry.Mechanism(
                [constant_cp_species('A'), constant_cp_species('B')],
                [chemistry.Reaction({'A': 2}, {'B': 1}, 1.0)]
            )

    @staticmethod
    def test_mass_imbalance_without_compositions():
        species = [constant_cp_species('A', composition={}),
                   constant_cp_species('B', composition={})]
        species[1].molar_mass = 40.0
        with pytest.raises(
                ValueError,
                match='does not conserve mass'
        ):
            chemistry.Mechanism(
                species, [chemistry.Reaction({'A': 1}, {'B': 1}, 1.0)]
            )

    @staticmethod
    def test_first_order_production_rates():
        mechanism = load('a_to_b.mech')
        y = composition(mechanism, A=0.3, N2=0.7)
        state = thermo.MixtureState(101325.0, 300.0, y)
        wdot = mechanism.production_rates(state)
        c_a = mechanism.thermo.concentrations(state)[mechanism.index('A'), 0]
        assert wdot[mechanism.index('A')] == pytest.approx(-1000.0 * c_a)
        assert wdot[mechanism.index('B')] == pytest.approx(1000.0 * c_a)
        assert wdot[mechanism.index('N2')] == 0.0

    @staticmethod
    def test_third_body_efficiencies():
        species = [constant_cp_species('A'), constant_cp_species('B'),
                   nitrogen()]
        mechanism = chemistry.Mechanism(
            species,
            [chemistry.Reaction({'A': 1}, {'B': 1}, 3.0,
                                third_body={'N2': 2.0})]
        )
        state = thermo.MixtureState(1e5, 500.0, [0.2, 0.3, 0.5])
        c = mechanism.thermo.concentrations(state)[:, 0]
        expected = 3.0 * c[0] * (c[0] + c[1] + 2.0 * c[2])
        assert mechanism.production_rates(state)[1] == \
            pytest.approx(expected)

    @staticmethod
    def test_reactor_rhs_conserves_mass_and_heats():
        mechanism = load('h2o2_global.mech')
        y = composition(mechanism, H2=0.05, O2=0.2, N2=0.75)
        state = thermo.MixtureState(101325.0, 1500.0, y)
        dy, dt_dt = mechanism.reactor_rhs(state)
        assert abs(dy.sum()) < 1e-10 * np.abs(dy).max()
        assert dy[mechanism.index('H2')] < 0
        assert dy[mechanism.index('H2O')] > 0
        assert dt_dt > 0

    @staticmethod
    def test_non_inert_species():
        mechanism = load('a_to_b.mech')
        assert mechanism.non_inert_species == ['A', 'B']


def composition(mechanism, **fractions):
    return driver.composition_vector(mechanism, fractions)


def runge_kutta(mechanism, temperature, mass_fractions, dt, n_steps,
                pressure=101325.0):
    """Classical RK4 on the reactor equations with a fixed step."""
    def rhs(z):
        dy, dt_dt = mechanism.reactor_rhs(
            thermo.MixtureState(pressure, z[-1], z[:-1])
        )
        return np.vstack([dy, dt_dt[None, :]])

    z = np.vstack([mass_fractions, temperature[None, :]])
    h = dt / n_steps
    for _ in range(n_steps):
        k1 = rhs(z)
        k2 = rhs(z + 0.5 * h * k1)
        k3 = rhs(z + 0.5 * h * k2)
        k4 = rhs(z + h * k3)
        z = z + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return z[-1], z[:-1]


class TestIntegration:
    @staticmethod
    def test_first_order_decay():
        mechanism = load('a_to_b.mech')
        y0 = composition(mechanism, A=0.4, N2=0.6)
        state = thermo.MixtureState(101325.0, 300.0, y0)
        dt = 1e-3
        result = chemistry.integrate_cell(mechanism, state, dt)
        y = result.mass_fractions
        assert y[mechanism.index('A')] == pytest.approx(
            0.4 * np.exp(-1000.0 * dt), abs=1e-5
        )
        assert y.sum() == pytest.approx(1.0, abs=1e-12)
        assert y[mechanism.index('N2')] == pytest.approx(0.6, abs=1e-12)
        assert result.temperature == pytest.approx(300.0, abs=1e-6)

    @staticmethod
    def test_stiff_chain():
        mechanism = load('stiff_abc.mech')
        y0 = composition(mechanism, A=1.0)
        t, y = chemistry.integrate_field(
            mechanism, [300.0], 101325.0, y0[:, None], 1e-2
        )
        assert y[mechanism.index('A'), 0] < 1e-8
        assert y[mechanism.index('B'), 0] == pytest.approx(
            np.exp(-1e-2 * 1e-2), abs=1e-5
        )
        assert t[0] == pytest.approx(300.0, abs=1e-6)

    @staticmethod
    @pytest.mark.slow
    def test_matches_fine_step_runge_kutta():
        sweeps = (
            ('h2o2_global.mech', (1000.0, 1800.0), {'N2': 0.7}, 60, 1e-5),
            ('a_to_b.mech', (300.0, 900.0), {'N2': 0.5}, 20, 1e-3),
            ('stiff_abc.mech', (300.0, 900.0), {}, 20, 1e-3),
        )
        for name, t_range, inert, n, dt in sweeps:
            mechanism = load(name)
            sampler = chemistry.StateSampler(t_range, 101325.0, inert,
                                             seed=n)
            t0, y0 = sampler.draw(mechanism, n)
            t_ref, y_ref = runge_kutta(mechanism, t0, y0, dt, 1000)
            for cell in range(n):
                result = chemistry.integrate_cell(
                    mechanism,
                    thermo.MixtureState(101325.0, t0[cell], y0[:, cell]),
                    dt
                )
                assert np.allclose(result.mass_fractions, y_ref[:, cell],
                                   rtol=0, atol=2e-5)
                assert result.temperature == pytest.approx(
                    t_ref[cell], abs=0.5
                )

    @staticmethod
    def test_field_matches_single_cells_bitwise():
        mechanism = load('a_to_b.mech')
        y = np.array([
            composition(mechanism, A=0.9, N2=0.1),
            composition(mechanism, A=0.1, B=0.2, N2=0.7),
            composition(mechanism, B=0.5, N2=0.5),
        ]).T
        t = np.array([300.0, 450.0, 800.0])
        t_field, y_field = chemistry.integrate_field(
            mechanism, t, 101325.0, y, 5e-4
        )
        for cell in range(3):
            t_one, y_one = chemistry.integrate_field(
                mechanism, t[cell:cell + 1], 101325.0, y[:, cell:cell + 1],
                5e-4
            )
            assert np.array_equal(t_one, t_field[cell:cell + 1])
            assert np.array_equal(y_one[:, 0], y_field[:, cell])

    @staticmethod
    @pytest.mark.slow
    def test_multiprocessing_matches_serial():
        mechanism = load('a_to_b.mech')
        sampler = chemistry.StateSampler((300.0, 900.0), 101325.0,
                                         {'N2': 0.5}, seed=4)
        t, y = sampler.draw(mechanism, 8)
        serial = chemistry.integrate_field(mechanism, t, 101325.0, y, 1e-4)
        parallel = chemistry.integrate_field(
            mechanism, t, 101325.0, y, 1e-4, use_multiprocessing=True,
            n_chunks=3
        )
        assert np.array_equal(serial[0], parallel[0])
        assert np.array_equal(serial[1], parallel[1])

    @staticmethod
    def test_no_reactions_is_identity():
        mechanism = load('air.mech')
        y = composition(mechanism, O2=0.233, N2=0.767)
        t, y_new = chemistry.integrate_field(
            mechanism, [350.0], 101325.0, y[:, None], 1e-3
        )
        assert t[0] == 350.0
        assert np.array_equal(y_new[:, 0], y)

    @staticmethod
    def test_bad_dt():
        mechanism = load('a_to_b.mech')
        with pytest.raises(
                ValueError,
                match='dt must be > 0'
        ):
            chemistry.integrate_field(
                mechanism, [300.0], 1e5, [[0.5], [0.5], [0.0]], 0.0
            )

    @staticmethod
    def test_shape_mismatch():
        mechanism = load('a_to_b.mech')
        with pytest.raises(
                ValueError,
                match='do not match 3 species and 2 cells'
        ):
            chemistry.integrate_field(
                mechanism, [300.0, 300.0], 1e5, [[0.5], [0.5], [0.0]], 1e-3
            )

    @staticmethod
    def test_integration_error_pickles():
        err = chemistry.IntegrationError('stuck', [3, 7], {'T': [1.0]})
        copy = pickle.loads(pickle.dumps(err))
        assert copy.cells == [3, 7]
        assert str(copy) == 'stuck'


class TestSampling:
    @staticmethod
    def test_draw():
        mechanism = load('a_to_b.mech')
        sampler = chemistry.StateSampler((400.0, 1200.0), 2e5, {'N2': 0.3},
                                         seed=7)
        t, y = sampler.draw(mechanism, 50)
        assert np.all((t >= 400.0) & (t <= 1200.0))
        assert np.allclose(y.sum(axis=0), 1.0)
        assert np.allclose(y[mechanism.index('N2')], 0.3)
        t_again, y_again = sampler.draw(mechanism, 50)
        assert np.array_equal(t, t_again)
        assert np.array_equal(y, y_again)

    @staticmethod
    def test_inert_must_be_declared():
        mechanism = load('stiff_abc.mech')
        sampler = chemistry.StateSampler((400.0, 1200.0), 2e5, {'A': 0.3})
        with pytest.raises(
                ValueError,
                match='A is not an inert species'
        ):
            sampler.draw(mechanism, 5)

    @staticmethod
    def test_bad_temperature_range():
        with pytest.raises(
                ValueError,
                match='Bad temperature range'
        ):
            chemistry.StateSampler((1200.0, 400.0), 2e5)

    def test_generate_save_and_load(self, tmpdir):
        mechanism = load('a_to_b.mech')
        sampler = chemistry.StateSampler((300.0, 600.0), 101325.0,
                                         {'N2': 0.2}, seed=1)
        samples = chemistry.generate_samples(mechanism, sampler, 1e-5, 20)
        assert list(samples.columns) == [
            'T', 'p', 'Y_A', 'Y_B', 'Y_N2', 'rate_A', 'rate_B', 'rate_N2'
        ]
        assert np.allclose(samples['rate_A'] + samples['rate_B'], 0.0,
                           atol=1e-6)
        assert np.all(samples['rate_A'] <= 1e-9)
        path = os.path.join(str(tmpdir), 'samples.csv')
        chemistry.save_samples(samples, path)
        pd.testing.assert_frame_equal(
            chemistry.load_samples(path, mechanism), samples
        )

    def test_load_with_wrong_mechanism(self, tmpdir):
        mechanism = load('a_to_b.mech')
        sampler = chemistry.StateSampler((300.0, 600.0), 101325.0, seed=1)
        samples = chemistry.generate_samples(mechanism, sampler, 1e-5, 3)
        path = os.path.join(str(tmpdir), 'samples.csv')
        chemistry.save_samples(samples, path)
        with pytest.raises(
                ValueError,
                match='do not match the mechanism'
        ):
            chemistry.load_samples(path, load('stiff_abc.mech'))

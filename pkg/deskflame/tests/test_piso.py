# -*- coding: utf-8 -*-
"""
PURPOSE:
    Unit tests for piso.py

CREATED BY:
    deskflame developers
"""

import warnings

import numpy as np
import pytest
from mock import patch
from .. import driver, mesh, piso, sparse, surrogate, tools

PERIODIC = {side: 'periodic' for side in mesh.SIDES}
AIR = {'O2': 0.233, 'N2': 0.767}
TGV_LENGTH = 2 * np.pi * 1e-3


def load(name):
    return driver.parse_mechanism(tools.lookup_path(name))


def uniform_case(velocity=(0.0, 0.0, 0.0), mechanism_name='air.mech',
                 composition=None, dims=(4, 4, 4), lengths=(1., 1., 1.)):
    mechanism = load(mechanism_name)
    m, _, _ = mesh.build_cartesian_mesh(dims, lengths, PERIODIC)
    state = driver.init_uniform(m, mechanism, {
        'velocity': velocity,
        'temperature': 300.0,
        'pressure': 101325.0,
        'composition': composition or AIR,
    })
    return m, mechanism, state


def tgv_case(n=8):
    mechanism = load('air.mech')
    m, _, _ = mesh.build_cartesian_mesh(
        (n, n, 1), (TGV_LENGTH, TGV_LENGTH, TGV_LENGTH / n),
        {'xmin': 'periodic', 'xmax': 'periodic',
         'ymin': 'periodic', 'ymax': 'periodic'}
    )
    state = driver.init_tgv(m, mechanism, {
        'u0': 4.0, 'L': 1e-3, 'temperature': 300.0, 'pressure': 101325.0,
        'composition': AIR,
    })
    return m, mechanism, state


class TestPisoConfig:
    @staticmethod
    def test_defaults():
        config = piso.PisoConfig()
        assert config.n_correctors == 2
        assert config.momentum_predictor
        assert config.chemistry_mode == 'none'
        assert config.solvers['p'].solver_kind == 'pcg'
        assert config.schemes['U'].div_scheme == 'linear'

    @staticmethod
    def test_overrides_merge_with_defaults():
        controls = sparse.SolverControls(1e-20, 0.0, 50, 'amg-pcg')
        config = piso.PisoConfig(solvers={'p': controls})
        assert config.solvers['p'] == controls
        assert config.solvers['U'].solver_kind == 'bicgstab'

    @staticmethod
    def test_read_only():
        config = piso.PisoConfig()
        with pytest.raises(PermissionError):
            config.n_correctors = 3
        config.solvers['p'] = None
        assert config.solvers['p'] is not None

    @staticmethod
    def test_bad_correctors():
        with pytest.raises(
                ValueError,
                match='n_correctors must be >= 1'
        ):
            piso.PisoConfig(n_correctors=0)

    @staticmethod
    def test_bad_chemistry_mode():
        with pytest.raises(
                ValueError,
                match='Bad chemistry mode: tabulated'
        ):
            piso.PisoConfig(chemistry_mode='tabulated')

    @staticmethod
    def test_unknown_equation():
        with pytest.raises(
                ValueError,
                match=r"Unknown solver equation\(s\): \['k'\]"
        ):
            piso.PisoConfig(solvers={'k': sparse.SolverControls()})

    @staticmethod
    def test_surrogate_needs_bundle():
        m, mechanism, _ = uniform_case()
        with pytest.raises(
                ValueError,
                match='needs a weights bundle'
        ):
            piso.PisoSolver(m, mechanism,
                            piso.PisoConfig(chemistry_mode='surrogate'))

    @staticmethod
    def test_surrogate_needs_training_dt():
        m, mechanism, _ = uniform_case()
        network = surrogate.MlpNetwork(
            [np.zeros((1, 5))], [np.array([0.0])], name='O2'
        )
        with pytest.raises(
                ValueError,
                match='Surrogate bundle has no training time step'
        ):
            piso.PisoSolver(m, mechanism,
                            piso.PisoConfig(chemistry_mode='surrogate'),
                            surrogate.SurrogateBundle([network]))


class TestAdvance:
    @staticmethod
    def test_bad_dt():
        m, mechanism, state = uniform_case()
        with pytest.raises(
                ValueError,
                match='dt must be > 0'
        ):
            piso.PisoSolver(m, mechanism).advance(state, 0.0)

    @staticmethod
    def test_rest_is_a_fixed_point():
        m, mechanism, state = uniform_case()
        rho0 = state.rho.data.copy()
        report = piso.PisoSolver(m, mechanism).advance(state, 1e-3)
        assert np.allclose(state.U.data, 0.0, atol=1e-12)
        assert np.allclose(state.T.data, 300.0)
        assert np.allclose(state.rho.data, rho0, rtol=1e-12)
        assert state.p_thermo == pytest.approx(101325.0, rel=1e-12)
        assert state.time == pytest.approx(1e-3)
        assert report.time == pytest.approx(1e-3)

    @staticmethod
    def test_uniform_flow_is_preserved():
        m, mechanism, state = uniform_case(velocity=(1.0, 0.5, 0.0))
        piso.PisoSolver(m, mechanism).advance(state, 1e-2)
        assert np.allclose(state.U.data[0], 1.0, atol=1e-8)
        assert np.allclose(state.U.data[1], 0.5, atol=1e-8)
        assert np.allclose(state.U.data[2], 0.0, atol=1e-8)
        assert np.allclose(state.Y.data.sum(axis=0), 1.0)

    @staticmethod
    def test_report_contents():
        m, mechanism, state = uniform_case(velocity=(1.0, 0.0, 0.0))
        report = piso.PisoSolver(m, mechanism).advance(state, 1e-2)
        assert set(report.timings) == set(piso.TIMING_CATEGORIES)
        assert 0.0 <= report.stage_sum <= report.total
        assert report.courant == pytest.approx(0.04)
        assert {'U', 'p', 'h', 'Y_O2'} <= set(report.solver_reports)
        # two correctors, one pressure solve each
        assert len(report.solver_reports['p']) == 2
        assert report.diagnostics.get('courant_exceeded', 0) == 0
        assert 'StepReport(t=0.01' in repr(report)

    @staticmethod
    def test_courant_limit_is_reported():
        m, mechanism, state = uniform_case(velocity=(1.0, 0.0, 0.0))
        solver = piso.PisoSolver(m, mechanism, piso.PisoConfig(max_co=0.01))
        with pytest.warns(tools.DiagnosticWarning, match='Courant number'):
            report = solver.advance(state, 1e-2)
        assert report.diagnostics['courant_exceeded'] == 1

    @staticmethod
    def test_stage_failure_names_stage():
        m, mechanism, state = uniform_case()
        solver = piso.PisoSolver(m, mechanism)
        with patch.object(piso.PisoSolver, 'energy_step',
                          side_effect=RuntimeError('boom')):
            with pytest.raises(piso.StageError) as info:
                solver.advance(state, 1e-3)
        assert info.value.stage == 'energy'
        assert isinstance(info.value.__cause__, RuntimeError)
        assert 'energy stage failed: boom' in str(info.value)


class TestTaylorGreen:
    @staticmethod
    def test_continuity_within_solver_tolerance():
        m, mechanism, state = tgv_case()
        solver = piso.PisoSolver(m, mechanism)
        for _ in range(3):
            report = solver.advance(state, 1e-5)
            assert report.continuity_bound is not None
            assert report.continuity_residual <= report.continuity_bound

    @staticmethod
    def test_default_pressure_tolerance_is_reached():
        m, mechanism, state = tgv_case(n=32)
        solver = piso.PisoSolver(m, mechanism)
        with warnings.catch_warnings():
            warnings.simplefilter('error', tools.ConvergenceWarning)
            for _ in range(2):
                report = solver.advance(state, 1e-5)
                assert report.diagnostics.get(
                    'linear_solver_not_converged', 0) == 0
                for pressure_solve in report.solver_reports['p']:
                    assert pressure_solve.converged

    @staticmethod
    def test_mass_is_conserved():
        m, mechanism, state = tgv_case()
        mass0 = np.sum(state.rho.data) * m.cell_volume
        piso.PisoSolver(m, mechanism).advance(state, 1e-5)
        mass1 = np.sum(state.rho.data) * m.cell_volume
        assert mass1 == pytest.approx(mass0, rel=1e-12)

    @staticmethod
    def test_kinetic_energy_decays():
        m, mechanism, state = tgv_case()
        before = piso.kinetic_energy(state)
        piso.PisoSolver(m, mechanism).advance(state, 1e-5)
        after = piso.kinetic_energy(state)
        assert after < before
        assert after > 0.9 * before

    @staticmethod
    @pytest.mark.slow
    def test_spatial_order():
        dt, n_steps = 1e-5, 10
        errors = []
        for n in (16, 32, 64):
            m, mechanism, state = tgv_case(n)
            nu = np.mean(mechanism.thermo.viscosity(state.mixture_state()) /
                         state.rho.data[0])
            initial = state.U.data[:2].copy()
            solver = piso.PisoSolver(m, mechanism)
            for _ in range(n_steps):
                solver.advance(state, dt)
            decay = np.exp(-2.0 * nu * n_steps * dt / 1e-3 ** 2)
            errors.append(np.sqrt(np.mean(
                (state.U.data[:2] - decay * initial) ** 2
            )))
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert np.all(orders >= 1.8)

    @staticmethod
    def test_repeat_runs_are_bitwise_identical():
        results = []
        for _ in range(2):
            m, mechanism, state = tgv_case()
            solver = piso.PisoSolver(m, mechanism)
            for _ in range(2):
                solver.advance(state, 1e-5)
            results.append(state)
        assert results[0].U.data.tobytes() == results[1].U.data.tobytes()
        assert results[0].p.data.tobytes() == results[1].p.data.tobytes()


class TestStages:
    @staticmethod
    def test_ode_chemistry_in_a_uniform_reactor():
        m, mechanism, state = uniform_case(
            mechanism_name='a_to_b.mech',
            composition={'A': 0.4, 'B': 0.0, 'N2': 0.6},
            dims=(2, 2, 2)
        )
        config = piso.PisoConfig(chemistry_mode='ode')
        piso.PisoSolver(m, mechanism, config).advance(state, 1e-4)
        a, b = mechanism.index('A'), mechanism.index('B')
        expected = 0.4 * np.exp(-0.1)
        assert np.allclose(state.Y.data[a], expected, rtol=1e-4)
        assert np.allclose(state.Y.data[b], 0.4 - expected, rtol=1e-3)
        # A and B share their enthalpy, so T does not move
        assert np.allclose(state.T.data, 300.0, atol=1e-6)

    @staticmethod
    def test_couette_reaches_linear_profile():
        mechanism = load('air.mech')
        height = 1e-4
        m, _, _ = mesh.build_cartesian_mesh(
            (4, 8, 1), (4e-3, height, 1e-4),
            {'xmin': 'periodic', 'xmax': 'periodic',
             'ymin': 'wall', 'ymax': 'wall'}
        )
        state = driver.init_uniform(
            m, mechanism,
            {'temperature': 300.0, 'pressure': 101325.0, 'composition': AIR},
            {'ymax': {'U': (1.0, 0.0, 0.0)}}
        )
        solver = piso.PisoSolver(m, mechanism)
        for _ in range(30):
            solver.advance(state, 1e-4)
        y = m.cell_centers[:, 1]
        assert np.allclose(state.U.data[0], y / height, atol=1e-3)
        assert np.allclose(state.U.data[1:], 0.0, atol=1e-4)
        assert np.allclose(state.T.data, 300.0, atol=1e-3)

    @staticmethod
    def test_continuity_step():
        m, mechanism, state = tgv_case(n=4)
        state.rho.store_old_time()
        solver = piso.PisoSolver(m, mechanism)
        solver._report = piso.StepReport(0.0, 1e-5)
        solver.continuity_step(state, 1e-5)
        assert piso.continuity_residual(state, 1e-5) < 1e-12

    @staticmethod
    def test_continuity_residual_needs_old_level():
        _, _, state = uniform_case()
        with pytest.raises(
                ValueError,
                match='Density has no old time level'
        ):
            piso.continuity_residual(state, 1e-3)

    @staticmethod
    def test_fixed_pressure_patch_sets_thermodynamic_pressure():
        mechanism = load('air.mech')
        m, _, _ = mesh.build_cartesian_mesh(
            (4, 1, 1), (1., 1., 1.), {'xmax': 'fixedValue'}
        )
        state = driver.init_uniform(
            m, mechanism,
            {'temperature': 300.0, 'pressure': 101325.0, 'composition': AIR},
            {'xmax': {'p': 2e5}}
        )
        solver = piso.PisoSolver(m, mechanism)
        solver._report = piso.StepReport(0.0, 1.0)
        before = solver.update_properties(state)
        assert before == 101325.0
        assert state.p_thermo == pytest.approx(2e5)
        assert np.allclose(state.rho.data,
                           2e5 * mechanism.thermo.psi(state.mixture_state()))

# -*- coding: utf-8 -*-
"""
PURPOSE:
    Time advancement of variable-density low-Mach reactive flow with the
    PISO pressure-velocity coupling.

    One step runs, in order: continuity, species transport, chemistry,
    energy transport and temperature inversion, property update, momentum
    predictor and the pressure correctors. Density follows the ideal-gas law
    at a uniform thermodynamic pressure; on domains without a fixed-value
    pressure patch that pressure is rescaled so total mass is conserved and
    the pressure field is pinned to it at cell 0.

CREATED BY:
    deskflame developers
"""

import contextlib
import time

import numpy as np

from . import chemistry, field, fvm, sparse, surrogate, tools
from .field import CellField
from .thermo import MixtureState

CHEMISTRY_MODES = ('none', 'ode', 'surrogate')
TIMING_CATEGORIES = ('discretisation', 'linear_solve', 'chemistry', 'thermo')
EQUATIONS = ('U', 'p', 'Y', 'h')


class StageError(RuntimeError):
    """
    A stage of the time step failed; ``stage`` names it and the original
    exception is chained as the cause.
    """
    def __init__(self, stage, error):
        super().__init__('{0} stage failed: {1}'.format(stage, error))
        self.stage = stage
        self.error = error


class PisoConfig:
    """
    Parameters
    ----------
    n_correctors : int
        Pressure correctors per step
    momentum_predictor : bool
        Solve the momentum equation before the correctors
    max_co : float
        Courant number above which a step is flagged
    chemistry_mode : str
        'none', 'ode' or 'surrogate'
    schemes : dict or None
        Equation ('U', 'Y', 'h') -> fvm.SchemeConfig
    solvers : dict or None
        Equation ('U', 'p', 'Y', 'h') -> sparse.SolverControls
    dpdt : bool
        Add the thermodynamic pressure rise to the energy equation
    chemistry_abs_tol, chemistry_rel_tol : float
        Stiff integrator tolerances
    use_multiprocessing : bool
        Integrate chemistry on a process pool
    """
    def __init__(
            self,
            n_correctors=2,
            momentum_predictor=True,
            max_co=0.5,
            chemistry_mode='none',
            schemes=None,
            solvers=None,
            dpdt=False,
            chemistry_abs_tol=chemistry.DEFAULT_ABS_TOL,
            chemistry_rel_tol=chemistry.DEFAULT_REL_TOL,
            use_multiprocessing=False
    ):
        if int(n_correctors) < 1:
            raise ValueError('n_correctors must be >= 1')
        if not max_co > 0:
            raise ValueError('max_co must be > 0')
        if chemistry_mode not in CHEMISTRY_MODES:
            raise ValueError('Bad chemistry mode: {0}'.format(chemistry_mode))
        default_schemes = {
            'U': fvm.SchemeConfig('euler', 'linear'),
            'Y': fvm.SchemeConfig('euler', 'upwind'),
            'h': fvm.SchemeConfig('euler', 'upwind'),
        }
        default_solvers = {
            'U': sparse.SolverControls(1e-12, 1e-8, 1000, 'bicgstab'),
            # kg/s; the round-off floor of b - Ax at p ~ 1e5 Pa is ~1e-17
            'p': sparse.SolverControls(1e-15, 1e-8, 2000, 'pcg'),
            'Y': sparse.SolverControls(1e-14, 1e-10, 1000, 'bicgstab'),
            'h': sparse.SolverControls(1e-8, 1e-12, 1000, 'bicgstab'),
        }
        for label, given, known in (('scheme', schemes, default_schemes),
                                    ('solver', solvers, default_solvers)):
            unknown = set(given or {}) - set(known)
            if unknown:
                raise ValueError(
                    'Unknown {0} equation(s): {1}'.format(
                        label, sorted(unknown)
                    )
                )
        default_schemes.update(schemes or {})
        default_solvers.update(solvers or {})
        self._n_correctors = int(n_correctors)
        self._momentum_predictor = bool(momentum_predictor)
        self._max_co = float(max_co)
        self._chemistry_mode = chemistry_mode
        self._schemes = default_schemes
        self._solvers = default_solvers
        self._dpdt = bool(dpdt)
        self._chemistry_abs_tol = float(chemistry_abs_tol)
        self._chemistry_rel_tol = float(chemistry_rel_tol)
        self._use_multiprocessing = bool(use_multiprocessing)

    def __setattr__(self, name, value):
        if not name.startswith('_'):
            raise PermissionError('PisoConfig is read-only')
        super().__setattr__(name, value)

    @property
    def n_correctors(self):
        return self._n_correctors

    @property
    def momentum_predictor(self):
        return self._momentum_predictor

    @property
    def max_co(self):
        return self._max_co

    @property
    def chemistry_mode(self):
        return self._chemistry_mode

    @property
    def schemes(self):
        return dict(self._schemes)

    @property
    def solvers(self):
        return dict(self._solvers)

    @property
    def dpdt(self):
        return self._dpdt

    @property
    def chemistry_abs_tol(self):
        return self._chemistry_abs_tol

    @property
    def chemistry_rel_tol(self):
        return self._chemistry_rel_tol

    @property
    def use_multiprocessing(self):
        return self._use_multiprocessing


class SimulationState:
    """
    Flow fields of one time level.

    Attributes
    ----------
    U : CellField
        Velocity, m/s (3 components)
    p : CellField
        Pressure, Pa
    Y : CellField
        Mass fractions, one component per species
    h : CellField
        Absolute enthalpy, J/kg
    T : CellField
        Temperature, K
    rho : CellField
        Density, kg/m^3
    phi : deskflame.field.FaceField
        Mass flux, kg/s
    p_thermo : float
        Thermodynamic pressure, Pa
    time : float
        s
    """
    def __init__(self, mesh, U, p, Y, h, T, rho, phi, p_thermo, time=0.0):
        for name, value, n_comp in (('U', U, 3), ('p', p, 1), ('h', h, 1),
                                    ('T', T, 1), ('rho', rho, 1)):
            if value.mesh is not mesh:
                raise ValueError('{0} is on a different mesh'.format(name))
            if value.n_components != n_comp:
                raise ValueError(
                    '{0} needs {1} component(s)'.format(name, n_comp)
                )
        if Y.mesh is not mesh or phi.mesh is not mesh:
            raise ValueError('Y and phi must be on the state mesh')
        if not p_thermo > 0:
            raise ValueError('p_thermo must be > 0')
        self.mesh = mesh
        self.U = U
        self.p = p
        self.Y = Y
        self.h = h
        self.T = T
        self.rho = rho
        self.phi = phi
        self.p_thermo = float(p_thermo)
        self.time = float(time)

    def mixture_state(self):
        return MixtureState(self.p_thermo, self.T.data[0], self.Y.data)

    def copy(self):
        return SimulationState(
            self.mesh, self.U.copy(), self.p.copy(), self.Y.copy(),
            self.h.copy(), self.T.copy(), self.rho.copy(), self.phi.copy(),
            self.p_thermo, self.time
        )


class StepReport:
    """
    Outcome of one time step: stage timings in seconds, solver reports per
    equation, Courant number, continuity residual and the diagnostic
    counters raised during the step.
    """
    def __init__(self, time, dt):
        self.time = time
        self.dt = dt
        self.timings = {category: 0.0 for category in TIMING_CATEGORIES}
        self.total = 0.0
        self.solver_reports = {}
        self.courant = 0.0
        self.continuity_residual = 0.0
        self.continuity_bound = None
        self.diagnostics = {}

    @property
    def stage_sum(self):
        return sum(self.timings.values())

    def __repr__(self):
        return ('StepReport(t={0:.6g}, Co={1:.3f}, continuity={2:.3e}, '
                'total={3:.3f} s)').format(
            self.time, self.courant, self.continuity_residual, self.total
        )


def _zero_gradient(mesh, data, name=None, units=None):
    return CellField(
        mesh, data,
        boundary={p.name: 'zeroGradient' for p in mesh.boundary_patches},
        name=name, units=units
    )


def kinetic_energy(state):
    """Mass-averaged kinetic energy 0.5 |U|^2, J/kg."""
    volume = state.mesh.cell_volume
    mass = state.rho.data[0] * volume
    speed2 = np.sum(state.U.data ** 2, axis=0)
    return float(0.5 * np.sum(mass * speed2) / np.sum(mass))


def continuity_residual(state, dt):
    """
    Largest per-cell mass imbalance |d(rho)/dt + div(phi)| V in kg/s, with
    rho's old time level.
    """
    if state.rho.old_time is None:
        raise ValueError('Density has no old time level')
    mesh = state.mesh
    drho = (state.rho.data[0] - state.rho.old_time.data[0]) / dt
    div_phi = field.explicit_divergence(state.phi).data[0]
    return float(np.max(np.abs(drho + div_phi)) * mesh.cell_volume)


def has_fixed_pressure(state):
    return any(c.kind == 'fixedValue' for c in state.p.boundary.values())


class PisoSolver:
    """
    Advances a SimulationState in time.

    Parameters
    ----------
    mesh : deskflame.mesh.StructuredMesh
    mechanism : deskflame.chemistry.Mechanism
    config : PisoConfig or None
    bundle : deskflame.surrogate.SurrogateBundle or None
        Required for chemistry_mode 'surrogate'
    """
    def __init__(self, mesh, mechanism, config=None, bundle=None):
        self.mesh = mesh
        self.mechanism = mechanism
        self.thermo = mechanism.thermo
        self.config = config or PisoConfig()
        if self.config.chemistry_mode == 'surrogate' and bundle is None:
            raise ValueError('Surrogate chemistry needs a weights bundle')
        if self.config.chemistry_mode == 'surrogate' and \
                bundle.training_dt is None:
            raise ValueError('Surrogate bundle has no training time step')
        self.bundle = bundle
        self._report = None
        self._dpdt_rate = 0.0

    @contextlib.contextmanager
    def _timed(self, category):
        start = time.perf_counter()
        try:
            yield
        finally:
            self._report.timings[category] += time.perf_counter() - start

    @staticmethod
    @contextlib.contextmanager
    def _stage(name):
        try:
            yield
        except StageError:
            raise
        except Exception as err:
            raise StageError(name, err) from err

    def _solve(self, matrix, equation, label):
        with self._timed('linear_solve'):
            _, report = fvm.solve(matrix, self.config.solvers[equation])
        self._report.solver_reports.setdefault(label, []).append(report)
        return report

    def _properties(self, state):
        """
        Transport coefficients at the current (T, Y): viscosity, lambda/cp
        and rho*D_k = lambda/(cp Le_k).
        """
        mixture = state.mixture_state()
        mu = np.atleast_1d(self.thermo.viscosity(mixture))
        alpha = mu / self.thermo.prandtl
        lewis = np.array([s.lewis for s in self.thermo.species])
        return mu, alpha, alpha[None, :] / lewis[:, None]

    def continuity_step(self, state, dt):
        """rho* = rho_old - dt div(phi)."""
        with self._timed('discretisation'):
            div_phi = field.explicit_divergence(state.phi).data[0]
            state.rho.data[0] = state.rho.old_time.data[0] - dt * div_phi
        return state

    def species_step(self, state, dt):
        """
        Transport of every species but the last, which closes the sum.
        """
        n_species = self.thermo.n_species
        if n_species > 1:
            scheme = self.config.schemes['Y']
            with self._timed('thermo'):
                _, _, rho_d = self._properties(state)
            for k in range(n_species - 1):
                with self._timed('discretisation'):
                    y_k = state.Y.component(k)
                    y_k.old_time = state.Y.old_time.component(k)
                    if state.Y.old_old_time is not None:
                        y_k.old_old_time = state.Y.old_old_time.component(k)
                    gamma = _zero_gradient(self.mesh, rho_d[k], units='kg/m/s')
                    equation = (
                        fvm.ddt(state.rho, y_k, dt, scheme.ddt_scheme) +
                        fvm.div(state.phi, y_k, scheme.div_scheme) -
                        fvm.laplacian(gamma, y_k)
                    )
                self._solve(equation, 'Y', 'Y_' + self.thermo.species_names[k])
                state.Y.data[k] = y_k.data[0]
            with self._timed('discretisation'):
                y = state.Y.data
                y[:-1] = np.clip(y[:-1], 0.0, 1.0)
                y[-1] = np.maximum(1.0 - np.sum(y[:-1], axis=0), 0.0)
                y /= np.sum(y, axis=0)
        return state

    def chemistry_step(self, state, dt):
        """
        Chemical source over dt from the stiff integrator or the surrogate;
        the absolute enthalpy is unchanged and T follows from it.
        """
        mode = self.config.chemistry_mode
        if mode == 'none':
            return state
        with self._timed('chemistry'):
            if mode == 'ode':
                temperature, y = chemistry.integrate_field(
                    self.mechanism,
                    state.T.data[0],
                    state.p_thermo,
                    state.Y.data,
                    dt,
                    self.config.chemistry_abs_tol,
                    self.config.chemistry_rel_tol,
                    use_multiprocessing=self.config.use_multiprocessing
                )
            else:
                temperature, y = surrogate.apply_surrogate_field(
                    self.bundle,
                    self.mechanism,
                    state.T.data[0],
                    state.p_thermo,
                    state.Y.data,
                    dt
                )
        state.T.data[0] = temperature
        state.Y.data[:] = y
        return state

    def energy_step(self, state, dt, dpdt=0.0):
        """
        Enthalpy transport, then T from h cell by cell. ``dpdt`` is the
        thermodynamic pressure rate, used when the config enables it.
        """
        scheme = self.config.schemes['h']
        with self._timed('thermo'):
            _, alpha, _ = self._properties(state)
        with self._timed('discretisation'):
            gamma = _zero_gradient(self.mesh, alpha, units='kg/m/s')
            equation = (
                fvm.ddt(state.rho, state.h, dt, scheme.ddt_scheme) +
                fvm.div(state.phi, state.h, scheme.div_scheme) -
                fvm.laplacian(gamma, state.h)
            )
            if self.config.dpdt and dpdt:
                equation = equation + fvm.source_su(dpdt, state.h)
        self._solve(equation, 'h', 'h')
        with self._timed('thermo'):
            state.T.data[0] = self.thermo.T_from_h(
                state.h.data[0], state.p_thermo, state.Y.data,
                state.T.data[0]
            )
        return state

    def update_properties(self, state):
        """
        Density from the equation of state. Without a fixed-value pressure
        patch the thermodynamic pressure is rescaled to keep the mass
        rho* carries after the continuity step.

        Returns
        -------
        float
            Thermodynamic pressure before the update
        """
        p_old = state.p_thermo
        with self._timed('thermo'):
            psi = np.atleast_1d(self.thermo.psi(state.mixture_state()))
            if has_fixed_pressure(state):
                values = [state.p.boundary_values(patch)[0]
                          for patch in self.mesh.boundary_patches
                          if state.p.boundary[patch.name].kind ==
                          'fixedValue']
                state.p_thermo = float(np.mean(np.concatenate(values)))
            else:
                mass = np.sum(state.rho.data[0])
                state.p_thermo = float(mass / np.sum(psi))
            state.rho.data[0] = state.p_thermo * psi
        return p_old

    def momentum_predictor(self, state, dt):
        """
        Assembles ddt(rho, U) + div(phi, U) - laplacian(mu, U) and, with
        the predictor enabled, solves it against -grad(p).

        Returns
        -------
        FvMatrix
            The momentum matrix without the pressure gradient
        """
        scheme = self.config.schemes['U']
        with self._timed('thermo'):
            mu, _, _ = self._properties(state)
        with self._timed('discretisation'):
            viscosity = _zero_gradient(self.mesh, mu, units='Pa*s')
            u_eqn = (
                fvm.ddt(state.rho, state.U, dt, scheme.ddt_scheme) +
                fvm.div(state.phi, state.U, scheme.div_scheme) -
                fvm.laplacian(viscosity, state.U)
            )
        if self.config.momentum_predictor:
            with self._timed('discretisation'):
                grad_p = field.gauss_gradient(state.p)
                grad_p.data *= -1.0
                predictor = u_eqn + fvm.source_su(grad_p)
            self._solve(predictor, 'U', 'U')
        return u_eqn

    def pressure_correct(self, state, u_eqn, dt, n_correctors=None):
        """
        PISO correctors: flux from H/A, pressure equation
        laplacian(rho/A, p) = div(phi*) + d(rho)/dt, then flux and velocity
        correction.
        """
        n_correctors = n_correctors or self.config.n_correctors
        mesh = self.mesh
        pin = not has_fixed_pressure(state)
        drho = (state.rho.data[0] - state.rho.old_time.data[0]) / dt
        report = None
        for _ in range(n_correctors):
            with self._timed('discretisation'):
                a = fvm.diag_a(u_eqn)
                r_au = 1.0 / a.data[0]
                h_by_a = fvm.h_of(u_eqn, state.U)
                h_by_a.data *= r_au
                h_by_a.units = state.U.units
                phi_star = field.face_flux(h_by_a, state.rho)
                div_phi_star = field.explicit_divergence(phi_star).data[0]
                gamma = _zero_gradient(mesh, state.rho.data[0] * r_au,
                                       units='s')
                laplacian = fvm.laplacian(gamma, state.p)
                source = _zero_gradient(mesh, div_phi_star + drho,
                                        units='kg/m**3/s')
                p_eqn = laplacian + fvm.source_su(source, state.p)
                if pin:
                    p_eqn.set_reference(0, state.p_thermo)
            report = self._solve(p_eqn, 'p', 'p')
            with self._timed('discretisation'):
                state.phi = phi_star - fvm.flux(laplacian)
                grad_p = field.gauss_gradient(state.p)
                state.U.data[:] = h_by_a.data - r_au * grad_p.data
        if report is not None:
            controls = self.config.solvers['p']
            self._report.continuity_bound = 10.0 * max(
                controls.abs_tol, controls.rel_tol * report.initial_residual
            )
        return state

    def advance(self, state, dt):
        """
        One time step of the full pipeline.

        Returns
        -------
        StepReport
        """
        if not dt > 0:
            raise ValueError('dt must be > 0')
        tools.diagnostics.reset()
        self._report = StepReport(state.time + dt, dt)
        start = time.perf_counter()

        with self._stage('courant'), self._timed('discretisation'):
            volumetric = field.face_flux(state.U)
            courant, cell = field.courant_number(volumetric, self.mesh, dt)
            self._report.courant = courant
            if courant > self.config.max_co:
                tools.warn(
                    'Courant number {0:.3f} in cell {1} exceeds {2}'.format(
                        courant, cell, self.config.max_co
                    ),
                    tools.DiagnosticWarning,
                    'courant_exceeded'
                )
            for item in (state.rho, state.U, state.Y, state.h):
                item.store_old_time()

        with self._stage('continuity'):
            self.continuity_step(state, dt)
        with self._stage('species'):
            self.species_step(state, dt)
        with self._stage('chemistry'):
            self.chemistry_step(state, dt)
        with self._stage('energy'):
            self.energy_step(state, dt, self._dpdt_rate)
        with self._stage('properties'):
            p_before = self.update_properties(state)
        # lags one step: the rise is known only after the property update
        self._dpdt_rate = (state.p_thermo - p_before) / dt
        with self._stage('momentum'):
            u_eqn = self.momentum_predictor(state, dt)
        with self._stage('pressure'):
            self.pressure_correct(state, u_eqn, dt)

        with self._timed('discretisation'):
            self._report.continuity_residual = continuity_residual(state, dt)
        state.time += dt
        self._report.total = time.perf_counter() - start
        self._report.diagnostics = tools.diagnostics.snapshot()
        return self._report

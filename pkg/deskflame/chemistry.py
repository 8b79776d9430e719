# -*- coding: utf-8 -*-
"""
PURPOSE:
    Gas-phase kinetics: mechanisms of elementary, third-body and reversible
    reactions with modified Arrhenius rates, the constant-pressure adiabatic
    reactor equations, a stiff integrator (adaptive implicit Euler with
    step-doubling control) and generation of training samples for the
    surrogate networks.

    All per-cell arithmetic runs in a fixed order with no reductions across
    cells, so integrating one cell alone or as part of a field gives
    bitwise-identical results.

CREATED BY:
    deskflame developers
"""

import multiprocessing as mp

import numpy as np
import pandas as pd

from . import tools
from .thermo import (
    MixtureState,
    P_STANDARD,
    R_UNIVERSAL,
    Thermo,
    species_sum
)

DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-6
_SUM_DRIFT_TOL = 1e-8
_CLIP_REPORT = 1e-6
_NEWTON_MAX_ITER = 10
_NEWTON_TOL = 1e-3
_SUBSTEP_FLOOR = 1e-12


class IntegrationError(RuntimeError):
    """
    The stiff integrator could not advance some cells.

    Attributes
    ----------
    cells : list of int
        Indices of the failing cells
    state : dict
        Temperature and mass fractions of those cells at failure
    """
    def __init__(self, message, cells=(), state=None):
        super().__init__(message)
        self.message = message
        self.cells = list(cells)
        self.state = state or {}

    def __reduce__(self):
        return IntegrationError, (self.message, self.cells, self.state)


class Reaction:
    """
    One reaction with rate constant A*T**beta*exp(-Ea/(R_u T)).

    Parameters
    ----------
    reactants, products : dict
        Species name -> stoichiometric coefficient
    pre_exponential : float
        A in kmol, m, s units
    temperature_exponent : float
        beta
    activation_energy : float
        Ea in J/kmol
    reversible : bool
    third_body : dict or None
        Species name -> collision efficiency (unlisted species count 1);
        None for reactions without a third body
    """
    def __init__(
            self,
            reactants,
            products,
            pre_exponential,
            temperature_exponent=0.0,
            activation_energy=0.0,
            reversible=False,
            third_body=None
    ):
        reactants = dict(reactants)
        products = dict(products)
        if not reactants or not products:
            raise ValueError('Reactions need reactants and products')
        for nu in list(reactants.values()) + list(products.values()):
            if not nu > 0:
                raise ValueError(
                    'Stoichiometric coefficients must be > 0'
                )
        if not pre_exponential > 0:
            raise ValueError('Pre-exponential factor must be > 0')
        self.reactants = {k: float(v) for k, v in reactants.items()}
        self.products = {k: float(v) for k, v in products.items()}
        self.pre_exponential = float(pre_exponential)
        self.temperature_exponent = float(temperature_exponent)
        self.activation_energy = float(activation_energy)
        self.reversible = bool(reversible)
        self.third_body = None if third_body is None else \
            {k: float(v) for k, v in third_body.items()}

    @property
    def species(self):
        return list(self.reactants) + \
            [s for s in self.products if s not in self.reactants]

    @property
    def equation(self):
        def side(terms):
            items = []
            for name, nu in terms.items():
                if nu == 1:
                    items.append(name)
                else:
                    items.append('{0:g} {1}'.format(nu, name))
            if self.third_body is not None:
                items.append('M')
            return ' + '.join(items)
        arrow = ' <=> ' if self.reversible else ' => '
        return side(self.reactants) + arrow + side(self.products)

    def __repr__(self):
        return 'Reaction({0!r})'.format(self.equation)


def _arrhenius(reaction, temperature):
    return (
        reaction.pre_exponential *
        temperature ** reaction.temperature_exponent *
        np.exp(-reaction.activation_energy / (R_UNIVERSAL * temperature))
    )


def rate_forward(reaction, temperature):
    """
    Forward rate constant kf = A T^beta exp(-Ea/(R_u T)).
    """
    temperature = np.asarray(temperature, dtype=float)
    if np.any(temperature <= 0):
        raise ValueError('Temperature must be > 0')
    return _arrhenius(reaction, temperature)


def _kc_from_gibbs(product_terms, reactant_terms, g_rt, temperature):
    delta_g = np.zeros_like(temperature)
    delta_nu = 0.0
    for k, nu in product_terms:
        delta_g = delta_g + nu * g_rt[k]
        delta_nu += nu
    for k, nu in reactant_terms:
        delta_g = delta_g - nu * g_rt[k]
        delta_nu -= nu
    return np.exp(-delta_g) * \
        (P_STANDARD / (R_UNIVERSAL * temperature)) ** delta_nu


def equilibrium_Kc(reaction, temperature, thermo):
    """
    Concentration-based equilibrium constant
    Kc = exp(-dG/(R_u T)) (p_std/(R_u T))^(sum of product minus reactant
    coefficients).

    Parameters
    ----------
    reaction : Reaction
    temperature : float or array_like
    thermo : deskflame.thermo.Thermo
    """
    temperature = np.atleast_1d(np.asarray(temperature, dtype=float))
    kc = _kc_from_gibbs(
        [(thermo.index(k), nu) for k, nu in reaction.products.items()],
        [(thermo.index(k), nu) for k, nu in reaction.reactants.items()],
        thermo.species_g_RT(temperature),
        temperature
    )
    return kc if kc.size > 1 else float(kc[0])


def rate_reverse(reaction, temperature, thermo):
    return rate_forward(reaction, temperature) / \
        equilibrium_Kc(reaction, temperature, thermo)


class Mechanism:
    """
    Species, reactions and the inert species excluded from surrogate
    prediction. Every reaction is checked for element balance (or mass
    balance when compositions are missing) on construction.
    """
    def __init__(
            self,
            species,
            reactions=(),
            inert_species=(),
            prandtl=0.71,
            name=None
    ):
        self.thermo = Thermo(species, prandtl)
        self.reactions = list(reactions)
        self.name = name
        names = self.thermo.species_names
        for reaction in self.reactions:
            missing = [s for s in reaction.species if s not in names]
            missing += [s for s in (reaction.third_body or {})
                        if s not in names]
            if missing:
                raise ValueError(
                    'Reaction "{0}" uses unknown species: {1}'.format(
                        reaction.equation, ', '.join(missing)
                    )
                )
        inert_species = list(inert_species)
        for inert in inert_species:
            if inert not in names:
                raise ValueError('Unknown inert species ' + inert)
            if any(inert in r.species for r in self.reactions):
                raise ValueError(
                    'Inert species {0} takes part in a reaction'.format(inert)
                )
        self.inert_species = inert_species
        self._reactant_terms = [
            [(self.thermo.index(k), nu) for k, nu in r.reactants.items()]
            for r in self.reactions
        ]
        self._product_terms = [
            [(self.thermo.index(k), nu) for k, nu in r.products.items()]
            for r in self.reactions
        ]
        self._efficiencies = []
        for reaction in self.reactions:
            if reaction.third_body is None:
                self._efficiencies.append(None)
                continue
            efficiency = np.ones(self.n_species)
            for k, value in reaction.third_body.items():
                efficiency[self.thermo.index(k)] = value
            self._efficiencies.append(efficiency)
        self.audit()

    @property
    def species(self):
        return self.thermo.species

    @property
    def species_names(self):
        return self.thermo.species_names

    @property
    def n_species(self):
        return self.thermo.n_species

    @property
    def non_inert_species(self):
        return [s for s in self.species_names if s not in self.inert_species]

    @property
    def molar_masses(self):
        return self.thermo.molar_masses

    def index(self, name):
        return self.thermo.index(name)

    def audit(self):
        """
        Checks that every reaction conserves each element, or molar mass
        where some species carry no element composition.
        """
        by_name = {s.name: s for s in self.species}
        for reaction in self.reactions:
            involved = [by_name[s] for s in reaction.species]
            if all(s.composition for s in involved):
                totals = {}
                for sign, terms in ((-1, reaction.reactants),
                                    (1, reaction.products)):
                    for name, nu in terms.items():
                        atoms = by_name[name].composition
                        for element, count in atoms.items():
                            totals[element] = totals.get(element, 0.0) + \
                                sign * nu * count
                bad = sorted(e for e, v in totals.items() if abs(v) > 1e-9)
                if bad:
                    raise ValueError(
                        'Reaction "{0}" does not balance element(s) {1}; '
                        'species involved: {2}'.format(
                            reaction.equation, ', '.join(bad),
                            ', '.join(reaction.species)
                        )
                    )
            else:
                mass_in = sum(nu * by_name[k].molar_mass
                              for k, nu in reaction.reactants.items())
                mass_out = sum(nu * by_name[k].molar_mass
                               for k, nu in reaction.products.items())
                if abs(mass_in - mass_out) > 1e-6 * mass_in:
                    raise ValueError(
                        'Reaction "{0}" does not conserve mass; species '
                        'involved: {1}'.format(
                            reaction.equation, ', '.join(reaction.species)
                        )
                    )
        return True

    def _rates_of_progress(self, temperature, concentrations):
        """
        Net rate of progress of each reaction, shape (n_reactions, n).
        """
        q_all = np.zeros((len(self.reactions), temperature.shape[0]))
        g_rt = None
        for r, reaction in enumerate(self.reactions):
            kf = _arrhenius(reaction, temperature)
            forward = kf
            for k, nu in self._reactant_terms[r]:
                forward = forward * concentrations[k] ** nu
            q = forward
            if reaction.reversible:
                if g_rt is None:
                    g_rt = self.thermo.species_g_RT(temperature, warn=False)
                kc = _kc_from_gibbs(self._product_terms[r],
                                    self._reactant_terms[r], g_rt,
                                    temperature)
                reverse = kf / kc
                for k, nu in self._product_terms[r]:
                    reverse = reverse * concentrations[k] ** nu
                q = q - reverse
            efficiency = self._efficiencies[r]
            if efficiency is not None:
                q = q * species_sum(efficiency[:, None] * concentrations)
            q_all[r] = q
        return q_all

    def _production_rates(self, temperature, density, mass_fractions,
                          warn=True):
        concentrations = density * mass_fractions / \
            self.molar_masses[:, None]
        negative = concentrations < 0
        if warn and negative.any():
            n_cells = int(np.count_nonzero(negative.any(axis=0)))
            tools.warn(
                'Negative concentrations clipped in {0} cell(s)'.format(
                    n_cells
                ),
                tools.ConcentrationClipWarning,
                'concentration_clipped',
                n_cells
            )
        concentrations = np.where(negative, 0.0, concentrations)
        wdot = np.zeros_like(concentrations)
        q_all = self._rates_of_progress(temperature, concentrations)
        for r in range(len(self.reactions)):
            for k, nu in self._reactant_terms[r]:
                wdot[k] = wdot[k] - nu * q_all[r]
            for k, nu in self._product_terms[r]:
                wdot[k] = wdot[k] + nu * q_all[r]
        return wdot

    def production_rates(self, state):
        """
        Molar production rates in kmol/(m^3 s), shape (n_species, n) or
        (n_species,) for a single-cell state.
        """
        y = state.mass_fractions
        single = y.ndim == 1
        y = y[:, None] if single else y
        t = np.broadcast_to(np.atleast_1d(state.temperature), y.shape[1:])
        rho = np.atleast_1d(self.thermo.density(state))
        wdot = self._production_rates(t, rho, y)
        return wdot[:, 0] if single else wdot

    def _rhs(self, z, pressure, warn=False):
        """
        Reactor right-hand side for packed states z = (Y_1..Y_n, T) of
        shape (n_species + 1, n).
        """
        y = z[:-1]
        t = z[-1]
        w = self.molar_masses[:, None]
        mean_w = 1.0 / species_sum(y / w)
        rho = pressure * mean_w / (R_UNIVERSAL * t)
        wdot = self._production_rates(t, rho, y, warn)
        mass_rate = wdot * w
        h = self.thermo.species_h(t, warn=False)
        cp = species_sum(y * self.thermo.species_cp(t, warn=False))
        dz = np.empty_like(z)
        dz[:-1] = mass_rate / rho
        dz[-1] = -species_sum(h * mass_rate) / (rho * cp)
        return dz

    def reactor_rhs(self, state):
        """
        Constant-pressure adiabatic reactor: dY_k/dt = wdot_k W_k / rho and
        dT/dt = -sum_k h_k wdot_k W_k / (rho cp).

        Returns
        -------
        tuple
            (dY/dt, dT/dt)
        """
        y = state.mass_fractions
        single = y.ndim == 1
        y = y[:, None] if single else y
        t = np.broadcast_to(np.atleast_1d(state.temperature), y.shape[1:])
        p = np.broadcast_to(np.atleast_1d(state.pressure), y.shape[1:])
        dz = self._rhs(np.vstack([y, t[None, :]]), p, warn=True)
        if single:
            return dz[:-1, 0], float(dz[-1, 0])
        return dz[:-1], dz[-1]

    def __repr__(self):
        return 'Mechanism({0!r}: {1} species, {2} reactions)'.format(
            self.name, self.n_species, len(self.reactions)
        )


def _jacobian(mechanism, z, f0, pressure):
    """Forward-difference Jacobian, shape (n, m, m)."""
    m, n = z.shape
    floor = np.full((m, 1), 1e-6)
    floor[-1] = 1.0
    increment = np.sqrt(np.finfo(float).eps) * np.maximum(np.abs(z), floor)
    jac = np.empty((n, m, m))
    for j in range(m):
        shifted = z.copy()
        shifted[j] = z[j] + increment[j]
        step = shifted[j] - z[j]
        jac[:, :, j] = ((mechanism._rhs(shifted, pressure) - f0) / step).T
    return jac


def _implicit_euler(mechanism, z0, h, pressure, abs_tol, rel_tol):
    """
    One implicit Euler step z = z0 + h f(z) per cell by simplified Newton.

    Returns
    -------
    tuple
        (z, converged mask)
    """
    m, n = z0.shape
    f0 = mechanism._rhs(z0, pressure)
    iteration_matrix = np.eye(m)[None, :, :] - \
        h[:, None, None] * _jacobian(mechanism, z0, f0, pressure)
    z = z0.copy()
    converged = np.zeros(n, dtype=bool)
    with np.errstate(all='ignore'):
        for _ in range(_NEWTON_MAX_ITER):
            residual = z - z0 - h * mechanism._rhs(z, pressure)
            try:
                delta = np.linalg.solve(
                    iteration_matrix, -residual.T[:, :, None]
                )[:, :, 0].T
            except np.linalg.LinAlgError:
                return z, converged
            z = np.where(converged, z, z + delta)
            scale = abs_tol + rel_tol * np.abs(z)
            size = np.max(np.abs(delta) / scale, axis=0)
            converged |= np.isfinite(size) & (size <= _NEWTON_TOL)
            if converged.all():
                break
    converged &= np.all(np.isfinite(z), axis=0)
    return z, converged


def _integrate_batch(
        mechanism,
        temperature,
        pressure,
        mass_fractions,
        dt,
        abs_tol,
        rel_tol
):
    if not mechanism.reactions:
        return temperature.copy(), mass_fractions.copy()
    n = temperature.shape[0]
    z = np.vstack([mass_fractions, temperature[None, :]])
    h_conserved = species_sum(
        mass_fractions * mechanism.thermo.species_h(temperature, warn=False)
    )
    elapsed = np.zeros(n)
    step = np.full(n, float(dt))
    active = np.ones(n, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        p = pressure[idx]
        h = np.minimum(step[idx], dt - elapsed[idx])
        z_start = z[:, idx]
        z_full, ok_full = _implicit_euler(
            mechanism, z_start, h, p, abs_tol, rel_tol
        )
        z_mid, ok_mid = _implicit_euler(
            mechanism, z_start, 0.5 * h, p, abs_tol, rel_tol
        )
        z_half, ok_half = _implicit_euler(
            mechanism, z_mid, 0.5 * h, p, abs_tol, rel_tol
        )
        ok = ok_full & ok_mid & ok_half
        scale = abs_tol + rel_tol * np.maximum(np.abs(z_half),
                                               np.abs(z_start))
        with np.errstate(all='ignore'):
            error = np.max(np.abs(z_half - z_full) / scale, axis=0)
        ok &= np.isfinite(error)
        accept = ok & (error <= 1.0)
        z[:, idx[accept]] = 2.0 * z_half[:, accept] - z_full[:, accept]
        elapsed[idx[accept]] += h[accept]
        with np.errstate(divide='ignore'):
            factor = np.clip(0.9 / np.sqrt(np.maximum(error, 1e-10)),
                             0.2, 4.0)
        factor = np.where(ok, factor, 0.25)
        step[idx] = h * factor
        finished = dt - elapsed <= 1e-12 * dt
        active = ~finished
        stuck = active & (step < _SUBSTEP_FLOOR * dt)
        if stuck.any():
            cells = np.flatnonzero(stuck)
            raise IntegrationError(
                'Implicit Euler substep fell below {0:g} s in {1} '
                'cell(s)'.format(_SUBSTEP_FLOOR * dt, len(cells)),
                cells,
                {'T': z[-1, cells].copy(), 'Y': z[:-1, cells].copy()}
            )

    y = z[:-1]
    clipped = np.any(y < -_CLIP_REPORT, axis=0)
    if clipped.any():
        tools.warn(
            'Mass fractions below -{0:g} clipped in {1} cell(s)'.format(
                _CLIP_REPORT, int(clipped.sum())
            ),
            tools.ConcentrationClipWarning,
            'mass_fraction_clipped',
            int(clipped.sum())
        )
    y = np.where(y < 0, 0.0, y)
    total = species_sum(y)
    drift = np.abs(total - 1.0)
    if np.any(drift >= _SUM_DRIFT_TOL):
        cells = np.flatnonzero(drift >= _SUM_DRIFT_TOL)
        raise IntegrationError(
            'Mass fraction sum drifted by {0:.3e}'.format(drift.max()),
            cells,
            {'T': z[-1, cells].copy(), 'Y': y[:, cells].copy()}
        )
    y = y / total
    t_new = mechanism.thermo.T_from_h(h_conserved, pressure, y, z[-1])
    return t_new, y


def _integrate_chunk(args):
    mechanism, temperature, pressure, y, dt, abs_tol, rel_tol, offset = args
    try:
        return _integrate_batch(
            mechanism, temperature, pressure, y, dt, abs_tol, rel_tol
        )
    except IntegrationError as err:
        raise IntegrationError(
            err.message, [c + offset for c in err.cells], err.state
        )


def integrate_field(
        mechanism,
        temperature,
        pressure,
        mass_fractions,
        dt,
        abs_tol=DEFAULT_ABS_TOL,
        rel_tol=DEFAULT_REL_TOL,
        use_multiprocessing=False,
        n_chunks=None
):
    """
    Advances every cell of a field over dt as an independent constant-
    pressure adiabatic reactor.

    Parameters
    ----------
    mechanism : Mechanism
    temperature : array_like
        K, shape (n,)
    pressure : float or array_like
        Pa
    mass_fractions : array_like
        Shape (n_species, n)
    dt : float
        s
    abs_tol, rel_tol : float
        Step-doubling error tolerances
    use_multiprocessing : bool
        Split the cells into chunks handled by a process pool; results are
        identical to the serial path
    n_chunks : int or None
        Number of chunks, default the CPU count

    Returns
    -------
    tuple
        (temperature, mass_fractions) after dt
    """
    if not dt > 0:
        raise ValueError('dt must be > 0')
    if not (abs_tol > 0 and rel_tol > 0):
        raise ValueError('Tolerances must be > 0')
    temperature = np.atleast_1d(np.array(temperature, dtype=float))
    y = np.array(mass_fractions, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if y.shape != (mechanism.n_species, temperature.shape[0]):
        raise ValueError(
            'Mass fractions of shape {0} do not match {1} species and '
            '{2} cells'.format(y.shape, mechanism.n_species,
                               temperature.shape[0])
        )
    n = temperature.shape[0]
    pressure = np.broadcast_to(
        np.atleast_1d(np.asarray(pressure, dtype=float)), (n,)
    ).copy()

    if not use_multiprocessing or n < 2:
        return _integrate_chunk(
            (mechanism, temperature, pressure, y, dt, abs_tol, rel_tol, 0)
        )

    n_chunks = min(n, n_chunks or mp.cpu_count())
    bounds = np.linspace(0, n, n_chunks + 1).astype(int)
    chunks = [
        (mechanism, temperature[a:b], pressure[a:b], y[:, a:b], dt,
         abs_tol, rel_tol, a)
        for a, b in zip(bounds[:-1], bounds[1:]) if b > a
    ]
    with mp.Pool() as pool:
        results = pool.map(_integrate_chunk, chunks)
    return (
        np.concatenate([t for t, _ in results]),
        np.concatenate([y_new for _, y_new in results], axis=1)
    )


def integrate_cell(
        mechanism,
        state,
        dt,
        abs_tol=DEFAULT_ABS_TOL,
        rel_tol=DEFAULT_REL_TOL
):
    """
    Advances one reactor state over dt.

    Returns
    -------
    deskflame.thermo.MixtureState
    """
    if state.mass_fractions.ndim != 1:
        raise ValueError('integrate_cell takes a single-cell state')
    temperature, y = integrate_field(
        mechanism,
        np.atleast_1d(state.temperature),
        state.pressure,
        state.mass_fractions[:, None],
        dt,
        abs_tol,
        rel_tol
    )
    return MixtureState(float(state.pressure), float(temperature[0]),
                        y[:, 0])


class StateSampler:
    """
    Random reactor states: temperature uniform in ``temperature_range``,
    fixed pressure, fixed inert mass fractions and a flat Dirichlet
    distribution over the remaining (non-inert) species.
    """
    def __init__(
            self,
            temperature_range,
            pressure,
            inert_mass_fractions=None,
            seed=0
    ):
        low, high = (float(v) for v in temperature_range)
        if not 0 < low < high:
            raise ValueError('Bad temperature range')
        if not pressure > 0:
            raise ValueError('Pressure must be > 0')
        inert_mass_fractions = dict(inert_mass_fractions or {})
        if any(v < 0 for v in inert_mass_fractions.values()) or \
                sum(inert_mass_fractions.values()) >= 1:
            raise ValueError('Inert mass fractions must be >= 0 and sum < 1')
        self._temperature_range = (low, high)
        self._pressure = float(pressure)
        self._inert_mass_fractions = inert_mass_fractions
        self._seed = int(seed)

    @property
    def temperature_range(self):
        return self._temperature_range

    @property
    def pressure(self):
        return self._pressure

    @property
    def inert_mass_fractions(self):
        return dict(self._inert_mass_fractions)

    @property
    def seed(self):
        return self._seed

    def draw(self, mechanism, n):
        """
        Returns
        -------
        tuple
            (temperature (n,), mass_fractions (n_species, n))
        """
        rng = np.random.default_rng(self._seed)
        temperature = rng.uniform(*self._temperature_range, size=n)
        y = np.zeros((mechanism.n_species, n))
        inert_total = 0.0
        for name, value in self._inert_mass_fractions.items():
            if name not in mechanism.inert_species:
                raise ValueError('{0} is not an inert species'.format(name))
            y[mechanism.index(name)] = value
            inert_total += value
        active = [mechanism.index(s) for s in mechanism.non_inert_species]
        if not active:
            raise ValueError('Mechanism has no non-inert species to sample')
        shares = rng.dirichlet(np.ones(len(active)), size=n).T
        y[active] = shares * (1.0 - inert_total)
        return temperature, y / species_sum(y)


def sample_columns(mechanism):
    names = mechanism.species_names
    return ['T', 'p'] + ['Y_' + s for s in names] + \
        ['rate_' + s for s in names]


def generate_samples(
        mechanism,
        sampler,
        dt,
        n,
        abs_tol=DEFAULT_ABS_TOL,
        rel_tol=DEFAULT_REL_TOL,
        use_multiprocessing=False,
        verbose=False
):
    """
    Draws n reactor states, integrates each over dt and labels it with
    the finite-step rate of change (Y(dt) - Y(0))/dt of every species.

    Returns
    -------
    pd.DataFrame
        Columns T, p, Y_<species>..., rate_<species>...
    """
    if n < 1:
        raise ValueError('Need at least one sample')
    temperature, y = sampler.draw(mechanism, n)
    if verbose:
        print('integrating {0} samples over {1:g} s'.format(n, dt))
    _, y_new = integrate_field(
        mechanism, temperature, sampler.pressure, y, dt, abs_tol, rel_tol,
        use_multiprocessing=use_multiprocessing
    )
    rates = (y_new - y) / dt
    data = np.vstack([
        temperature[None, :],
        np.full((1, n), sampler.pressure),
        y,
        rates
    ]).T
    return pd.DataFrame(data, columns=sample_columns(mechanism))


def save_samples(samples, path):
    samples.to_csv(path, index=False, float_format='%.17g')


def load_samples(path, mechanism=None):
    """
    Reads a sample table; with a mechanism the columns are checked against
    its species.
    """
    samples = pd.read_csv(path, float_precision='round_trip')
    if mechanism is not None:
        expected = sample_columns(mechanism)
        if list(samples.columns) != expected:
            raise ValueError(
                'Sample columns {0} do not match the mechanism ({1})'.format(
                    list(samples.columns), expected
                )
            )
    elif list(samples.columns[:2]) != ['T', 'p'] or \
            (len(samples.columns) - 2) % 2:
        raise ValueError('Not a sample table: ' + str(path))
    return samples

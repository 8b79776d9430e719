# -*- coding: utf-8 -*-
"""
PURPOSE:
    Ideal-gas mixture thermodynamics from NASA-7 polynomials, temperature
    inversion from absolute enthalpy, and the simple transport closures
    (Sutherland or constant viscosity, constant Prandtl and Lewis numbers).

    Enthalpies are absolute (formation included), so heat release appears
    only through composition change. Temperatures outside a species' fit
    range are clamped for evaluation, with a TemperatureClampWarning.

CREATED BY:
    deskflame developers
"""

import numpy as np

from . import tools

R_UNIVERSAL = 8314.46261815324  # J/(kmol K)
P_STANDARD = 101325.0  # Pa
_NEWTON_TOL = 1e-8
_NEWTON_MAX_ITER = 50
_SUM_TOL = 1e-8


def _polynomials(a, temperature):
    """
    cp/R, h/RT and s/R for coefficients ``a`` of shape (7, ...) broadcast
    against ``temperature``.
    """
    t = temperature
    cp_r = a[0] + t * (a[1] + t * (a[2] + t * (a[3] + t * a[4])))
    h_rt = (
        a[0] + t * (a[1] / 2 + t * (a[2] / 3 + t * (a[3] / 4 + t * a[4] / 5)))
        + a[5] / t
    )
    s_r = (
        a[0] * np.log(t) +
        t * (a[1] + t * (a[2] / 2 + t * (a[3] / 3 + t * a[4] / 4))) +
        a[6]
    )
    return cp_r, h_rt, s_r


def species_sum(values):
    """
    Sum over the leading species axis, accumulated in species order so that
    every cell sees the same sequence of additions.
    """
    values = np.asarray(values, dtype=float)
    total = np.zeros(values.shape[1:])
    for row in values:
        total = total + row
    return total


class Nasa7Coeffs:
    """
    Two-range NASA-7 fit.

    Parameters
    ----------
    low : array_like
        Seven coefficients for t_low <= T < t_common
    high : array_like
        Seven coefficients for t_common <= T <= t_high
    t_low, t_common, t_high : float
        Range limits in K
    """
    def __init__(self, low, high, t_low, t_common, t_high):
        low = np.array(low, dtype=float)
        high = np.array(high, dtype=float)
        if low.shape != (7,) or high.shape != (7,):
            raise ValueError('NASA-7 fits need 7 coefficients per range')
        if not 0 < t_low < t_common < t_high:
            raise ValueError(
                'Bad NASA-7 range: {0}, {1}, {2}'.format(
                    t_low, t_common, t_high
                )
            )
        cp_low = _polynomials(low, t_common)[0]
        cp_high = _polynomials(high, t_common)[0]
        if abs(cp_low - cp_high) > 1e-3 * max(abs(cp_low), abs(cp_high)):
            raise ValueError(
                'cp discontinuous at {0} K: {1} vs {2}'.format(
                    t_common, cp_low, cp_high
                )
            )
        low.flags.writeable = False
        high.flags.writeable = False
        self._low = low
        self._high = high
        self._t_low = float(t_low)
        self._t_common = float(t_common)
        self._t_high = float(t_high)

    @property
    def low(self):
        return self._low

    @property
    def high(self):
        return self._high

    @property
    def t_low(self):
        return self._t_low

    @property
    def t_common(self):
        return self._t_common

    @property
    def t_high(self):
        return self._t_high

    def __eq__(self, other):
        return isinstance(other, Nasa7Coeffs) and \
            np.array_equal(self._low, other.low) and \
            np.array_equal(self._high, other.high) and \
            (self._t_low, self._t_common, self._t_high) == \
            (other.t_low, other.t_common, other.t_high)


class SpeciesDef:
    """
    One species: molar mass, NASA-7 fit and transport data. Exactly one of
    ``sutherland`` (As in Pa s K^-0.5, Ts in K) or ``viscosity`` (Pa s)
    must be given.
    """
    def __init__(
            self,
            name,
            molar_mass,
            thermo,
            sutherland=None,
            viscosity=None,
            lewis=1.0,
            composition=None
    ):
        if not name:
            raise ValueError('Species needs a name')
        if not molar_mass > 0:
            raise ValueError('Molar mass of {0} must be > 0'.format(name))
        if not isinstance(thermo, Nasa7Coeffs):
            raise TypeError('thermo must be Nasa7Coeffs')
        if (sutherland is None) == (viscosity is None):
            raise ValueError(
                '{0}: give either Sutherland constants or a constant '
                'viscosity'.format(name)
            )
        if sutherland is not None:
            sutherland = (float(sutherland[0]), float(sutherland[1]))
            if sutherland[0] <= 0 or sutherland[1] < 0:
                raise ValueError('Bad Sutherland constants for ' + name)
        if viscosity is not None and not viscosity > 0:
            raise ValueError('Viscosity of {0} must be > 0'.format(name))
        if not lewis > 0:
            raise ValueError('Lewis number of {0} must be > 0'.format(name))
        self.name = name
        self.molar_mass = float(molar_mass)
        self.thermo = thermo
        self.sutherland = sutherland
        self.viscosity = None if viscosity is None else float(viscosity)
        self.lewis = float(lewis)
        self.composition = dict(composition or {})

    def __repr__(self):
        return 'SpeciesDef({0!r}, W={1})'.format(self.name, self.molar_mass)


def _clamp(temperature, t_low, t_high, warn=True):
    clamped = np.clip(temperature, t_low, t_high)
    if warn:
        differs = clamped != temperature
        if differs.ndim == 2:
            differs = differs.any(axis=0)
        n_out = int(np.count_nonzero(differs))
        if n_out:
            tools.warn(
                '{0} temperature value(s) outside the NASA-7 fit range '
                'clamped'.format(n_out),
                tools.TemperatureClampWarning,
                'temperature_clamped',
                n_out
            )
    return clamped


def _species_polynomials(species, temperature):
    fit = species.thermo
    t = _clamp(np.asarray(temperature, dtype=float), fit.t_low, fit.t_high)
    shape = (7,) + (1,) * t.ndim
    a = np.where(t < fit.t_common, fit.low.reshape(shape),
                 fit.high.reshape(shape))
    return _polynomials(a, t)


def cp_R(species, temperature):
    """Dimensionless heat capacity cp/R of one species."""
    return _species_polynomials(species, temperature)[0]


def h_RT(species, temperature):
    """Dimensionless absolute enthalpy h/(RT) of one species."""
    return _species_polynomials(species, temperature)[1]


def s_R(species, temperature):
    """Dimensionless standard-state entropy s/R of one species."""
    return _species_polynomials(species, temperature)[2]


class MixtureState:
    """
    Pressure, temperature and mass fractions of one or many cells.

    Parameters
    ----------
    pressure : float or array_like
        Pa
    temperature : float or array_like
        K, shape () or (n_cells,)
    mass_fractions : array_like
        Shape (n_species,) or (n_species, n_cells)
    """
    def __init__(self, pressure, temperature, mass_fractions):
        y = np.array(mass_fractions, dtype=float)
        t = np.array(temperature, dtype=float)
        p = np.array(pressure, dtype=float)
        if y.ndim not in (1, 2):
            raise ValueError('Mass fractions must be 1-D or 2-D')
        if np.any(t <= 0) or np.any(p <= 0):
            raise ValueError('Temperature and pressure must be > 0')
        if np.any(y < -_SUM_TOL) or np.any(y > 1 + _SUM_TOL):
            raise ValueError('Mass fractions outside [0, 1]')
        total = y.sum(axis=0)
        if np.any(np.abs(total - 1) > _SUM_TOL):
            raise ValueError(
                'Mass fractions sum to {0}, not 1'.format(
                    total if total.ndim == 0 else
                    total[np.argmax(np.abs(total - 1))]
                )
            )
        self.pressure = p
        self.temperature = t
        self.mass_fractions = y

    @property
    def n_species(self):
        return self.mass_fractions.shape[0]


class Thermo:
    """
    Vectorized mixture properties for a fixed species list.

    Parameters
    ----------
    species : list of SpeciesDef
    prandtl : float
        Constant Prandtl number closing the conductivity
    """
    def __init__(self, species, prandtl=0.71):
        species = list(species)
        if not species:
            raise ValueError('Empty species list')
        names = [s.name for s in species]
        if len(set(names)) != len(names):
            raise ValueError('Duplicate species names')
        if not prandtl > 0:
            raise ValueError('Prandtl number must be > 0')
        self._species = species
        self._names = names
        self._prandtl = float(prandtl)
        self._molar_mass = np.array([s.molar_mass for s in species])
        self._low = np.array([s.thermo.low for s in species])
        self._high = np.array([s.thermo.high for s in species])
        self._t_low = np.array([s.thermo.t_low for s in species])
        self._t_common = np.array([s.thermo.t_common for s in species])
        self._t_high = np.array([s.thermo.t_high for s in species])
        self._lewis = np.array([s.lewis for s in species])

    @property
    def species(self):
        return list(self._species)

    @property
    def species_names(self):
        return list(self._names)

    @property
    def n_species(self):
        return len(self._species)

    @property
    def molar_masses(self):
        return self._molar_mass.copy()

    @property
    def prandtl(self):
        return self._prandtl

    @property
    def temperature_range(self):
        """Range in which every species' fit is valid."""
        return float(self._t_low.max()), float(self._t_high.min())

    def index(self, name):
        try:
            return self._names.index(name)
        except ValueError:
            raise ValueError('Species {0} not in mixture'.format(name))

    def _species_arrays(self, temperature, warn=True):
        """
        cp/R, h/RT and s/R of every species, each of shape
        (n_species, n) for temperatures of shape (n,).
        """
        t = np.atleast_1d(np.asarray(temperature, dtype=float))
        t = _clamp(t[None, :], self._t_low[:, None], self._t_high[:, None],
                   warn)
        use_low = t < self._t_common[:, None]
        a = np.where(
            use_low[None, :, :],
            self._low.T[:, :, None],
            self._high.T[:, :, None]
        )
        return _polynomials(a, t)

    def species_h(self, temperature, warn=True):
        """Species absolute enthalpies in J/kg, shape (n_species, n)."""
        t = np.atleast_1d(np.asarray(temperature, dtype=float))
        t_eval = np.clip(t[None, :], self._t_low[:, None],
                         self._t_high[:, None])
        h_rt = self._species_arrays(t, warn)[1]
        return h_rt * R_UNIVERSAL * t_eval / self._molar_mass[:, None]

    def species_cp(self, temperature, warn=True):
        """Species heat capacities in J/(kg K), shape (n_species, n)."""
        cp_r = self._species_arrays(temperature, warn)[0]
        return cp_r * R_UNIVERSAL / self._molar_mass[:, None]

    def species_s(self, temperature, warn=True):
        """Standard-state species entropies in J/(kg K)."""
        s_r = self._species_arrays(temperature, warn)[2]
        return s_r * R_UNIVERSAL / self._molar_mass[:, None]

    def species_g_RT(self, temperature, warn=True):
        """Dimensionless standard Gibbs energies g/(RT) = h/RT - s/R."""
        _, h_rt, s_r = self._species_arrays(temperature, warn)
        return h_rt - s_r

    def _check(self, state):
        if not isinstance(state, MixtureState):
            raise TypeError('Expected a MixtureState')
        if state.n_species != self.n_species:
            raise ValueError(
                'State has {0} species, mixture has {1}'.format(
                    state.n_species, self.n_species
                )
            )
        y = state.mass_fractions
        return y if y.ndim == 2 else y[:, None]

    @staticmethod
    def _shape_like(values, state):
        if state.mass_fractions.ndim == 1 and state.temperature.ndim == 0:
            return float(values[0])
        return values

    def mixture_cp(self, state):
        """J/(kg K)"""
        y = self._check(state)
        cp = species_sum(y * self.species_cp(state.temperature))
        return self._shape_like(cp, state)

    def mixture_h(self, state):
        """Absolute enthalpy, J/kg"""
        y = self._check(state)
        h = species_sum(y * self.species_h(state.temperature))
        return self._shape_like(h, state)

    def mixture_s(self, state):
        """Mass-weighted standard-state entropy, J/(kg K); no mixing term."""
        y = self._check(state)
        s = species_sum(y * self.species_s(state.temperature))
        return self._shape_like(s, state)

    def mixture_W(self, state):
        """Mean molar mass 1/sum(Y_k/W_k), kg/kmol"""
        y = self._check(state)
        w = 1.0 / species_sum(y / self._molar_mass[:, None])
        return self._shape_like(w, state)

    def psi(self, state):
        """Compressibility W/(R T) so that rho = psi*p, s^2/m^2"""
        y = self._check(state)
        w = 1.0 / species_sum(y / self._molar_mass[:, None])
        psi = w / (R_UNIVERSAL * np.broadcast_to(
            np.atleast_1d(state.temperature), w.shape
        ))
        return self._shape_like(psi, state)

    def density(self, state):
        """Ideal-gas density, kg/m^3"""
        return self.psi(state) * state.pressure

    def concentrations(self, state):
        """Molar concentrations rho*Y_k/W_k in kmol/m^3."""
        y = self._check(state)
        rho = np.atleast_1d(self.density(state))
        return rho * y / self._molar_mass[:, None]

    def viscosity(self, state):
        """
        Mass-fraction weighted species viscosities, Pa s.
        """
        y = self._check(state)
        t = np.broadcast_to(np.atleast_1d(state.temperature), y.shape[1:])
        mu = np.empty_like(y)
        for k, species in enumerate(self._species):
            if species.sutherland is None:
                mu[k] = species.viscosity
            else:
                a_s, t_s = species.sutherland
                mu[k] = a_s * np.sqrt(t) / (1.0 + t_s / t)
        return self._shape_like(species_sum(y * mu), state)

    def conductivity(self, state):
        """lambda = mu*cp/Pr, W/(m K)"""
        return self.viscosity(state) * self.mixture_cp(state) / self._prandtl

    def diffusivity(self, state, k):
        """D_k = lambda/(rho*cp*Le_k), m^2/s"""
        if isinstance(k, str):
            k = self.index(k)
        return self.conductivity(state) / (
            self.density(state) * self.mixture_cp(state) * self._lewis[k]
        )

    def T_from_h(
            self,
            h_target,
            pressure,
            mass_fractions,
            temperature_guess,
            return_iterations=False
    ):
        """
        Temperature with mixture enthalpy ``h_target`` at fixed composition.
        Newton iteration T <- T + (h_target - h)/cp, at most 50 iterations,
        with bisection for cells that do not settle.

        Parameters
        ----------
        h_target : float or array_like
            J/kg, shape () or (n,)
        pressure : float or array_like
            Pa; ideal-gas enthalpy does not depend on it
        mass_fractions : array_like
            (n_species,) or (n_species, n)
        temperature_guess : float or array_like
        return_iterations : bool
            Also return the Newton step count per cell

        Returns
        -------
        np.ndarray or float
            Temperature in K[, iteration counts]
        """
        scalar = np.ndim(h_target) == 0 and np.ndim(mass_fractions) == 1
        h_target = np.atleast_1d(np.asarray(h_target, dtype=float))
        y = np.asarray(mass_fractions, dtype=float)
        y = y[:, None] if y.ndim == 1 else y
        n = max(h_target.shape[0], y.shape[1])
        h_target = np.broadcast_to(h_target, (n,))
        y = np.broadcast_to(y, (self.n_species, n))
        t_min, t_max = self.temperature_range

        def h_cp(t):
            h = species_sum(y * self.species_h(t, warn=False))
            cp = species_sum(y * self.species_cp(t, warn=False))
            return h, cp

        h_lo = h_cp(np.full(n, t_min))[0]
        h_hi = h_cp(np.full(n, t_max))[0]
        outside = (h_target < h_lo) | (h_target > h_hi)
        if np.any(outside):
            cell = int(np.flatnonzero(outside)[0])
            raise ValueError(
                'Enthalpy {0} J/kg outside the range [{1}, {2}] reachable '
                'in [{3}, {4}] K (cell {5})'.format(
                    h_target[cell], h_lo[cell], h_hi[cell], t_min, t_max, cell
                )
            )

        temperature = np.clip(
            np.broadcast_to(
                np.atleast_1d(np.asarray(temperature_guess, dtype=float)),
                (n,)
            ),
            t_min, t_max
        ).astype(float)
        iterations = np.zeros(n, dtype=int)
        active = np.ones(n, dtype=bool)
        step = np.full(n, np.inf)
        for _ in range(_NEWTON_MAX_ITER + 1):
            h, cp = h_cp(temperature)
            step = np.where(active, (h_target - h) / cp, step)
            active &= np.abs(step) >= _NEWTON_TOL
            if not active.any():
                break
            pending = active & (iterations < _NEWTON_MAX_ITER)
            if not pending.any():
                break
            temperature = np.where(
                pending, np.clip(temperature + step, t_min, t_max),
                temperature
            )
            iterations += pending

        failed = np.abs(step) > 1e-6
        if np.any(failed):
            low = np.full(n, t_min)
            high = np.full(n, t_max)
            for _ in range(64):
                middle = 0.5 * (low + high)
                above = h_cp(middle)[0] > h_target
                high = np.where(failed & above, middle, high)
                low = np.where(failed & ~above, middle, low)
            temperature = np.where(failed, 0.5 * (low + high), temperature)

        result = float(temperature[0]) if scalar else temperature
        if return_iterations:
            return result, iterations
        return result

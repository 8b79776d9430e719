# -*- coding: utf-8 -*-
"""
PURPOSE:
    Case and mechanism files, Taylor-Green and uniform initial states, the
    time loop with VTK and CSV output, the benchmark and the command line.

    Both file formats are line oriented: ``[block]`` headers followed by
    ``key = value`` lines, ``#`` starts a comment. Dimensional values are
    read with pint, so ``1 mm`` and ``0.001`` (bare numbers are SI) mean the
    same length. Unknown blocks and keys are errors.

CREATED BY:
    deskflame developers
"""

import argparse
import os
import sys
from collections import OrderedDict, namedtuple

import numpy as np
import pandas as pd

from . import chemistry, field, fvm, piso, sparse, surrogate, tools
from ._version import __version__
from .field import CellField
from .mesh import PATCH_KINDS, SIDES, build_cartesian_mesh
from .thermo import MixtureState, Nasa7Coeffs, SpeciesDef

REQUIRED = object()
INIT_KINDS = ('tgv', 'uniform')
DIAGNOSTIC_COLUMNS = (
    'time', 'kinetic_energy', 'max_T', 'max_co', 'continuity_residual'
)
BENCH_COLUMNS = (
    'step', 'discretisation', 'linear_solve', 'chemistry', 'thermo', 'total'
)
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_Entry = namedtuple('_Entry', ['key', 'text', 'line', 'column'])
_Block = namedtuple('_Block', ['name', 'arg', 'line', 'entries'])


class ParseError(ValueError):
    """
    Error in a case or mechanism file, rendered as path:line:column.
    """
    def __init__(self, message, path=None, line=None, column=None):
        self.message = message
        self.path = path
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self):
        location = [str(part) for part in (self.path, self.line, self.column)
                    if part is not None]
        if not location:
            return self.message
        return '{0}: {1}'.format(':'.join(location), self.message)

    def __reduce__(self):
        return ParseError, (self.message, self.path, self.line, self.column)


# ---------------------------------------------------------------------------
# block reader and value conversion
# ---------------------------------------------------------------------------

def _read_blocks(text, path=None):
    """
    Splits a file into blocks of entries, keeping line and column numbers
    for error messages.
    """
    blocks = []
    seen = set()
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        if stripped.startswith('['):
            if not stripped.endswith(']'):
                raise ParseError('unterminated block header', path, number,
                                 indent + len(stripped) + 1)
            header = stripped[1:-1].strip()
            if not header:
                raise ParseError('empty block header', path, number,
                                 indent + 1)
            if ' ' in header:
                name, arg = header.split(None, 1)
            elif '.' in header:
                name, arg = header.split('.', 1)
            else:
                name, arg = header, None
            if (name, arg) in seen:
                raise ParseError('duplicate block [{0}]'.format(header),
                                 path, number, indent + 1)
            seen.add((name, arg))
            current = _Block(name, arg, number, OrderedDict())
            blocks.append(current)
            continue
        if '=' not in stripped:
            raise ParseError('expected "key = value"', path, number,
                             indent + 1)
        if current is None:
            raise ParseError('entry outside of a block', path, number,
                             indent + 1)
        key, value = stripped.split('=', 1)
        key = key.strip()
        if not key:
            raise ParseError('missing key before "="', path, number,
                             indent + 1)
        if key in current.entries:
            raise ParseError('duplicate key "{0}"'.format(key), path, number,
                             indent + 1)
        column = indent + stripped.index('=') + 2
        column += len(value) - len(value.lstrip())
        current.entries[key] = _Entry(key, value.strip(), number, column)
    return blocks


def _error(entry, message, path):
    return ParseError(message, path, entry.line, entry.column)


def _items(text):
    return [item.strip() for item in text.split(',') if item.strip()]


def _quantity(text, dimension, ensure_positive=False):
    """
    Magnitude in SI of a number with optional units; bare numbers are
    already SI.
    """
    try:
        quantity = tools.quant(text)
    except Exception:
        raise ValueError('cannot read quantity "{0}"'.format(text))
    if not hasattr(quantity, 'magnitude'):
        quantity = tools.quant(float(quantity), 'dimensionless')
    if quantity.dimensionless and dimension != 'dimensionless':
        magnitude = float(quantity.to('dimensionless').magnitude)
    else:
        try:
            magnitude = float(tools.to_si(quantity, dimension))
        except ValueError as err:
            raise ValueError('unit mismatch: {0}'.format(err))
    if ensure_positive and not magnitude > 0:
        raise ValueError('value must be > 0')
    return magnitude


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise ValueError('not a number: "{0}"'.format(text))


def _bool(text):
    lowered = text.lower()
    if lowered in ('true', 'yes', 'on'):
        return True
    if lowered in ('false', 'no', 'off'):
        return False
    raise ValueError('not a boolean: "{0}"'.format(text))


def _composition(text):
    result = OrderedDict()
    for item in _items(text):
        if ':' not in item:
            raise ValueError('expected "species:value" in "{0}"'.format(item))
        name, value = item.split(':', 1)
        name = name.strip()
        if name in result:
            raise ValueError('species {0} listed twice'.format(name))
        result[name] = _float(value.strip())
    return result


def _convert(kind, arg, text):
    if kind == 'int':
        value = _float(text)
        if value != int(value):
            raise ValueError('not an integer: "{0}"'.format(text))
        return int(value)
    if kind == 'ints':
        values = tuple(_convert('int', None, item) for item in _items(text))
        if arg is not None and len(values) != arg:
            raise ValueError('expected {0} integers'.format(arg))
        return values
    if kind == 'float':
        return _float(text)
    if kind == 'quantity':
        return _quantity(text, arg)
    if kind == 'quantities':
        dimension, count = arg
        values = tuple(_quantity(item, dimension) for item in _items(text))
        if count is not None and len(values) != count:
            raise ValueError('expected {0} values'.format(count))
        return values
    if kind == 'floats':
        values = tuple(_float(item) for item in _items(text))
        if arg is not None and len(values) != arg:
            raise ValueError('expected {0} numbers'.format(arg))
        return values
    if kind == 'bool':
        return _bool(text)
    if kind == 'choice':
        if text not in arg:
            raise ValueError('"{0}" is not one of {1}'.format(
                text, ', '.join(arg)))
        return text
    if kind == 'words':
        return tuple(_items(text))
    if kind == 'composition':
        return _composition(text)
    if kind == 'str':
        if not text:
            raise ValueError('empty value')
        return text
    raise ValueError('unknown value kind ' + kind)


def _format(kind, value):
    if kind in ('int', 'str', 'choice'):
        return str(value)
    if kind in ('float', 'quantity'):
        return repr(float(value))
    if kind == 'ints':
        return ', '.join(str(v) for v in value)
    if kind in ('quantities', 'floats'):
        return ', '.join(repr(float(v)) for v in value)
    if kind == 'bool':
        return 'true' if value else 'false'
    if kind == 'words':
        return ', '.join(value)
    if kind == 'composition':
        return ', '.join('{0}:{1!r}'.format(k, float(v))
                         for k, v in value.items())
    raise ValueError('unknown value kind ' + kind)


def _parse_block(block, schema, path):
    values = OrderedDict()
    for key, entry in block.entries.items():
        if key not in schema:
            raise ParseError(
                'unknown key "{0}" in [{1}]'.format(key, block.name),
                path, entry.line, 1
            )
        kind, arg, _ = schema[key]
        try:
            values[key] = _convert(kind, arg, entry.text)
        except ValueError as err:
            raise _error(entry, str(err), path)
    for key, (_, _, default) in schema.items():
        if key not in values:
            if default is REQUIRED:
                raise ParseError(
                    'missing key "{0}" in [{1}]'.format(key, block.name),
                    path, block.line, 1
                )
            if default is not None:
                values[key] = default
    return values


# ---------------------------------------------------------------------------
# case files
# ---------------------------------------------------------------------------

def _solver_defaults(equation):
    controls = piso.PisoConfig().solvers[equation]
    return OrderedDict([
        ('solver', ('choice', sparse.SOLVER_KINDS, controls.solver_kind)),
        ('abs_tol', ('float', None, controls.abs_tol)),
        ('rel_tol', ('float', None, controls.rel_tol)),
        ('max_iter', ('int', None, controls.max_iter)),
    ])


def _scheme_defaults():
    schemes = piso.PisoConfig().schemes
    return OrderedDict(
        (eq, ('words', None, (s.ddt_scheme, s.div_scheme)))
        for eq, s in schemes.items()
    )


CASE_SCHEMA = OrderedDict([
    ('mesh', OrderedDict([
        ('dims', ('ints', 3, REQUIRED)),
        ('lengths', ('quantities', ('length', 3), REQUIRED)),
    ])),
    ('boundary', OrderedDict([
        ('kind', ('choice', PATCH_KINDS, 'zeroGradient')),
        ('U', ('quantities', ('velocity', 3), None)),
        ('p', ('quantity', 'pressure', None)),
        ('T', ('quantity', 'temperature', None)),
        ('Y', ('composition', None, None)),
    ])),
    ('time', OrderedDict([
        ('dt', ('quantity', 'time', REQUIRED)),
        ('end_time', ('quantity', 'time', REQUIRED)),
        ('max_co', ('float', None, 0.5)),
        ('write_interval', ('int', None, 1)),
    ])),
    ('schemes', _scheme_defaults()),
    ('solvers', None),
    ('piso', OrderedDict([
        ('n_correctors', ('int', None, 2)),
        ('momentum_predictor', ('bool', None, True)),
        ('dpdt', ('bool', None, False)),
    ])),
    ('chemistry', OrderedDict([
        ('mode', ('choice', piso.CHEMISTRY_MODES, 'none')),
        ('mechanism', ('str', None, REQUIRED)),
        ('weights', ('str', None, None)),
        ('surrogate_dt', ('quantity', 'time', None)),
        ('abs_tol', ('float', None, chemistry.DEFAULT_ABS_TOL)),
        ('rel_tol', ('float', None, chemistry.DEFAULT_REL_TOL)),
        ('use_multiprocessing', ('bool', None, False)),
    ])),
    ('init', OrderedDict([
        ('kind', ('choice', INIT_KINDS, REQUIRED)),
        ('pressure', ('quantity', 'pressure', 101325.0)),
        ('temperature', ('quantity', 'temperature', 300.0)),
        ('composition', ('composition', None, REQUIRED)),
        ('velocity', ('quantities', ('velocity', 3), (0.0, 0.0, 0.0))),
        ('u0', ('quantity', 'velocity', 4.0)),
        ('L', ('quantity', 'length', 1e-3)),
        ('reactive', ('bool', None, False)),
        ('fuel', ('composition', None, None)),
        ('layer_width', ('quantity', 'length', None)),
        ('interface_thickness', ('quantity', 'length', None)),
    ])),
    ('output', OrderedDict([
        ('directory', ('str', None, 'output')),
        ('vtk', ('bool', None, True)),
    ])),
])
_SECTIONED = ('boundary', 'solvers')


def _schema_for(name, arg):
    if name == 'solvers':
        return _solver_defaults(arg)
    return CASE_SCHEMA[name]


def _fill_defaults(schema, values):
    filled = OrderedDict()
    for key, (_, _, default) in schema.items():
        if key in values:
            filled[key] = values[key]
        elif default is REQUIRED:
            raise ValueError('missing key "{0}"'.format(key))
        elif default is not None:
            filled[key] = default
    unknown = set(values) - set(schema)
    if unknown:
        raise ValueError('unknown keys: {0}'.format(sorted(unknown)))
    return filled


class CaseConfig:
    """
    Validated case description. ``blocks`` maps block names to dicts of SI
    values; ``boundary`` and ``solvers`` map sides and equations to such
    dicts. Missing optional keys take their defaults.

    Parameters
    ----------
    blocks : dict
    path : str or None
        Case file location; relative file names resolve against its folder
        first, then against the shipped lookup data.
    """
    def __init__(self, blocks, path=None):
        blocks = dict(blocks)
        unknown = set(blocks) - set(CASE_SCHEMA)
        if unknown:
            raise ValueError('unknown blocks: {0}'.format(sorted(unknown)))
        canonical = OrderedDict()
        for name in CASE_SCHEMA:
            if name in _SECTIONED:
                sections = OrderedDict()
                keys = SIDES if name == 'boundary' else piso.EQUATIONS
                given = dict(blocks.get(name) or {})
                bad = set(given) - set(keys)
                if bad:
                    raise ValueError('unknown [{0}] sections: {1}'.format(
                        name, sorted(bad)))
                for key in keys:
                    if key in given or name == 'solvers':
                        sections[key] = _fill_defaults(
                            _schema_for(name, key), given.get(key, {})
                        )
                canonical[name] = sections
            else:
                canonical[name] = _fill_defaults(
                    CASE_SCHEMA[name], blocks.get(name, {})
                )
        self._blocks = canonical
        self._path = path
        self._validate()

    def _validate(self):
        dims = self._blocks['mesh']['dims']
        if any(n < 1 for n in dims):
            raise ValueError('cell counts must be >= 1')
        if any(not length > 0 for length in self._blocks['mesh']['lengths']):
            raise ValueError('domain lengths must be > 0')
        time = self._blocks['time']
        if not time['dt'] > 0:
            raise ValueError('dt must be > 0')
        if time['end_time'] < 0:
            raise ValueError('end_time must be >= 0')
        n_steps = time['end_time'] / time['dt']
        if abs(n_steps - round(n_steps)) > 1e-9 * max(n_steps, 1.0):
            raise ValueError('end_time must be a whole number of time steps')
        if time['write_interval'] < 1:
            raise ValueError('write_interval must be >= 1')
        if not time['max_co'] > 0:
            raise ValueError('max_co must be > 0')
        for equation, pair in self._blocks['schemes'].items():
            if len(pair) != 2:
                raise ValueError(
                    'scheme for {0} needs "ddt, div"'.format(equation))
            fvm.SchemeConfig(*pair)
        self.piso_config()
        chem = self._blocks['chemistry']
        if chem['mode'] == 'surrogate':
            if 'weights' not in chem:
                raise ValueError('surrogate chemistry needs a weights file')
            if chem.get('surrogate_dt') is None:
                raise ValueError(
                    'surrogate chemistry needs surrogate_dt, the training '
                    'time step')
        if self._path is not None:
            self.resolve(chem['mechanism'])
            if 'weights' in chem:
                self.resolve(chem['weights'])
        kinds = {side: self.patch_kinds[side] for side in SIDES}
        for axis in range(3):
            low, high = kinds[SIDES[2 * axis]], kinds[SIDES[2 * axis + 1]]
            if (low == 'periodic') != (high == 'periodic'):
                raise ValueError(
                    'missing periodic pair: {0} and {1}'.format(
                        SIDES[2 * axis], SIDES[2 * axis + 1]))
        init = self._blocks['init']
        if init['reactive'] and 'fuel' not in init:
            raise ValueError('reactive initialization needs a fuel')

    @property
    def path(self):
        return self._path

    @property
    def blocks(self):
        return OrderedDict(
            (name, OrderedDict(values)) for name, values in
            self._blocks.items()
        )

    @property
    def dims(self):
        return self._blocks['mesh']['dims']

    @property
    def lengths(self):
        return self._blocks['mesh']['lengths']

    @property
    def patch_kinds(self):
        boundary = self._blocks['boundary']
        return OrderedDict(
            (side, boundary[side]['kind'] if side in boundary else
             'zeroGradient')
            for side in SIDES
        )

    @property
    def boundary_values(self):
        """Side -> {field: value} for the sides that fix values."""
        result = OrderedDict()
        for side, values in self._blocks['boundary'].items():
            fixed = {k: v for k, v in values.items() if k != 'kind'}
            if fixed:
                result[side] = fixed
        return result

    @property
    def time(self):
        return dict(self._blocks['time'])

    @property
    def dt(self):
        return self._blocks['time']['dt']

    @property
    def end_time(self):
        return self._blocks['time']['end_time']

    @property
    def n_steps(self):
        return int(round(self.end_time / self.dt))

    @property
    def write_interval(self):
        return self._blocks['time']['write_interval']

    @property
    def chemistry(self):
        return dict(self._blocks['chemistry'])

    @property
    def init(self):
        return dict(self._blocks['init'])

    @property
    def output(self):
        return dict(self._blocks['output'])

    def resolve(self, name):
        """
        Path of a referenced file: absolute, next to the case file, or in
        the shipped lookup data.
        """
        candidates = [name]
        if not os.path.isabs(name):
            if self._path is not None:
                candidates.insert(
                    0, os.path.join(os.path.dirname(self._path), name))
            candidates.append(tools.lookup_path(name))
        for candidate in candidates:
            if os.path.isfile(candidate):
                return candidate
        raise ValueError('referenced file not found: {0}'.format(name))

    def build_mesh(self):
        mesh, _, _ = build_cartesian_mesh(
            self.dims, self.lengths, dict(self.patch_kinds)
        )
        return mesh

    def piso_config(self):
        schemes = {eq: fvm.SchemeConfig(*pair)
                   for eq, pair in self._blocks['schemes'].items()}
        solvers = {
            eq: sparse.SolverControls(
                v['abs_tol'], v['rel_tol'], v['max_iter'], v['solver'])
            for eq, v in self._blocks['solvers'].items()
        }
        piso_block = self._blocks['piso']
        chem = self._blocks['chemistry']
        return piso.PisoConfig(
            n_correctors=piso_block['n_correctors'],
            momentum_predictor=piso_block['momentum_predictor'],
            max_co=self._blocks['time']['max_co'],
            chemistry_mode=chem['mode'],
            schemes=schemes,
            solvers=solvers,
            dpdt=piso_block['dpdt'],
            chemistry_abs_tol=chem['abs_tol'],
            chemistry_rel_tol=chem['rel_tol'],
            use_multiprocessing=chem['use_multiprocessing']
        )

    def load_mechanism(self):
        return parse_mechanism(self.resolve(self._blocks['chemistry'][
            'mechanism']))

    def load_bundle(self):
        chem = self._blocks['chemistry']
        if 'weights' not in chem:
            return None
        return surrogate.load_weights(
            self.resolve(chem['weights']), chem.get('surrogate_dt')
        )

    def __eq__(self, other):
        return isinstance(other, CaseConfig) and \
            self._blocks == other._blocks

    def __repr__(self):
        return 'CaseConfig(dims={0}, dt={1!r}, end_time={2!r})'.format(
            self.dims, self.dt, self.end_time
        )


def parse_case(path):
    """
    Reads and validates a case file.

    Returns
    -------
    CaseConfig
    """
    with open(path) as f:
        text = f.read()
    blocks = _read_blocks(text, path)
    raw = OrderedDict()
    for block in blocks:
        if block.name not in CASE_SCHEMA:
            raise ParseError('unknown block [{0}]'.format(block.name),
                             path, block.line, 1)
        if block.name in _SECTIONED:
            keys = SIDES if block.name == 'boundary' else piso.EQUATIONS
            if block.arg not in keys:
                raise ParseError(
                    '[{0}] needs one of: {1}'.format(
                        block.name, ', '.join(keys)),
                    path, block.line, 1
                )
            schema = _schema_for(block.name, block.arg)
            raw.setdefault(block.name, OrderedDict())[block.arg] = \
                _parse_block(block, schema, path)
        else:
            if block.arg is not None:
                raise ParseError(
                    '[{0}] takes no argument'.format(block.name),
                    path, block.line, 1
                )
            raw[block.name] = _parse_block(
                block, CASE_SCHEMA[block.name], path)
    for name in ('mesh', 'time', 'chemistry', 'init'):
        if name not in raw:
            raise ParseError('missing block [{0}]'.format(name), path, 1, 1)
    try:
        return CaseConfig(raw, path)
    except ValueError as err:
        raise ParseError(str(err), path, _blame_line(blocks, str(err)), 1)


def _blame_line(blocks, message):
    """Line of the entry or section a validation message names."""
    words = set(message.replace(':', ' ').replace(',', ' ').split())
    for block in blocks:
        for key, entry in block.entries.items():
            if key in words or '"{0}"'.format(key) in message:
                return entry.line
    for block in blocks:
        if block.arg is not None and block.arg in words:
            return block.line
    return 1


def emit_case(config):
    """Canonical text of a case; parse_case(emit_case(c)) == c."""
    out = []
    for name, values in config.blocks.items():
        if name in _SECTIONED:
            for key, section in values.items():
                schema = _schema_for(name, key)
                out.append('[{0}.{1}]'.format(name, key))
                out.extend('{0} = {1}'.format(k, _format(schema[k][0], v))
                           for k, v in section.items())
                out.append('')
            continue
        schema = CASE_SCHEMA[name]
        out.append('[{0}]'.format(name))
        out.extend('{0} = {1}'.format(k, _format(schema[k][0], v))
                   for k, v in values.items())
        out.append('')
    return '\n'.join(out)


# ---------------------------------------------------------------------------
# mechanism files
# ---------------------------------------------------------------------------

UNITS_SCHEMA = OrderedDict([
    ('length', ('str', None, 'm')),
    ('quantity', ('str', None, 'kmol')),
    ('energy', ('str', None, 'J/kmol')),
])
MECHANISM_SCHEMA = OrderedDict([
    ('name', ('str', None, None)),
    ('prandtl', ('float', None, 0.71)),
    ('inert', ('words', None, ())),
])
SPECIES_SCHEMA = OrderedDict([
    ('molar_mass', ('quantity', 'molar_mass', REQUIRED)),
    ('composition', ('composition', None, None)),
    ('t_range', ('quantities', ('temperature', 3), REQUIRED)),
    ('low', ('floats', 7, REQUIRED)),
    ('high', ('floats', 7, REQUIRED)),
    ('sutherland', ('floats', 2, None)),
    ('viscosity', ('quantity', 'viscosity', None)),
    ('lewis', ('float', None, 1.0)),
])
REACTION_SCHEMA = OrderedDict([
    ('equation', ('str', None, REQUIRED)),
    ('A', ('float', None, REQUIRED)),
    ('beta', ('float', None, 0.0)),
    ('Ea', ('float', None, 0.0)),
    ('efficiencies', ('composition', None, None)),
])


def _side_terms(text):
    terms = OrderedDict()
    third_body = False
    for item in text.split('+'):
        item = item.strip()
        if not item:
            raise ValueError('empty term in "{0}"'.format(text))
        parts = item.split()
        if len(parts) == 1:
            nu, name = 1.0, parts[0]
        elif len(parts) == 2:
            nu, name = _float(parts[0]), parts[1]
        else:
            raise ValueError('cannot read term "{0}"'.format(item))
        if name == 'M':
            third_body = True
            continue
        terms[name] = terms.get(name, 0.0) + nu
    return terms, third_body


def parse_equation(text):
    """
    Splits 'a A + b B [+ M] => / <=> ...' into reactants, products, the
    reversible flag and the third-body flag.
    """
    if '<=>' in text:
        left, right = text.split('<=>', 1)
        reversible = True
    elif '=>' in text:
        left, right = text.split('=>', 1)
        reversible = False
    else:
        raise ValueError('equation needs "=>" or "<=>"')
    reactants, tb_left = _side_terms(left)
    products, tb_right = _side_terms(right)
    if tb_left != tb_right:
        raise ValueError('third body M must appear on both sides')
    return reactants, products, reversible, tb_left


def _rate_factors(units, order, path, block):
    try:
        volume = tools.quant(1.0, '{0}**3/{1}'.format(
            units['length'], units['quantity']))
        a_factor = float(volume.to('m**3/kmol').magnitude) ** (order - 1)
        e_factor = tools.to_si(tools.quant(1.0, units['energy']),
                               'molar_energy')
    except Exception as err:
        raise ParseError('bad [units]: {0}'.format(err), path, block.line, 1)
    return a_factor, float(e_factor)


def parse_mechanism(path):
    """
    Reads a mechanism file.

    Returns
    -------
    deskflame.chemistry.Mechanism
    """
    with open(path) as f:
        text = f.read()
    blocks = _read_blocks(text, path)
    units = _parse_block(_Block('units', None, 1, OrderedDict()),
                         UNITS_SCHEMA, path)
    units_block = _Block('units', None, 1, OrderedDict())
    settings = _parse_block(_Block('mechanism', None, 1, OrderedDict()),
                            MECHANISM_SCHEMA, path)
    settings_line = 1
    species_blocks = []
    reaction_blocks = []
    for block in blocks:
        if block.name == 'units':
            units = _parse_block(block, UNITS_SCHEMA, path)
            units_block = block
        elif block.name == 'mechanism':
            settings = _parse_block(block, MECHANISM_SCHEMA, path)
            settings_line = block.line
        elif block.name == 'species':
            if not block.arg:
                raise ParseError('[species] needs a name', path, block.line,
                                 1)
            species_blocks.append(block)
        elif block.name == 'reaction':
            reaction_blocks.append(block)
        else:
            raise ParseError('unknown block [{0}]'.format(block.name),
                             path, block.line, 1)
    if not species_blocks:
        raise ParseError('mechanism declares no species', path, 1, 1)

    species = []
    for block in species_blocks:
        values = _parse_block(block, SPECIES_SCHEMA, path)
        t_low, t_common, t_high = values['t_range']
        try:
            species.append(SpeciesDef(
                block.arg,
                values['molar_mass'],
                Nasa7Coeffs(values['low'], values['high'], t_low, t_common,
                            t_high),
                sutherland=values.get('sutherland'),
                viscosity=values.get('viscosity'),
                lewis=values['lewis'],
                composition=values.get('composition')
            ))
        except (ValueError, TypeError) as err:
            raise ParseError('species {0}: {1}'.format(block.arg, err),
                             path, block.line, 1)

    reactions = []
    for block in reaction_blocks:
        values = _parse_block(block, REACTION_SCHEMA, path)
        entry = block.entries['equation']
        try:
            reactants, products, reversible, third = \
                parse_equation(values['equation'])
        except ValueError as err:
            raise _error(entry, str(err), path)
        if values.get('efficiencies') and not third:
            raise _error(block.entries['efficiencies'],
                         'efficiencies given without a third body M', path)
        order = sum(reactants.values()) + (1 if third else 0)
        a_factor, e_factor = _rate_factors(units, order, path, units_block)
        try:
            reaction = chemistry.Reaction(
                reactants,
                products,
                values['A'] * a_factor,
                values['beta'],
                values['Ea'] * e_factor,
                reversible,
                dict(values.get('efficiencies') or {}) if third else None
            )
            chemistry.Mechanism(species, [reaction])
        except ValueError as err:
            raise ParseError(str(err), path, block.line, 1)
        reactions.append(reaction)

    name = settings.get('name') or \
        os.path.splitext(os.path.basename(path))[0]
    try:
        return chemistry.Mechanism(
            species, reactions, settings['inert'], settings['prandtl'], name
        )
    except ValueError as err:
        raise ParseError(str(err), path, settings_line, 1)


def emit_mechanism(mechanism):
    """Canonical text of a mechanism in SI units."""
    out = ['[units]', 'length = m', 'quantity = kmol', 'energy = J/kmol', '',
           '[mechanism]']
    if mechanism.name:
        out.append('name = {0}'.format(mechanism.name))
    out.append('prandtl = {0!r}'.format(mechanism.thermo.prandtl))
    if mechanism.inert_species:
        out.append('inert = {0}'.format(', '.join(mechanism.inert_species)))
    out.append('')
    for s in mechanism.species:
        out.append('[species {0}]'.format(s.name))
        out.append('molar_mass = {0!r}'.format(s.molar_mass))
        if s.composition:
            out.append('composition = ' + _format('composition',
                                                  s.composition))
        out.append('t_range = ' + _format('quantities', (
            s.thermo.t_low, s.thermo.t_common, s.thermo.t_high)))
        out.append('low = ' + _format('floats', s.thermo.low))
        out.append('high = ' + _format('floats', s.thermo.high))
        if s.sutherland is not None:
            out.append('sutherland = ' + _format('floats', s.sutherland))
        else:
            out.append('viscosity = {0!r}'.format(s.viscosity))
        out.append('lewis = {0!r}'.format(s.lewis))
        out.append('')
    for number, r in enumerate(mechanism.reactions, start=1):
        out.append('[reaction {0}]'.format(number))
        out.append('equation = ' + r.equation)
        out.append('A = {0!r}'.format(r.pre_exponential))
        out.append('beta = {0!r}'.format(r.temperature_exponent))
        out.append('Ea = {0!r}'.format(r.activation_energy))
        if r.third_body:
            out.append('efficiencies = ' + _format('composition',
                                                   r.third_body))
        out.append('')
    return '\n'.join(out)


def mechanisms_equal(a, b):
    """Structural equality of two mechanisms."""
    if a.species_names != b.species_names or \
            a.inert_species != b.inert_species or \
            a.thermo.prandtl != b.thermo.prandtl or \
            len(a.reactions) != len(b.reactions):
        return False
    for sa, sb in zip(a.species, b.species):
        if (sa.molar_mass, sa.sutherland, sa.viscosity, sa.lewis,
                sa.composition) != (sb.molar_mass, sb.sutherland,
                                    sb.viscosity, sb.lewis, sb.composition):
            return False
        if sa.thermo != sb.thermo:
            return False
    for ra, rb in zip(a.reactions, b.reactions):
        if (ra.reactants, ra.products, ra.pre_exponential,
                ra.temperature_exponent, ra.activation_energy,
                ra.reversible, ra.third_body) != \
                (rb.reactants, rb.products, rb.pre_exponential,
                 rb.temperature_exponent, rb.activation_energy,
                 rb.reversible, rb.third_body):
            return False
    return True


# ---------------------------------------------------------------------------
# initial states
# ---------------------------------------------------------------------------

def composition_vector(mechanism, composition):
    """
    Mass fractions from a species -> value mapping; the values must sum
    to 1 within 1e-6 and are renormalized exactly.
    """
    y = np.zeros(mechanism.n_species)
    for name, value in composition.items():
        if name not in mechanism.species_names:
            raise ValueError('unknown species in composition: ' + name)
        if value < 0:
            raise ValueError('negative mass fraction for ' + name)
        y[mechanism.index(name)] = value
    total = y.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError('composition sums to {0!r}, not 1'.format(total))
    return y / total


def _field_boundaries(mesh, mechanism, boundary, p_thermo, y_cells):
    """
    Boundary closures of U, p, T, Y and h from side -> fixed values. The
    enthalpy follows T on patches that fix it.
    """
    specs = {name: {} for name in ('U', 'p', 'T', 'Y', 'h')}
    for side, values in (boundary or {}).items():
        patch = mesh.patch(side)
        if patch.coupled:
            continue
        if 'U' in values:
            specs['U'][side] = ('fixedValue', values['U'])
        if 'p' in values:
            specs['p'][side] = ('fixedValue', values['p'])
        y_face = y_cells[:, patch.face_cells]
        if 'Y' in values:
            y_patch = composition_vector(mechanism, values['Y'])
            specs['Y'][side] = ('fixedValue', y_patch)
            y_face = np.repeat(y_patch[:, None], patch.n_faces, axis=1)
        if 'T' in values:
            specs['T'][side] = ('fixedValue', values['T'])
            h_face = np.atleast_1d(mechanism.thermo.mixture_h(MixtureState(
                p_thermo, np.full(patch.n_faces, values['T']), y_face
            )))
            specs['h'][side] = ('fixedValue', h_face[None, :])
    return specs


def build_state(mesh, mechanism, velocity, pressure, temperature,
                mass_fractions, p_thermo, boundary=None):
    """
    SimulationState from cell data; density and enthalpy follow from the
    thermodynamic pressure, T and Y.
    """
    specs = _field_boundaries(mesh, mechanism, boundary, p_thermo,
                              mass_fractions)
    thermo = mechanism.thermo
    mixture = MixtureState(p_thermo, temperature, mass_fractions)
    zero_gradient = {p.name: 'zeroGradient' for p in mesh.boundary_patches}
    U = CellField(mesh, velocity, specs['U'], name='U', units='m/s')
    p = CellField(mesh, pressure, specs['p'], name='p', units='Pa')
    T = CellField(mesh, temperature, specs['T'], name='T', units='K')
    Y = CellField(mesh, mass_fractions, specs['Y'], name='Y',
                  units='dimensionless')
    h = CellField(mesh, np.atleast_1d(thermo.mixture_h(mixture)), specs['h'],
                  name='h', units='J/kg')
    rho = CellField(mesh, np.atleast_1d(thermo.density(mixture)),
                    zero_gradient, name='rho', units='kg/m**3')
    phi = field.face_flux(U, rho)
    return piso.SimulationState(mesh, U, p, Y, h, T, rho, phi, p_thermo)


def _tgv_axes_ok(mesh):
    periodic = mesh.periodic_axes
    return 0 in periodic and 1 in periodic and \
        (2 in periodic or mesh.dims[2] == 1)


def init_tgv(mesh, mechanism, params):
    """
    Taylor-Green vortex
    U = u0 (sin x' cos y' cos z', -cos x' sin y' cos z', 0) with x' = x/L,
    and the matching pressure field. On a mesh with one cell in z the
    classical 2D vortex is used. The reactive variant puts a fuel layer
    of width ``layer_width`` across the middle of y, blended into the
    oxidizer (``composition``) with tanh profiles of thickness
    ``interface_thickness``.

    Parameters
    ----------
    mesh : StructuredMesh
        Periodic in x and y, and in z unless z has a single cell
    mechanism : deskflame.chemistry.Mechanism
    params : dict
        The [init] block: u0, L, pressure, temperature, composition,
        reactive, fuel, layer_width, interface_thickness

    Returns
    -------
    SimulationState
    """
    if not _tgv_axes_ok(mesh):
        raise ValueError(
            'Taylor-Green initialization needs a periodic mesh '
            '(x and y periodic, z periodic or a single cell)'
        )
    u0 = float(params.get('u0', 4.0))
    length = float(params.get('L', 1e-3))
    p0 = float(params.get('pressure', 101325.0))
    t0 = float(params.get('temperature', 300.0))
    oxidizer = composition_vector(mechanism, params['composition'])
    n = mesh.n_cells
    x, y, z = (mesh.cell_centers[:, axis] / length for axis in range(3))
    two_d = mesh.dims[2] == 1
    cz = np.ones(n) if two_d else np.cos(z)

    y_cells = np.repeat(oxidizer[:, None], n, axis=1)
    if params.get('reactive'):
        fuel = composition_vector(mechanism, params['fuel'])
        height = mesh.lengths[1]
        width = params.get('layer_width') or np.pi * length
        delta = params.get('interface_thickness') or 0.1 * length
        y_abs = mesh.cell_centers[:, 1]
        lower = 0.5 * (height - width)
        upper = 0.5 * (height + width)
        weight = 0.5 * (np.tanh((y_abs - lower) / delta) -
                        np.tanh((y_abs - upper) / delta))
        y_cells = weight * fuel[:, None] + (1.0 - weight) * oxidizer[:, None]
        y_cells /= np.sum(y_cells, axis=0)

    velocity = np.zeros((3, n))
    velocity[0] = u0 * np.sin(x) * np.cos(y) * cz
    velocity[1] = -u0 * np.cos(x) * np.sin(y) * cz
    rho0 = mechanism.thermo.density(MixtureState(p0, t0, oxidizer))
    if two_d:
        pressure = p0 + rho0 * u0 ** 2 / 4.0 * (np.cos(2 * x) + np.cos(2 * y))
    else:
        pressure = p0 + rho0 * u0 ** 2 / 16.0 * (
            np.cos(2 * x) + np.cos(2 * y)) * (np.cos(2 * z) + 2.0)
    return build_state(mesh, mechanism, velocity, pressure, np.full(n, t0),
                       y_cells, p0)


def init_uniform(mesh, mechanism, params, boundary=None):
    """
    Uniform velocity, pressure, temperature and composition, with the fixed
    boundary values of ``boundary`` (side -> {U, p, T, Y}).
    """
    n = mesh.n_cells
    p0 = float(params.get('pressure', 101325.0))
    velocity = np.repeat(
        np.asarray(params.get('velocity', (0.0, 0.0, 0.0)),
                   dtype=float)[:, None], n, axis=1
    )
    y = composition_vector(mechanism, params['composition'])
    return build_state(
        mesh, mechanism, velocity, np.full(n, p0),
        np.full(n, float(params.get('temperature', 300.0))),
        np.repeat(y[:, None], n, axis=1), p0, boundary
    )


def initialize(case, mesh, mechanism):
    init = case.init
    if init['kind'] == 'tgv':
        return init_tgv(mesh, mechanism, init)
    return init_uniform(mesh, mechanism, init, case.boundary_values)


def reynolds_number(case, mechanism):
    """u0 L rho/mu at the initial temperature, pressure and composition."""
    init = case.init
    mixture = MixtureState(
        init['pressure'], init['temperature'],
        composition_vector(mechanism, init['composition'])
    )
    thermo = mechanism.thermo
    speed = init['u0'] if init['kind'] == 'tgv' else \
        float(np.linalg.norm(init['velocity']))
    return speed * init['L'] * thermo.density(mixture) / \
        thermo.viscosity(mixture)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _write_block(f, values):
    np.savetxt(f, values, fmt='%.17g')


def write_output(state, path, species_names=None, fmt='vtk'):
    """
    Writes the cell fields as legacy ASCII VTK STRUCTURED_POINTS with
    CELL_DATA: U as VECTORS, p, T, rho, h and Y_<species> as SCALARS. Values
    are written with 17 significant digits.
    """
    if fmt != 'vtk':
        raise ValueError('Unsupported output format: {0}'.format(fmt))
    mesh = state.mesh
    nx, ny, nz = mesh.dims
    n_species = state.Y.n_components
    species_names = species_names or \
        ['{0}'.format(k) for k in range(n_species)]
    with open(path, 'w') as f:
        f.write('# vtk DataFile Version 3.0\n')
        f.write('deskflame time {0!r}\n'.format(state.time))
        f.write('ASCII\n')
        f.write('DATASET STRUCTURED_POINTS\n')
        f.write('DIMENSIONS {0} {1} {2}\n'.format(nx + 1, ny + 1, nz + 1))
        f.write('ORIGIN 0 0 0\n')
        f.write('SPACING {0!r} {1!r} {2!r}\n'.format(*mesh.spacing))
        f.write('CELL_DATA {0}\n'.format(mesh.n_cells))
        f.write('VECTORS U double\n')
        _write_block(f, state.U.data.T)
        scalars = [('p', state.p), ('T', state.T), ('rho', state.rho),
                   ('h', state.h)]
        for name, cell_field in scalars:
            f.write('SCALARS {0} double 1\nLOOKUP_TABLE default\n'.format(
                name))
            _write_block(f, cell_field.data[0])
        for k, name in enumerate(species_names):
            f.write('SCALARS Y_{0} double 1\nLOOKUP_TABLE default\n'.format(
                name))
            _write_block(f, state.Y.data[k])
    return path


def read_vtk(path):
    """
    Reads a file written by :func:`write_output`.

    Returns
    -------
    dict
        title, dims (cells), origin, spacing and fields (name -> array of
        shape (n_components, n_cells))
    """
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].startswith('# vtk DataFile'):
        raise ValueError('Not a legacy VTK file: {0}'.format(path))
    result = {'title': lines[1], 'fields': OrderedDict()}
    if lines[2].strip() != 'ASCII':
        raise ValueError('Only ASCII VTK files are supported')
    tokens = ' '.join(lines[3:]).split()
    position = 0
    n_cells = None

    def take(count):
        nonlocal position
        values = tokens[position:position + count]
        if len(values) != count:
            raise ValueError('Unexpected end of VTK file')
        position += count
        return values

    while position < len(tokens):
        keyword = take(1)[0].upper()
        if keyword == 'DATASET':
            kind = take(1)[0]
            if kind != 'STRUCTURED_POINTS':
                raise ValueError('Unsupported dataset ' + kind)
        elif keyword == 'DIMENSIONS':
            result['dims'] = tuple(int(v) - 1 for v in take(3))
        elif keyword == 'ORIGIN':
            result['origin'] = tuple(float(v) for v in take(3))
        elif keyword == 'SPACING':
            result['spacing'] = tuple(float(v) for v in take(3))
        elif keyword == 'CELL_DATA':
            n_cells = int(take(1)[0])
        elif keyword == 'VECTORS':
            name, _ = take(2)
            values = np.array(take(3 * n_cells), dtype=float)
            result['fields'][name] = values.reshape(n_cells, 3).T.copy()
        elif keyword == 'SCALARS':
            name, _, n_comp = take(3)
            if take(2)[0].upper() != 'LOOKUP_TABLE':
                raise ValueError('SCALARS {0} lacks LOOKUP_TABLE'.format(name))
            n_comp = int(n_comp)
            values = np.array(take(n_comp * n_cells), dtype=float)
            result['fields'][name] = values.reshape(n_cells, n_comp).T.copy()
        else:
            raise ValueError('Unknown VTK keyword ' + keyword)
    return result


# ---------------------------------------------------------------------------
# time loop, benchmark
# ---------------------------------------------------------------------------

def _prepare(case):
    mesh = case.build_mesh()
    mechanism = case.load_mechanism()
    config = case.piso_config()
    bundle = case.load_bundle() if config.chemistry_mode == 'surrogate' \
        else None
    state = initialize(case, mesh, mechanism)
    solver = piso.PisoSolver(mesh, mechanism, config, bundle)
    return mechanism, state, solver


def _vtk_name(directory, step):
    return os.path.join(directory, 'step_{0:06d}.vtk'.format(step))


def simulate(case, output_dir=None, verbose=False):
    """
    Runs the time loop of a case, writing VTK files and a diagnostics CSV
    every ``write_interval`` steps and after the last one. A failing stage
    leaves ``failed.vtk`` with the state at failure and re-raises.

    Returns
    -------
    tuple
        (final SimulationState, diagnostics DataFrame)
    """
    mechanism, state, solver = _prepare(case)
    output = case.output
    directory = output_dir or output['directory']
    if case.path is not None and not os.path.isabs(directory):
        directory = os.path.join(os.path.dirname(case.path), directory)
    os.makedirs(directory, exist_ok=True)
    names = mechanism.species_names

    diagnostics = pd.DataFrame(columns=DIAGNOSTIC_COLUMNS)
    courant, _ = field.courant_number(
        field.face_flux(state.U), state.mesh, case.dt)
    tools.add_dataframe_row(diagnostics, [
        state.time, piso.kinetic_energy(state), float(state.T.data.max()),
        courant, 0.0
    ])
    if output['vtk']:
        write_output(state, _vtk_name(directory, 0), names)

    for step in range(1, case.n_steps + 1):
        try:
            report = solver.advance(state, case.dt)
        except piso.StageError:
            write_output(state, os.path.join(directory, 'failed.vtk'), names)
            _save_diagnostics(diagnostics, directory)
            raise
        if verbose:
            print('step {0}: {1}'.format(step, report))
        if step % case.write_interval == 0 or step == case.n_steps:
            tools.add_dataframe_row(diagnostics, [
                state.time, piso.kinetic_energy(state),
                float(state.T.data.max()), report.courant,
                report.continuity_residual
            ])
            if output['vtk']:
                write_output(state, _vtk_name(directory, step), names)
    _save_diagnostics(diagnostics, directory)
    return state, diagnostics.astype(float)


def _save_diagnostics(diagnostics, directory):
    diagnostics.astype(float).to_csv(
        os.path.join(directory, 'diagnostics.csv'),
        index=False, float_format='%.17g'
    )


def run(case, output_dir=None, verbose=False):
    """
    Runs a case (a CaseConfig or a case file path).

    Returns
    -------
    int
        0 on success, 1 when a stage of the time step failed
    """
    if not isinstance(case, CaseConfig):
        case = parse_case(case)
    try:
        simulate(case, output_dir, verbose)
    except piso.StageError as err:
        print('run failed: {0}'.format(err), file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def bench(case, steps=5, verbose=False):
    """
    Advances a case ``steps`` times and records the stage timings.

    Returns
    -------
    pd.DataFrame
        One row per step with BENCH_COLUMNS, seconds
    """
    if int(steps) < 1:
        raise ValueError('steps must be >= 1')
    if not isinstance(case, CaseConfig):
        case = parse_case(case)
    _, state, solver = _prepare(case)
    table = pd.DataFrame(columns=BENCH_COLUMNS)
    for step in range(1, int(steps) + 1):
        report = solver.advance(state, case.dt)
        timings = report.timings
        tools.add_dataframe_row(table, [
            step, timings['discretisation'], timings['linear_solve'],
            timings['chemistry'], timings['thermo'], report.total
        ])
        if verbose:
            print('step {0}: {1:.4f} s'.format(step, report.total))
    table = table.astype(float)
    table['step'] = table['step'].astype(int)
    return table


def timing_split(table):
    """
    Mean seconds per step: sum over all stages, chemistry, and the fluid
    part (sum - chemistry).

    Returns
    -------
    pd.Series
    """
    stages = ['discretisation', 'linear_solve', 'chemistry', 'thermo']
    total = float(table[stages].sum(axis=1).mean())
    chem = float(table['chemistry'].mean())
    return pd.Series({'sum': total, 'chemistry': chem, 'fluid': total - chem})


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def resolve_path(path):
    """
    The path itself when it exists, otherwise the shipped lookup_data file
    of that name, so example cases and mechanisms can be named bare.
    """
    if os.path.exists(path):
        return path
    if path in tools.find_mechanisms() | tools.find_cases():
        return tools.lookup_path(path)
    return path


def _shipped():
    lines = ['shipped mechanisms:']
    lines.extend('  ' + name for name in sorted(tools.find_mechanisms()))
    lines.append('shipped cases:')
    lines.extend('  ' + name for name in sorted(tools.find_cases()))
    return '\n'.join(lines)


def _info(path, training_dt=None):
    with open(path, 'rb') as f:
        head = f.read(4)
    if head == surrogate.MAGIC:
        bundle = surrogate.load_weights(path, training_dt)
        lines = ['weights: {0}'.format(path),
                 'networks: {0}'.format(len(bundle.networks)),
                 'inputs: {0}'.format(bundle.n_inputs)]
        for net in bundle.networks:
            lines.append('  {0}: layers {1}'.format(
                net.name, '-'.join(str(n) for n in net.layer_sizes)))
        lines.append('training dt: {0}'.format(
            'unknown' if bundle.training_dt is None else
            '{0:g} s'.format(bundle.training_dt)))
        return '\n'.join(lines)
    if path.endswith('.mech'):
        mechanism = parse_mechanism(path)
        lines = ['mechanism: {0}'.format(mechanism.name),
                 'species: {0}'.format(', '.join(mechanism.species_names)),
                 'inert: {0}'.format(
                     ', '.join(mechanism.inert_species) or 'none'),
                 'reactions: {0}'.format(len(mechanism.reactions))]
        lines.extend('  ' + r.equation for r in mechanism.reactions)
        return '\n'.join(lines)
    case = parse_case(path)
    mechanism = case.load_mechanism()
    return '\n'.join([
        'case: {0}'.format(path),
        'mesh dims: {0} x {1} x {2}'.format(*case.dims),
        'lengths: {0}'.format(', '.join('{0:g} m'.format(v)
                                        for v in case.lengths)),
        'dt: {0:g} s, end time: {1:g} s ({2} steps)'.format(
            case.dt, case.end_time, case.n_steps),
        'chemistry: {0} ({1})'.format(case.chemistry['mode'],
                                      mechanism.name),
        'Re: {0:.1f}'.format(reynolds_number(case, mechanism)),
    ])


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError('must be > 0')
    return value


def _widths(text):
    try:
        values = tuple(int(v) for v in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma-separated integers')
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError('layer widths must be >= 1')
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog='deskflame',
        description='Low-Mach reactive flow on uniform Cartesian meshes'
    )
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    run_cmd = commands.add_parser('run', help='run a case file')
    run_cmd.add_argument('case')
    run_cmd.add_argument('--output', default=None,
                         help='output folder (default: from the case)')
    run_cmd.add_argument('--verbose', action='store_true')

    bench_cmd = commands.add_parser('bench', help='time the stages of a case')
    bench_cmd.add_argument('case')
    bench_cmd.add_argument('--steps', type=int, default=5,
                           help='time steps to run (default: 5)')
    bench_cmd.add_argument('--csv', default=None,
                           help='also write the per-step table here')

    sample_cmd = commands.add_parser(
        'sample-chemistry', help='build a training table of reactor steps')
    sample_cmd.add_argument('mechanism')
    sample_cmd.add_argument('--n', type=int, default=1000,
                            help='number of samples (default: 1000)')
    sample_cmd.add_argument('--dt', type=_positive_float, required=True,
                            help='reactor time step in s')
    sample_cmd.add_argument('--t-min', type=_positive_float, default=300.0,
                            help='lowest temperature in K (default: 300)')
    sample_cmd.add_argument('--t-max', type=_positive_float, default=2500.0,
                            help='highest temperature in K (default: 2500)')
    sample_cmd.add_argument('--pressure', type=_positive_float,
                            default=101325.0,
                            help='pressure in Pa (default: 101325)')
    sample_cmd.add_argument('--inert', default=None,
                            help='fixed inert mass fractions, e.g. N2:0.7')
    sample_cmd.add_argument('--seed', type=int, default=0)
    sample_cmd.add_argument('--multiprocessing', action='store_true')
    sample_cmd.add_argument('-o', '--output', required=True)

    train_cmd = commands.add_parser(
        'train-surrogate', help='train the chemistry networks')
    train_cmd.add_argument('samples')
    train_cmd.add_argument('--mechanism', required=True,
                           help='mechanism the samples were drawn from')
    train_cmd.add_argument('--arch', type=_widths,
                           default=surrogate.DEFAULT_WIDTHS,
                           help='hidden layer widths (default: 64,32,16)')
    train_cmd.add_argument('--epochs', type=int, default=100)
    train_cmd.add_argument('--batch-size', type=int, default=64)
    train_cmd.add_argument('--learning-rate', type=_positive_float,
                           default=1e-3)
    train_cmd.add_argument('--seed', type=int, default=0)
    train_cmd.add_argument('--verbose', action='store_true')
    train_cmd.add_argument('-o', '--output', required=True)

    info_cmd = commands.add_parser(
        'info', help='summarize a case, mechanism or weights file')
    info_cmd.add_argument('path', nargs='?', default=None,
                          help='omit to list the shipped files')
    info_cmd.add_argument('--dt', type=_positive_float, default=None,
                          help='training time step of a weights file')
    return parser


def main(argv=None):
    """
    Command line entry point. Usage errors exit with status 2 through
    argparse; runtime errors print a message and return 1.
    """
    args = build_parser().parse_args(argv)
    try:
        if args.command == 'run':
            return run(resolve_path(args.case), args.output, args.verbose)
        if args.command == 'bench':
            table = bench(resolve_path(args.case), args.steps)
            if args.csv:
                table.to_csv(args.csv, index=False, float_format='%.9g')
            print(table.to_string(index=False))
            print(timing_split(table).to_string())
        elif args.command == 'sample-chemistry':
            mechanism = parse_mechanism(resolve_path(args.mechanism))
            inert = _composition(args.inert) if args.inert else None
            sampler = chemistry.StateSampler(
                (args.t_min, args.t_max), args.pressure, inert, args.seed)
            samples = chemistry.generate_samples(
                mechanism, sampler, args.dt, args.n,
                use_multiprocessing=args.multiprocessing)
            chemistry.save_samples(samples, args.output)
        elif args.command == 'train-surrogate':
            mechanism = parse_mechanism(resolve_path(args.mechanism))
            samples = chemistry.load_samples(args.samples, mechanism)
            config = surrogate.TrainerConfig(
                learning_rate=args.learning_rate,
                batch_size=args.batch_size,
                epochs=args.epochs,
                seed=args.seed
            )
            bundle, histories = surrogate.train_bundle(
                mechanism, samples, config, args.arch, verbose=args.verbose)
            surrogate.save_weights(bundle, args.output)
            for name, history in histories.items():
                print('{0}: final loss {1:.6g}'.format(name, history[-1]))
        elif args.command == 'info':
            if args.path is None:
                print(_shipped())
            else:
                print(_info(resolve_path(args.path), args.dt))
    except (OSError, ValueError, RuntimeError) as err:
        print('deskflame {0}: {1}'.format(args.command, err),
              file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK

# -*- coding: utf-8 -*-
"""
PURPOSE:
    Cell- and face-centred data in component-major layout, and the explicit
    spatial operators: linear and upwind interpolation, Gauss gradient,
    explicit divergence and the Courant number.

    ``CellField.data`` has shape (n_components, n_cells): every cell of
    component 0, then every cell of component 1, and so on. All face-to-cell
    accumulation goes through ``StructuredMesh.gather``.

CREATED BY:
    deskflame developers
"""

import numpy as np

from . import tools

BOUNDARY_KINDS = ('fixedValue', 'zeroGradient')


class BoundaryCondition:
    """
    Closure on one patch. ``value`` is only used by fixedValue and may be a
    scalar, one value per component, or one value per component and face.
    """
    def __init__(self, kind, value=None):
        if kind not in BOUNDARY_KINDS:
            raise ValueError('Bad boundary condition kind: {0}'.format(kind))
        if kind == 'fixedValue' and value is None:
            raise ValueError('fixedValue needs a value')
        self._kind = kind
        self._value = None if value is None else np.array(value, dtype=float)

    @property
    def kind(self):
        return self._kind

    @property
    def value(self):
        return self._value

    def __repr__(self):
        return 'BoundaryCondition({0!r})'.format(self._kind)


def _as_condition(spec):
    if spec is None or isinstance(spec, BoundaryCondition):
        return spec
    if isinstance(spec, str):
        return BoundaryCondition(spec)
    kind, value = spec
    return BoundaryCondition(kind, value)


class CellField:
    """
    Cell-centred field with per-patch closures and an optional chain of old
    time levels.

    Parameters
    ----------
    mesh : deskflame.mesh.StructuredMesh
    data : array_like
        Shape (n_components, n_cells), or (n_cells,) for a scalar
    boundary : dict or None
        Patch name -> BoundaryCondition, a kind string, or (kind, value).
        Patches left out get the default closure of their patch kind:
        zeroGradient patches stay zeroGradient, wall patches hold a zero
        vector for vector fields and zero gradient otherwise, fixedValue
        patches freeze the adjacent cell values.
    name : str or None
    units : str or pint Unit or None
        Units of the data; None leaves them unknown
    """
    def __init__(self, mesh, data, boundary=None, name=None, units=None):
        data = np.array(data, dtype=float)
        if data.ndim == 1:
            data = data[None, :]
        if data.ndim != 2 or data.shape[1] != mesh.n_cells:
            raise ValueError(
                'Field shape {0} does not match {1} cells'.format(
                    data.shape, mesh.n_cells
                )
            )
        self._mesh = mesh
        self.data = data
        self.name = name
        self.units = tools.as_units(units)
        self.old_time = None
        self.old_old_time = None
        boundary = dict(boundary or {})
        unknown = set(boundary) - {p.name for p in mesh.patches}
        if unknown:
            raise ValueError('Unknown patches: {0}'.format(sorted(unknown)))
        self._boundary = {}
        for patch in mesh.boundary_patches:
            if patch.name in boundary:
                self._boundary[patch.name] = _as_condition(
                    boundary[patch.name]
                )
            else:
                self._boundary[patch.name] = self._default_condition(patch)

    def _default_condition(self, patch):
        if patch.kind == 'zeroGradient':
            return BoundaryCondition('zeroGradient')
        if patch.kind == 'wall':
            if self.n_components == 3:
                return BoundaryCondition('fixedValue', np.zeros(3))
            return BoundaryCondition('zeroGradient')
        return BoundaryCondition(
            'fixedValue', self.data[:, patch.face_cells].copy()
        )

    @property
    def mesh(self):
        return self._mesh

    @property
    def n_components(self):
        return self.data.shape[0]

    @property
    def n_cells(self):
        return self.data.shape[1]

    @property
    def flat(self):
        """Component-major flat view."""
        return self.data.reshape(-1)

    @property
    def boundary(self):
        return dict(self._boundary)

    def set_boundary(self, patch_name, condition):
        if patch_name not in self._boundary:
            raise ValueError('No non-periodic patch {0}'.format(patch_name))
        self._boundary[patch_name] = _as_condition(condition)

    def boundary_values(self, patch):
        """
        Closure values on a patch, shape (n_components, n_faces).
        """
        condition = self._boundary.get(patch.name)
        if condition is None:
            raise ValueError(
                'Undefined boundary closure on patch {0}'.format(patch.name)
            )
        if condition.kind == 'zeroGradient':
            return self.data[:, patch.face_cells]
        value = condition.value
        shape = (self.n_components, patch.n_faces)
        if value.ndim == 1 and value.shape[0] == self.n_components:
            value = value[:, None]
        return np.broadcast_to(value, shape).copy()

    def copy(self, name=None):
        new = CellField(
            self._mesh,
            self.data.copy(),
            boundary=self._boundary,
            name=self.name if name is None else name,
            units=self.units
        )
        new.old_time = self.old_time
        new.old_old_time = self.old_old_time
        return new

    def store_old_time(self):
        """Rotates the time levels: old -> old-old, current -> old."""
        self.old_old_time = self.old_time
        current = CellField(
            self._mesh, self.data.copy(), boundary=self._boundary,
            name=self.name, units=self.units
        )
        self.old_time = current

    def component(self, index):
        """Scalar field of one component, closures included."""
        boundary = {}
        for name, condition in self._boundary.items():
            if condition is None or condition.kind == 'zeroGradient':
                boundary[name] = condition
                continue
            value = condition.value
            if value.ndim >= 1 and value.shape[0] == self.n_components:
                value = value[index]
            boundary[name] = BoundaryCondition('fixedValue', value)
        return CellField(
            self._mesh, self.data[index], boundary=boundary,
            name=None if self.name is None else
            '{0}.{1}'.format(self.name, index),
            units=self.units
        )

    def __repr__(self):
        return 'CellField({0!r}, n_components={1}, n_cells={2})'.format(
            self.name, self.n_components, self.n_cells
        )


class FaceField:
    """
    Face-centred field: ``data`` has shape (n_components, n_internal_faces)
    and ``boundary`` maps every non-periodic patch to an array of shape
    (n_components, n_faces). ``units`` works as on CellField.
    """
    def __init__(self, mesh, data, boundary=None, units=None):
        data = np.array(data, dtype=float)
        if data.ndim == 1:
            data = data[None, :]
        n_faces = mesh.connectivity.n_internal_faces
        if data.ndim != 2 or data.shape[1] != n_faces:
            raise ValueError(
                'Face field shape {0} does not match {1} faces'.format(
                    data.shape, n_faces
                )
            )
        self._mesh = mesh
        self.data = data
        self.units = tools.as_units(units)
        self.boundary = {}
        boundary = boundary or {}
        for patch in mesh.boundary_patches:
            values = boundary.get(patch.name)
            if values is None:
                values = np.zeros((data.shape[0], patch.n_faces))
            values = np.array(values, dtype=float)
            if values.ndim == 1:
                values = values[None, :]
            self.boundary[patch.name] = np.broadcast_to(
                values, (data.shape[0], patch.n_faces)
            ).copy()

    @property
    def mesh(self):
        return self._mesh

    @property
    def n_components(self):
        return self.data.shape[0]

    @property
    def n_internal_faces(self):
        return self.data.shape[1]

    def copy(self):
        return FaceField(self._mesh, self.data.copy(), self.boundary,
                         self.units)

    def scaled(self, factor):
        """Multiplies by a scalar or by a face field of matching shape."""
        if isinstance(factor, FaceField):
            return FaceField(
                self._mesh,
                self.data * factor.data,
                {name: values * factor.boundary[name]
                 for name, values in self.boundary.items()},
                tools.units_product(self.units, factor.units)
            )
        return FaceField(
            self._mesh,
            self.data * factor,
            {name: values * factor for name, values in self.boundary.items()},
            self.units
        )

    def __add__(self, other):
        if self.units is not None and other.units is not None and \
                self.units.dimensionality != other.units.dimensionality:
            raise ValueError('Cannot add face fields in {0} and {1}'.format(
                self.units, other.units))
        return FaceField(
            self._mesh,
            self.data + other.data,
            {name: values + other.boundary[name]
             for name, values in self.boundary.items()},
            self.units if self.units is not None else other.units
        )

    def __sub__(self, other):
        return self + other.scaled(-1.0)


def _check_mesh(field, mesh):
    if field.mesh is not mesh:
        raise ValueError('Field belongs to a different mesh')


def interpolate_linear(cell_field):
    """
    Face values w*psi_owner + (1 - w)*psi_neighbour; boundary faces take the
    patch closure value.
    """
    mesh = cell_field.mesh
    conn = mesh.connectivity
    w = conn.interp_weight
    data = (w * cell_field.data[:, conn.owner] +
            (1.0 - w) * cell_field.data[:, conn.neighbor])
    boundary = {patch.name: cell_field.boundary_values(patch)
                for patch in mesh.boundary_patches}
    return FaceField(mesh, data, boundary, cell_field.units)


def interpolate_upwind(cell_field, face_flux):
    """
    Face values from the upstream cell. A zero flux picks the owner.
    """
    mesh = cell_field.mesh
    _check_mesh(face_flux, mesh)
    if face_flux.n_components != 1:
        raise ValueError('Upwind interpolation needs a scalar flux')
    conn = mesh.connectivity
    forward = face_flux.data[0] >= 0
    data = np.where(
        forward,
        cell_field.data[:, conn.owner],
        cell_field.data[:, conn.neighbor]
    )
    boundary = {patch.name: cell_field.boundary_values(patch)
                for patch in mesh.boundary_patches}
    return FaceField(mesh, data, boundary, cell_field.units)


def face_flux(velocity, density=None):
    """
    Volumetric flux U_f . S_f, or mass flux rho_f U_f . S_f when a density
    field is given, with linear interpolation.

    Parameters
    ----------
    velocity : CellField
        Three components
    density : CellField or None

    Returns
    -------
    FaceField
        Scalar flux per face, outward on boundary faces
    """
    if velocity.n_components != 3:
        raise ValueError('face_flux needs a vector field')
    mesh = velocity.mesh
    conn = mesh.connectivity
    u_face = interpolate_linear(velocity)
    data = np.sum(u_face.data * conn.area_vectors.T, axis=0)
    boundary = {}
    for patch in mesh.boundary_patches:
        boundary[patch.name] = patch.face_area * np.sum(
            u_face.boundary[patch.name] * patch.normal[:, None], axis=0
        )
    flux = FaceField(mesh, data, boundary,
                     tools.units_product(velocity.units, 'm**2'))
    if density is not None:
        flux = flux.scaled(interpolate_linear(density))
    return flux


def gauss_gradient(cell_field):
    """
    Gauss gradient (1/V) sum_f psi_f S_f n_f with linear face values.

    Returns
    -------
    CellField
        3*n_components components; component 3*c + axis is the derivative
        of input component c along that axis. Boundary closures are
        zeroGradient.
    """
    mesh = cell_field.mesh
    conn = mesh.connectivity
    faces = interpolate_linear(cell_field)
    n_comp = cell_field.n_components
    face_data = np.empty((3 * n_comp, conn.n_internal_faces))
    patch_data = {}
    for c in range(n_comp):
        for axis in range(3):
            face_data[3 * c + axis] = (
                faces.data[c] * conn.face_area * conn.face_normal[:, axis]
            )
    for patch in mesh.boundary_patches:
        values = np.empty((3 * n_comp, patch.n_faces))
        for c in range(n_comp):
            for axis in range(3):
                values[3 * c + axis] = (
                    faces.boundary[patch.name][c] * patch.face_area *
                    patch.normal[axis]
                )
        patch_data[patch.name] = values
    data = mesh.gather(face_data, patch_data) / mesh.cell_volume
    boundary = {p.name: 'zeroGradient' for p in mesh.boundary_patches}
    name = None if cell_field.name is None else \
        'grad({0})'.format(cell_field.name)
    return CellField(mesh, data, boundary=boundary, name=name,
                     units=tools.units_product(cell_field.units, 'm**-1'))


def explicit_divergence(face_flux_field):
    """
    Net outflow per unit volume, (1/V)(sum outgoing - sum incoming).
    """
    mesh = face_flux_field.mesh
    if face_flux_field.n_components != 1:
        raise ValueError('explicit_divergence needs a scalar flux')
    data = mesh.gather(
        face_flux_field.data,
        face_flux_field.boundary
    ) / mesh.cell_volume
    boundary = {p.name: 'zeroGradient' for p in mesh.boundary_patches}
    return CellField(
        mesh, data, boundary=boundary,
        units=tools.units_product(face_flux_field.units, 'm**-3')
    )


def courant_number(face_flux_field, mesh, dt):
    """
    Maximum Courant number dt * sum_f |flux_f| / (2V).

    Parameters
    ----------
    face_flux_field : FaceField
        Volumetric flux in m^3/s
    mesh : StructuredMesh
    dt : float
        Time step in s

    Returns
    -------
    tuple
        (Courant number, index of the cell where it occurs)
    """
    if not dt > 0:
        raise ValueError('dt must be > 0')
    _check_mesh(face_flux_field, mesh)
    magnitude = mesh.gather(
        np.abs(face_flux_field.data[0]),
        {name: np.abs(values[0])
         for name, values in face_flux_field.boundary.items()},
        signed=False
    )
    courant = dt * magnitude / (2.0 * mesh.cell_volume)
    cell = int(np.argmax(courant))
    return float(courant[cell]), cell

# -*- coding: utf-8 -*-
"""
PURPOSE:
    Implicit finite-volume operators. Each operator returns an FvMatrix
    describing its contribution to the discrete equation

        A psi = b

    with A in LDU storage plus per-patch ``internal_coeffs`` (added to the
    diagonal of the adjacent cell when flattened) and ``boundary_coeffs``
    (added to b). Transport equations are built as
    ddt + div - laplacian, so the Laplacian keeps its natural sign:
    positive off-diagonals and a negative diagonal.

    Boundary closures:
        laplacian, fixedValue:    internal = -g*d*S, boundary = -g*d*S*psi_b
        laplacian, zeroGradient:  both zero
        div, fixedValue:          boundary = -phi_b*psi_b
        div, zeroGradient:        internal = phi_b

CREATED BY:
    deskflame developers
"""

import numpy as np

from . import sparse, tools
from .field import CellField, FaceField

DDT_SCHEMES = ('euler', 'backward2')
DIV_SCHEMES = ('upwind', 'linear')


class SchemeConfig:
    """
    Discretization choices for one equation.
    """
    def __init__(self, ddt_scheme='euler', div_scheme='upwind'):
        if ddt_scheme not in DDT_SCHEMES:
            raise ValueError('Bad ddt scheme: {0}'.format(ddt_scheme))
        if div_scheme not in DIV_SCHEMES:
            raise ValueError('Bad div scheme: {0}'.format(div_scheme))
        self._ddt_scheme = ddt_scheme
        self._div_scheme = div_scheme

    @property
    def ddt_scheme(self):
        return self._ddt_scheme

    @ddt_scheme.setter
    def ddt_scheme(self, _):
        raise PermissionError('SchemeConfig is read-only')

    @property
    def div_scheme(self):
        return self._div_scheme

    @div_scheme.setter
    def div_scheme(self, _):
        raise PermissionError('SchemeConfig is read-only')

    def __repr__(self):
        return 'SchemeConfig({0!r}, {1!r})'.format(
            self._ddt_scheme, self._div_scheme
        )


class FvMatrix:
    """
    Discretized equation for the unknown field ``psi``. Off-diagonal and
    internal coefficients are shared by all components; ``source`` and
    ``boundary_coeffs`` are per component.

    ``dimensions`` holds the units of each term A psi (and of b) as a pint
    Unit. Matrices with different dimensions cannot be combined; None means
    unknown and is never checked.
    """
    def __init__(
            self,
            psi,
            ldu=None,
            source=None,
            internal_coeffs=None,
            boundary_coeffs=None,
            dimensions=None,
            mesh=None
    ):
        mesh = psi.mesh if psi is not None else mesh
        if mesh is None:
            raise ValueError('FvMatrix needs an unknown field or a mesh')
        n_comp = psi.n_components if psi is not None else \
            (1 if source is None else np.atleast_2d(source).shape[0])
        self.psi = psi
        self._mesh = mesh
        self.dimensions = tools.as_units(dimensions)
        self.ldu = ldu if ldu is not None else \
            sparse.LduMatrix(mesh.connectivity, np.zeros(mesh.n_cells))
        self.source = np.zeros((n_comp, mesh.n_cells)) if source is None \
            else np.array(np.atleast_2d(source), dtype=float)
        self.internal_coeffs = {
            p.name: np.zeros(p.n_faces) for p in mesh.boundary_patches
        }
        self.boundary_coeffs = {
            p.name: np.zeros((n_comp, p.n_faces))
            for p in mesh.boundary_patches
        }
        for name, values in (internal_coeffs or {}).items():
            self.internal_coeffs[name] = np.array(values, dtype=float)
        for name, values in (boundary_coeffs or {}).items():
            values = np.array(values, dtype=float)
            if values.ndim == 1:
                values = np.repeat(values[None, :], n_comp, axis=0)
            self.boundary_coeffs[name] = values

    @property
    def mesh(self):
        return self._mesh

    @property
    def n_components(self):
        return self.source.shape[0]

    def copy(self):
        return FvMatrix(
            self.psi,
            self.ldu.copy(),
            self.source.copy(),
            {k: v.copy() for k, v in self.internal_coeffs.items()},
            {k: v.copy() for k, v in self.boundary_coeffs.items()},
            self.dimensions,
            self._mesh
        )

    def flatten(self):
        """
        Folds the boundary coefficients into the diagonal and the
        right-hand side.

        Returns
        -------
        tuple
            (LduMatrix, rhs of shape (n_components, n_cells))
        """
        ldu = self.ldu.copy()
        rhs = self.source.copy()
        for patch in self._mesh.boundary_patches:
            ldu.diag[patch.face_cells] += self.internal_coeffs[patch.name]
            rhs[:, patch.face_cells] += self.boundary_coeffs[patch.name]
        return ldu, rhs

    def folded(self):
        """Equivalent FvMatrix with all boundary coefficients folded in."""
        ldu, rhs = self.flatten()
        return FvMatrix(self.psi, ldu, rhs, dimensions=self.dimensions,
                        mesh=self._mesh)

    def set_reference(self, cell, value):
        """
        Pins psi[cell] = value. The row is replaced by diag*psi = diag*value
        and the column is eliminated into the right-hand side, so a
        symmetric system stays symmetric.
        """
        if self.n_components != 1:
            raise ValueError('set_reference needs a scalar equation')
        if not 0 <= cell < self._mesh.n_cells:
            raise IndexError('Reference cell {0} out of range'.format(cell))
        folded = self.folded()
        ldu = folded.ldu
        rhs = folded.source
        conn = self._mesh.connectivity
        as_owner = np.flatnonzero(conn.owner == cell)
        as_neighbor = np.flatnonzero(conn.neighbor == cell)
        for face in as_owner:
            rhs[0, conn.neighbor[face]] -= ldu.lower[face] * value
        for face in as_neighbor:
            rhs[0, conn.owner[face]] -= ldu.upper[face] * value
        ldu.upper[as_owner] = 0.0
        ldu.lower[as_owner] = 0.0
        ldu.upper[as_neighbor] = 0.0
        ldu.lower[as_neighbor] = 0.0
        if ldu.diag[cell] == 0:
            ldu.diag[cell] = 1.0
        rhs[0, cell] = ldu.diag[cell] * value
        self.ldu = ldu
        self.source = rhs
        for name in self.internal_coeffs:
            self.internal_coeffs[name][:] = 0.0
            self.boundary_coeffs[name][:] = 0.0

    def __add__(self, other):
        return combine(self, other, 1)

    def __sub__(self, other):
        return combine(self, other, -1)

    def __neg__(self):
        return self * -1.0

    def __mul__(self, factor):
        return FvMatrix(
            self.psi,
            sparse.LduMatrix(self.ldu.addressing, self.ldu.diag * factor,
                             self.ldu.upper * factor,
                             self.ldu.lower * factor),
            self.source * factor,
            {k: v * factor for k, v in self.internal_coeffs.items()},
            {k: v * factor for k, v in self.boundary_coeffs.items()},
            self.dimensions,
            self._mesh
        )

    __rmul__ = __mul__


def _values(field_or_value, mesh, name):
    """Cell values of a scalar CellField or a constant, shape (n_cells,)."""
    if isinstance(field_or_value, CellField):
        if field_or_value.mesh is not mesh:
            raise ValueError('{0} belongs to a different mesh'.format(name))
        if field_or_value.n_components != 1:
            raise ValueError('{0} must be scalar'.format(name))
        return field_or_value.data[0]
    return np.full(mesh.n_cells, float(field_or_value))


def _units(field_or_value):
    if isinstance(field_or_value, CellField):
        return field_or_value.units
    return None


def _patch_values(field_or_value, patch):
    if isinstance(field_or_value, CellField):
        return field_or_value.boundary_values(patch)[0]
    return np.full(patch.n_faces, float(field_or_value))


def ddt(rho, psi, dt, scheme='euler'):
    """
    Implicit time derivative of rho*psi.

    Parameters
    ----------
    rho : CellField or float
        Density; its old time levels are used when present, otherwise the
        current values stand in for them
    psi : CellField
        Unknown with at least one stored old time level
    dt : float
    scheme : str
        'euler' or 'backward2'. backward2 needs two old levels of psi and
        falls back to euler while only one exists.

    Returns
    -------
    FvMatrix
    """
    if not dt > 0:
        raise ValueError('dt must be > 0')
    if scheme not in DDT_SCHEMES:
        raise ValueError('Bad ddt scheme: {0}'.format(scheme))
    if psi.old_time is None:
        raise ValueError(
            'missing old time level for {0}'.format(psi.name or 'psi')
        )
    mesh = psi.mesh
    volume = mesh.cell_volume
    rho_new = _values(rho, mesh, 'rho')

    def rho_at(level):
        if isinstance(rho, CellField):
            old = rho.old_old_time if level == 2 else None
            old = old or rho.old_time
            if old is not None:
                return old.data[0]
        return rho_new

    if scheme == 'backward2' and psi.old_old_time is not None:
        diag = 1.5 * rho_new * volume / dt
        source = (
            2.0 * rho_at(1) * psi.old_time.data -
            0.5 * rho_at(2) * psi.old_old_time.data
        ) * volume / dt
    else:
        diag = rho_new * volume / dt
        source = rho_at(1) * psi.old_time.data * volume / dt
    return FvMatrix(
        psi, sparse.LduMatrix(mesh.connectivity, diag), source,
        dimensions=tools.units_product(_units(rho), psi.units, 'm**3/s')
    )


def div(flux, psi, scheme='upwind'):
    """
    Implicit convection with a mass flux through the faces.

    Parameters
    ----------
    flux : deskflame.field.FaceField
        Scalar face flux, outward on boundary faces
    psi : CellField
    scheme : str
        'upwind' or 'linear'

    Returns
    -------
    FvMatrix
    """
    if scheme not in DIV_SCHEMES:
        raise ValueError('Bad div scheme: {0}'.format(scheme))
    mesh = psi.mesh
    if flux.mesh is not mesh or flux.n_components != 1:
        raise ValueError('flux/mesh mismatch')
    phi = flux.data[0]
    if scheme == 'upwind':
        owner_diag = np.maximum(phi, 0.0)
        neighbor_diag = -np.minimum(phi, 0.0)
        upper = np.minimum(phi, 0.0)
        lower = -np.maximum(phi, 0.0)
    else:
        w = mesh.connectivity.interp_weight
        owner_diag = w * phi
        neighbor_diag = -(1.0 - w) * phi
        upper = (1.0 - w) * phi
        lower = -w * phi
    diag = mesh.gather_split(owner_diag, neighbor_diag)
    matrix = FvMatrix(
        psi, sparse.LduMatrix(mesh.connectivity, diag, upper, lower),
        dimensions=tools.units_product(flux.units, psi.units)
    )
    for patch in mesh.boundary_patches:
        phi_b = flux.boundary[patch.name][0]
        if psi.boundary[patch.name].kind == 'fixedValue':
            matrix.boundary_coeffs[patch.name] = \
                -phi_b * psi.boundary_values(patch)
        else:
            matrix.internal_coeffs[patch.name] = phi_b.copy()
    return matrix


def laplacian(gamma, psi):
    """
    Implicit diffusion operator div(gamma grad psi). The face diffusivity is
    interpolated inside the assembly loop.

    Parameters
    ----------
    gamma : CellField or float
        Non-negative diffusivity
    psi : CellField

    Returns
    -------
    FvMatrix
    """
    mesh = psi.mesh
    conn = mesh.connectivity
    gamma_cells = _values(gamma, mesh, 'gamma')
    if np.any(gamma_cells < 0):
        raise ValueError('negative diffusivity')
    w = conn.interp_weight
    coeff = (
        (w * gamma_cells[conn.owner] + (1.0 - w) * gamma_cells[conn.neighbor])
        * conn.delta_coeff * conn.face_area
    )
    diag = -mesh.gather_split(coeff, coeff)
    matrix = FvMatrix(
        psi, sparse.LduMatrix(conn, diag, coeff, coeff.copy()),
        dimensions=tools.units_product(_units(gamma), psi.units, 'm')
    )
    for patch in mesh.boundary_patches:
        if psi.boundary[patch.name].kind != 'fixedValue':
            continue
        gamma_b = _patch_values(gamma, patch)
        if np.any(gamma_b < 0):
            raise ValueError('negative diffusivity')
        coeff_b = gamma_b * patch.delta_coeff * patch.face_area
        matrix.internal_coeffs[patch.name] = -coeff_b
        matrix.boundary_coeffs[patch.name] = \
            -coeff_b * psi.boundary_values(patch)
    return matrix


def source_sp(coeff, psi):
    """Implicit source: adds coeff*V to the diagonal."""
    mesh = psi.mesh
    diag = _values(coeff, mesh, 'coeff') * mesh.cell_volume
    return FvMatrix(
        psi, sparse.LduMatrix(mesh.connectivity, diag),
        dimensions=tools.units_product(_units(coeff), psi.units, 'm**3')
    )


def source_su(value, psi=None):
    """Explicit source: adds value*V to the right-hand side."""
    if isinstance(value, CellField):
        mesh = value.mesh
        data = value.data
    elif psi is not None:
        mesh = psi.mesh
        data = np.full((psi.n_components, mesh.n_cells), float(value))
    else:
        raise ValueError('A constant source needs the unknown field')
    return FvMatrix(
        psi, source=data * mesh.cell_volume, mesh=mesh,
        dimensions=tools.units_product(_units(value), 'm**3')
    )


def combine(a, b, sign=1):
    """
    Entrywise a + sign*b.
    """
    if sign not in (1, -1):
        raise ValueError('sign must be +1 or -1')
    if a.mesh is not b.mesh:
        raise ValueError('Matrices belong to different meshes')
    if a.psi is not None and b.psi is not None and a.psi is not b.psi:
        raise ValueError('mismatched unknown field')
    if a.dimensions is not None and b.dimensions is not None and \
            a.dimensions.dimensionality != b.dimensions.dimensionality:
        raise ValueError('mismatched dimensions: {0} and {1}'.format(
            a.dimensions, b.dimensions))
    if a.n_components != b.n_components:
        raise ValueError('mismatched component counts')
    ldu = sparse.LduMatrix(
        a.ldu.addressing,
        a.ldu.diag + sign * b.ldu.diag,
        a.ldu.upper + sign * b.ldu.upper,
        a.ldu.lower + sign * b.ldu.lower
    )
    return FvMatrix(
        a.psi if a.psi is not None else b.psi,
        ldu,
        a.source + sign * b.source,
        {k: v + sign * b.internal_coeffs[k]
         for k, v in a.internal_coeffs.items()},
        {k: v + sign * b.boundary_coeffs[k]
         for k, v in a.boundary_coeffs.items()},
        a.dimensions if a.dimensions is not None else b.dimensions,
        a.mesh
    )


def flatten(matrix):
    return matrix.flatten()


def _off_diagonal_product(ldu, mesh, values):
    conn = mesh.connectivity
    return mesh.gather_split(
        ldu.upper * values[..., conn.neighbor],
        ldu.lower * values[..., conn.owner]
    )


def diag_a(matrix):
    """A = flattened diagonal / V, as a scalar CellField."""
    ldu, _ = matrix.flatten()
    mesh = matrix.mesh
    units = None
    if matrix.dimensions is not None and matrix.psi is not None and \
            matrix.psi.units is not None:
        units = matrix.dimensions / matrix.psi.units / tools.as_units('m**3')
    return CellField(
        mesh, ldu.diag / mesh.cell_volume,
        boundary={p.name: 'zeroGradient' for p in mesh.boundary_patches},
        name='A', units=units
    )


def h_of(matrix, psi=None):
    """
    H(psi) = (b - sum of off-diagonal coefficients * psi) / V, so that
    A*psi - H(psi) = (A_matrix psi - b) / V. The result carries the
    boundary closures of psi.
    """
    psi = matrix.psi if psi is None else psi
    ldu, rhs = matrix.flatten()
    mesh = matrix.mesh
    data = (rhs - _off_diagonal_product(ldu, mesh, psi.data)) / \
        mesh.cell_volume
    return CellField(
        mesh, data, boundary=psi.boundary, name='H',
        units=tools.units_product(matrix.dimensions, 'm**-3')
    )


def residual(matrix, psi=None):
    """Per-cell A psi - b, shape (n_components, n_cells)."""
    psi = matrix.psi if psi is None else psi
    ldu, rhs = matrix.flatten()
    return ldu.diag * psi.data + \
        _off_diagonal_product(ldu, matrix.mesh, psi.data) - rhs


def flux(matrix, psi=None):
    """
    Face flux of a Laplacian-type system: upper*psi_N - lower*psi_P on
    internal faces and internal*psi_P - boundary on patch faces.

    Returns
    -------
    deskflame.field.FaceField
    """
    psi = matrix.psi if psi is None else psi
    conn = matrix.mesh.connectivity
    data = (matrix.ldu.upper * psi.data[:, conn.neighbor] -
            matrix.ldu.lower * psi.data[:, conn.owner])
    boundary = {}
    for patch in matrix.mesh.boundary_patches:
        boundary[patch.name] = (
            matrix.internal_coeffs[patch.name] *
            psi.data[:, patch.face_cells] -
            matrix.boundary_coeffs[patch.name]
        )
    return FaceField(matrix.mesh, data, boundary, matrix.dimensions)


def solve(matrix, controls=None):
    """
    Solves the flattened system component by component and writes the
    result into ``matrix.psi``. Symmetric systems go to CG (plain or AMG
    preconditioned, per ``controls.solver_kind``), others to BiCGStab. A
    symmetric system with a nowhere-positive diagonal is negated first.

    Returns
    -------
    tuple
        (psi, SolverReport); the report holds per-component reports in
        ``components`` and the worst values at top level
    """
    if matrix.psi is None:
        raise ValueError('Matrix has no unknown field to solve for')
    controls = controls or sparse.SolverControls()
    ldu, rhs = matrix.flatten()
    csr = sparse.ldu_to_csr(ldu)
    if ldu.symmetric:
        kind = controls.solver_kind if controls.solver_kind != 'bicgstab' \
            else 'pcg'
        if np.all(ldu.diag <= 0) and np.any(ldu.diag < 0):
            csr = sparse.CsrMatrix(csr.row_ptr, csr.col_idx, -csr.vals)
            rhs = -rhs
    else:
        kind = 'bicgstab'
    run_controls = sparse.SolverControls(
        controls.abs_tol, controls.rel_tol, controls.max_iter, kind
    )
    psi = matrix.psi
    hierarchy = sparse.amg_setup(csr) if kind == 'amg-pcg' else None
    reports = []
    for c in range(matrix.n_components):
        if kind == 'amg-pcg':
            x, _, _, report = sparse.amg_pcg_solve(
                csr, rhs[c], psi.data[c], run_controls, hierarchy=hierarchy,
                return_report=True
            )
        else:
            x, _, _, report = sparse.solve(
                csr, rhs[c], psi.data[c], run_controls, return_report=True
            )
        psi.data[c] = x
        reports.append(report)
    worst = max(reports, key=lambda r: r.final_residual)
    summary = sparse.SolverReport(
        solver=kind,
        initial_residual=max(r.initial_residual for r in reports),
        final_residual=worst.final_residual,
        iterations=max(r.iterations for r in reports),
        converged=all(r.converged for r in reports),
        residual_history=worst.residual_history,
        normalized_residual=max(r.normalized_residual for r in reports)
    )
    summary.components = reports
    return psi, summary

# -*- coding: utf-8 -*-
"""
PURPOSE:
    Uniform Cartesian meshes with owner/neighbour face addressing and
    boundary-patch decomposition.

    Cells are numbered i-fastest: index = i + nx*j + nx*ny*k. Internal faces
    are sorted by (owner, neighbour) with owner < neighbour. Periodic sides
    are turned into internal faces that wrap around the domain; their
    patches are kept in the patch list for bookkeeping but hold no boundary
    faces of their own in the discretization.

CREATED BY:
    deskflame developers
"""

import numpy as np

SIDES = ('xmin', 'xmax', 'ymin', 'ymax', 'zmin', 'zmax')
PATCH_KINDS = ('fixedValue', 'zeroGradient', 'periodic', 'wall')
_OPPOSITE = {
    'xmin': 'xmax', 'xmax': 'xmin',
    'ymin': 'ymax', 'ymax': 'ymin',
    'zmin': 'zmax', 'zmax': 'zmin',
}


def _frozen(array, dtype=float):
    array = np.array(array, dtype=dtype)
    array.flags.writeable = False
    return array


class BoundaryPatch:
    """
    One side of the box. ``face_cells`` lists the adjacent cell of every
    boundary face in ascending cell order, so opposite sides line up face
    by face.
    """
    def __init__(
            self,
            name,
            kind,
            face_cells,
            face_area,
            delta_coeff,
            normal,
            face_centers,
            pair_patch=None
    ):
        if kind not in PATCH_KINDS:
            raise ValueError('Bad patch kind: {0}'.format(kind))
        self._name = name
        self._kind = kind
        self._face_cells = _frozen(face_cells, int)
        n_faces = len(self._face_cells)
        self._face_area = _frozen(np.broadcast_to(face_area, (n_faces,)))
        self._delta_coeff = _frozen(np.broadcast_to(delta_coeff, (n_faces,)))
        self._normal = _frozen(normal)
        self._face_centers = _frozen(face_centers)
        self._pair_patch = pair_patch

    @property
    def name(self):
        return self._name

    @property
    def kind(self):
        return self._kind

    @property
    def coupled(self):
        return self._kind == 'periodic'

    @property
    def face_cells(self):
        return self._face_cells

    @property
    def face_area(self):
        return self._face_area

    @property
    def delta_coeff(self):
        return self._delta_coeff

    @property
    def normal(self):
        return self._normal

    @property
    def face_centers(self):
        return self._face_centers

    @property
    def pair_patch(self):
        return self._pair_patch

    @property
    def n_faces(self):
        return len(self._face_cells)

    def __repr__(self):
        return 'BoundaryPatch({0!r}, {1!r}, n_faces={2})'.format(
            self._name, self._kind, self.n_faces
        )


class FaceConnectivity:
    """
    Internal-face addressing (the LDU addressing). ``face_normal`` points
    from owner to neighbour, which for wrap faces is the owner's outward
    normal on its low side.
    """
    def __init__(
            self,
            owner,
            neighbor,
            face_area,
            face_normal,
            delta_coeff,
            interp_weight,
            face_centers
    ):
        self._owner = _frozen(owner, int)
        self._neighbor = _frozen(neighbor, int)
        self._face_area = _frozen(face_area)
        self._face_normal = _frozen(face_normal)
        self._delta_coeff = _frozen(delta_coeff)
        self._interp_weight = _frozen(interp_weight)
        self._face_centers = _frozen(face_centers)

    @property
    def n_internal_faces(self):
        return len(self._owner)

    @property
    def owner(self):
        return self._owner

    @property
    def neighbor(self):
        return self._neighbor

    @property
    def face_area(self):
        return self._face_area

    @property
    def face_normal(self):
        return self._face_normal

    @property
    def area_vectors(self):
        return self._face_area[:, None] * self._face_normal

    @property
    def delta_coeff(self):
        return self._delta_coeff

    @property
    def interp_weight(self):
        return self._interp_weight

    @property
    def face_centers(self):
        return self._face_centers


class StructuredMesh:
    """
    Uniform Cartesian mesh. Built by :func:`build_cartesian_mesh`; holds its
    connectivity and patches and is immutable afterwards.
    """
    def __init__(self, dims, lengths):
        self._dims = tuple(int(n) for n in dims)
        self._lengths = tuple(float(length) for length in lengths)
        self._spacing = tuple(
            length / n for length, n in zip(self._lengths, self._dims)
        )
        nx, ny, nz = self._dims
        dx, dy, dz = self._spacing
        i, j, k = np.meshgrid(
            np.arange(nx), np.arange(ny), np.arange(nz), indexing='ij'
        )
        centers = np.stack([
            (i.ravel(order='F') + 0.5) * dx,
            (j.ravel(order='F') + 0.5) * dy,
            (k.ravel(order='F') + 0.5) * dz,
        ], axis=1)
        self._cell_centers = _frozen(centers)
        self._connectivity = None
        self._patches = ()
        self._face_table = None
        self._face_signs = None

    @property
    def dims(self):
        return self._dims

    @property
    def lengths(self):
        return self._lengths

    @property
    def spacing(self):
        return self._spacing

    @property
    def n_cells(self):
        return self._dims[0] * self._dims[1] * self._dims[2]

    @property
    def cell_volume(self):
        return self._spacing[0] * self._spacing[1] * self._spacing[2]

    @property
    def cell_centers(self):
        return self._cell_centers

    @property
    def connectivity(self):
        return self._connectivity

    @property
    def patches(self):
        return self._patches

    @property
    def boundary_patches(self):
        """Non-periodic patches, in side order."""
        return tuple(p for p in self._patches if not p.coupled)

    @property
    def n_boundary_faces(self):
        return sum(p.n_faces for p in self.boundary_patches)

    @property
    def periodic_axes(self):
        return tuple(
            axis for axis in range(3)
            if self.patch(SIDES[2 * axis]).coupled
        )

    def patch(self, name):
        for patch in self._patches:
            if patch.name == name:
                return patch
        raise KeyError('No patch named {0}'.format(name))

    def cell_index(self, i, j, k):
        nx, ny, _ = self._dims
        return i + nx * j + nx * ny * k

    def cell_ijk(self, index):
        if not 0 <= index < self.n_cells:
            raise IndexError('Cell index {0} out of range'.format(index))
        nx, ny, _ = self._dims
        return index % nx, (index // nx) % ny, index // (nx * ny)

    def gather(self, face_values, patch_values=None, signed=True):
        """
        Accumulates face values into cells, visiting each cell's own faces
        in a fixed order.

        Parameters
        ----------
        face_values : np.ndarray
            Shape (..., n_internal_faces)
        patch_values : dict or None
            Patch name -> array of shape (..., n_faces), added after the
            internal faces in side order. Periodic patches are ignored.
        signed : bool
            If True the owner receives +value and the neighbour -value;
            otherwise both receive +value.

        Returns
        -------
        np.ndarray
            Shape (..., n_cells)
        """
        face_values = np.asarray(face_values, dtype=float)
        neighbor_values = -face_values if signed else face_values
        result = self.gather_split(face_values, neighbor_values)
        if patch_values:
            for patch in self.boundary_patches:
                if patch.name in patch_values:
                    result[..., patch.face_cells] += patch_values[patch.name]
        return result

    def gather_split(self, owner_values, neighbor_values):
        """
        Per-cell sum where the owner of face f receives owner_values[f] and
        the neighbour receives neighbor_values[f].
        """
        owner_values = np.asarray(owner_values, dtype=float)
        neighbor_values = np.asarray(neighbor_values, dtype=float)
        n_faces = self._connectivity.n_internal_faces
        if owner_values.shape[-1] != n_faces or \
                neighbor_values.shape != owner_values.shape:
            raise ValueError('Face value count does not match mesh')
        pad = np.zeros(owner_values.shape[:-1] + (1,))
        padded_owner = np.concatenate([owner_values, pad], axis=-1)
        padded_neighbor = np.concatenate([neighbor_values, pad], axis=-1)
        result = np.zeros(owner_values.shape[:-1] + (self.n_cells,))
        for slot in range(self._face_table.shape[1]):
            faces = self._face_table[:, slot]
            result += np.where(
                self._face_signs[:, slot] > 0,
                padded_owner[..., faces],
                padded_neighbor[..., faces]
            )
        return result

    def _build_face_table(self):
        conn = self._connectivity
        n_faces = conn.n_internal_faces
        cells = np.concatenate([conn.owner, conn.neighbor])
        faces = np.concatenate([np.arange(n_faces), np.arange(n_faces)])
        signs = np.concatenate([np.ones(n_faces), -np.ones(n_faces)])
        order = np.lexsort((faces, cells))
        cells, faces, signs = cells[order], faces[order], signs[order]
        counts = np.bincount(cells, minlength=self.n_cells)
        width = max(int(counts.max()) if len(counts) else 0, 1)
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        slots = np.arange(len(cells)) - starts[cells]
        table = np.full((self.n_cells, width), n_faces, dtype=int)
        table_signs = np.zeros((self.n_cells, width))
        table[cells, slots] = faces
        table_signs[cells, slots] = signs
        self._face_table = _frozen(table, int)
        self._face_signs = _frozen(table_signs)


def _axis_faces(mesh, axis, periodic):
    """Internal faces normal to one axis, before global sorting."""
    dims = mesh.dims
    dx = mesh.spacing
    n = dims[axis]
    ijk = np.stack(
        np.meshgrid(*[np.arange(d) for d in dims], indexing='ij'),
        axis=-1
    ).reshape(-1, 3)
    low = ijk[ijk[:, axis] < n - 1]
    high = low.copy()
    high[:, axis] += 1
    owner = [mesh.cell_index(*low.T)]
    neighbor = [mesh.cell_index(*high.T)]
    sign = [np.ones(len(low))]
    position = [(low[:, axis] + 1) * dx[axis]]
    rest = [low]
    if periodic:
        first = ijk[ijk[:, axis] == 0]
        last = first.copy()
        last[:, axis] = n - 1
        owner.append(mesh.cell_index(*first.T))
        neighbor.append(mesh.cell_index(*last.T))
        sign.append(-np.ones(len(first)))
        position.append(np.zeros(len(first)))
        rest.append(first)
    owner = np.concatenate(owner)
    neighbor = np.concatenate(neighbor)
    sign = np.concatenate(sign)
    rest = np.concatenate(rest).astype(float)
    centers = (rest + 0.5) * np.asarray(dx)
    centers[:, axis] = np.concatenate(position)
    normals = np.zeros((len(owner), 3))
    normals[:, axis] = sign
    return owner, neighbor, normals, centers


def build_cartesian_mesh(dims, lengths, patch_spec=None):
    """
    Builds a uniform Cartesian mesh.

    Parameters
    ----------
    dims : tuple of int
        Cell counts (nx, ny, nz)
    lengths : tuple of float
        Domain edge lengths in m
    patch_spec : dict or None
        Side name -> patch kind. Missing sides default to zeroGradient.
        Periodic sides must come in opposing pairs.

    Returns
    -------
    tuple
        (StructuredMesh, FaceConnectivity, tuple of BoundaryPatch)
    """
    dims = tuple(dims)
    lengths = tuple(lengths)
    if len(dims) != 3 or len(lengths) != 3:
        raise ValueError('dims and lengths need three entries')
    if any(int(n) != n for n in dims):
        raise TypeError('Cell counts must be integers')
    if any(n < 1 for n in dims):
        raise ValueError('zero-extent dimension in {0}'.format(dims))
    if any(not length > 0 for length in lengths):
        raise ValueError('Domain lengths must be > 0')

    patch_spec = dict(patch_spec or {})
    unknown = set(patch_spec) - set(SIDES)
    if unknown:
        raise ValueError('Unknown sides: {0}'.format(sorted(unknown)))
    kinds = {side: patch_spec.get(side, 'zeroGradient') for side in SIDES}
    for side, kind in kinds.items():
        if kind not in PATCH_KINDS:
            raise ValueError('Bad patch kind for {0}: {1}'.format(side, kind))
        if (kind == 'periodic') != (kinds[_OPPOSITE[side]] == 'periodic'):
            raise ValueError(
                'mismatched periodic pairing: {0} and {1}'.format(
                    side, _OPPOSITE[side]
                )
            )

    mesh = StructuredMesh(dims, lengths)
    dx = mesh.spacing

    owners, neighbors, normals, centers, areas, deltas = [], [], [], [], [], []
    for axis in range(3):
        periodic = kinds[SIDES[2 * axis]] == 'periodic'
        if periodic and dims[axis] < 2:
            raise ValueError(
                'periodic direction {0} needs at least 2 cells'.format(
                    'xyz'[axis]
                )
            )
        own, nei, nrm, ctr = _axis_faces(mesh, axis, periodic)
        face_area = np.prod([dx[a] for a in range(3) if a != axis])
        owners.append(np.minimum(own, nei))
        neighbors.append(np.maximum(own, nei))
        normals.append(nrm)
        centers.append(ctr)
        areas.append(np.full(len(own), face_area))
        deltas.append(np.full(len(own), 1.0 / dx[axis]))

    owner = np.concatenate(owners)
    neighbor = np.concatenate(neighbors)
    order = np.lexsort((neighbor, owner))
    connectivity = FaceConnectivity(
        owner=owner[order],
        neighbor=neighbor[order],
        face_area=np.concatenate(areas)[order],
        face_normal=np.concatenate(normals)[order],
        delta_coeff=np.concatenate(deltas)[order],
        interp_weight=np.full(len(owner), 0.5),
        face_centers=np.concatenate(centers)[order],
    )

    patches = []
    for side in SIDES:
        axis = 'xyz'.index(side[0])
        high = side.endswith('max')
        on_side = np.isclose(
            mesh.cell_centers[:, axis],
            (dims[axis] - 0.5) * dx[axis] if high else 0.5 * dx[axis]
        )
        face_cells = np.flatnonzero(on_side)
        normal = np.zeros(3)
        normal[axis] = 1.0 if high else -1.0
        face_centers = mesh.cell_centers[face_cells].copy()
        face_centers[:, axis] = lengths[axis] if high else 0.0
        kind = kinds[side]
        patches.append(BoundaryPatch(
            name=side,
            kind=kind,
            face_cells=face_cells,
            face_area=np.prod([dx[a] for a in range(3) if a != axis]),
            delta_coeff=2.0 / dx[axis],
            normal=normal,
            face_centers=face_centers,
            pair_patch=_OPPOSITE[side] if kind == 'periodic' else None,
        ))

    mesh._connectivity = connectivity
    mesh._patches = tuple(patches)
    mesh._build_face_table()
    return mesh, connectivity, mesh.patches


def patch_face_count(patch):
    return patch.n_faces


def face_geometry(mesh, face):
    """
    Geometry of one face. Internal faces are numbered first, then the
    faces of the non-periodic patches in side order.

    Returns
    -------
    tuple
        (area in m^2, unit normal, deltaCoeff in 1/m)
    """
    conn = mesh.connectivity
    if face < 0:
        raise IndexError('Face index {0} out of range'.format(face))
    if face < conn.n_internal_faces:
        return (conn.face_area[face], conn.face_normal[face].copy(),
                conn.delta_coeff[face])
    local = face - conn.n_internal_faces
    for patch in mesh.boundary_patches:
        if local < patch.n_faces:
            return (patch.face_area[local], patch.normal.copy(),
                    patch.delta_coeff[local])
        local -= patch.n_faces
    raise IndexError('Face index {0} out of range'.format(face))

# -*- coding: utf-8 -*-
"""
PURPOSE:
    Unit tests for mesh.py

CREATED BY:
    deskflame developers
"""

import numpy as np
import pytest
from .. import mesh


PERIODIC = {side: 'periodic' for side in mesh.SIDES}


class TestBuildCartesianMesh:
    @staticmethod
    def test_fully_periodic_face_count():
        m, conn, patches = mesh.build_cartesian_mesh(
            (4, 3, 2), (1.0, 1.0, 1.0), PERIODIC
        )
        assert m.n_cells == 24
        assert conn.n_internal_faces == 3 * 24
        assert m.boundary_patches == ()
        assert m.periodic_axes == (0, 1, 2)
        assert len(patches) == 6

    @staticmethod
    def test_bounded_face_count():
        m, conn, _ = mesh.build_cartesian_mesh((4, 3, 2), (4., 3., 2.))
        assert conn.n_internal_faces == 3 * 3 * 2 + 4 * 2 * 2 + 4 * 3 * 1
        assert m.n_boundary_faces == 2 * (3 * 2 + 4 * 2 + 4 * 3)
        assert m.periodic_axes == ()

    @staticmethod
    def test_owner_ordering():
        _, conn, _ = mesh.build_cartesian_mesh(
            (3, 3, 3), (1., 1., 1.), PERIODIC
        )
        assert np.all(conn.owner < conn.neighbor)
        keys = conn.owner * 1000 + conn.neighbor
        assert np.all(np.diff(keys) >= 0)

    @staticmethod
    def test_cell_numbering_i_fastest():
        m, _, _ = mesh.build_cartesian_mesh((4, 3, 2), (4., 3., 2.))
        assert m.cell_index(1, 2, 1) == 1 + 4 * 2 + 12
        assert m.cell_ijk(21) == (1, 2, 1)
        assert np.allclose(m.cell_centers[21], [1.5, 2.5, 1.5])

    @staticmethod
    def test_geometry():
        m, conn, _ = mesh.build_cartesian_mesh(
            (4, 2, 1), (2.0, 1.0, 0.5), {'zmin': 'wall', 'zmax': 'wall'}
        )
        assert m.spacing == (0.5, 0.5, 0.5)
        assert m.cell_volume == pytest.approx(0.125)
        assert np.allclose(conn.face_area, 0.25)
        assert np.allclose(conn.delta_coeff, 2.0)
        assert np.allclose(conn.interp_weight, 0.5)
        zmin = m.patch('zmin')
        assert zmin.kind == 'wall'
        assert np.allclose(zmin.delta_coeff, 4.0)
        assert np.allclose(zmin.normal, [0, 0, -1])

    @staticmethod
    def test_closed_box_area_vectors_sum_to_zero():
        m, conn, _ = mesh.build_cartesian_mesh((3, 2, 2), (3., 2., 2.))
        total = m.gather(conn.area_vectors.T, {
            patch.name: patch.face_area[None, :] * patch.normal[:, None]
            for patch in m.boundary_patches
        })
        assert np.allclose(total, 0.0)

    @staticmethod
    def test_periodic_wrap_normals():
        m, conn, _ = mesh.build_cartesian_mesh(
            (4, 1, 1), (4., 1., 1.), {'xmin': 'periodic', 'xmax': 'periodic'}
        )
        wrap = np.flatnonzero((conn.owner == 0) & (conn.neighbor == 3))
        assert len(wrap) == 1
        assert np.allclose(conn.face_normal[wrap[0]], [-1, 0, 0])
        assert m.patch('xmin').pair_patch == 'xmax'

    @staticmethod
    def test_zero_extent_dimension():
        with pytest.raises(
                ValueError,
                match='zero-extent dimension'
        ):
            mesh.build_cartesian_mesh((4, 0, 1), (1., 1., 1.))

    @staticmethod
    def test_mismatched_periodic():
        with pytest.raises(
                ValueError,
                match='mismatched periodic pairing'
        ):
            mesh.build_cartesian_mesh(
                (4, 4, 1), (1., 1., 1.), {'xmin': 'periodic'}
            )

    @staticmethod
    def test_periodic_needs_two_cells():
        with pytest.raises(
                ValueError,
                match='needs at least 2 cells'
        ):
            mesh.build_cartesian_mesh(
                (4, 4, 1), (1., 1., 1.),
                {'zmin': 'periodic', 'zmax': 'periodic'}
            )

    @staticmethod
    def test_bad_length():
        with pytest.raises(
                ValueError,
                match='lengths must be > 0'
        ):
            mesh.build_cartesian_mesh((2, 2, 2), (1., -1., 1.))

    @staticmethod
    def test_bad_patch_kind():
        with pytest.raises(
                ValueError,
                match='Bad patch kind'
        ):
            mesh.build_cartesian_mesh((2, 2, 2), (1., 1., 1.),
                                      {'xmin': 'slip'})


class TestGather:
    @staticmethod
    def test_signed_gather_of_constant_is_boundary_only():
        m, conn, _ = mesh.build_cartesian_mesh(
            (3, 3, 3), (1., 1., 1.), PERIODIC
        )
        result = m.gather(np.ones(conn.n_internal_faces))
        assert np.allclose(result, 0.0)

    @staticmethod
    def test_unsigned_gather_counts_faces():
        m, conn, _ = mesh.build_cartesian_mesh(
            (3, 3, 3), (1., 1., 1.), PERIODIC
        )
        result = m.gather(np.ones(conn.n_internal_faces), signed=False)
        assert np.allclose(result, 6.0)

    @staticmethod
    def test_wrong_face_count():
        m, conn, _ = mesh.build_cartesian_mesh((2, 2, 2), (1., 1., 1.))
        with pytest.raises(
                ValueError,
                match='Face value count'
        ):
            m.gather(np.ones(conn.n_internal_faces + 1))


class TestFaceGeometry:
    @staticmethod
    def test_boundary_face_numbering():
        m, conn, _ = mesh.build_cartesian_mesh((2, 2, 2), (2., 2., 2.))
        area, normal, delta = mesh.face_geometry(m, conn.n_internal_faces)
        assert area == pytest.approx(1.0)
        assert np.allclose(normal, [-1, 0, 0])
        assert delta == pytest.approx(2.0)

    @staticmethod
    def test_out_of_range():
        m, conn, _ = mesh.build_cartesian_mesh((2, 2, 2), (2., 2., 2.))
        with pytest.raises(IndexError):
            mesh.face_geometry(
                m, conn.n_internal_faces + m.n_boundary_faces
            )

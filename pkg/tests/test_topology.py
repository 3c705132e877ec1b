import pytest

from hexflow.errors import NonManifold, NotHyperbolic, RepeatedCorner, TopologyError
from hexflow.fixtures import OCTA_FACES, PANTS_FACES, TETRA_FACES
from hexflow.topology import build_triangulation, corners_at


def test_tetra_counts():
    tri = build_triangulation(TETRA_FACES)
    assert (tri.n_boundaries, tri.n_edges, tri.n_faces) == (4, 6, 4)
    assert tri.euler_characteristic == 2
    assert tri.surface_euler_characteristic == -2


def test_edge_ids_sorted_by_ends():
    tri = build_triangulation(TETRA_FACES)
    assert [e.ends for e in tri.edges] == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_face_edges_are_opposite_corners():
    tri = build_triangulation(OCTA_FACES)
    for f in tri.faces:
        for r in range(3):
            ends = tri.edges[f.edges[r]].ends
            assert set(ends) == set(f.corners) - {f.corners[r]}


def test_single_face_is_non_manifold():
    with pytest.raises(NonManifold):
        build_triangulation([[0, 1, 2]])


def test_repeated_corner():
    with pytest.raises(RepeatedCorner):
        build_triangulation([[0, 0, 1], [0, 1, 2]])


def test_edge_in_three_faces():
    with pytest.raises(NonManifold):
        build_triangulation([[0, 1, 2], [0, 1, 2], [0, 1, 3]])


def test_surface_chi_is_minus_half_faces():
    # each face has three edges and each edge two faces, so chi - N = F - E = -F/2;
    # the NotHyperbolic guard can never fire on manifold input
    for faces in (TETRA_FACES, OCTA_FACES, PANTS_FACES):
        tri = build_triangulation(faces)
        assert tri.surface_euler_characteristic == -tri.n_faces // 2


def test_corners_at():
    tri = build_triangulation(TETRA_FACES)
    assert corners_at(tri, 0) == ((0, 0), (1, 0), (2, 0))
    assert len(tri.corners_at(3)) == 3
    assert sum(len(tri.corners_at(i)) for i in range(4)) == 3 * tri.n_faces


def test_corner_counts_octahedron():
    tri = build_triangulation(OCTA_FACES)
    assert sum(len(tri.corners_at(i)) for i in range(tri.n_boundaries)) == 3 * tri.n_faces
    assert all(len(tri.corners_at(i)) == 4 for i in range(6))


def test_deterministic():
    a = build_triangulation(OCTA_FACES)
    b = build_triangulation([list(f) for f in OCTA_FACES])
    assert a.edges == b.edges
    assert a.faces == b.faces
    assert a.corner_index == b.corner_index


def test_round_trip():
    tri = build_triangulation(OCTA_FACES)
    assert tri.face_list() == [list(f) for f in OCTA_FACES]
    again = build_triangulation(tri.face_list())
    assert again.edges == tri.edges


def test_pants_multi_face_pair():
    tri = build_triangulation(PANTS_FACES)
    assert (tri.n_boundaries, tri.n_edges, tri.n_faces) == (3, 3, 2)
    assert tri.surface_euler_characteristic == -1


def test_labelled_multi_edges():
    faces = [[0, 1, 2]] * 4
    labels = [["a"] * 3, ["a"] * 3, ["b"] * 3, ["b"] * 3]
    tri = build_triangulation(faces, face_edges=labels)
    assert tri.n_edges == 6
    assert [e.ends for e in tri.edges].count((0, 1)) == 2
    assert tri.faces[0].edges != tri.faces[2].edges
    assert tri.surface_euler_characteristic == -2


def test_labelled_unmatched():
    with pytest.raises(NonManifold):
        build_triangulation([[0, 1, 2]] * 2, face_edges=[["a"] * 3, ["b"] * 3])


def test_index_out_of_range():
    with pytest.raises(TopologyError):
        build_triangulation(TETRA_FACES, n_boundaries=3)


def test_isolated_boundary():
    with pytest.raises(TopologyError, match="no face"):
        build_triangulation(TETRA_FACES, n_boundaries=5)


def test_adjacency():
    tri = build_triangulation(TETRA_FACES)
    assert tri.adjacency() == [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
    assert tri.edges[0].other(1) == 0

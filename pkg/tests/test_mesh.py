import numpy as np
import pytest

from posmapkit.mesh import (
    LandmarkSet,
    Mesh,
    MeshError,
    PointCloud,
    load_landmark_indices,
    load_mesh,
    mesh_bbox,
    save_landmark_indices,
    save_mesh,
)


def test_load_single_triangle(tmp_path):
    p = tmp_path / "tri.mesh"
    p.write_text("# a triangle\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    m = load_mesh(p)
    assert m.num_vertices == 3
    assert m.num_triangles == 1
    assert m.uv is None
    np.testing.assert_array_equal(m.triangles, [[0, 1, 2]])


def test_load_index_out_of_range(tmp_path):
    p = tmp_path / "bad.mesh"
    p.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 6\n")
    with pytest.raises(MeshError, match="out of range"):
        load_mesh(p)


def test_load_non_triangle_face(tmp_path):
    p = tmp_path / "quad.mesh"
    p.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    with pytest.raises(MeshError, match="non-triangle"):
        load_mesh(p)


def test_parse_error_reports_line_number(tmp_path):
    p = tmp_path / "garbage.mesh"
    p.write_text("v 0 0 0\nv 1 0 zebra\n")
    with pytest.raises(MeshError, match="line 2"):
        load_mesh(p)


def test_round_trip_random_mesh(tmp_path):
    rng = np.random.default_rng(7)
    verts = rng.normal(size=(100, 3)) * 37.5
    tris = rng.integers(0, 100, size=(50, 3))
    uv = rng.uniform(0, 1, size=(100, 2))
    m = Mesh(verts, tris, uv)
    p = tmp_path / "rt.mesh"
    save_mesh(m, p)
    m2 = load_mesh(p)
    # repr-based float formatting makes the round trip exact
    np.testing.assert_array_equal(m2.vertices, m.vertices)
    np.testing.assert_array_equal(m2.triangles, m.triangles)
    np.testing.assert_array_equal(m2.uv, m.uv)


def test_save_without_triangles(tmp_path):
    m = Mesh(np.array([[1.0, 2.0, 3.0]]), np.zeros((0, 3), dtype=int))
    p = tmp_path / "verts.mesh"
    save_mesh(m, p)
    text = p.read_text()
    assert "f " not in text
    assert load_mesh(p).num_vertices == 1


def test_save_unwritable_path():
    m = Mesh(np.array([[0.0, 0.0, 0.0]]), np.zeros((0, 3), dtype=int))
    with pytest.raises(OSError):
        save_mesh(m, "/nonexistent-dir/nope.mesh")


def test_mesh_invariants():
    with pytest.raises(MeshError):
        Mesh(np.zeros((3, 3)), np.array([[0, 1, 5]]))
    with pytest.raises(MeshError):
        Mesh(np.zeros((3, 3)), np.array([[0, 1, 2]]), uv=np.array([[0.0, 1.5]] * 3))
    with pytest.raises(MeshError):
        Mesh(np.zeros((3, 3)), np.array([[0, 1, 2]]), uv=np.zeros((2, 2)))
    with pytest.raises(MeshError):
        Mesh(np.zeros((3, 3)), np.array([[0, 1, 2]]), landmark_indices=np.arange(5))


def test_landmark_sidecar_round_trip(tmp_path):
    idx = np.arange(68) * 3
    p = tmp_path / "landmarks.txt"
    save_landmark_indices(idx, p)
    np.testing.assert_array_equal(load_landmark_indices(p), idx)
    p.write_text("1\n2\n3\n")
    with pytest.raises(MeshError, match="expected 68"):
        load_landmark_indices(p)


def test_point_cloud_rejects_nan():
    with pytest.raises(MeshError):
        PointCloud(np.array([[0.0, np.nan, 0.0]]))


def test_landmark_set_size_and_eye_corners():
    with pytest.raises(MeshError):
        LandmarkSet(np.zeros((10, 3)))
    pts = np.arange(68 * 3, dtype=float).reshape(68, 3)
    ls = LandmarkSet(pts)
    right, left = ls.outer_eye_corners()
    np.testing.assert_array_equal(right, pts[36])
    np.testing.assert_array_equal(left, pts[45])


def test_bbox_basic():
    m = Mesh(np.array([[0.0, 0.0, 0.0], [2.0, 4.0, 1.0]]), np.zeros((0, 3), dtype=int))
    assert mesh_bbox(m) == ((0.0, 0.0), (2.0, 4.0))


def test_bbox_single_vertex():
    m = Mesh(np.array([[1.0, 1.0, 1.0]]), np.zeros((0, 3), dtype=int))
    assert mesh_bbox(m) == ((1.0, 1.0), (1.0, 1.0))


def test_bbox_empty_mesh():
    m = Mesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=int))
    with pytest.raises(MeshError):
        mesh_bbox(m)


def test_bbox_matches_brute_force_scan():
    rng = np.random.default_rng(11)
    verts = rng.normal(size=(1000, 3)) * 100
    m = Mesh(verts, np.zeros((0, 3), dtype=int))
    (minx, miny), (maxx, maxy) = mesh_bbox(m)
    # brute-force scan oracle
    bx0 = by0 = np.inf
    bx1 = by1 = -np.inf
    for x, y, _ in verts:
        bx0, by0 = min(bx0, x), min(by0, y)
        bx1, by1 = max(bx1, x), max(by1, y)
    assert (minx, miny, maxx, maxy) == (bx0, by0, bx1, by1)


def test_bbox_translation_equivariance():
    rng = np.random.default_rng(3)
    verts = rng.normal(size=(50, 3))
    m = Mesh(verts, np.zeros((0, 3), dtype=int))
    t = np.array([12.5, -3.25])
    shifted = verts.copy()
    shifted[:, :2] += t
    m2 = Mesh(shifted, m.triangles)
    b1 = np.array(mesh_bbox(m))
    b2 = np.array(mesh_bbox(m2))
    np.testing.assert_allclose(b2, b1 + t, rtol=0, atol=1e-12)

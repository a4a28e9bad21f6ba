import numpy as np
import pytest
from scipy.spatial import Delaunay

from posmapkit.mesh import Mesh


def grid_mesh(nx: int, ny: int, z_fn=None, scale: float = 1.0) -> Mesh:
    """Regular (nx x ny)-vertex grid over [0, scale]^2, consistently oriented."""
    xs = np.linspace(0.0, scale, nx)
    ys = np.linspace(0.0, scale, ny)
    xg, yg = np.meshgrid(xs, ys)
    z = np.zeros_like(xg) if z_fn is None else z_fn(xg, yg)
    verts = np.column_stack([xg.ravel(), yg.ravel(), z.ravel()])
    tris = []
    for r in range(ny - 1):
        for c in range(nx - 1):
            i00 = r * nx + c
            i10 = r * nx + c + 1
            i01 = (r + 1) * nx + c
            i11 = (r + 1) * nx + c + 1
            tris.append([i00, i10, i11])
            tris.append([i00, i11, i01])
    return Mesh(verts, np.asarray(tris))


def random_disk_mesh(rng: np.random.Generator, n_side: int = 8) -> Mesh:
    """Jittered-grid Delaunay triangulation lifted by a smooth height field."""
    xs, ys = np.meshgrid(np.linspace(0, 1, n_side), np.linspace(0, 1, n_side))
    pts = np.column_stack([xs.ravel(), ys.ravel()])
    pts += rng.uniform(-0.25, 0.25, size=pts.shape) / (n_side - 1)
    tri = Delaunay(pts)
    faces = tri.simplices.copy()
    # enforce one orientation
    a, b, c = pts[faces[:, 0]], pts[faces[:, 1]], pts[faces[:, 2]]
    signed = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    flip = signed < 0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    cx, cy, amp = rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.1, 0.4)
    z = amp * np.exp(-((pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2) / 0.1)
    verts = np.column_stack([pts, z])
    return Mesh(verts, faces)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)

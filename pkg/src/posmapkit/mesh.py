"""Triangle-mesh and point-cloud types plus text-format IO.

Coordinate convention used throughout the package: left-handed image-space
coordinates with the origin at the upper-left corner of the image, +x
pointing right, +y pointing down, and z pointing toward the viewer.  x and
y are in pixels; z is a pixels-equivalent depth.

The text format is line oriented and hand editable:

    # comment
    v x y z          vertex position
    vt u v           per-vertex UV (i-th vt pairs with i-th v)
    f i j k          triangle, 1-based vertex indices

Landmark tables (68 vertex indices, iBUG ordering) live in a sidecar text
file with one integer per line.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

NUM_LANDMARKS = 68

# iBUG 68-point scheme, 1-based landmark numbers of the outer eye corners.
OUTER_EYE_RIGHT = 37  # subject's right eye (image left)
OUTER_EYE_LEFT = 46


class MeshError(ValueError):
    """Invalid mesh data or unparsable mesh file."""


@dataclass(frozen=True)
class Mesh:
    """Immutable triangle mesh.

    vertices: (n, 3) float64, image-space units.
    triangles: (m, 3) int, indices into vertices.
    uv: optional (n, 2) float64 in [0, 1]^2.
    landmark_indices: optional (68,) int vertex indices.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    uv: Optional[np.ndarray] = None
    landmark_indices: Optional[np.ndarray] = None

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise MeshError("triangle index out of range")
        if self.uv is not None:
            uv = np.asarray(self.uv, dtype=np.float64).reshape(-1, 2)
            if len(uv) != len(v):
                raise MeshError("uv count %d != vertex count %d" % (len(uv), len(v)))
            if uv.size and (uv.min() < 0.0 or uv.max() > 1.0):
                raise MeshError("uv coordinates outside [0, 1]")
            object.__setattr__(self, "uv", uv)
        if self.landmark_indices is not None:
            lm = np.asarray(self.landmark_indices, dtype=np.int64).reshape(-1)
            if len(lm) != NUM_LANDMARKS:
                raise MeshError("expected %d landmark indices, got %d" % (NUM_LANDMARKS, len(lm)))
            if lm.size and (lm.min() < 0 or lm.max() >= len(v)):
                raise MeshError("landmark index out of range")
            object.__setattr__(self, "landmark_indices", lm)
        for arr in (self.vertices, self.triangles, self.uv, self.landmark_indices):
            if arr is not None:
                arr.flags.writeable = False

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def with_uv(self, uv: np.ndarray) -> "Mesh":
        return Mesh(self.vertices, self.triangles, uv, self.landmark_indices)

    def with_landmarks(self, indices: np.ndarray) -> "Mesh":
        return Mesh(self.vertices, self.triangles, self.uv, indices)

    def landmark_positions(self) -> np.ndarray:
        if self.landmark_indices is None:
            raise MeshError("mesh has no landmark table")
        return self.vertices[self.landmark_indices]


@dataclass(frozen=True)
class PointCloud:
    """Unordered set of 3D points; coordinates must be finite."""

    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        if p.size and not np.all(np.isfinite(p)):
            raise MeshError("point cloud contains non-finite coordinates")
        object.__setattr__(self, "points", p)
        p.flags.writeable = False

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class LandmarkSet:
    """Exactly 68 labeled (x, y, z) points in iBUG order."""

    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        if len(p) != NUM_LANDMARKS:
            raise MeshError("landmark set must have %d points, got %d" % (NUM_LANDMARKS, len(p)))
        object.__setattr__(self, "points", p)
        p.flags.writeable = False

    def outer_eye_corners(self) -> tuple[np.ndarray, np.ndarray]:
        """(right-eye outer corner, left-eye outer corner) as 3-vectors."""
        return self.points[OUTER_EYE_RIGHT - 1], self.points[OUTER_EYE_LEFT - 1]


def load_mesh(path) -> Mesh:
    """Parse a mesh text file; raises MeshError with the offending line number."""
    vertices = []
    uvs = []
    triangles = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            tag, args = parts[0], parts[1:]
            try:
                if tag == "v":
                    if len(args) != 3:
                        raise ValueError("expected 3 coordinates")
                    vertices.append([float(a) for a in args])
                elif tag == "vt":
                    if len(args) != 2:
                        raise ValueError("expected 2 coordinates")
                    uvs.append([float(a) for a in args])
                elif tag == "f":
                    if len(args) != 3:
                        raise MeshError("%s: line %d: non-triangle face with %d indices" % (path, lineno, len(args)))
                    triangles.append([int(a) - 1 for a in args])
                else:
                    raise ValueError("unknown record '%s'" % tag)
            except MeshError:
                raise
            except ValueError as exc:
                raise MeshError("%s: line %d: %s" % (path, lineno, exc)) from None
    if uvs and len(uvs) != len(vertices):
        raise MeshError("%s: %d vt records for %d vertices" % (path, len(uvs), len(vertices)))
    tri = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    if tri.size and (tri.min() < 0 or tri.max() >= len(vertices)):
        raise MeshError("%s: face index out of range (vertex count %d)" % (path, len(vertices)))
    return Mesh(
        np.asarray(vertices, dtype=np.float64).reshape(-1, 3),
        tri,
        np.asarray(uvs, dtype=np.float64).reshape(-1, 2) if uvs else None,
    )


def save_mesh(mesh: Mesh, path) -> None:
    """Write the text format; floats use repr so load(save(m)) is exact."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, z in mesh.vertices.tolist():
            fh.write("v %r %r %r\n" % (x, y, z))
        if mesh.uv is not None:
            for u, v in mesh.uv.tolist():
                fh.write("vt %r %r\n" % (u, v))
        for i, j, k in mesh.triangles:
            fh.write("f %d %d %d\n" % (i + 1, j + 1, k + 1))


def load_landmark_indices(path) -> np.ndarray:
    """Read the 68-line sidecar table of vertex indices."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise MeshError("%s: line %d: not an integer" % (path, lineno)) from None
    if len(values) != NUM_LANDMARKS:
        raise MeshError("%s: expected %d landmark indices, got %d" % (path, NUM_LANDMARKS, len(values)))
    return np.asarray(values, dtype=np.int64)


def save_landmark_indices(indices: np.ndarray, path) -> None:
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    if len(indices) != NUM_LANDMARKS:
        raise MeshError("expected %d landmark indices, got %d" % (NUM_LANDMARKS, len(indices)))
    with open(path, "w", encoding="utf-8") as fh:
        for idx in indices:
            fh.write("%d\n" % idx)


def mesh_bbox(mesh: Mesh) -> tuple[tuple[float, float], tuple[float, float]]:
    """Axis-aligned 2D bounds over x, y of all vertices: ((minx, miny), (maxx, maxy))."""
    if mesh.num_vertices == 0:
        raise MeshError("bbox of empty mesh")
    xy = mesh.vertices[:, :2]
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    return (float(lo[0]), float(lo[1])), (float(hi[0]), float(hi[1]))

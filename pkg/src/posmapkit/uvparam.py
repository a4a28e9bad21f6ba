"""Tutte embedding of a disk-topology mesh into the unit square.

The boundary loop is mapped onto the perimeter of [0,1]^2 proportionally to
arc length, with the four vertices nearest the quarter-length fractions
pinned to the corners.  Interior vertices solve a graph Laplacian with one
of three edge-weight schemes:

    uniform     w_ij = 1
    conformal   cotangent weights, clamped to >= COT_CLAMP so the embedding
                stays injective on obtuse-heavy meshes
    mean_value  tan(angle/2) weights (positive, asymmetric)

Interior systems with symmetric weights are solved by Jacobi-preconditioned
conjugate gradient (tolerance 1e-10, at most 10n iterations) above
DENSE_SOLVE_LIMIT unknowns and by dense factorization below; the asymmetric
mean-value system uses sparse LU when large.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .mesh import Mesh, MeshError

COT_CLAMP = 1e-6
DEGENERATE_AREA = 1e-12
DENSE_SOLVE_LIMIT = 2000
CG_TOL = 1e-10
RESIDUAL_TOL = 1e-8

WEIGHT_KINDS = ("conformal", "uniform", "mean_value")


class TopologyError(MeshError):
    """Mesh is not a manifold disk (closed, multi-loop, or non-manifold)."""


class SolverError(RuntimeError):
    """Linear solve failed to reach the required residual."""


@dataclass(frozen=True)
class BoundaryLoop:
    """Ordered boundary vertices with cumulative 3D arc length per vertex."""

    indices: np.ndarray
    cumulative: np.ndarray
    total_length: float

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "cumulative", np.asarray(self.cumulative, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SparseSystem:
    """Full n x n Laplacian system: boundary rows are identity, rhs holds uv."""

    matrix: sparse.csr_matrix
    rhs: np.ndarray
    interior: np.ndarray
    boundary: np.ndarray


def boundary_loop(mesh: Mesh) -> BoundaryLoop:
    """Extract the single boundary loop, starting at the smallest boundary index.

    The loop follows the directed boundary edges of the (consistently
    oriented) triangles, so the interior lies to one consistent side.
    """
    tris = mesh.triangles
    if len(tris) == 0:
        raise TopologyError("mesh has no triangles")
    directed = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    keys = directed[:, 0].astype(np.int64) * mesh.num_vertices + directed[:, 1]
    uniq, counts = np.unique(keys, return_counts=True)
    if np.any(counts > 1):
        raise TopologyError("non-manifold or inconsistently oriented edge")
    rev_keys = directed[:, 1].astype(np.int64) * mesh.num_vertices + directed[:, 0]
    # boundary edges are those without a reversed twin
    boundary_edges = directed[~np.isin(keys, rev_keys)]
    if len(boundary_edges) == 0:
        raise TopologyError("closed mesh: no boundary loop")

    nxt = {}
    for a, b in boundary_edges:
        if a in nxt:
            raise TopologyError("non-manifold boundary vertex %d" % a)
        nxt[int(a)] = int(b)

    start = int(boundary_edges.min())
    loop = [start]
    cur = nxt[start]
    while cur != start:
        loop.append(cur)
        if cur not in nxt:
            raise TopologyError("boundary is not a closed loop")
        cur = nxt[cur]
        if len(loop) > len(boundary_edges):
            raise TopologyError("boundary walk did not terminate")
    if len(loop) != len(boundary_edges):
        raise TopologyError("mesh has multiple boundary loops")

    idx = np.asarray(loop, dtype=np.int64)
    pts = mesh.vertices[idx]
    seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    cumulative = np.concatenate([[0.0], np.cumsum(seg[:-1])])
    return BoundaryLoop(idx, cumulative, float(seg.sum()))


def map_boundary_to_square(loop: BoundaryLoop) -> np.ndarray:
    """Place loop vertices on the perimeter of [0,1]^2 by arc-length fraction.

    Returns (len(loop), 2) uv coordinates in loop order.  The vertices
    nearest fractions 0, 1/4, 1/2 and 3/4 go to (0,0), (1,0), (1,1), (0,1).
    """
    k = len(loop)
    if k < 4:
        raise MeshError("boundary loop needs at least 4 vertices, got %d" % k)
    frac = loop.cumulative / loop.total_length

    corner_pos = [0]
    for target in (0.25, 0.5, 0.75):
        order = np.argsort(np.abs(frac - target))
        pick = next(int(i) for i in order if int(i) not in corner_pos)
        corner_pos.append(pick)
    if sorted(corner_pos) != corner_pos:
        # skewed loop produced out-of-order picks: fall back to even splits
        corner_pos = [0] + [int(round(i * k / 4)) % k for i in (1, 2, 3)]

    corners = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    uv = np.zeros((k, 2))
    for side in range(4):
        a = corner_pos[side]
        b = corner_pos[(side + 1) % 4]
        fa = frac[a]
        fb = frac[b] if side < 3 else 1.0 + frac[corner_pos[0]]
        span = fb - fa
        positions = range(a, b) if side < 3 else range(a, a + (k - a))
        for p in positions:
            t = (frac[p % k] - fa) / span if span > 0 else 0.0
            uv[p % k] = corners[side] + t * (corners[(side + 1) % 4] - corners[side])
    return uv


def _triangle_corner_angles(p0, p1, p2):
    """Angles at corners 0,1,2 of triangles given (m,3) position arrays."""
    def ang(a, b, c):
        u = b - a
        v = c - a
        cosv = np.einsum("ij,ij->i", u, v) / (
            np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1)
        )
        return np.arccos(np.clip(cosv, -1.0, 1.0))

    return ang(p0, p1, p2), ang(p1, p2, p0), ang(p2, p0, p1)


def _edge_weights(mesh: Mesh, kind: str):
    """Per-directed-edge weights as a dict-of-arrays sparse accumulation.

    Returns (rows, cols, weights) for all i->j couplings.  Symmetric for
    uniform and conformal, asymmetric for mean_value.
    """
    tris = mesh.triangles
    v = mesh.vertices
    p0, p1, p2 = v[tris[:, 0]], v[tris[:, 1]], v[tris[:, 2]]

    if kind == "conformal":
        areas = 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)
        if np.any(areas <= DEGENERATE_AREA):
            raise MeshError("degenerate triangle under conformal weights")
        a0, a1, a2 = _triangle_corner_angles(p0, p1, p2)
        # angle at corner k is opposite edge (i,j)
        half_cot = [0.5 / np.tan(a2), 0.5 / np.tan(a0), 0.5 / np.tan(a1)]
        pairs = [(0, 1), (1, 2), (2, 0)]
        rows, cols, vals = [], [], []
        for (i, j), w in zip(pairs, half_cot):
            rows += [tris[:, i], tris[:, j]]
            cols += [tris[:, j], tris[:, i]]
            vals += [w, w]
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        w = np.concatenate(vals)
        mat = sparse.coo_matrix((w, (r, c)), shape=(len(v), len(v))).tocsr()
        mat.data = np.maximum(mat.data, COT_CLAMP)
        return mat

    if kind == "uniform":
        pairs = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
        und = np.sort(pairs, axis=1)
        und = np.unique(und, axis=0)
        r = np.concatenate([und[:, 0], und[:, 1]])
        c = np.concatenate([und[:, 1], und[:, 0]])
        return sparse.coo_matrix(
            (np.ones(len(r)), (r, c)), shape=(len(v), len(v))
        ).tocsr()

    if kind == "mean_value":
        a0, a1, a2 = _triangle_corner_angles(p0, p1, p2)
        lengths = {
            (0, 1): np.linalg.norm(p1 - p0, axis=1),
            (1, 2): np.linalg.norm(p2 - p1, axis=1),
            (2, 0): np.linalg.norm(p0 - p2, axis=1),
        }
        if min(l.min() for l in lengths.values()) <= 0:
            raise MeshError("zero-length edge under mean-value weights")
        angles = [a0, a1, a2]
        rows, cols, vals = [], [], []
        # angle at corner i feeds the two edges leaving i in this triangle
        for i in range(3):
            t = np.tan(angles[i] / 2.0)
            for j in ((i + 1) % 3, (i + 2) % 3):
                key = (i, j) if (i, j) in lengths else (j, i)
                rows.append(tris[:, i])
                cols.append(tris[:, j])
                vals.append(t / lengths[key])
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        w = np.concatenate(vals)
        return sparse.coo_matrix((w, (r, c)), shape=(len(v), len(v))).tocsr()

    raise ValueError("unknown weight kind %r (expected one of %s)" % (kind, (WEIGHT_KINDS,)))


def assemble_system(mesh: Mesh, kind: str = "conformal") -> SparseSystem:
    """Build the full n x n Tutte system with boundary rows pinned to the square."""
    loop = boundary_loop(mesh)
    boundary_uv = map_boundary_to_square(loop)
    n = mesh.num_vertices
    w = _edge_weights(mesh, kind)

    is_boundary = np.zeros(n, dtype=bool)
    is_boundary[loop.indices] = True
    interior = np.flatnonzero(~is_boundary)

    lap = sparse.diags(np.asarray(w.sum(axis=1)).ravel()) - w
    lap = lap.tocsr()

    # boundary rows become identity, interior rows keep the Laplacian
    mask = sparse.diags((~is_boundary).astype(np.float64))
    mat = (mask @ lap + sparse.diags(is_boundary.astype(np.float64))).tocsr()

    rhs = np.zeros((n, 2))
    rhs[loop.indices] = boundary_uv
    return SparseSystem(mat, rhs, interior, loop.indices)


def _jacobi_cg(A, b, tol: float, max_iters: int) -> np.ndarray:
    """Preconditioned CG for SPD A; stops at ||r|| <= tol * ||b||."""
    inv_diag = 1.0 / A.diagonal()
    x = np.zeros_like(b)
    r = b.copy()
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    stop = tol * np.linalg.norm(b)
    for _ in range(max_iters):
        if np.linalg.norm(r) <= stop:
            return x
        Ap = A @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    if np.linalg.norm(r) <= stop:
        return x
    raise SolverError("conjugate gradient failed to converge in %d iterations" % max_iters)


def solve_system(system: SparseSystem, kind: str) -> np.ndarray:
    """Solve for all uv; raises SolverError if the residual check fails."""
    interior = system.interior
    n = system.matrix.shape[0]
    uv = system.rhs.copy()
    if len(interior) > 0:
        A = system.matrix[interior][:, interior].tocsr()
        coupling = system.matrix[interior][:, system.boundary]
        b = -coupling @ system.rhs[system.boundary]
        if len(interior) < DENSE_SOLVE_LIMIT:
            sol = np.linalg.solve(A.toarray(), b)
        elif kind == "mean_value":
            # asymmetric positive weights: direct sparse factorization
            sol = splu(A.tocsc()).solve(b)
        else:
            sol = np.column_stack(
                [_jacobi_cg(A, b[:, k], CG_TOL, 10 * n) for k in range(2)]
            )
        resid = A @ sol - b
        rel = np.abs(resid).max() / max(np.abs(b).max(), np.finfo(float).tiny)
        if rel > RESIDUAL_TOL:
            raise SolverError("linear-system residual %.3e exceeds %.1e" % (rel, RESIDUAL_TOL))
        uv[interior] = sol
    return uv


def tutte_embed(mesh: Mesh, weights: str = "conformal") -> Mesh:
    """Return a copy of the mesh with uv filled by the Tutte embedding."""
    if weights not in WEIGHT_KINDS:
        raise ValueError("unknown weight kind %r (expected one of %s)" % (weights, (WEIGHT_KINDS,)))
    system = assemble_system(mesh, weights)
    uv = solve_system(system, weights)
    # positive weights keep interior strictly inside; clip float dust only
    return mesh.with_uv(np.clip(uv, 0.0, 1.0))


def uv_triangle_signed_areas(mesh: Mesh) -> np.ndarray:
    """Signed area of every triangle in uv space (flip detection)."""
    if mesh.uv is None:
        raise MeshError("mesh has no uv")
    a = mesh.uv[mesh.triangles[:, 0]]
    b = mesh.uv[mesh.triangles[:, 1]]
    c = mesh.uv[mesh.triangles[:, 2]]
    e1 = b - a
    e2 = c - a
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

"""
Triangulated shape models: validation, topology tables and mass properties.

Vertices are metres in the asteroid body-fixed frame. Faces are 0-based vertex index
triples wound counterclockwise when viewed from outside, so that face normals point out
of the body.
"""

import dataclasses
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from asteroid_gnc.core.errors import MeshStructureError, OnSurfaceError

logger = logging.getLogger(__name__)

# Faces smaller than this fraction of the squared bounding radius are degenerate
DEGENERATE_AREA_FACTOR = 1e-12
# |sum of solid angles - 2*pi| below this is treated as a point on the surface
ON_SURFACE_BAND = 1e-3
# Points per chunk for batched solid-angle sums
POINT_CHUNK = 256

INDEX_OUT_OF_RANGE = "index out of range"
EMPTY_MESH = "empty mesh"
DEGENERATE_FACE = "degenerate face"
OPEN_EDGE = "open edge"
NON_MANIFOLD_EDGE = "non-manifold edge"
INCONSISTENT_WINDING = "inconsistent winding"
EULER_CHARACTERISTIC = "euler characteristic"
INWARD_ORIENTATION = "inward orientation"


@dataclasses.dataclass(frozen=True, eq=False)
class PolyhedronMesh:
    vertices: np.ndarray  # (V, 3) metres, body frame
    faces: np.ndarray  # (F, 3) 0-based vertex indices

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float).reshape(-1, 3)
        faces = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        vertices.setflags(write=False)
        faces.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def bounding_radius(self) -> float:
        """Largest vertex distance from the vertex mean."""
        if self.vertex_count == 0:
            return 0.0
        center = self.vertices.mean(axis=0)
        return float(np.linalg.norm(self.vertices - center, axis=1).max())

    @property
    def max_vertex_radius(self) -> float:
        """Largest vertex distance from the body-frame origin."""
        if self.vertex_count == 0:
            return 0.0
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def scaled(self, factor: float) -> "PolyhedronMesh":
        return PolyhedronMesh(self.vertices * factor, self.faces)

    def rotated(self, rotation_matrix) -> "PolyhedronMesh":
        return PolyhedronMesh(self.vertices @ np.asarray(rotation_matrix, dtype=float).T, self.faces)

    def translated(self, offset) -> "PolyhedronMesh":
        return PolyhedronMesh(self.vertices + np.asarray(offset, dtype=float), self.faces)

    def same_content(self, other: "PolyhedronMesh") -> bool:
        return (
            self.vertices.shape == other.vertices.shape
            and self.faces.shape == other.faces.shape
            and bool(np.array_equal(self.vertices, other.vertices))
            and bool(np.array_equal(self.faces, other.faces))
        )

    def __str__(self) -> str:
        return f"PolyhedronMesh(V={self.vertex_count}, F={self.face_count})"


@dataclasses.dataclass
class Violation:
    kind: str
    message: str
    faces: Tuple[int, ...] = ()
    edge: Optional[Tuple[int, int]] = None


@dataclasses.dataclass
class ValidationReport:
    violations: List[Violation] = dataclasses.field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def of_kind(self, kind: str) -> List[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def summary(self) -> str:
        if self.is_valid:
            return "mesh is valid"
        counts = {}
        for violation in self.violations:
            counts[violation.kind] = counts.get(violation.kind, 0) + 1
        return ", ".join(f"{count} x {kind}" for kind, count in counts.items())

    def __str__(self) -> str:
        return "\n".join(f"{v.kind}: {v.message}" for v in self.violations) or "mesh is valid"


@dataclasses.dataclass(frozen=True, eq=False)
class TopologyTable:
    face_normals: np.ndarray  # (F, 3) outward unit normals
    face_dyads: np.ndarray  # (F, 3, 3) n n^T
    face_areas: np.ndarray  # (F,)
    face_centroids: np.ndarray  # (F, 3)
    edge_vertices: np.ndarray  # (E, 2) endpoint indices, ascending
    edge_faces: np.ndarray  # (E, 2) adjacent faces
    edge_dyads: np.ndarray  # (E, 3, 3)
    edge_lengths: np.ndarray  # (E,)

    @property
    def edge_count(self) -> int:
        return len(self.edge_vertices)


@dataclasses.dataclass(frozen=True)
class MassProperties:
    volume: float
    centroid: np.ndarray
    inertia: np.ndarray  # about the centroid
    density: float

    @property
    def mass(self) -> float:
        return self.density * self.volume


def _face_corners(mesh: PolyhedronMesh):
    faces = mesh.faces
    vertices = mesh.vertices
    return vertices[faces[:, 0]], vertices[faces[:, 1]], vertices[faces[:, 2]]


def _directed_edges(faces: np.ndarray) -> np.ndarray:
    # row 3*f + k is the k-th edge of face f in winding order
    return np.stack([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]], axis=1).reshape(-1, 2)


def _unique_edges(faces: np.ndarray):
    directed = _directed_edges(faces)
    undirected = np.sort(directed, axis=1)
    unique, inverse, counts = np.unique(undirected, axis=0, return_inverse=True, return_counts=True)
    return directed, unique, inverse.reshape(-1), counts


def face_areas(mesh: PolyhedronMesh) -> np.ndarray:
    p0, p1, p2 = _face_corners(mesh)
    return 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)


def edge_count(mesh: PolyhedronMesh) -> int:
    return len(_unique_edges(mesh.faces)[1])


def area_weighted_normal_sum(mesh: PolyhedronMesh) -> np.ndarray:
    p0, p1, p2 = _face_corners(mesh)
    return 0.5 * np.cross(p1 - p0, p2 - p0).sum(axis=0)


def signed_volume(mesh: PolyhedronMesh) -> float:
    """Sum of signed tetrahedra spanned by the origin and each face."""
    p0, p1, p2 = _face_corners(mesh)
    return float(np.einsum("ij,ij->i", p0, np.cross(p1, p2)).sum() / 6.0)


def volume_by_divergence(mesh: PolyhedronMesh) -> float:
    """V = 1/3 * sum over faces of area * (normal . face centroid)."""
    p0, p1, p2 = _face_corners(mesh)
    scaled_normals = np.cross(p1 - p0, p2 - p0)
    return float(np.einsum("ij,ij->i", scaled_normals, p0 + p1 + p2).sum() / 18.0)


def validate_mesh(mesh: PolyhedronMesh) -> ValidationReport:
    report = ValidationReport()
    faces = mesh.faces
    vertex_count = mesh.vertex_count

    if len(faces) == 0:
        report.violations.append(Violation(EMPTY_MESH, "mesh has no faces"))
        return report

    out_of_range = np.nonzero(((faces < 0) | (faces >= vertex_count)).any(axis=1))[0]
    for f in out_of_range:
        report.violations.append(
            Violation(
                INDEX_OUT_OF_RANGE,
                f"face {f} references a vertex outside 0..{vertex_count - 1}: {faces[f].tolist()}",
                faces=(int(f),),
            )
        )
    if len(out_of_range):
        # geometry checks need valid indices
        return report

    threshold = DEGENERATE_AREA_FACTOR * mesh.bounding_radius ** 2
    for f in np.nonzero(face_areas(mesh) <= threshold)[0]:
        report.violations.append(
            Violation(DEGENERATE_FACE, f"face {f} has (near) zero area", faces=(int(f),))
        )

    directed, unique, inverse, counts = _unique_edges(faces)

    def faces_of(edge_index):
        return tuple(int(row // 3) for row in np.nonzero(inverse == edge_index)[0])

    for e in np.nonzero(counts == 1)[0]:
        a, b = unique[e]
        report.violations.append(
            Violation(OPEN_EDGE, f"edge ({a}, {b}) belongs to a single face", faces=faces_of(e), edge=(int(a), int(b)))
        )
    for e in np.nonzero(counts > 2)[0]:
        a, b = unique[e]
        report.violations.append(
            Violation(
                NON_MANIFOLD_EDGE,
                f"edge ({a}, {b}) is shared by {counts[e]} faces",
                faces=faces_of(e),
                edge=(int(a), int(b)),
            )
        )

    # a consistently wound pair traverses its shared edge once in each direction
    forward = (directed[:, 0] < directed[:, 1]).astype(float)
    forward_counts = np.bincount(inverse, weights=forward, minlength=len(unique))
    bad_edges = (counts == 2) & (forward_counts != 1)
    winding_problems = bool(bad_edges.any())
    if winding_problems:
        bad_per_face = bad_edges[inverse].reshape(-1, 3).sum(axis=1)
        flagged = set(int(f) for f in np.nonzero(bad_per_face >= 2)[0])
        for f in sorted(flagged):
            report.violations.append(
                Violation(INCONSISTENT_WINDING, f"face {f} is wound against its neighbours", faces=(f,))
            )
        for e in np.nonzero(bad_edges)[0]:
            edge_faces = faces_of(e)
            if flagged.intersection(edge_faces):
                continue
            a, b = unique[e]
            report.violations.append(
                Violation(
                    INCONSISTENT_WINDING,
                    f"faces {edge_faces} traverse edge ({a}, {b}) in the same direction",
                    faces=edge_faces,
                    edge=(int(a), int(b)),
                )
            )

    euler = vertex_count - len(unique) + len(faces)
    if euler != 2:
        report.violations.append(
            Violation(EULER_CHARACTERISTIC, f"V - E + F = {euler}, expected 2 for a genus-0 surface")
        )

    closed = not ((counts != 2).any() or winding_problems)
    if closed:
        volume = signed_volume(mesh)
        if volume <= 0.0:
            report.violations.append(
                Violation(INWARD_ORIENTATION, f"signed volume {volume:.6g} is not positive; normals point inward")
            )

    if not report.is_valid:
        logger.debug(f"Mesh validation found: {report.summary()}")
    return report


def require_valid(mesh: PolyhedronMesh) -> None:
    report = validate_mesh(mesh)
    if not report.is_valid:
        raise MeshStructureError(f"invalid mesh: {report.summary()}")


def build_topology(mesh: PolyhedronMesh) -> TopologyTable:
    require_valid(mesh)
    vertices = mesh.vertices
    p0, p1, p2 = _face_corners(mesh)
    scaled_normals = np.cross(p1 - p0, p2 - p0)
    double_areas = np.linalg.norm(scaled_normals, axis=1)
    normals = scaled_normals / double_areas[:, None]

    directed, unique, inverse, counts = _unique_edges(mesh.faces)
    # validation guarantees exactly two directed copies per edge
    rows = np.argsort(inverse, kind="stable").reshape(-1, 2)
    edge_faces = rows // 3

    starts = vertices[directed[:, 0]]
    ends = vertices[directed[:, 1]]
    row_normals = normals[np.arange(len(directed)) // 3]
    in_plane = np.cross(ends - starts, row_normals)
    in_plane /= np.linalg.norm(in_plane, axis=1)[:, None]

    n_a, n_b = row_normals[rows[:, 0]], row_normals[rows[:, 1]]
    ne_a, ne_b = in_plane[rows[:, 0]], in_plane[rows[:, 1]]
    edge_dyads = np.einsum("ei,ej->eij", n_a, ne_a) + np.einsum("ei,ej->eij", n_b, ne_b)

    edge_lengths = np.linalg.norm(vertices[unique[:, 1]] - vertices[unique[:, 0]], axis=1)

    logger.debug(f"Topology built: F={mesh.face_count}, E={len(unique)}")
    return TopologyTable(
        face_normals=normals,
        face_dyads=np.einsum("fi,fj->fij", normals, normals),
        face_areas=0.5 * double_areas,
        face_centroids=(p0 + p1 + p2) / 3.0,
        edge_vertices=unique,
        edge_faces=edge_faces,
        edge_dyads=edge_dyads,
        edge_lengths=edge_lengths,
    )


def mass_properties(mesh: PolyhedronMesh, density: float) -> MassProperties:
    if density <= 0:
        raise ValueError(f"Density must be positive, got {density}")
    p0, p1, p2 = _face_corners(mesh)
    dets = np.einsum("ij,ij->i", p0, np.cross(p1, p2))
    volume = dets.sum() / 6.0
    corner_sum = p0 + p1 + p2
    centroid = (dets[:, None] * corner_sum).sum(axis=0) / (24.0 * volume)

    # integral of x x^T over each origin tetrahedron
    second_moment = (
        np.einsum("f,fi,fj->ij", dets, p0, p0)
        + np.einsum("f,fi,fj->ij", dets, p1, p1)
        + np.einsum("f,fi,fj->ij", dets, p2, p2)
        + np.einsum("f,fi,fj->ij", dets, corner_sum, corner_sum)
    ) / 120.0
    mass = density * volume
    covariance = density * second_moment - mass * np.outer(centroid, centroid)
    inertia = np.trace(covariance) * np.eye(3) - covariance
    inertia = 0.5 * (inertia + inertia.T)
    return MassProperties(volume=float(volume), centroid=centroid, inertia=inertia, density=float(density))


def oosterom_strackee(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Signed solid angle of triangles (a, b, c) given as vectors from the field point."""
    la = np.linalg.norm(a, axis=-1)
    lb = np.linalg.norm(b, axis=-1)
    lc = np.linalg.norm(c, axis=-1)
    numerator = np.einsum("...i,...i->...", a, np.cross(b, c))
    denominator = (
        la * lb * lc
        + la * np.einsum("...i,...i->...", b, c)
        + lb * np.einsum("...i,...i->...", a, c)
        + lc * np.einsum("...i,...i->...", a, b)
    )
    return 2.0 * np.arctan2(numerator, denominator)


def solid_angles(mesh: PolyhedronMesh, point) -> np.ndarray:
    relative = mesh.vertices - np.asarray(point, dtype=float)
    faces = mesh.faces
    return oosterom_strackee(relative[faces[:, 0]], relative[faces[:, 1]], relative[faces[:, 2]])


def solid_angle_sums(mesh: PolyhedronMesh, points) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    faces = mesh.faces
    sums = np.empty(len(points))
    for start in range(0, len(points), POINT_CHUNK):
        chunk = points[start:start + POINT_CHUNK]
        relative = mesh.vertices[None, :, :] - chunk[:, None, :]
        omegas = oosterom_strackee(relative[:, faces[:, 0]], relative[:, faces[:, 1]], relative[:, faces[:, 2]])
        sums[start:start + POINT_CHUNK] = omegas.sum(axis=1)
    return sums


def contains_point(mesh: PolyhedronMesh, point) -> bool:
    total = float(solid_angles(mesh, point).sum())
    if abs(total - 2.0 * math.pi) < ON_SURFACE_BAND:
        raise OnSurfaceError(f"point {np.asarray(point).tolist()} lies on the surface (solid angle sum {total:.6f})")
    return total > 2.0 * math.pi


def contains_points(mesh: PolyhedronMesh, points) -> np.ndarray:
    """Vectorised interior test; points on the surface count as outside."""
    return solid_angle_sums(mesh, points) > 2.0 * math.pi + ON_SURFACE_BAND


def closest_points_on_triangles(point, a, b, c) -> np.ndarray:
    """Closest point to `point` on each triangle (a[i], b[i], c[i]) by Voronoi region."""
    p = np.asarray(point, dtype=float)
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)

    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    with np.errstate(divide="ignore", invalid="ignore"):
        denominator = va + vb + vc
        v = np.where(denominator != 0, vb / denominator, 0.0)
        w = np.where(denominator != 0, vc / denominator, 0.0)
        result = a + ab * v[:, None] + ac * w[:, None]

        bc_weight = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        in_bc = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
        result = np.where(in_bc[:, None], b + (c - b) * np.nan_to_num(bc_weight)[:, None], result)

        ac_weight = d2 / (d2 - d6)
        in_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
        result = np.where(in_ac[:, None], a + ac * np.nan_to_num(ac_weight)[:, None], result)

        in_c = (d6 >= 0) & (d5 <= d6)
        result = np.where(in_c[:, None], c, result)

        ab_weight = d1 / (d1 - d3)
        in_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
        result = np.where(in_ab[:, None], a + ab * np.nan_to_num(ab_weight)[:, None], result)

        in_b = (d3 >= 0) & (d4 <= d3)
        result = np.where(in_b[:, None], b, result)

        in_a = (d1 <= 0) & (d2 <= 0)
        result = np.where(in_a[:, None], a, result)
    return result


def closest_surface_point(mesh: PolyhedronMesh, point) -> Tuple[np.ndarray, int, float]:
    """Nearest surface point, the face it lies on, and the (unsigned) distance."""
    p0, p1, p2 = _face_corners(mesh)
    candidates = closest_points_on_triangles(point, p0, p1, p2)
    distances = np.linalg.norm(candidates - np.asarray(point, dtype=float), axis=1)
    face = int(np.argmin(distances))
    return candidates[face], face, float(distances[face])


def distance_to_surface(mesh: PolyhedronMesh, point) -> float:
    return closest_surface_point(mesh, point)[2]


def outward_normal_at(mesh: PolyhedronMesh, point) -> np.ndarray:
    """Area-weighted normal of the faces nearest to `point`; averages across edges and vertices."""
    p = np.asarray(point, dtype=float)
    p0, p1, p2 = _face_corners(mesh)
    distances = np.linalg.norm(closest_points_on_triangles(p, p0, p1, p2) - p, axis=1)
    nearest = distances <= distances.min() + 1e-9 * mesh.bounding_radius
    weighted = 0.5 * np.cross(p1 - p0, p2 - p0)[nearest].sum(axis=0)
    return weighted / np.linalg.norm(weighted)


def nearest_vertex(mesh: PolyhedronMesh, point) -> int:
    return int(np.argmin(np.linalg.norm(mesh.vertices - np.asarray(point, dtype=float), axis=1)))


def ray_intersections(mesh: PolyhedronMesh, origin, direction) -> np.ndarray:
    """Distances along a ray to every face it crosses (Moller-Trumbore)."""
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    p0, p1, p2 = _face_corners(mesh)
    edge1 = p1 - p0
    edge2 = p2 - p0
    pvec = np.cross(direction, edge2)
    det = np.einsum("ij,ij->i", edge1, pvec)
    usable = np.abs(det) > 1e-14 * max(mesh.bounding_radius, 1.0) ** 2
    inv_det = np.where(usable, 1.0 / np.where(usable, det, 1.0), 0.0)
    tvec = origin - p0
    u = np.einsum("ij,ij->i", tvec, pvec) * inv_det
    qvec = np.cross(tvec, edge1)
    v = np.einsum("j,ij->i", direction, qvec) * inv_det
    t = np.einsum("ij,ij->i", edge2, qvec) * inv_det
    hit = usable & (u >= 0) & (v >= 0) & (u + v <= 1) & (t > 0)
    return np.sort(t[hit])


def surface_point_along(mesh: PolyhedronMesh, direction, origin=None) -> np.ndarray:
    """Outermost surface point on the ray from `origin` (default: vertex mean) along `direction`."""
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise ValueError("Direction must be non-zero")
    direction = direction / norm
    origin = mesh.vertices.mean(axis=0) if origin is None else np.asarray(origin, dtype=float)
    hits = ray_intersections(mesh, origin, direction)
    if len(hits) == 0:
        raise MeshStructureError(f"ray along {direction.tolist()} does not meet the surface")
    return origin + hits[-1] * direction

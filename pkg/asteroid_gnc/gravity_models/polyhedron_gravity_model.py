"""
Exterior (and interior diagnostic) field of a constant-density closed polyhedron.

With r_e and r_f the vectors from the field point to a vertex of edge e / face f:

    U   = G rho / 2 * ( sum_e r_e.E_e.r_e L_e  -  sum_f r_f.F_f.r_f w_f )
    g   = G rho     * ( -sum_e E_e.r_e L_e     +  sum_f F_f.r_f w_f )
    lap = -G rho * sum_f w_f

L_e = ln((a + b + l) / (a + b - l)) and w_f is the signed solid angle of face f.
"""

import logging
from typing import Optional

import numpy as np

from asteroid_gnc.core.errors import GravitySingularityError
from asteroid_gnc.core.mesh import PolyhedronMesh, TopologyTable, build_topology, oosterom_strackee
from asteroid_gnc.gravity_models.base_gravity_model import (
    GRAVITATIONAL_CONSTANT,
    BaseGravityModel,
    FieldSample,
)

logger = logging.getLogger(__name__)

# Field points closer than this fraction of the bounding radius to an edge are singular
SINGULAR_DISTANCE_FACTOR = 1e-9
# Edges with (a + b - l) below this fraction of l get an exact segment-distance check
NEAR_EDGE_GAP = 1e-6


class PolyhedronGravityModel(BaseGravityModel):
    def __init__(
        self,
        mesh: PolyhedronMesh,
        density: float,
        gravitational_constant: float = GRAVITATIONAL_CONSTANT,
        topology: Optional[TopologyTable] = None,
    ):
        self._mesh = mesh
        self.density = float(density)
        self.gravitational_constant = float(gravitational_constant)
        super().__init__()
        self.topology = topology if topology is not None else build_topology(mesh)
        if len(self.topology.face_normals) != mesh.face_count or 2 * self.topology.edge_count != 3 * mesh.face_count:
            raise ValueError("Topology table does not match the mesh")
        self._g_rho = self.gravitational_constant * self.density
        self._edge_starts = self.topology.edge_vertices[:, 0]
        self._edge_ends = self.topology.edge_vertices[:, 1]
        self._singular_distance = SINGULAR_DISTANCE_FACTOR * mesh.bounding_radius
        logger.debug(
            f"Polyhedron gravity ready: F={mesh.face_count}, E={self.topology.edge_count}, "
            f"rho={self.density}, G={self.gravitational_constant}"
        )

    def __str__(self) -> str:
        return f"PolyhedronGravityModel({self._mesh}, density={self.density})"

    def validate(self):
        if self.density <= 0:
            raise ValueError(f"Density must be positive, got {self.density}")
        if self.gravitational_constant <= 0:
            raise ValueError(f"Gravitational constant must be positive, got {self.gravitational_constant}")

    @property
    def mesh(self) -> PolyhedronMesh:
        return self._mesh

    @property
    def reference_radius(self) -> float:
        return self._mesh.max_vertex_radius

    def _guard_edges(self, point: np.ndarray, candidates: np.ndarray):
        vertices = self._mesh.vertices
        starts = vertices[self._edge_starts[candidates]]
        spans = vertices[self._edge_ends[candidates]] - starts
        along = np.einsum("ij,ij->i", point - starts, spans) / np.einsum("ij,ij->i", spans, spans)
        closest = starts + np.clip(along, 0.0, 1.0)[:, None] * spans
        distances = np.linalg.norm(point - closest, axis=1)
        if distances.min() < self._singular_distance:
            edge = self.topology.edge_vertices[candidates[int(np.argmin(distances))]]
            raise GravitySingularityError(
                f"field point {point.tolist()} lies on edge {edge.tolist()} (distance {distances.min():.3g} m)"
            )

    def _evaluate(self, point, with_potential: bool) -> FieldSample:
        p = np.asarray(point, dtype=float)
        relative = self._mesh.vertices - p
        distances = np.linalg.norm(relative, axis=1)

        lengths = self.topology.edge_lengths
        a = distances[self._edge_starts]
        b = distances[self._edge_ends]
        gap = a + b - lengths
        near = np.nonzero(gap <= NEAR_EDGE_GAP * lengths)[0]
        if len(near):
            self._guard_edges(p, near)
        edge_logs = np.log((a + b + lengths) / gap)

        r_e = relative[self._edge_starts]
        edge_terms = np.einsum("eij,ej->ei", self.topology.edge_dyads, r_e)

        faces = self._mesh.faces
        r_f = relative[faces[:, 0]]
        omegas = oosterom_strackee(r_f, relative[faces[:, 1]], relative[faces[:, 2]])
        face_terms = np.einsum("fij,fj->fi", self.topology.face_dyads, r_f)

        acceleration = self._g_rho * (-(edge_terms * edge_logs[:, None]).sum(axis=0) + (face_terms * omegas[:, None]).sum(axis=0))
        laplacian = -self._g_rho * float(omegas.sum())
        potential = float("nan")
        if with_potential:
            edge_sum = np.einsum("ei,ei->e", r_e, edge_terms) @ edge_logs
            face_sum = np.einsum("fi,fi->f", r_f, face_terms) @ omegas
            potential = 0.5 * self._g_rho * float(edge_sum - face_sum)
        return FieldSample(potential=potential, acceleration=acceleration, laplacian=laplacian)

    def evaluate(self, point) -> FieldSample:
        return self._evaluate(point, with_potential=True)

    def acceleration(self, point) -> np.ndarray:
        return self._evaluate(point, with_potential=False).acceleration

    def laplacian(self, point) -> float:
        return self._evaluate(point, with_potential=False).laplacian

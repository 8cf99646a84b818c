"""
Synthetic shape models for fixtures, tests and scenarios.

The Castalia-class body is a bilobed ellipsoid (1.8 x 1.4 x 0.97 km) whose surface passes
through the descent scenario's landing vertex [726, 0, 286] m. It stands in for the radar
shape model, which is not redistributed with this toolkit.
"""

import logging
import math
from typing import List

import numpy as np
import trimesh

from asteroid_gnc.core.mesh import PolyhedronMesh

logger = logging.getLogger(__name__)

TETRAHEDRON = "tetrahedron"
CUBE = "cube"
ICOSPHERE = "icosphere"
ELLIPSOID = "ellipsoid"
CASTALIA_CLASS = "castalia_class"

CASTALIA_SEMI_AXES = (900.0, 700.0, 484.0)
CASTALIA_WAIST_DEPTH = 0.35
CASTALIA_WAIST_WIDTH = 0.3


def get_supported_synthetic_shapes() -> List[str]:
    return [CASTALIA_CLASS, ICOSPHERE, ELLIPSOID, CUBE, TETRAHEDRON]


def tetrahedron() -> PolyhedronMesh:
    """Corner tetrahedron: the origin and the three unit axis points."""
    vertices = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    faces = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]
    return PolyhedronMesh(vertices, faces)


def regular_tetrahedron(scale: float = 1.0) -> PolyhedronMesh:
    vertices = scale * np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
    faces = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
    return PolyhedronMesh(vertices, faces)


def cube(size: float = 1.0, centered: bool = False) -> PolyhedronMesh:
    """Axis-aligned cube [0, size]^3 (or centred on the origin) as 12 triangles."""
    vertices = size * np.array(
        [
            [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
            [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
        ],
        dtype=float,
    )
    if centered:
        vertices -= 0.5 * size
    faces = [
        [0, 2, 1], [0, 3, 2],  # z = 0
        [4, 5, 6], [4, 6, 7],  # z = 1
        [0, 1, 5], [0, 5, 4],  # y = 0
        [3, 7, 6], [3, 6, 2],  # y = 1
        [0, 4, 7], [0, 7, 3],  # x = 0
        [1, 2, 6], [1, 6, 5],  # x = 1
    ]
    return PolyhedronMesh(vertices, faces)


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> PolyhedronMesh:
    sphere = trimesh.creation.icosphere(subdivisions=subdivisions, radius=radius)
    return PolyhedronMesh(np.asarray(sphere.vertices, dtype=float), np.asarray(sphere.faces, dtype=np.int64))


def ellipsoid(semi_axes=(1.0, 1.0, 1.0), subdivisions: int = 3) -> PolyhedronMesh:
    unit = icosphere(subdivisions)
    return PolyhedronMesh(unit.vertices * np.asarray(semi_axes, dtype=float), unit.faces)


def castalia_class(subdivisions: int = 3) -> PolyhedronMesh:
    """Bilobed body: an ellipsoid pinched at its waist along the long (X) axis."""
    body = ellipsoid(CASTALIA_SEMI_AXES, subdivisions)
    vertices = np.array(body.vertices)
    width = CASTALIA_WAIST_WIDTH * CASTALIA_SEMI_AXES[0]
    # (x, y, z) -> (x, s(x) y, s(x) z) with s > 0 keeps the winding outward
    pinch = 1.0 - CASTALIA_WAIST_DEPTH * np.exp(-(vertices[:, 0] / width) ** 2)
    vertices[:, 1] *= pinch
    vertices[:, 2] *= pinch
    logger.debug(f"Castalia-class body: {len(vertices)} vertices, {len(body.faces)} faces")
    return PolyhedronMesh(vertices, body.faces)


def make_shape(name: str, subdivisions: int = 3, semi_axes=None, radius: float = 1.0) -> PolyhedronMesh:
    if name == CASTALIA_CLASS:
        return castalia_class(subdivisions)
    elif name == ICOSPHERE:
        return icosphere(subdivisions, radius)
    elif name == ELLIPSOID:
        return ellipsoid(semi_axes or CASTALIA_SEMI_AXES, subdivisions)
    elif name == CUBE:
        return cube(size=2.0 * radius / math.sqrt(3.0), centered=True)
    elif name == TETRAHEDRON:
        return regular_tetrahedron(radius / math.sqrt(3.0))
    else:
        raise ValueError(f"Invalid synthetic shape: {name}")

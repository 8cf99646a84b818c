import logging

import numpy as np

from asteroid_gnc.core.errors import MeshParseError, MeshStructureError
from asteroid_gnc.core.mesh import PolyhedronMesh
from asteroid_gnc.shape_parsers.base_shape_parser import (
    BaseShapeParser,
    format_float,
    parse_floats,
    parse_indices,
)

logger = logging.getLogger(__name__)

# Keywords outside the v/f subset that carry nothing the gravity model needs
IGNORED_KEYWORDS = {"vn", "vt", "o", "g", "s", "usemtl", "mtllib"}


class ObjShapeParser(BaseShapeParser):
    """Minimal OBJ subset: `v x y z` and triangular `f i j k` lines, 1-based."""

    def parse(self, text: str) -> PolyhedronMesh:
        vertices = []
        faces = []
        face_lines = []
        for line_number, tokens in self.iter_lines(text):
            keyword, arguments = tokens[0], tokens[1:]
            if keyword == "v":
                vertices.append(parse_floats(arguments, line_number, 3))
            elif keyword == "f":
                faces.append(parse_indices(arguments, line_number))
                face_lines.append(line_number)
            elif keyword in IGNORED_KEYWORDS:
                logger.debug(f"Ignoring OBJ keyword '{keyword}' on line {line_number}")
            else:
                raise MeshParseError(line_number, f"unsupported OBJ keyword '{keyword}'")

        indices = np.array(faces, dtype=np.int64).reshape(-1, 3)
        for row, line_number in enumerate(face_lines):
            if indices[row].min() < 1 or indices[row].max() > len(vertices):
                raise MeshStructureError(
                    f"line {line_number}: face {indices[row].tolist()} references a vertex outside 1..{len(vertices)}"
                )
        scale = self.unit_scale()
        return PolyhedronMesh(np.array(vertices, dtype=float).reshape(-1, 3) * scale, indices - 1)

    def format(self, mesh: PolyhedronMesh) -> str:
        lines = ["# units: m"]
        lines.extend("v " + " ".join(format_float(c) for c in vertex) for vertex in mesh.vertices)
        lines.extend("f " + " ".join(str(int(i) + 1) for i in face) for face in mesh.faces)
        return "\n".join(lines) + "\n"

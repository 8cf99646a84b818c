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


class TabularShapeParser(BaseShapeParser):
    """Radar-distribution layout: a `V F` header, V vertex rows, then F 1-based face rows."""

    def parse(self, text: str) -> PolyhedronMesh:
        lines = list(self.iter_lines(text))
        if not lines:
            raise MeshParseError(1, "missing 'V F' header")
        header_line, header = lines[0]
        if len(header) != 2:
            raise MeshParseError(header_line, f"header must hold two counts, found {len(header)} tokens")
        try:
            vertex_count, face_count = int(header[0]), int(header[1])
        except ValueError:
            raise MeshParseError(header_line, f"malformed header {' '.join(header)!r}")
        if vertex_count < 0 or face_count < 0:
            raise MeshParseError(header_line, "header counts must be non-negative")

        body = lines[1:]
        expected = vertex_count + face_count
        if len(body) < expected:
            last_line = body[-1][0] if body else header_line
            raise MeshParseError(
                last_line + 1, f"file ends after {len(body)} rows, header declares {expected}"
            )
        if len(body) > expected:
            raise MeshParseError(body[expected][0], f"unexpected row beyond the {expected} declared by the header")

        vertices = [parse_floats(tokens, number, 3) for number, tokens in body[:vertex_count]]
        faces = []
        for number, tokens in body[vertex_count:]:
            face = parse_indices(tokens, number)
            if min(face) < 1 or max(face) > vertex_count:
                raise MeshStructureError(f"line {number}: face {list(face)} references a vertex outside 1..{vertex_count}")
            faces.append(face)

        scale = self.unit_scale()
        return PolyhedronMesh(
            np.array(vertices, dtype=float).reshape(-1, 3) * scale,
            np.array(faces, dtype=np.int64).reshape(-1, 3) - 1,
        )

    def format(self, mesh: PolyhedronMesh) -> str:
        lines = ["# units: m", f"{mesh.vertex_count} {mesh.face_count}"]
        lines.extend(" ".join(format_float(c) for c in vertex) for vertex in mesh.vertices)
        lines.extend(" ".join(str(int(i) + 1) for i in face) for face in mesh.faces)
        return "\n".join(lines) + "\n"

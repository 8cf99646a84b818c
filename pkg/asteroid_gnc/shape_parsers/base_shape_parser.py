import logging
import re
from pathlib import Path
from typing import List, Optional, Tuple

from asteroid_gnc.core.errors import ConfigError, MeshParseError
from asteroid_gnc.core.mesh import PolyhedronMesh

logger = logging.getLogger(__name__)

OBJ = "obj"
TABULAR = "tab"

UNIT_SCALES = {"m": 1.0, "km": 1000.0}
UNITS_DIRECTIVE = re.compile(r"^#\s*units\s*:\s*(\S+)\s*$", re.IGNORECASE)


class BaseShapeParser:  # Base interface for shape model formats
    def __init__(self, config):
        self.config = config
        self.validate_config()

    def __str__(self) -> str:
        return f"{self.config}"

    def validate_config(self):
        units = getattr(self.config, "units", None)
        if units is not None and units not in UNIT_SCALES:
            raise ConfigError(f"Unsupported shape units: {units}, expected one of {sorted(UNIT_SCALES)}")

    def parse(self, text: str) -> PolyhedronMesh:
        raise NotImplementedError

    def format(self, mesh: PolyhedronMesh) -> str:
        raise NotImplementedError

    def get_mesh(self) -> PolyhedronMesh:
        path = Path(self.config.path)
        if not path.is_file():
            raise ConfigError(f"Shape model file not found: {path}")
        mesh = self.parse(path.read_text(encoding="utf-8"))
        logger.info(f"Loaded shape model {path}: {mesh.vertex_count} vertices, {mesh.face_count} faces")
        return mesh

    # Shared line handling

    def iter_lines(self, text: str):
        """Yield (line_number, tokens) for content lines; record any units directive."""
        self.file_units = None
        for line_number, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                match = UNITS_DIRECTIVE.match(stripped)
                if match:
                    units = match.group(1).lower()
                    if units not in UNIT_SCALES:
                        raise MeshParseError(line_number, f"unsupported units directive '{units}'")
                    self.file_units = units
                continue
            content = stripped.split("#", 1)[0].strip()
            if content:
                yield line_number, content.split()

    def unit_scale(self) -> float:
        units = getattr(self.config, "units", None) or self.file_units or "m"
        return UNIT_SCALES[units]


def parse_floats(tokens: List[str], line_number: int, count: int) -> Tuple[float, ...]:
    if len(tokens) != count:
        raise MeshParseError(line_number, f"expected {count} numbers, found {len(tokens)}")
    try:
        return tuple(float(token) for token in tokens)
    except ValueError:
        raise MeshParseError(line_number, f"malformed number in {' '.join(tokens)!r}")


def parse_indices(tokens: List[str], line_number: int) -> Tuple[int, int, int]:
    if len(tokens) != 3:
        raise MeshParseError(line_number, f"expected a triangle (3 indices), found {len(tokens)}")
    try:
        # "i/t/n" references keep only the vertex index
        return tuple(int(token.split("/", 1)[0]) for token in tokens)
    except ValueError:
        raise MeshParseError(line_number, f"malformed face index in {' '.join(tokens)!r}")


def format_float(value: float) -> str:
    return repr(float(value))


# Common support methods for all shape parsers

def get_supported_shape_formats() -> List[str]:
    return [OBJ, TABULAR]


def detect_format(text: str) -> str:
    for raw in text.splitlines():
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        keyword = stripped.split()[0]
        return OBJ if keyword in ("v", "f", "vn", "vt", "o", "g") else TABULAR
    return TABULAR


def _parser_for(fmt: str, config) -> BaseShapeParser:
    if fmt == OBJ:
        from asteroid_gnc.shape_parsers.obj_shape_parser import ObjShapeParser

        return ObjShapeParser(config)
    elif fmt == TABULAR:
        from asteroid_gnc.shape_parsers.tabular_shape_parser import TabularShapeParser

        return TabularShapeParser(config)
    else:
        raise NotImplementedError(f"Unsupported shape format: {fmt}")


def get_shape_parser(config) -> BaseShapeParser:
    fmt = getattr(config, "format", None)
    if fmt is None:
        suffix = Path(config.path).suffix.lower()
        fmt = OBJ if suffix == ".obj" else TABULAR if suffix in (".tab", ".txt", ".shape") else None
    if fmt is None:
        raise NotImplementedError(f"Unsupported shape file: {config.path}")
    return _parser_for(fmt, config)


class _TextConfig:
    def __init__(self, units: Optional[str] = None):
        self.path = None
        self.units = units
        self.format = None


def parse_shape_model(text: str, fmt: Optional[str] = None, units: Optional[str] = None) -> PolyhedronMesh:
    return _parser_for(fmt or detect_format(text), _TextConfig(units)).parse(text)


def format_shape_model(mesh: PolyhedronMesh, fmt: str = TABULAR) -> str:
    return _parser_for(fmt, _TextConfig()).format(mesh)

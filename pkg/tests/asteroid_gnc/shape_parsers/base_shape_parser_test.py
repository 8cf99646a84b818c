import unittest

from asteroid_gnc.core.errors import ConfigError, MeshParseError, MeshStructureError
from asteroid_gnc.core.mesh import mass_properties, validate_mesh
from asteroid_gnc.shape_parsers.base_shape_parser import (
    OBJ,
    TABULAR,
    detect_format,
    format_shape_model,
    get_shape_parser,
    get_supported_shape_formats,
    parse_shape_model,
)
from asteroid_gnc.shape_parsers.obj_shape_parser import ObjShapeParser
from asteroid_gnc.shape_parsers.tabular_shape_parser import TabularShapeParser
from asteroid_gnc.utils.synthetic_shapes import castalia_class
from tests.test_utils import fixture_path, get_shape_config


class TestBaseShapeParser(unittest.TestCase):

    def test_get_shape_parser_obj(self):
        parser = get_shape_parser(get_shape_config(fixture_path('tetrahedron.obj')))
        self.assertIsInstance(parser, ObjShapeParser)

    def test_get_shape_parser_tabular(self):
        parser = get_shape_parser(get_shape_config(fixture_path('cube_km.tab')))
        self.assertIsInstance(parser, TabularShapeParser)

    def test_explicit_format_wins_over_suffix(self):
        parser = get_shape_parser(get_shape_config('shape.dat', fmt=OBJ))
        self.assertIsInstance(parser, ObjShapeParser)

    def test_unsupported_suffix(self):
        with self.assertRaises(NotImplementedError):
            get_shape_parser(get_shape_config('shape.ply'))

    def test_unsupported_units(self):
        with self.assertRaises(ConfigError):
            get_shape_parser(get_shape_config(fixture_path('cube_km.tab'), units='ft'))

    def test_missing_file(self):
        parser = get_shape_parser(get_shape_config(fixture_path('no_such_file.obj')))
        with self.assertRaises(ConfigError):
            parser.get_mesh()

    def test_supported_formats(self):
        self.assertEqual(get_supported_shape_formats(), [OBJ, TABULAR])

    def test_detect_format(self):
        self.assertEqual(detect_format(fixture_path('tetrahedron.obj').read_text()), OBJ)
        self.assertEqual(detect_format(fixture_path('cube_km.tab').read_text()), TABULAR)

    # Formatting then parsing gives back the same vertices and faces, bit for bit
    def test_format_round_trip(self):
        mesh = castalia_class(1)
        for fmt in get_supported_shape_formats():
            text = format_shape_model(mesh, fmt)
            self.assertTrue(text.startswith('# units: m'))
            self.assertTrue(parse_shape_model(text, fmt).same_content(mesh), fmt)


class TestObjShapeParser(unittest.TestCase):

    def test_parse_tetrahedron(self):
        mesh = get_shape_parser(get_shape_config(fixture_path('tetrahedron.obj'))).get_mesh()
        self.assertEqual((mesh.vertex_count, mesh.face_count), (4, 4))
        self.assertEqual(mesh.faces[0].tolist(), [0, 2, 1])
        self.assertTrue(validate_mesh(mesh).is_valid)
        self.assertAlmostEqual(mass_properties(mesh, 1.0).volume, 1.0 / 6.0, places=12)

    def test_open_tetrahedron_parses_but_is_invalid(self):
        mesh = get_shape_parser(get_shape_config(fixture_path('open_tetrahedron.obj'))).get_mesh()
        self.assertEqual(mesh.face_count, 3)
        self.assertFalse(validate_mesh(mesh).is_valid)

    def test_malformed_number_reports_line(self):
        with self.assertRaises(MeshParseError) as context:
            get_shape_parser(get_shape_config(fixture_path('malformed.obj'))).get_mesh()
        self.assertEqual(context.exception.line_number, 3)
        self.assertIn('line 3', str(context.exception))

    def test_index_out_of_range(self):
        with self.assertRaises(MeshStructureError):
            parse_shape_model('v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n', OBJ)

    def test_unknown_keyword(self):
        with self.assertRaises(MeshParseError):
            parse_shape_model('v 0 0 0\nl 1 2\n', OBJ)

    def test_ignored_keywords_and_slashes(self):
        text = 'mtllib body.mtl\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\ns off\nf 1/1/1 2/2/1 3/3/1\n'
        mesh = parse_shape_model(text, OBJ)
        self.assertEqual(mesh.faces.tolist(), [[0, 1, 2]])

    def test_units_override(self):
        mesh = get_shape_parser(get_shape_config(fixture_path('tetrahedron.obj'), units='km')).get_mesh()
        self.assertEqual(mesh.vertices.max(), 1000.0)


class TestTabularShapeParser(unittest.TestCase):

    def test_kilometre_directive(self):
        mesh = get_shape_parser(get_shape_config(fixture_path('cube_km.tab'))).get_mesh()
        self.assertEqual((mesh.vertex_count, mesh.face_count), (8, 12))
        self.assertEqual(mesh.vertices.max(), 1000.0)
        self.assertAlmostEqual(mass_properties(mesh, 1.0).volume / 1e9, 1.0, places=12)

    def test_config_units_override_directive(self):
        mesh = get_shape_parser(get_shape_config(fixture_path('cube_km.tab'), units='m')).get_mesh()
        self.assertEqual(mesh.vertices.max(), 1.0)

    def test_face_index_out_of_range(self):
        with self.assertRaises(MeshStructureError):
            get_shape_parser(get_shape_config(fixture_path('bad_index.tab'))).get_mesh()

    def test_short_file(self):
        with self.assertRaises(MeshParseError):
            parse_shape_model('4 4\n0 0 0\n1 0 0\n', TABULAR)

    def test_extra_rows(self):
        with self.assertRaises(MeshParseError) as context:
            parse_shape_model('1 0\n0 0 0\n1 1 1\n', TABULAR)
        self.assertEqual(context.exception.line_number, 3)

    def test_malformed_header(self):
        with self.assertRaises(MeshParseError):
            parse_shape_model('four 4\n', TABULAR)


if __name__ == '__main__':
    unittest.main()

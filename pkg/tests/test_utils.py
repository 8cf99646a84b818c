import logging
from pathlib import Path
from unittest.mock import MagicMock

import numpy as np
import yaml

from asteroid_gnc.config.general_config import GeneralConfig
from asteroid_gnc.core.environment import AsteroidEnvironment, DisturbanceParams, SpinState
from asteroid_gnc.core.mesh import PolyhedronMesh

FIXTURES = Path(__file__).parent / 'fixtures'

CASTALIA_PERIOD = 14652.0  # s
LANDING_SITE = [726.0, 0.0, 286.0]


def fixture_path(name):
    return FIXTURES / name


def get_run_config(config_path, out=None, command='run', workers=None, dt_override=None):
    args = MagicMock(
        command=command,
        config=str(config_path),
        out=None if out is None else str(out),
        dt_override=dt_override,
        quiet=True,
        log='INFO',
        workers=workers,
        shape=None,
        units=None,
        synthetic=None,
        subdivisions=None,
        format=None,
    )
    return GeneralConfig(args)


def get_validate_mesh_config(shape=None, synthetic=None, units=None, subdivisions=3):
    args = MagicMock(
        command='validate-mesh',
        config=None,
        out=None,
        dt_override=None,
        quiet=True,
        log='INFO',
        workers=None,
        shape=None if shape is None else str(shape),
        units=units,
        synthetic=synthetic,
        subdivisions=subdivisions,
        format=None,
    )
    return GeneralConfig(args)


def get_shape_config(path, units=None, fmt=None):
    return MagicMock(path=str(path), units=units, format=fmt)


def get_gravity_config(model='polyhedron', density=2100.0, mu=None, acceleration=None, reference_radius=1000.0):
    return MagicMock(
        model=model,
        density=density,
        gravitational_constant=6.67430e-11,
        mu=mu,
        acceleration=acceleration,
        reference_radius=reference_radius,
    )


def quiet_environment(spin_rate=0.0):
    """Spin only: no SRP and no solar gravity."""
    return AsteroidEnvironment(spin=SpinState(spin_rate), disturbance=DisturbanceParams(srp_coefficient=0.0, solar_mu=0.0))


def reversed_faces(mesh, face_indices=None):
    faces = np.array(mesh.faces)
    rows = range(len(faces)) if face_indices is None else face_indices
    for row in rows:
        faces[row] = faces[row][::-1]
    return PolyhedronMesh(mesh.vertices, faces)


def ray_cast_inside(mesh, point, direction=(0.5377, 0.1833, 0.8231)):
    """Independent inside test: count crossings of a ray with every triangle."""
    origin = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    crossings = 0
    for face in mesh.faces:
        a, b, c = mesh.vertices[face]
        e1, e2 = b - a, c - a
        p = np.cross(d, e2)
        det = e1 @ p
        if abs(det) < 1e-15:
            continue
        s = origin - a
        u = (s @ p) / det
        q = np.cross(s, e1)
        v = (d @ q) / det
        t = (e2 @ q) / det
        if u >= 0 and v >= 0 and u + v <= 1 and t > 0:
            crossings += 1
    return crossings % 2 == 1


def uniform_box_potential(size, density, point, gravitational_constant=1.0, nodes=16):
    """Gauss-Legendre quadrature of G rho / |p - q| over a centred cube."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * size * t
    weights = 0.5 * size * w
    X, Y, Z = np.meshgrid(x, x, x, indexing='ij')
    W = weights[:, None, None] * weights[None, :, None] * weights[None, None, :]
    p = np.asarray(point, dtype=float)
    r = np.sqrt((X - p[0]) ** 2 + (Y - p[1]) ** 2 + (Z - p[2]) ** 2)
    return gravitational_constant * density * float((W / r).sum())


def mission_scenario(subdivisions=2, hops=True, landing=True):
    """Descent, landing and two grid hops on a coarse Castalia-class body."""
    scenario = {
        'name': 'castalia_mission',
        'seed': 7,
        'shape': {'synthetic': 'castalia_class', 'subdivisions': subdivisions},
        'gravity': {'model': 'polyhedron', 'density': 2100.0},
        'environment': {'rotation_period': CASTALIA_PERIOD},
        'site': {'position': LANDING_SITE},
        'descent': {'dt': 1.0},
    }
    if landing:
        scenario['landing'] = {'dt': 0.1, 't_max': 1500.0}
    if hops:
        scenario['hops'] = {
            'dt': 5.0,
            't_max': 2000.0,
            'grid': {'speeds': [0.1, 0.2], 'azimuths_deg': [0.0, 180.0]},
        }
    return scenario


def hop_batch_scenario(subdivisions=1):
    """Eight tangential launches from the landing site."""
    return {
        'name': 'hop_grid',
        'shape': {'synthetic': 'castalia_class', 'subdivisions': subdivisions},
        'gravity': {'model': 'polyhedron', 'density': 2100.0},
        'environment': {'rotation_period': CASTALIA_PERIOD},
        'site': {'position': LANDING_SITE},
        'hops': {
            'dt': 5.0,
            't_max': 1500.0,
            'grid': {'speeds': [0.05, 0.1, 0.15, 0.2], 'azimuths_deg': [0.0, 180.0]},
        },
    }


def write_scenario(directory, data, name='scenario.yaml'):
    path = Path(directory) / name
    path.write_text(yaml.safe_dump(data, sort_keys=False), encoding='utf-8')
    return path


def reset_logging():
    """Close the handlers main() attaches to the root logger."""
    root = logging.getLogger()
    for handler in root.handlers[:]:
        handler.close()
        root.removeHandler(handler)

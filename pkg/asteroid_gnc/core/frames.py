"""
Body-fixed and landing-site frames.

The site frame has its origin at the landing site R_bl and its Z axis along the radial
direction R_bl / |R_bl|. T maps site-frame vectors into the body frame:

    R_body = T R_site + R_bl

Both frames rotate with the asteroid, so velocities transform by T alone.
"""

import dataclasses
import logging
import math
from typing import Optional, Tuple

import numpy as np

from asteroid_gnc.core.errors import DegenerateLongitudeError

logger = logging.getLogger(__name__)

# Sites whose horizontal offset is below this fraction of |R_bl| sit on the spin axis
POLAR_TOLERANCE = 1e-12


@dataclasses.dataclass(frozen=True, eq=False)
class SiteFrame:
    origin: np.ndarray  # R_bl, body frame (m)
    latitude: float  # rad
    longitude: float  # rad
    rotation: np.ndarray  # T, site -> body

    def __post_init__(self):
        for name in ("origin", "rotation"):
            value = np.array(getattr(self, name), dtype=float)
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __str__(self) -> str:
        return (
            f"SiteFrame(origin={self.origin.tolist()}, latitude={math.degrees(self.latitude):.4f} deg, "
            f"longitude={math.degrees(self.longitude):.4f} deg)"
        )

    @property
    def up(self) -> np.ndarray:
        return self.rotation[:, 2]


def site_rotation(latitude: float, longitude: float) -> np.ndarray:
    sin_phi, cos_phi = math.sin(latitude), math.cos(latitude)
    sin_lam, cos_lam = math.sin(longitude), math.cos(longitude)
    return np.array(
        [
            [sin_phi * cos_lam, -sin_lam, cos_phi * cos_lam],
            [sin_phi * sin_lam, cos_lam, cos_phi * sin_lam],
            [-cos_phi, 0.0, sin_phi],
        ]
    )


def site_frame_from_position(site, longitude: Optional[float] = None) -> SiteFrame:
    """
    Build the site frame for a body-frame site position.

    `longitude` is required when the site lies on the spin axis, where atan2(y, x) is
    undefined. Elsewhere the longitude is derived from the position.
    """
    r = np.asarray(site, dtype=float).reshape(3)
    radius = float(np.linalg.norm(r))
    if radius == 0.0:
        raise ValueError("Landing site cannot be the body origin")
    horizontal = math.hypot(r[0], r[1])
    latitude = math.atan2(r[2], horizontal)

    if horizontal <= POLAR_TOLERANCE * radius:
        if longitude is None:
            raise DegenerateLongitudeError(
                f"Site {r.tolist()} lies on the spin axis; supply the longitude explicitly"
            )
        latitude = math.copysign(math.pi / 2.0, r[2])
        lam = float(longitude)
    else:
        lam = math.atan2(r[1], r[0])
        if longitude is not None and not math.isclose(math.remainder(longitude - lam, 2.0 * math.pi), 0.0, abs_tol=1e-9):
            logger.warning(f"Ignoring longitude {longitude} for off-axis site; using derived {lam}")

    frame = SiteFrame(origin=r, latitude=latitude, longitude=lam, rotation=site_rotation(latitude, lam))
    logger.debug(f"Site frame built: {frame}")
    return frame


def vector_to_site(frame: SiteFrame, vector) -> np.ndarray:
    return frame.rotation.T @ np.asarray(vector, dtype=float)


def vector_to_body(frame: SiteFrame, vector) -> np.ndarray:
    return frame.rotation @ np.asarray(vector, dtype=float)


def point_to_site(frame: SiteFrame, point) -> np.ndarray:
    return frame.rotation.T @ (np.asarray(point, dtype=float) - frame.origin)


def point_to_body(frame: SiteFrame, point) -> np.ndarray:
    return frame.rotation @ np.asarray(point, dtype=float) + frame.origin


def body_to_site(frame: SiteFrame, position, velocity) -> Tuple[np.ndarray, np.ndarray]:
    return point_to_site(frame, position), vector_to_site(frame, velocity)


def site_to_body(frame: SiteFrame, position, velocity) -> Tuple[np.ndarray, np.ndarray]:
    return point_to_body(frame, position), vector_to_body(frame, velocity)

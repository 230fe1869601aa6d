"""Geodesic distance kernel with compiled and pure-Python backends.

The compiled extension (_cgeo, Cython) is used when it built successfully;
otherwise the pure-Python twin (_pygeo) takes over. Set
``TAGSCOUT_GEO_BACKEND=python`` to force the fallback (used by the
benchmark and the parity tests). ``BACKEND`` reports which one is active.
"""

import os

from tagscout.errors import DegenerateGeometryError

from tagscout.geo import _pygeo

EARTH_RADIUS_M = _pygeo.EARTH_RADIUS_M

if os.environ.get("TAGSCOUT_GEO_BACKEND", "").lower() == "python":
    _impl = _pygeo
    BACKEND = "python"
else:
    try:
        from tagscout.geo import _cgeo as _impl

        BACKEND = "c"
    except ImportError:
        _impl = _pygeo
        BACKEND = "python"

haversine_m = _impl.haversine_m
point_segment_m = _impl.point_segment_m


def point_polyline_m(lon: float, lat: float, coords) -> float:
    """Distance in meters from (lon, lat) to the nearest polyline segment."""
    if len(coords) < 2:
        raise DegenerateGeometryError(
            f"polyline needs >=2 vertices, got {len(coords)}"
        )
    return _impl.point_polyline_m(lon, lat, coords)


def polyline_length_m(coords) -> float:
    """Length in meters of a (lon, lat) polyline (haversine per segment)."""
    if len(coords) < 2:
        raise DegenerateGeometryError(
            f"polyline needs >=2 vertices, got {len(coords)}"
        )
    return _impl.polyline_length_m(coords)

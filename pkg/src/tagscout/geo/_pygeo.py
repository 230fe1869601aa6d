"""Pure-Python geodesic kernel.

Mirror of the compiled kernel in _cgeo.pyx: same formulas, same operation
order, so both backends produce identical selections on the same inputs.
All distances are spherical (haversine / cross-track) with the IUGG mean
Earth radius. Coordinates are (lon, lat) in decimal degrees.
"""

from math import asin, atan2, cos, radians, sin, sqrt

EARTH_RADIUS_M = 6371008.8


def haversine_m(lon1: float, lat1: float, lon2: float, lat2: float) -> float:
    """Great-circle distance between two points, in meters."""
    phi1 = radians(lat1)
    phi2 = radians(lat2)
    dphi = radians(lat2 - lat1)
    dlam = radians(lon2 - lon1)
    a = sin(dphi / 2.0) ** 2 + cos(phi1) * cos(phi2) * sin(dlam / 2.0) ** 2
    if a > 1.0:
        a = 1.0
    return 2.0 * EARTH_RADIUS_M * asin(sqrt(a))


def _central_angle(lon1, lat1, lon2, lat2):
    phi1 = radians(lat1)
    phi2 = radians(lat2)
    dphi = radians(lat2 - lat1)
    dlam = radians(lon2 - lon1)
    a = sin(dphi / 2.0) ** 2 + cos(phi1) * cos(phi2) * sin(dlam / 2.0) ** 2
    if a > 1.0:
        a = 1.0
    return 2.0 * asin(sqrt(a))


def _bearing_rad(lon1, lat1, lon2, lat2):
    phi1 = radians(lat1)
    phi2 = radians(lat2)
    dlam = radians(lon2 - lon1)
    y = sin(dlam) * cos(phi2)
    x = cos(phi1) * sin(phi2) - sin(phi1) * cos(phi2) * cos(dlam)
    return atan2(y, x)


def point_segment_m(plon, plat, alon, alat, blon, blat):
    """Distance from point P to the great-circle segment A-B, in meters.

    Cross-track distance when the perpendicular foot falls inside the
    segment, otherwise the distance to the nearer endpoint.
    """
    d13 = _central_angle(alon, alat, plon, plat)
    if d13 == 0.0:
        return 0.0
    if alon == blon and alat == blat:
        return d13 * EARTH_RADIUS_M
    theta13 = _bearing_rad(alon, alat, plon, plat)
    theta12 = _bearing_rad(alon, alat, blon, blat)
    # foot of the perpendicular lies behind A
    if cos(theta13 - theta12) < 0.0:
        return d13 * EARTH_RADIUS_M
    sin_dxt = sin(d13) * sin(theta13 - theta12)
    if sin_dxt > 1.0:
        sin_dxt = 1.0
    elif sin_dxt < -1.0:
        sin_dxt = -1.0
    dxt = asin(sin_dxt)
    cos_dxt = cos(dxt)
    if cos_dxt == 0.0:
        # perpendicular point is a quarter circle away; nearest endpoint wins
        d23 = _central_angle(blon, blat, plon, plat)
        return min(d13, d23) * EARTH_RADIUS_M
    # along-track angle from A towards B
    cos_dat = cos(d13) / cos_dxt
    if cos_dat > 1.0:
        cos_dat = 1.0
    elif cos_dat < -1.0:
        cos_dat = -1.0
    dat = atan2(sqrt(1.0 - cos_dat * cos_dat), cos_dat)
    d12 = _central_angle(alon, alat, blon, blat)
    if dat > d12:
        return _central_angle(blon, blat, plon, plat) * EARTH_RADIUS_M
    return abs(dxt) * EARTH_RADIUS_M


def point_polyline_m(plon, plat, coords):
    """Distance from a point to the nearest segment of a polyline, in meters.

    ``coords`` is a sequence of (lon, lat) pairs with at least two vertices.
    """
    best = -1.0
    for i in range(len(coords) - 1):
        alon, alat = coords[i]
        blon, blat = coords[i + 1]
        d = point_segment_m(plon, plat, alon, alat, blon, blat)
        if best < 0.0 or d < best:
            best = d
    return best


def polyline_length_m(coords):
    """Sum of haversine segment lengths along a polyline, in meters."""
    total = 0.0
    for i in range(len(coords) - 1):
        alon, alat = coords[i]
        blon, blat = coords[i + 1]
        total += haversine_m(alon, alat, blon, blat)
    return total

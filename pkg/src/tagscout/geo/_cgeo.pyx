# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geodesic kernel.

Twin of _pygeo.py: identical formulas and operation order. Keep both files
in sync; the pure-Python module is the reference for behavior.
"""

from libc.math cimport asin, atan2, cos, fabs, sin, sqrt

cdef double EARTH_RADIUS_M = 6371008.8
cdef double DEG = 0.017453292519943295  # pi / 180


cdef inline double _central_angle(double lon1, double lat1,
                                  double lon2, double lat2) nogil:
    cdef double phi1 = lat1 * DEG
    cdef double phi2 = lat2 * DEG
    cdef double dphi = (lat2 - lat1) * DEG
    cdef double dlam = (lon2 - lon1) * DEG
    cdef double sp = sin(dphi / 2.0)
    cdef double sl = sin(dlam / 2.0)
    cdef double a = sp * sp + cos(phi1) * cos(phi2) * sl * sl
    if a > 1.0:
        a = 1.0
    return 2.0 * asin(sqrt(a))


cdef inline double _bearing_rad(double lon1, double lat1,
                                double lon2, double lat2) nogil:
    cdef double phi1 = lat1 * DEG
    cdef double phi2 = lat2 * DEG
    cdef double dlam = (lon2 - lon1) * DEG
    cdef double y = sin(dlam) * cos(phi2)
    cdef double x = cos(phi1) * sin(phi2) - sin(phi1) * cos(phi2) * cos(dlam)
    return atan2(y, x)


cdef double _point_segment(double plon, double plat,
                           double alon, double alat,
                           double blon, double blat) nogil:
    cdef double d13 = _central_angle(alon, alat, plon, plat)
    cdef double theta13, theta12, sin_dxt, dxt, cos_dxt, cos_dat, dat, d12, d23
    if d13 == 0.0:
        return 0.0
    if alon == blon and alat == blat:
        return d13 * EARTH_RADIUS_M
    theta13 = _bearing_rad(alon, alat, plon, plat)
    theta12 = _bearing_rad(alon, alat, blon, blat)
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
        d23 = _central_angle(blon, blat, plon, plat)
        if d23 < d13:
            return d23 * EARTH_RADIUS_M
        return d13 * EARTH_RADIUS_M
    cos_dat = cos(d13) / cos_dxt
    if cos_dat > 1.0:
        cos_dat = 1.0
    elif cos_dat < -1.0:
        cos_dat = -1.0
    dat = atan2(sqrt(1.0 - cos_dat * cos_dat), cos_dat)
    d12 = _central_angle(alon, alat, blon, blat)
    if dat > d12:
        return _central_angle(blon, blat, plon, plat) * EARTH_RADIUS_M
    return fabs(dxt) * EARTH_RADIUS_M


def haversine_m(double lon1, double lat1, double lon2, double lat2):
    """Great-circle distance between two points, in meters."""
    return _central_angle(lon1, lat1, lon2, lat2) * EARTH_RADIUS_M


def point_segment_m(double plon, double plat, double alon, double alat,
                    double blon, double blat):
    """Distance from point P to the great-circle segment A-B, in meters."""
    return _point_segment(plon, plat, alon, alat, blon, blat)


def point_polyline_m(double plon, double plat, coords):
    """Distance from a point to the nearest segment of a polyline, in meters."""
    cdef Py_ssize_t n = len(coords)
    cdef Py_ssize_t i
    cdef double best = -1.0
    cdef double d, alon, alat, blon, blat
    alon, alat = coords[0]
    for i in range(n - 1):
        blon, blat = coords[i + 1]
        d = _point_segment(plon, plat, alon, alat, blon, blat)
        if best < 0.0 or d < best:
            best = d
        alon = blon
        alat = blat
    return best


def polyline_length_m(coords):
    """Sum of haversine segment lengths along a polyline, in meters."""
    cdef Py_ssize_t n = len(coords)
    cdef Py_ssize_t i
    cdef double total = 0.0
    cdef double alon, alat, blon, blat
    alon, alat = coords[0]
    for i in range(n - 1):
        blon, blat = coords[i + 1]
        total += _central_angle(alon, alat, blon, blat) * EARTH_RADIUS_M
        alon = blon
        alat = blat
    return total

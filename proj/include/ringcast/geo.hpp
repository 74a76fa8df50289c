// WGS-84 points, great-circle distance and a local planar frame.

#pragma once

#include <span>

namespace ringcast {

inline constexpr double kEarthRadiusM = 6371008.8;

struct GeoPoint {
    double lat = 0.0;  // degrees
    double lon = 0.0;  // degrees

    bool valid() const { return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0; }
};

struct PlanePoint {
    double x = 0.0;  // meters east
    double y = 0.0;  // meters north
};

// Haversine great-circle distance in meters.
double haversine_m(GeoPoint a, GeoPoint b);

// Equirectangular tangent plane centered at a reference point. Adequate at
// city scale; used for projections only, never for lengths.
class LocalFrame {
public:
    LocalFrame() = default;
    explicit LocalFrame(GeoPoint origin);

    // Centered on the arithmetic mean of the points.
    static LocalFrame centroid_of(std::span<const GeoPoint> points);

    PlanePoint to_plane(GeoPoint p) const;
    GeoPoint to_geo(PlanePoint p) const;
    GeoPoint origin() const { return origin_; }

private:
    GeoPoint origin_{};
    double cos_lat_ = 1.0;
};

} // namespace ringcast

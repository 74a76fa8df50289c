#include "ringcast/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ringcast {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

} // namespace

double haversine_m(GeoPoint a, GeoPoint b) {
    const double phi1 = a.lat * kDeg;
    const double phi2 = b.lat * kDeg;
    const double dphi = (b.lat - a.lat) * kDeg;
    const double dlambda = (b.lon - a.lon) * kDeg;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

LocalFrame::LocalFrame(GeoPoint origin) : origin_(origin), cos_lat_(std::cos(origin.lat * kDeg)) {}

LocalFrame LocalFrame::centroid_of(std::span<const GeoPoint> points) {
    double lat = 0.0;
    double lon = 0.0;
    for (const auto& p : points) {
        lat += p.lat;
        lon += p.lon;
    }
    const auto n = static_cast<double>(points.empty() ? 1 : points.size());
    return LocalFrame(GeoPoint{lat / n, lon / n});
}

PlanePoint LocalFrame::to_plane(GeoPoint p) const {
    return PlanePoint{(p.lon - origin_.lon) * kDeg * kEarthRadiusM * cos_lat_,
                      (p.lat - origin_.lat) * kDeg * kEarthRadiusM};
}

GeoPoint LocalFrame::to_geo(PlanePoint p) const {
    return GeoPoint{origin_.lat + p.y / (kEarthRadiusM * kDeg),
                    origin_.lon + p.x / (kEarthRadiusM * kDeg * cos_lat_)};
}

} // namespace ringcast

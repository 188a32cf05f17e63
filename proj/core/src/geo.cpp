#include "tidp/geo.hpp"

#include <cmath>

namespace tidp {

double haversine(const GeoPoint& a, const GeoPoint& b) {
    const double deg = M_PI / 180.0;
    const double lat1 = a.latitude * deg;
    const double lat2 = b.latitude * deg;
    const double dlat = (b.latitude - a.latitude) * deg;
    const double dlon = (b.longitude - a.longitude) * deg;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace tidp

#pragma once

namespace tidp {

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

struct GeoPoint {
    double latitude = 0.0;
    double longitude = 0.0;

    bool valid() const {
        return latitude >= -90.0 && latitude <= 90.0 && longitude >= -180.0 && longitude <= 180.0;
    }
};

/// Great-circle distance in meters.
double haversine(const GeoPoint& a, const GeoPoint& b);

}  // namespace tidp

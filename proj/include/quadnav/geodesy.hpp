#pragma once

#include <cmath>
#include <stdexcept>

#include "quadnav/types.hpp"

namespace quadnav {

// WGS-84 ellipsoid
inline constexpr double kWgs84A = 6378137.0;             // semi-major axis [m]
inline constexpr double kWgs84F = 1.0 / 298.257223563;   // flattening
inline constexpr double kWgs84E2 = kWgs84F * (2.0 - kWgs84F);

struct GeodeticPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_m = 0.0;
};

// Local tangent-plane (flat-Earth) conversion about `origin` using the WGS-84
// meridian/prime-vertical radii evaluated at the origin latitude.
inline Vec3 geodetic_to_ned(const GeodeticPoint& pt, const GeodeticPoint& origin) {
  if (std::abs(pt.lat_deg) > 90.0 || std::abs(origin.lat_deg) > 90.0)
    throw std::invalid_argument("geodetic_to_ned: |latitude| must be <= 90 deg");
  if (!std::isfinite(pt.lat_deg) || !std::isfinite(pt.lon_deg) || !std::isfinite(pt.alt_m) ||
      !std::isfinite(origin.lat_deg) || !std::isfinite(origin.lon_deg) ||
      !std::isfinite(origin.alt_m))
    throw std::invalid_argument("geodetic_to_ned: non-finite input");

  const double deg = M_PI / 180.0;
  const double lat0 = origin.lat_deg * deg;
  const double s = std::sin(lat0);
  const double den = 1.0 - kWgs84E2 * s * s;
  const double rn = kWgs84A / std::sqrt(den);                    // prime vertical
  const double rm = kWgs84A * (1.0 - kWgs84E2) / std::pow(den, 1.5);  // meridian

  Vec3 ned;
  ned.x() = (pt.lat_deg - origin.lat_deg) * deg * (rm + origin.alt_m);
  ned.y() = (pt.lon_deg - origin.lon_deg) * deg * std::cos(lat0) * (rn + origin.alt_m);
  ned.z() = -(pt.alt_m - origin.alt_m);
  return ned;
}

}  // namespace quadnav

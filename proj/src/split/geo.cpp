// GPS-based techniques: polygon areas, DBSCAN density clusters, first-passage time.

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <unordered_map>

#include "multiseg/technique.hpp"

namespace multiseg {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool valid(double lat, double lon) { return !is_missing(lat) && !is_missing(lon); }

double hav(double theta) {
  const double s = std::sin(theta / 2.0);
  return s * s;
}

/// Uniform lat/long grid whose cells are at least eps wide in every
/// direction (for the latitudes present), so eps-neighbours are always in
/// adjacent cells.
class GeoGrid {
 public:
  GeoGrid(std::span<const double> lat, std::span<const double> lon, double eps_meters)
      : lat_(lat), lon_(lon), eps_(eps_meters) {
    const double angle = eps_meters / kEarthRadiusMeters;
    lat_cell_ = std::max(angle / kDegToRad, 1e-9);
    double max_abs_lat = 0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
      if (valid(lat[i], lon[i])) max_abs_lat = std::max(max_abs_lat, std::abs(lat[i]));
    }
    const double cos_max = std::cos(std::min(90.0, max_abs_lat) * kDegToRad);
    const double arg = cos_max > 0 ? std::sin(angle / 2.0) / cos_max : 2.0;
    lon_cells_ = 1;
    if (arg < 1.0) {
      const double width = 2.0 * std::asin(arg) / kDegToRad;
      lon_cells_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(360.0 / width)));
    }
    // with fewer than three cells every cell is adjacent to every other
    if (lon_cells_ < 3) lon_cells_ = 1;
    lon_cell_ = 360.0 / static_cast<double>(lon_cells_);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      if (valid(lat[i], lon[i])) cells_[key(lat_index(lat[i]), lon_index(lon[i]))].push_back(i);
    }
  }

  /// All valid points within eps of point i (including i), in a deterministic order.
  void neighbours(std::size_t i, std::vector<std::size_t>& out) const {
    out.clear();
    const GeoPoint p{lat_[i], lon_[i]};
    const auto li = lat_index(p.lat);
    const auto oi = lon_index(p.lon);
    const std::int64_t lon_span = lon_cells_ == 1 ? 0 : 1;
    for (std::int64_t dl = -1; dl <= 1; ++dl) {
      for (std::int64_t dk = -lon_span; dk <= lon_span; ++dk) {
        const std::int64_t o = ((oi + dk) % lon_cells_ + lon_cells_) % lon_cells_;
        const auto it = cells_.find(key(li + dl, o));
        if (it == cells_.end()) continue;
        for (std::size_t j : it->second) {
          if (haversine_meters(p, {lat_[j], lon_[j]}) <= eps_) out.push_back(j);
        }
      }
    }
  }

 private:
  std::int64_t lat_index(double lat) const {
    return static_cast<std::int64_t>(std::floor((lat + 90.0) / lat_cell_));
  }
  std::int64_t lon_index(double lon) const {
    if (lon_cells_ == 1) return 0;
    auto idx = static_cast<std::int64_t>(std::floor((lon + 180.0) / lon_cell_));
    return ((idx % lon_cells_) + lon_cells_) % lon_cells_;
  }
  static std::uint64_t key(std::int64_t a, std::int64_t b) {
    return (static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint64_t>(b & 0xffffffff);
  }

  std::span<const double> lat_;
  std::span<const double> lon_;
  double eps_;
  double lat_cell_ = 1;
  double lon_cell_ = 360;
  std::int64_t lon_cells_ = 1;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace

double haversine_meters(GeoPoint a, GeoPoint b) noexcept {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double h = hav(phi2 - phi1) + std::cos(phi1) * std::cos(phi2) * hav((b.lon - a.lon) * kDegToRad);
  return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

bool point_in_polygon(GeoPoint p, std::span<const GeoPoint> polygon) noexcept {
  constexpr double kEps = 1e-12;
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  // x = longitude, y = latitude
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[j];
    const auto& b = polygon[i];
    const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    if (std::abs(cross) <= kEps && p.lon >= std::min(a.lon, b.lon) - kEps &&
        p.lon <= std::max(a.lon, b.lon) + kEps && p.lat >= std::min(a.lat, b.lat) - kEps &&
        p.lat <= std::max(a.lat, b.lat) + kEps) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<std::int64_t> dbscan_labels(std::span<const double> lat, std::span<const double> lon,
                                        double eps_meters, int min_pts) {
  constexpr std::int64_t kUnvisited = -2;
  constexpr std::int64_t kNoise = -1;
  const std::size_t n = lat.size();
  std::vector<std::int64_t> labels(n, kUnvisited);
  const GeoGrid grid(lat, lon, eps_meters);
  std::vector<std::size_t> nb, nb2;
  std::int64_t cluster = 0;
  const auto min_count = static_cast<std::size_t>(min_pts);
  for (std::size_t p = 0; p < n; ++p) {
    if (labels[p] != kUnvisited) continue;
    if (!valid(lat[p], lon[p])) {
      labels[p] = kNoise;
      continue;
    }
    grid.neighbours(p, nb);
    if (nb.size() < min_count) {
      labels[p] = kNoise;
      continue;
    }
    labels[p] = cluster;
    std::deque<std::size_t> seeds(nb.begin(), nb.end());
    while (!seeds.empty()) {
      const std::size_t q = seeds.front();
      seeds.pop_front();
      if (labels[q] == kNoise) labels[q] = cluster;  // border point
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      grid.neighbours(q, nb2);
      if (nb2.size() >= min_count) seeds.insert(seeds.end(), nb2.begin(), nb2.end());
    }
    ++cluster;
  }
  return labels;
}

std::vector<double> first_passage_times(std::span<const Timestamp> t, std::span<const double> lat,
                                        std::span<const double> lon, double radius_meters) {
  const std::size_t n = t.size();
  std::vector<double> fpt(n, kMissing);
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid(lat[i], lon[i])) continue;
    const GeoPoint origin{lat[i], lon[i]};
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!valid(lat[j], lon[j])) continue;
      if (haversine_meters(origin, {lat[j], lon[j]}) > radius_meters) {
        fpt[i] = static_cast<double>(t[j] - t[i]) / 1000.0;
        break;
      }
    }
  }
  return fpt;
}

namespace techniques {

SplitIndexList geo_area(std::span<const double> lat, std::span<const double> lon,
                        const GeoArea& spec) {
  std::vector<std::int64_t> inside(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    inside[i] = valid(lat[i], lon[i]) && point_in_polygon({lat[i], lon[i]}, spec.polygon) ? 1 : 0;
  }
  return label_transitions(inside);
}

SplitIndexList density_clusters(std::span<const double> lat, std::span<const double> lon,
                                const DensityClusters& spec) {
  return label_transitions(dbscan_labels(lat, lon, spec.eps_meters, spec.min_pts));
}

SplitIndexList fpt_minima(std::span<const Timestamp> t, std::span<const double> lat,
                          std::span<const double> lon, const FptMinima& spec) {
  const auto fpt = first_passage_times(t, lat, lon, spec.radius_meters);
  std::vector<std::size_t> at;
  std::vector<double> f;
  for (std::size_t i = 0; i < fpt.size(); ++i) {
    if (!is_missing(fpt[i])) {
      at.push_back(i);
      f.push_back(fpt[i]);
    }
  }
  std::vector<std::int64_t> splits;
  for (std::size_t k = 1; k + 1 < f.size(); ++k) {
    if (!(f[k] < f[k - 1] && f[k] < f[k + 1])) continue;
    double left = f[k];
    for (std::size_t j = k; j-- > 0;) {
      if (f[j] < f[k]) break;
      left = std::max(left, f[j]);
    }
    double right = f[k];
    for (std::size_t j = k + 1; j < f.size(); ++j) {
      if (f[j] < f[k]) break;
      right = std::max(right, f[j]);
    }
    if (std::min(left, right) - f[k] >= spec.prominence_seconds) {
      splits.push_back(static_cast<std::int64_t>(at[k]));
    }
  }
  return SplitIndexList::from_interior(static_cast<std::int64_t>(t.size()), std::move(splits));
}

}  // namespace techniques
}  // namespace multiseg

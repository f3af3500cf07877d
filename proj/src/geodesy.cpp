#include "otgrid/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "otgrid/errors.hpp"
#include "otgrid/util.hpp"

namespace otgrid {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

inline double haversine_rad(double lon_a, double lat_a, double cos_lat_a, double lon_b,
                            double lat_b, double cos_lat_b) {
  double s_lat = std::sin(0.5 * (lat_b - lat_a));
  double s_lon = std::sin(0.5 * (lon_b - lon_a));
  double h = s_lat * s_lat + cos_lat_a * cos_lat_b * s_lon * s_lon;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

void check_lonlat(double lon, double lat) {
  if (!(lon >= -180.0 && lon < 180.0)) {
    throw ValidationError("longitude " + format_double(lon) + " outside [-180, 180)");
  }
  if (!(lat >= -90.0 && lat <= 90.0)) {
    throw ValidationError("latitude " + format_double(lat) + " outside [-90, 90]");
  }
}

}  // namespace

double great_circle_km(double lon_a, double lat_a, double lon_b, double lat_b) {
  check_lonlat(lon_a, lat_a);
  check_lonlat(lon_b, lat_b);
  double la = lat_a * kDegToRad, lb = lat_b * kDegToRad;
  return haversine_rad(lon_a * kDegToRad, la, std::cos(la), lon_b * kDegToRad, lb,
                       std::cos(lb));
}

double depth_distance_m(double a_m, double b_m) {
  if (a_m < 0.0 || b_m < 0.0) throw ValidationError("negative depth");
  return std::abs(a_m - b_m);
}

CostMatrix CostMatrix::build(const MassField& source, const MassField& target,
                             std::optional<double> cutoff) {
  if (source.geometry() != target.geometry()) {
    throw ValidationError("cost matrix: source and target geometry modes differ");
  }
  CostMatrix cm;
  cm.geometry_ = source.geometry();
  cm.n_source_ = static_cast<int>(source.size());
  cm.n_target_ = static_cast<int>(target.size());
  cm.dense_ = !cutoff.has_value();
  cm.cutoff_ = cutoff.value_or(std::numeric_limits<double>::infinity());
  if (cutoff && !(*cutoff > 0.0)) throw ValidationError("cutoff must be positive");

  const std::size_t m = source.size(), n = target.size();
  const bool lonlat = cm.geometry_ == Geometry::LonLat;

  // Precomputed radian coordinates keep the inner loop to two sins and an asin.
  std::vector<double> slon(m), slat(m), scos(m), tlon(n), tlat(n), tcos(n);
  if (lonlat) {
    for (std::size_t i = 0; i < m; ++i) {
      slon[i] = source.lon()[i] * kDegToRad;
      slat[i] = source.lat()[i] * kDegToRad;
      scos[i] = std::cos(slat[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      tlon[j] = target.lon()[j] * kDegToRad;
      tlat[j] = target.lat()[j] * kDegToRad;
      tcos[j] = std::cos(tlat[j]);
    }
  }

  auto distance = [&](std::size_t i, std::size_t j) {
    if (lonlat) {
      return haversine_rad(slon[i], slat[i], scos[i], tlon[j], tlat[j], tcos[j]);
    }
    return std::abs(source.depth_m()[i] - target.depth_m()[j]);
  };

  double max_c = 0.0;
  if (cm.dense_) {
    cm.costs_.resize(m * n);
    std::size_t a = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j, ++a) {
        double d = distance(i, j);
        cm.costs_[a] = d * d;
        max_c = std::max(max_c, cm.costs_[a]);
      }
    }
  } else {
    const double c = *cutoff;
    cm.row_ptr_.assign(m + 1, 0);
    std::vector<char> col_hit(n, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double d = distance(i, j);
        if (d <= c) {
          cm.cols_.push_back(static_cast<int32_t>(j));
          cm.costs_.push_back(d * d);
          max_c = std::max(max_c, d * d);
          col_hit[j] = 1;
        }
      }
      cm.row_ptr_[i + 1] = cm.cols_.size();
    }
    for (std::size_t i = 0; i < m && !cm.isolated_; ++i) {
      if (cm.row_ptr_[i + 1] == cm.row_ptr_[i]) cm.isolated_ = true;
    }
    for (std::size_t j = 0; j < n && !cm.isolated_; ++j) {
      if (!col_hit[j]) cm.isolated_ = true;
    }
  }
  cm.max_cost_ = max_c;
  return cm;
}

CostMatrix CostMatrix::from_dense(int n_source, int n_target, std::vector<double> costs,
                                  Geometry geometry) {
  if (n_source <= 0 || n_target <= 0 ||
      costs.size() != static_cast<std::size_t>(n_source) * static_cast<std::size_t>(n_target)) {
    throw ValidationError("cost matrix dimensions do not match entry count");
  }
  CostMatrix cm;
  cm.geometry_ = geometry;
  cm.n_source_ = n_source;
  cm.n_target_ = n_target;
  cm.dense_ = true;
  cm.cutoff_ = std::numeric_limits<double>::infinity();
  double max_c = 0.0;
  for (double c : costs) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw ValidationError("cost matrix entries must be finite and nonnegative");
    }
    max_c = std::max(max_c, c);
  }
  cm.max_cost_ = max_c;
  cm.costs_ = std::move(costs);
  return cm;
}

double CostMatrix::at(int i, int j) const {
  if (!dense_) throw ValidationError("element access on a cutoff-sparsified cost matrix");
  return costs_[static_cast<std::size_t>(i) * n_target_ + j];
}

std::span<const double> CostMatrix::dense_costs() const {
  if (!dense_) throw ValidationError("dense view of a cutoff-sparsified cost matrix");
  return costs_;
}

CostMatrix build_cost(const MassField& source, const MassField& target,
                      std::optional<double> cutoff) {
  return CostMatrix::build(source, target, cutoff);
}

}  // namespace otgrid

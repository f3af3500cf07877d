#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "otgrid/field.hpp"

namespace otgrid {

/// Spherical Earth radius used for all great-circle distances. The sphere
/// keeps the closed-form test oracles valid and stays within 0.6% of an
/// ellipsoid.
inline constexpr double kEarthRadiusKm = 6371.0;

/// Haversine great-circle distance in km. Validates coordinate ranges.
double great_circle_km(double lon_a, double lat_a, double lon_b, double lat_b);

/// |a - b| in meters along the depth axis.
double depth_distance_m(double a_m, double b_m);

/// Pairwise squared base distances between source and target cells, in km²
/// (lonlat) or m² (depth). With a cutoff, arcs longer than the cutoff are
/// omitted entirely so the solver's arc set shrinks.
class CostMatrix {
public:
  static CostMatrix build(const MassField& source, const MassField& target,
                          std::optional<double> cutoff = std::nullopt);

  /// Dense matrix with explicit squared costs (row-major), for synthetic
  /// instances and bindings.
  static CostMatrix from_dense(int n_source, int n_target, std::vector<double> costs,
                               Geometry geometry = Geometry::LonLat);

  Geometry geometry() const { return geometry_; }
  int n_source() const { return n_source_; }
  int n_target() const { return n_target_; }
  bool is_dense() const { return dense_; }
  /// cutoff in km (lonlat) or m (depth); infinity when dense
  double cutoff() const { return cutoff_; }
  std::size_t arc_count() const { return dense_ ? costs_.size() : cols_.size(); }
  double max_cost() const { return max_cost_; }

  /// true when some source or target cell has no remaining arc (cutoff mode)
  bool has_isolated_cell() const { return isolated_; }

  /// Dense element access; throws in cutoff mode.
  double at(int i, int j) const;
  std::span<const double> dense_costs() const;

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const int32_t> cols() const { return cols_; }
  std::span<const double> sparse_costs() const { return costs_; }

  template <class F>
  void for_each_arc(F&& f) const {
    if (dense_) {
      std::size_t a = 0;
      for (int i = 0; i < n_source_; ++i) {
        for (int j = 0; j < n_target_; ++j, ++a) f(i, j, costs_[a]);
      }
    } else {
      for (int i = 0; i < n_source_; ++i) {
        for (std::size_t a = row_ptr_[i]; a < row_ptr_[i + 1]; ++a) {
          f(i, static_cast<int>(cols_[a]), costs_[a]);
        }
      }
    }
  }

private:
  CostMatrix() = default;

  Geometry geometry_ = Geometry::LonLat;
  int n_source_ = 0, n_target_ = 0;
  bool dense_ = true;
  double cutoff_ = 0.0;
  double max_cost_ = 0.0;
  bool isolated_ = false;
  std::vector<double> costs_;       // dense row-major, or sparse values
  std::vector<std::size_t> row_ptr_;  // cutoff mode only
  std::vector<int32_t> cols_;         // cutoff mode only
};

CostMatrix build_cost(const MassField& source, const MassField& target,
                      std::optional<double> cutoff = std::nullopt);

}  // namespace otgrid

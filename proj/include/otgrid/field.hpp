#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace otgrid {

enum class Geometry { LonLat, Depth };

const char* geometry_name(Geometry g);
Geometry geometry_from_name(const std::string& name);

struct LonLatBox {
  double lon_min, lon_max;
  double lat_min, lat_max;
};

struct DepthRange {
  double min_m, max_m;
};

/// A gridded scalar field: an ordered list of cells (lon/lat or depth) with
/// nonnegative masses. Immutable after construction; normalization and
/// restriction return new fields. Cell ids are positions in field order.
class MassField {
public:
  static MassField lonlat(std::vector<double> lon, std::vector<double> lat,
                          std::vector<double> values, std::string label,
                          std::vector<double> area_weight = {});
  static MassField depth(std::vector<double> depth_m, std::vector<double> values,
                         std::string label);

  Geometry geometry() const { return geometry_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const double> lon() const;
  std::span<const double> lat() const;
  std::span<const double> depth_m() const;
  std::span<const double> area_weight() const { return area_weight_; }
  const std::string& label() const { return label_; }
  bool normalized() const { return normalized_; }
  double total_mass() const;

  MassField with_label(std::string label) const;
  /// cells dropped while loading (masked/NaN rows)
  int dropped_cells() const { return dropped_cells_; }

  friend MassField normalize(const MassField& f);
  friend MassField restrict_to(const MassField& f, const LonLatBox& box);
  friend MassField restrict_to(const MassField& f, const DepthRange& range);
  friend MassField drop_zero_mass(const MassField& f, double threshold);
  friend MassField load_field(const std::filesystem::path& path, Geometry geometry);

private:
  MassField(Geometry geometry, std::vector<double> c0, std::vector<double> c1,
            std::vector<double> values, std::vector<double> area_weight,
            std::string label, bool normalized);

  Geometry geometry_;
  std::vector<double> coord0_;  // lon, or depth_m in depth mode
  std::vector<double> coord1_;  // lat; empty in depth mode
  std::vector<double> values_;
  std::vector<double> area_weight_;  // accepted in input, unused by W2
  std::string label_;
  bool normalized_ = false;
  int dropped_cells_ = 0;
};

/// Divide values by their total. Errors on an all-zero field.
MassField normalize(const MassField& f);

MassField restrict_to(const MassField& f, const LonLatBox& box);
MassField restrict_to(const MassField& f, const DepthRange& range);

/// Remove cells whose mass is below the threshold. The result keeps the
/// normalized flag only if the removed mass is negligible.
MassField drop_zero_mass(const MassField& f, double threshold = 1e-15);

/// Read a field CSV. Lonlat header: lon,lat,value[,area_weight];
/// depth header: depth_m,value. Rows whose value is NaN or empty are masked
/// cells: they are dropped and counted, not zero-filled.
MassField load_field(const std::filesystem::path& path, Geometry geometry);

void save_field(const MassField& f, std::ostream& os);
void save_field(const MassField& f, const std::filesystem::path& path);

}  // namespace otgrid

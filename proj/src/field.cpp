#include "otgrid/field.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "otgrid/errors.hpp"
#include "otgrid/util.hpp"

namespace otgrid {

const char* geometry_name(Geometry g) {
  return g == Geometry::LonLat ? "lonlat" : "depth";
}

Geometry geometry_from_name(const std::string& name) {
  std::string n = lowercase(name);
  if (n == "lonlat") return Geometry::LonLat;
  if (n == "depth") return Geometry::Depth;
  throw ValidationError("unknown geometry '" + name + "' (expected lonlat or depth)");
}

MassField::MassField(Geometry geometry, std::vector<double> c0, std::vector<double> c1,
                     std::vector<double> values, std::vector<double> area_weight,
                     std::string label, bool normalized)
    : geometry_(geometry),
      coord0_(std::move(c0)),
      coord1_(std::move(c1)),
      values_(std::move(values)),
      area_weight_(std::move(area_weight)),
      label_(std::move(label)),
      normalized_(normalized) {
  std::size_t n = values_.size();
  if (n == 0) throw ValidationError("field '" + label_ + "' has no cells");
  if (coord0_.size() != n || (geometry_ == Geometry::LonLat && coord1_.size() != n)) {
    throw ValidationError("field '" + label_ + "': coordinate/value lengths differ");
  }
  if (area_weight_.empty()) {
    area_weight_.assign(n, 1.0);
  } else if (area_weight_.size() != n) {
    throw ValidationError("field '" + label_ + "': area_weight length differs");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw ValidationError("field '" + label_ + "': cell " + std::to_string(i) +
                            " has negative or non-finite value");
    }
    if (area_weight_[i] <= 0.0 || !std::isfinite(area_weight_[i])) {
      throw ValidationError("field '" + label_ + "': cell " + std::to_string(i) +
                            " has non-positive area_weight");
    }
    if (geometry_ == Geometry::LonLat) {
      if (!(coord0_[i] >= -180.0 && coord0_[i] < 180.0)) {
        throw ValidationError("field '" + label_ + "': cell " + std::to_string(i) +
                              " longitude " + format_double(coord0_[i]) +
                              " outside [-180, 180)");
      }
      if (!(coord1_[i] >= -90.0 && coord1_[i] <= 90.0)) {
        throw ValidationError("field '" + label_ + "': cell " + std::to_string(i) +
                              " latitude " + format_double(coord1_[i]) +
                              " outside [-90, 90]");
      }
    } else {
      if (!(coord0_[i] >= 0.0) || !std::isfinite(coord0_[i])) {
        throw ValidationError("field '" + label_ + "': cell " + std::to_string(i) +
                              " has negative depth");
      }
    }
  }
  if (normalized_) {
    double s = total_mass();
    if (std::abs(s - 1.0) > 1e-12) {
      throw ValidationError("field '" + label_ + "': normalized flag set but mass sums to " +
                            format_double(s));
    }
  }
}

MassField MassField::lonlat(std::vector<double> lon, std::vector<double> lat,
                            std::vector<double> values, std::string label,
                            std::vector<double> area_weight) {
  return MassField(Geometry::LonLat, std::move(lon), std::move(lat), std::move(values),
                   std::move(area_weight), std::move(label), false);
}

MassField MassField::depth(std::vector<double> depth_m, std::vector<double> values,
                           std::string label) {
  return MassField(Geometry::Depth, std::move(depth_m), {}, std::move(values), {},
                   std::move(label), false);
}

std::span<const double> MassField::lon() const {
  if (geometry_ != Geometry::LonLat) throw ValidationError("field is not in lonlat mode");
  return coord0_;
}

std::span<const double> MassField::lat() const {
  if (geometry_ != Geometry::LonLat) throw ValidationError("field is not in lonlat mode");
  return coord1_;
}

std::span<const double> MassField::depth_m() const {
  if (geometry_ != Geometry::Depth) throw ValidationError("field is not in depth mode");
  return coord0_;
}

double MassField::total_mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

MassField MassField::with_label(std::string label) const {
  MassField f = *this;
  f.label_ = std::move(label);
  return f;
}

MassField normalize(const MassField& f) {
  double total = f.total_mass();
  if (total <= 0.0) {
    throw ValidationError("field '" + f.label() + "': degenerate mass, all values are zero");
  }
  MassField out = f;
  for (double& v : out.values_) v /= total;
  out.normalized_ = true;
  return out;
}

namespace {

MassField filter_cells(const MassField& f, const std::vector<std::size_t>& keep) {
  if (keep.empty()) {
    throw ValidationError("field '" + f.label() + "': no cells survive the restriction");
  }
  std::vector<double> c0, c1, vals, aw;
  c0.reserve(keep.size());
  vals.reserve(keep.size());
  for (std::size_t i : keep) {
    vals.push_back(f.values()[i]);
    aw.push_back(f.area_weight()[i]);
    if (f.geometry() == Geometry::LonLat) {
      c0.push_back(f.lon()[i]);
      c1.push_back(f.lat()[i]);
    } else {
      c0.push_back(f.depth_m()[i]);
    }
  }
  if (f.geometry() == Geometry::LonLat) {
    return MassField::lonlat(std::move(c0), std::move(c1), std::move(vals), f.label(),
                             std::move(aw));
  }
  return MassField::depth(std::move(c0), std::move(vals), f.label());
}

}  // namespace

MassField restrict_to(const MassField& f, const LonLatBox& box) {
  if (f.geometry() != Geometry::LonLat) {
    throw ValidationError("lon/lat restriction applied to a depth field");
  }
  if (box.lon_min > box.lon_max || box.lat_min > box.lat_max) {
    throw ValidationError("empty bounding box");
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.lon()[i] >= box.lon_min && f.lon()[i] <= box.lon_max &&
        f.lat()[i] >= box.lat_min && f.lat()[i] <= box.lat_max) {
      keep.push_back(i);
    }
  }
  return filter_cells(f, keep);
}

MassField restrict_to(const MassField& f, const DepthRange& range) {
  if (f.geometry() != Geometry::Depth) {
    throw ValidationError("depth restriction applied to a lon/lat field");
  }
  if (range.min_m > range.max_m) throw ValidationError("empty depth range");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.depth_m()[i] >= range.min_m && f.depth_m()[i] <= range.max_m) keep.push_back(i);
  }
  return filter_cells(f, keep);
}

MassField drop_zero_mass(const MassField& f, double threshold) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.values()[i] >= threshold) keep.push_back(i);
  }
  if (keep.size() == f.size()) return f;
  MassField out = filter_cells(f, keep);
  if (f.normalized() && std::abs(out.total_mass() - 1.0) <= 1e-12) out.normalized_ = true;
  return out;
}

MassField load_field(const std::filesystem::path& path, Geometry geometry) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open field file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("field file '" + path.string() + "' is empty");
  }
  auto header = split_csv_line(line);
  for (auto& h : header) h = lowercase(h);

  bool has_area = false;
  if (geometry == Geometry::LonLat) {
    bool ok3 = header.size() == 3 && header[0] == "lon" && header[1] == "lat" &&
               header[2] == "value";
    bool ok4 = header.size() == 4 && header[0] == "lon" && header[1] == "lat" &&
               header[2] == "value" && header[3] == "area_weight";
    if (!ok3 && !ok4) {
      throw ValidationError("field file '" + path.string() +
                            "': expected header lon,lat,value[,area_weight]");
    }
    has_area = ok4;
  } else {
    if (header.size() != 2 || header[0] != "depth_m" || header[1] != "value") {
      throw ValidationError("field file '" + path.string() +
                            "': expected header depth_m,value");
    }
  }

  std::vector<double> c0, c1, vals, aw;
  int dropped = 0;
  std::size_t lineno = 1;
  const std::size_t ncols = header.size();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cols = split_csv_line(line);
    if (cols.size() != ncols) {
      throw ValidationError("field file '" + path.string() + "' line " +
                            std::to_string(lineno) + ": expected " + std::to_string(ncols) +
                            " columns, got " + std::to_string(cols.size()));
    }
    std::vector<double> parsed(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
      bool value_col = (geometry == Geometry::LonLat) ? c == 2 : c == 1;
      if (value_col && cols[c].find_first_not_of(" \t\r") == std::string::npos) {
        parsed[c] = std::nan("");  // blank value = masked
        continue;
      }
      if (!parse_double(cols[c], parsed[c])) {
        throw ValidationError("field file '" + path.string() + "' line " +
                              std::to_string(lineno) + ": malformed number '" + cols[c] + "'");
      }
    }
    double value = geometry == Geometry::LonLat ? parsed[2] : parsed[1];
    if (std::isnan(value)) {
      ++dropped;
      continue;
    }
    if (geometry == Geometry::LonLat) {
      c0.push_back(parsed[0]);
      c1.push_back(parsed[1]);
      vals.push_back(value);
      if (has_area) aw.push_back(parsed[3]);
    } else {
      c0.push_back(parsed[0]);
      vals.push_back(value);
    }
  }
  if (vals.empty()) {
    throw ValidationError("field file '" + path.string() + "' has no valid rows");
  }

  std::string label = path.stem().string();
  MassField f(geometry, std::move(c0), std::move(c1), std::move(vals), std::move(aw),
              std::move(label), false);
  f.dropped_cells_ = dropped;
  return f;
}

void save_field(const MassField& f, std::ostream& os) {
  if (f.geometry() == Geometry::LonLat) {
    os << "lon,lat,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
      os << format_double(f.lon()[i]) << ',' << format_double(f.lat()[i]) << ','
         << format_double(f.values()[i]) << '\n';
    }
  } else {
    os << "depth_m,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
      os << format_double(f.depth_m()[i]) << ',' << format_double(f.values()[i]) << '\n';
    }
  }
}

void save_field(const MassField& f, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write field file '" + path.string() + "'");
  save_field(f, os);
}

}  // namespace otgrid

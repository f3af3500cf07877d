#include "otgrid/synth.hpp"

#include <cmath>
#include <cstdio>

#include "otgrid/errors.hpp"
#include "otgrid/util.hpp"

namespace otgrid {

std::vector<MassField> gen_patch_shift(const PatchShiftOptions& opts) {
  if (opts.step_deg <= 0.0 || opts.lon_min >= opts.lon_max || opts.lat_min >= opts.lat_max) {
    throw ValidationError("gen_patch_shift: empty or inverted grid");
  }
  if (opts.sigma_deg <= 0.0 || opts.amplitude <= 0.0) {
    throw ValidationError("gen_patch_shift: sigma and amplitude must be positive");
  }
  if (opts.background < 0.0) throw ValidationError("gen_patch_shift: negative background");

  const double radius = opts.truncate_sigmas * opts.sigma_deg;
  for (double s : opts.shifts_deg) {
    double c = opts.patch_lon + s;
    if (c - radius < opts.lon_min || c + radius > opts.lon_max ||
        opts.patch_lat - radius < opts.lat_min || opts.patch_lat + radius > opts.lat_max) {
      throw ValidationError("gen_patch_shift: patch shifted by " + format_double(s) +
                            " degrees leaves the grid");
    }
  }

  std::vector<double> lon, lat;
  for (double y = opts.lat_min; y <= opts.lat_max + 1e-9; y += opts.step_deg) {
    for (double x = opts.lon_min; x <= opts.lon_max + 1e-9; x += opts.step_deg) {
      lon.push_back(x);
      lat.push_back(y);
    }
  }
  const std::size_t n = lon.size();

  auto patch_field = [&](double center_lon, const std::string& label) {
    std::vector<double> v(n, opts.background);
    const double two_sigma2 = 2.0 * opts.sigma_deg * opts.sigma_deg;
    for (std::size_t i = 0; i < n; ++i) {
      double dx = lon[i] - center_lon;
      double dy = lat[i] - opts.patch_lat;
      double r2 = dx * dx + dy * dy;
      if (r2 <= radius * radius) {
        v[i] += opts.amplitude * std::exp(-r2 / two_sigma2);
      }
    }
    return MassField::lonlat(lon, lat, std::move(v), label);
  };

  std::vector<MassField> out;
  out.push_back(MassField::lonlat(lon, lat, std::vector<double>(n, opts.background),
                                  "background"));
  for (double s : opts.shifts_deg) {
    char label[32];
    std::snprintf(label, sizeof(label), "shift-%g", s);
    out.push_back(patch_field(opts.patch_lon + s, label));
  }
  return out;
}

}  // namespace otgrid

#pragma once

#include <cstdint>
#include <vector>

#include "otgrid/field.hpp"

namespace otgrid {

/// Generator for the patch-shift experiment: a background field plus one
/// field per shift, each holding a truncated Gaussian patch moved eastward.
struct PatchShiftOptions {
  double lon_min = -175.0, lon_max = -96.0;
  double lat_min = -25.0, lat_max = 24.0;
  double step_deg = 1.0;
  double patch_lon = -150.0, patch_lat = 0.0;
  double sigma_deg = 3.0;
  double truncate_sigmas = 3.0;
  double amplitude = 1.0;
  double background = 0.0;  // nonzero fills every cell with constant mass
  std::vector<double> shifts_deg = {0, 10, 20, 30, 40};
  std::uint64_t seed = 0;
};

/// Returns the background field (label "background") followed by one field
/// per shift (labels "shift-<degrees>"). The shifted patch must stay on the
/// grid. Deterministic under the seed.
std::vector<MassField> gen_patch_shift(const PatchShiftOptions& opts);

}  // namespace otgrid

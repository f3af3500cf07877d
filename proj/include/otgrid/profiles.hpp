#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "otgrid/field.hpp"
#include "otgrid/transport.hpp"

namespace otgrid {

/// One irregular measurement: a value at (date, depth).
struct SamplePoint {
  long date_days = 0;  // days since 1970-01-01
  std::string date_iso;
  double depth_m = 0.0;
  double value = 0.0;
};

/// Mass over depth at one date. Depths are strictly increasing.
struct DepthProfile {
  std::string date_iso;
  long date_days = 0;
  std::vector<double> depths_m;
  std::vector<double> values;
  std::string source;
};

struct ProfilePair {
  DepthProfile a;  // reference values at the reference coordinates
  DepthProfile b;  // window-averaged dense values at the same coordinates
};

struct ColocalizeResult {
  std::vector<ProfilePair> pairs;  // one per surviving date, in date order
  int dropped_points = 0;          // reference points with an empty window
};

/// Average dense values within |delta day| <= day_window and
/// |delta depth| <= depth_window_m (inclusive) of each reference point.
ColocalizeResult colocalize(std::span<const SamplePoint> reference,
                            std::span<const SamplePoint> dense, int day_window = 2,
                            double depth_window_m = 5.0);

/// Depth of the maximum concentration; ties resolve to the shallowest.
double dcm(const DepthProfile& p);

/// Exact 1D 2-Wasserstein distance in meters via quantile functions.
/// Profiles are normalized internally. Independent of the network simplex.
double w2_1d_closed_form(const DepthProfile& p, const DepthProfile& q);

struct DepthComparison {
  std::string date_iso;
  double w2_m = 0.0;
  double rmse = 0.0;
  double dcm_a_m = 0.0;
  double dcm_b_m = 0.0;
  double delta_dcm_m = 0.0;
};

struct SimpleFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n = 0;
  bool degenerate = false;  // zero variance in x or y; r_squared is NaN
};

struct DatePlan {
  std::string date_iso;
  std::vector<double> from_depths_m;
  std::vector<double> to_depths_m;
  TransportPlan plan;
};

struct SeriesComparison {
  std::vector<DepthComparison> rows;
  SimpleFit w2_fit;    // W2 on delta-DCM
  SimpleFit rmse_fit;  // RMSE on delta-DCM
  std::vector<DatePlan> plans;
};

/// Per-date W2 (exact solver), RMSE and delta-DCM, plus the two simple
/// regressions against delta-DCM. Per-date work is independent and runs on
/// up to `jobs` threads.
SeriesComparison compare_series(std::span<const ProfilePair> pairs, bool raw_rmse = false,
                                int jobs = 1);

struct TransferMatrix {
  std::vector<double> from_depths_m;
  std::vector<double> to_depths_m;
  std::vector<double> mass;  // row-major, summed over plans
  double argmax_from_m = 0.0;
  double argmax_to_m = 0.0;
};

/// Elementwise sum of plan masses over a shared depth grid, with the
/// dominant (from, to) depth pair.
TransferMatrix aggregate_transfer(std::span<const DatePlan> plans);

/// Sample CSV: header date,depth_m,value with ISO dates. Missing values are
/// dropped and counted like masked field cells.
std::vector<SamplePoint> read_samples_csv(const std::filesystem::path& path,
                                          int* dropped = nullptr);

}  // namespace otgrid

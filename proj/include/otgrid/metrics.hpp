#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otgrid/field.hpp"
#include "otgrid/transport.hpp"

namespace otgrid {

enum class Metric { W2, Rmse };

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);

struct MetricOptions {
  std::optional<double> cutoff;           // km (lonlat) or m (depth)
  std::optional<double> sinkhorn_epsilon;  // approximate W2 when set
  int sinkhorn_max_iter = 10000;
  double sinkhorn_tol = 1e-8;
  bool rmse_raw_values = false;  // compare raw values instead of distributions
  bool skip_errors = false;      // distance_matrix: record failed pairs as missing
  int jobs = 1;                  // parallelism for pairwise computations
};

/// Root-mean-squared pointwise difference. Requires both fields on the
/// identical cell list (the restriction W2 does not share). Fields are
/// normalized first unless raw_values is set.
double rmse(const MassField& P, const MassField& Q, bool raw_values = false);

/// Convenience wrapper: build costs, solve, return plan.w2. Fields are
/// normalized here if needed.
double w2(const MassField& P, const MassField& Q, const MetricOptions& opts = {});

/// Symmetric labeled pairwise distances, NaN marks a skipped pair.
struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // n*n row-major
  Metric metric = Metric::W2;
  Geometry geometry = Geometry::LonLat;

  std::size_t n() const { return labels.size(); }
  double at(std::size_t a, std::size_t b) const { return values[a * n() + b]; }
  bool has_missing() const;
};

DistanceMatrix distance_matrix(std::span<const MassField> fields, Metric metric,
                               const MetricOptions& opts = {});

/// CSV layout: first row and column carry the labels, cell (a,b) is D_ab.
void write_distance_matrix_csv(std::ostream& os, const DistanceMatrix& dm);
void write_distance_matrix_csv(const std::filesystem::path& path, const DistanceMatrix& dm);
DistanceMatrix read_distance_matrix_csv(const std::filesystem::path& path);

}  // namespace otgrid

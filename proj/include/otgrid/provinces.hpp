#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "otgrid/field.hpp"
#include "otgrid/transport.hpp"

namespace otgrid {

struct KmeansResult {
  std::vector<int> labels;  // label 1 = higher-mean cluster
  double sse = 0.0;
  std::vector<double> centers;
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` by
/// within-cluster SSE. Needs at least 2 distinct values.
KmeansResult kmeans_1d(std::span<const double> values, int k = 2, int restarts = 10,
                       std::uint64_t seed = 0);

struct BoundaryOptions {
  std::uint64_t seed = 0;
  int restarts = 10;
  /// Cluster log10(value + 1e-5) rather than raw values.
  bool log_transform = true;
  /// Cluster the whole map at once instead of per longitude column.
  bool whole_map = false;
  int jobs = 1;
};

/// Binary mass field marking a 2-means province boundary: constant mass on
/// boundary cells, zero elsewhere, one boundary cell per longitude column.
struct BoundaryField {
  MassField field;
  std::vector<int> province_label;   // per cell of `field`, 0 = lower-mean side
  std::vector<std::uint8_t> is_boundary;
};

/// Per longitude column, 2-means over latitude and a boundary cell at the
/// label transition (high-mean side). Columns with several transitions take
/// the one nearest the median transition latitude. The map must form a
/// regular lon/lat grid.
BoundaryField extract_boundary(const MassField& map, const BoundaryOptions& opts = {});

struct BoundaryW2 {
  double w2 = 0.0;
  TransportPlan plan;
};

/// Great-circle W2 between two boundary fields (normalized internally).
BoundaryW2 boundary_w2(const BoundaryField& a, const BoundaryField& b);

}  // namespace otgrid

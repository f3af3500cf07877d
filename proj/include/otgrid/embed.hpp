#pragma once

#include <array>
#include <string>
#include <vector>

#include "otgrid/metrics.hpp"

namespace otgrid {

struct MdsEmbedding {
  std::vector<std::string> labels;
  std::vector<std::array<double, 2>> coords;  // column-centered
  std::vector<double> eigenvalues;            // full spectrum of B, descending
  int n_positive = 0;                         // eigenvalues above 1e-10 * max|lambda|
  /// (lambda1 + lambda2) / sum of positive eigenvalues
  double top2_mass_ratio = 0.0;
};

/// Classical MDS into the plane: eigendecompose the doubly centered matrix
/// of squared distances and scale the top two eigenvectors. Eigenvector
/// signs are fixed so the largest-magnitude entry is positive. Negative
/// eigenvalues (non-Euclidean inputs) are reported, not dropped; a second
/// eigenvalue that is numerically zero gives a zero second coordinate.
MdsEmbedding classical_mds(const DistanceMatrix& D);

}  // namespace otgrid

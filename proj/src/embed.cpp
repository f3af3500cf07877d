#include "otgrid/embed.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "otgrid/errors.hpp"
#include "otgrid/util.hpp"

namespace otgrid {

MdsEmbedding classical_mds(const DistanceMatrix& D) {
  const std::size_t N = D.n();
  if (N < 2) throw ValidationError("classical MDS needs at least 2 points");
  if (D.has_missing()) {
    throw ValidationError("classical MDS refuses a distance matrix with missing entries");
  }
  for (std::size_t a = 0; a < N; ++a) {
    if (D.at(a, a) != 0.0) throw ValidationError("classical MDS: nonzero diagonal");
    for (std::size_t b = 0; b < N; ++b) {
      if (std::abs(D.at(a, b) - D.at(b, a)) > 1e-12 * std::max(1.0, std::abs(D.at(a, b)))) {
        throw ValidationError("classical MDS: asymmetric distance matrix");
      }
    }
  }

  Eigen::MatrixXd D2(N, N);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = 0; b < N; ++b) D2(a, b) = D.at(a, b) * D.at(a, b);
  }
  // B = -1/2 C D2 C with C the centering matrix
  Eigen::VectorXd row_mean = D2.rowwise().mean();
  double grand_mean = D2.mean();
  Eigen::MatrixXd B(N, N);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = 0; b < N; ++b) {
      B(a, b) = -0.5 * (D2(a, b) - row_mean(a) - row_mean(b) + grand_mean);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
  if (solver.info() != Eigen::Success) {
    throw NumericError("classical MDS: eigendecomposition failed");
  }

  MdsEmbedding out;
  out.labels = D.labels;
  out.eigenvalues.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    out.eigenvalues[k] = solver.eigenvalues()(static_cast<Eigen::Index>(N - 1 - k));
  }

  double max_abs = 0.0;
  for (double ev : out.eigenvalues) max_abs = std::max(max_abs, std::abs(ev));
  const double tau = 1e-10 * max_abs;
  double positive_mass = 0.0;
  for (double ev : out.eigenvalues) {
    if (ev > tau) {
      ++out.n_positive;
      positive_mass += ev;
    }
  }

  double l1 = out.eigenvalues[0];
  double l2 = out.eigenvalues[1];
  if (!(l1 > tau)) {
    throw ValidationError("classical MDS: no positive eigenvalue; embedding impossible");
  }
  if (l2 < -tau) {
    throw ValidationError(
        "classical MDS: second eigenvalue is negative (" + format_double(l2) +
        "); at least two nonnegative eigenvalues are required for a planar embedding");
  }
  if (l2 <= tau) l2 = 0.0;  // numerically zero: second axis collapses
  out.top2_mass_ratio = positive_mass > 0.0 ? (l1 + std::max(l2, 0.0)) / positive_mass : 0.0;

  auto column = [&](std::size_t k) {
    Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(N - 1 - k));
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    return v;
  };
  Eigen::VectorXd v1 = column(0) * std::sqrt(l1);
  Eigen::VectorXd v2 = l2 > 0.0 ? Eigen::VectorXd(column(1) * std::sqrt(l2))
                                : Eigen::VectorXd(Eigen::VectorXd::Zero(N));

  out.coords.resize(N);
  for (std::size_t a = 0; a < N; ++a) {
    out.coords[a] = {v1(static_cast<Eigen::Index>(a)), v2(static_cast<Eigen::Index>(a))};
  }
  return out;
}

}  // namespace otgrid

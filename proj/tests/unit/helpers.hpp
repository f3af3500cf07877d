#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "otgrid/field.hpp"
#include "otgrid/geodesy.hpp"
#include "otgrid/util.hpp"

namespace otgrid::test {

inline MassField random_depth_field(Rng& rng, int n, const std::string& label,
                                    double depth_step = 1.0) {
  std::uniform_real_distribution<double> U(0.01, 1.0);
  std::vector<double> depths(n), values(n);
  for (int i = 0; i < n; ++i) {
    depths[i] = i * depth_step;
    values[i] = U(rng);
  }
  return normalize(MassField::depth(depths, values, label));
}

inline MassField random_grid_field(Rng& rng, int nx, int ny, const std::string& label,
                                   double lon0 = -170.0, double lat0 = 0.0,
                                   double step = 1.0) {
  std::uniform_real_distribution<double> U(0.01, 1.0);
  std::vector<double> lon, lat, values;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      lon.push_back(lon0 + ix * step);
      lat.push_back(lat0 + iy * step);
      values.push_back(U(rng));
    }
  }
  return normalize(MassField::lonlat(lon, lat, values, label));
}

inline CostMatrix random_cost(Rng& rng, int m, int n, double scale = 1.0,
                              Geometry geometry = Geometry::Depth) {
  std::uniform_real_distribution<double> U(0.0, scale);
  std::vector<double> c(static_cast<std::size_t>(m) * n);
  for (double& x : c) x = U(rng);
  return CostMatrix::from_dense(m, n, std::move(c), geometry);
}

/// Exhaustive 1D 2-means: optimal clusters are contiguous in sorted order,
/// so every split of the sorted values is tried.
inline double sorted_split_sse(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> pref(n + 1, 0.0), pref2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    pref[i + 1] = pref[i] + values[i];
    pref2[i + 1] = pref2[i] + values[i] * values[i];
  }
  auto sse = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
    double cnt = static_cast<double>(hi - lo);
    double s = pref[hi] - pref[lo];
    return (pref2[hi] - pref2[lo]) - s * s / cnt;
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) best = std::min(best, sse(0, k) + sse(k, n));
  return best;
}

/// Orthogonal Procrustes residual: RMS misfit of X onto Y after centering
/// and the optimal rotation/reflection.
inline double procrustes_residual(const std::vector<std::array<double, 2>>& x,
                                  const std::vector<std::array<double, 2>>& y) {
  const std::size_t n = x.size();
  Eigen::MatrixXd X(n, 2), Y(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    X(i, 0) = x[i][0];
    X(i, 1) = x[i][1];
    Y(i, 0) = y[i][0];
    Y(i, 1) = y[i][1];
  }
  X.rowwise() -= X.colwise().mean();
  Y.rowwise() -= Y.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X.transpose() * Y,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd R = svd.matrixU() * svd.matrixV().transpose();
  return std::sqrt((X * R - Y).squaredNorm() / static_cast<double>(n));
}

struct LinReg {
  double slope, intercept, r2;
};

inline LinReg linreg(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  double slope = sxy / sxx;
  return LinReg{slope, my - slope * mx, sxy * sxy / (sxx * syy)};
}

}  // namespace otgrid::test

#include "otgrid/trend.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "otgrid/dates.hpp"
#include "otgrid/errors.hpp"
#include "otgrid/util.hpp"

namespace otgrid {

std::vector<PairObservation> build_pairs(const DistanceMatrix& matrix, bool raw_response) {
  const std::size_t N = matrix.n();
  if (N < 2) throw ValidationError("trend pairs need at least 2 labels");
  std::vector<int> ym(N);
  for (std::size_t a = 0; a < N; ++a) ym[a] = parse_year_month(matrix.labels[a]);

  std::vector<PairObservation> obs;
  obs.reserve(N * (N - 1) / 2);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) {
      double d = matrix.at(a, b);
      if (std::isnan(d)) {
        throw ValidationError("trend pairs: missing entry at (" + matrix.labels[a] + ", " +
                              matrix.labels[b] + ")");
      }
      PairObservation o;
      o.label_a = matrix.labels[a];
      o.label_b = matrix.labels[b];
      o.ym_a = ym[a];
      o.ym_b = ym[b];
      o.lag = std::abs(ym[a] - ym[b]);
      o.calmonth_dist = calendar_month_distance(ym[a], ym[b]);
      o.response = raw_response ? d : std::sqrt(std::max(0.0, d));
      obs.push_back(std::move(o));
    }
  }
  return obs;
}

TrendFit fit_trend(std::span<const PairObservation> obs) {
  const int n = static_cast<int>(obs.size());
  if (n < 9) throw ValidationError("trend fit needs at least 9 observations");
  std::set<int> calmonths, lags;
  for (const auto& o : obs) {
    calmonths.insert(o.calmonth_dist);
    lags.insert(o.lag);
  }
  if (calmonths.size() < 2) {
    throw ValidationError(
        "trend fit: observations span a single calendar-month distance; seasonal terms are "
        "not identifiable");
  }
  if (lags.size() < 2) {
    throw ValidationError("trend fit: lag has no variation; the slope is not identifiable");
  }

  // Sum-to-zero seasonality by reparameterization: six free coefficients,
  // the seventh is their negated sum, so the constraint holds exactly.
  const int p = 2 + 6;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (int r = 0; r < n; ++r) {
    const auto& o = obs[r];
    X(r, 0) = 1.0;
    X(r, 1) = o.lag;
    for (int k = 0; k < 6; ++k) {
      double zk = o.calmonth_dist == k ? 1.0 : 0.0;
      double z6 = o.calmonth_dist == 6 ? 1.0 : 0.0;
      X(r, 2 + k) = zk - z6;
    }
    y(r) = o.response;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::string present;
    for (int k : calmonths) present += (present.empty() ? "" : ",") + std::to_string(k);
    throw ValidationError(
        "trend fit: singular design (rank " + std::to_string(qr.rank()) + " of " +
        std::to_string(p) + "); calendar-month distances present: {" + present +
        "}; every seasonal category needs variation independent of the lag term");
  }
  Eigen::VectorXd gamma = qr.solve(y);

  Eigen::VectorXd residuals = y - X * gamma;
  double ssr = residuals.squaredNorm();
  double mean_y = y.mean();
  double sst = (y.array() - mean_y).square().sum();

  TrendFit fit;
  fit.n_obs = n;
  fit.beta0 = gamma(0);
  fit.beta1 = gamma(1);
  double sum6 = 0.0;
  for (int k = 0; k < 6; ++k) {
    fit.beta2[k] = gamma(2 + k);
    sum6 += gamma(2 + k);
  }
  fit.beta2[6] = -sum6;
  fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : (ssr <= 1e-24 ? 1.0 : 0.0);

  // Standard errors via sigma^2 (X'X)^-1; beta2_6 through the linear map.
  int dof = n - p;
  double sigma2 = dof > 0 ? ssr / dof : 0.0;
  Eigen::MatrixXd cov = sigma2 * (X.transpose() * X).inverse();
  fit.se_beta0 = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.se_beta1 = std::sqrt(std::max(0.0, cov(1, 1)));
  double var6 = 0.0;
  for (int k = 0; k < 6; ++k) {
    fit.se_beta2[k] = std::sqrt(std::max(0.0, cov(2 + k, 2 + k)));
    for (int l = 0; l < 6; ++l) var6 += cov(2 + k, 2 + l);
  }
  fit.se_beta2[6] = std::sqrt(std::max(0.0, var6));
  return fit;
}

double slope_ratio(const TrendFit& fit_a, const TrendFit& fit_b) {
  if (fit_b.beta1 == 0.0) {
    throw ValidationError("slope ratio: denominator fit has zero trend slope");
  }
  return fit_a.beta1 / fit_b.beta1;
}

std::vector<TrendCurvePoint> trend_curve(const TrendFit& fit,
                                         std::span<const PairObservation> obs) {
  std::set<int> lags;
  for (const auto& o : obs) lags.insert(o.lag);
  std::vector<TrendCurvePoint> curve;
  curve.reserve(lags.size());
  for (int lag : lags) {
    int rem = lag % 12;
    int cal = std::min(rem, 12 - rem);
    TrendCurvePoint pt;
    pt.lag = lag;
    pt.trend_pred = fit.beta0 + fit.beta1 * lag;
    pt.seasonal_pred = pt.trend_pred + fit.beta2[static_cast<std::size_t>(cal)];
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace otgrid

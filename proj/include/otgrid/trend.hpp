#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "otgrid/metrics.hpp"

namespace otgrid {

/// One unordered pair of year-month labeled fields with its distance.
struct PairObservation {
  std::string label_a, label_b;
  int ym_a = 0, ym_b = 0;  // year*12 + (month-1)
  int lag = 0;             // |ym_a - ym_b| in months
  int calmonth_dist = 0;   // circular calendar-month distance in {0..6}
  double response = 0.0;   // sqrt(D_ab) by default
};

/// OLS fit of response on intercept, lag and seven calendar-month terms
/// constrained to sum to zero.
struct TrendFit {
  double beta0 = 0.0;
  double beta1 = 0.0;                    // per-month trend slope
  std::array<double, 7> beta2{};         // seasonal coefficients, sum to 0
  double se_beta0 = 0.0;
  double se_beta1 = 0.0;
  std::array<double, 7> se_beta2{};
  double r_squared = 0.0;
  int n_obs = 0;
};

/// One observation per unordered label pair (a < b in matrix order);
/// response is sqrt of the entry unless raw_response is set.
std::vector<PairObservation> build_pairs(const DistanceMatrix& matrix,
                                         bool raw_response = false);

TrendFit fit_trend(std::span<const PairObservation> obs);

/// fit_a.beta1 / fit_b.beta1
double slope_ratio(const TrendFit& fit_a, const TrendFit& fit_b);

struct TrendCurvePoint {
  int lag;
  double seasonal_pred;  // beta0 + beta1*lag + beta2[calmonth(lag)]
  double trend_pred;     // beta0 + beta1*lag
};

/// Predicted curve over the observed lags (sorted, unique).
std::vector<TrendCurvePoint> trend_curve(const TrendFit& fit,
                                         std::span<const PairObservation> obs);

}  // namespace otgrid

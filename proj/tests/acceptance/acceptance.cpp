// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criteria marked with runtime budgets also fail when the
// budget is exceeded.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/helpers.hpp"
#include "otgrid/dates.hpp"
#include "otgrid/embed.hpp"
#include "otgrid/errors.hpp"
#include "otgrid/field.hpp"
#include "otgrid/metrics.hpp"
#include "otgrid/profiles.hpp"
#include "otgrid/provinces.hpp"
#include "otgrid/synth.hpp"
#include "otgrid/transport.hpp"
#include "otgrid/trend.hpp"
#include "otgrid/util.hpp"

using namespace otgrid;
using clock_type = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

#define REQUIRE_MSG(cond, msg)                               \
  do {                                                       \
    if (!(cond)) {                                           \
      out.pass = false;                                      \
      out.detail += std::string(msg) + " [" #cond "]; ";     \
      return;                                                \
    }                                                        \
  } while (0)

void note(Outcome& out, const std::string& s) {
  if (!out.detail.empty()) out.detail += "; ";
  out.detail += s;
}

// ------------------------------------------------------------------ 1
void criterion_solver_exactness(Outcome& out) {
  Rng rng(1001);
  std::uniform_int_distribution<int> size(2, 15);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst_rel = 0.0, worst_marg = 0.0;
  for (int t = 0; t < 200; ++t) {
    int m = size(rng), n = size(rng);
    std::vector<double> pv(m), qv(n), pd(m), qd(n);
    for (int i = 0; i < m; ++i) {
      pd[i] = i;
      pv[i] = U(rng) + 1e-6;
    }
    for (int j = 0; j < n; ++j) {
      qd[j] = j;
      qv[j] = U(rng) + 1e-6;
    }
    MassField P = normalize(MassField::depth(pd, pv, "p"));
    MassField Q = normalize(MassField::depth(qd, qv, "q"));
    CostMatrix C = test::random_cost(rng, m, n);
    TransportPlan exact = solve_exact(P, Q, C);
    TransportPlan oracle = brute_force(P, Q, C);
    double rel = std::abs(exact.objective - oracle.objective) /
                 std::max(1e-30, std::abs(oracle.objective));
    worst_rel = std::max(worst_rel, rel);
    worst_marg = std::max(worst_marg, max_marginal_error(exact, P, Q));
  }
  REQUIRE_MSG(worst_rel <= 1e-9, "objective mismatch " + format_double(worst_rel));
  REQUIRE_MSG(worst_marg <= 1e-9, "marginal residual " + format_double(worst_marg));
  note(out, "200 instances, worst rel err " + format_double(worst_rel) + ", worst marginal " +
                format_double(worst_marg));
}

// ------------------------------------------------------------------ 2
void criterion_patch_shift(Outcome& out) {
  PatchShiftOptions opts;
  opts.shifts_deg = {0, 5, 10, 15, 20, 25, 30, 35, 40};
  std::vector<MassField> family = gen_patch_shift(opts);
  const MassField& reference = family[1];  // shift 0

  std::vector<double> shifts, w2s, rmses;
  for (std::size_t k = 1; k < family.size(); ++k) {
    shifts.push_back(opts.shifts_deg[k - 1]);
    w2s.push_back(w2(reference, family[k]));
    rmses.push_back(rmse(reference, family[k]));
  }
  for (std::size_t k = 1; k < w2s.size(); ++k) {
    REQUIRE_MSG(w2s[k] > w2s[k - 1] - 1e-12, "W2 not monotone over shifts");
  }
  test::LinReg reg = test::linreg(shifts, w2s);
  REQUIRE_MSG(reg.r2 >= 0.99, "W2-vs-shift R^2 " + format_double(reg.r2));
  REQUIRE_MSG(reg.slope > 0.0, "W2-vs-shift slope " + format_double(reg.slope));

  // disjoint supports start beyond twice the truncation radius (18 deg)
  std::vector<double> plateau;
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    if (shifts[k] >= 2.0 * opts.truncate_sigmas * opts.sigma_deg + 1e-9) {
      plateau.push_back(rmses[k]);
    }
  }
  REQUIRE_MSG(plateau.size() >= 3, "not enough disjoint shifts");
  double mean = 0.0;
  for (double r : plateau) mean += r;
  mean /= static_cast<double>(plateau.size());
  double max_dev = 0.0;
  for (double r : plateau) max_dev = std::max(max_dev, std::abs(r - mean) / mean);
  REQUIRE_MSG(max_dev <= 0.01, "RMSE plateau varies by " + format_double(max_dev));
  note(out, "R^2 " + format_double(reg.r2) + ", slope " + format_double(reg.slope) +
                " km/deg, RMSE plateau spread " + format_double(max_dev));
}

// ------------------------------------------------------------------ 3
void criterion_1d_oracle(Outcome& out) {
  Rng rng(1003);
  std::uniform_int_distribution<int> bins(2, 50);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    int n = bins(rng);
    std::vector<double> d(static_cast<std::size_t>(n)), va(d.size()), vb(d.size());
    double depth = 0.0;
    for (int i = 0; i < n; ++i) {
      depth += 1.0 + 9.0 * U(rng);
      d[static_cast<std::size_t>(i)] = depth;
    }
    for (auto& x : va) x = U(rng) + 1e-6;
    for (auto& x : vb) x = U(rng) + 1e-6;
    DepthProfile p, q;
    p.depths_m = q.depths_m = d;
    p.values = va;
    q.values = vb;
    p.date_iso = q.date_iso = "2000-01-01";
    MassField P = normalize(MassField::depth(d, va, "p"));
    MassField Q = normalize(MassField::depth(d, vb, "q"));
    double solver = solve_exact(P, Q, build_cost(P, Q)).w2;
    worst = std::max(worst, std::abs(w2_1d_closed_form(p, q) - solver));
  }
  REQUIRE_MSG(worst <= 1e-9, "worst |closed-form - solver| " + format_double(worst));
  note(out, "500 pairs, worst gap " + format_double(worst) + " m");
}

// ------------------------------------------------------------------ 4
DepthProfile acceptance_bump(double center, const std::string& date) {
  DepthProfile p;
  p.date_iso = date;
  p.source = "synthetic";
  for (int i = 0; i < 81; ++i) {
    double depth = i * 5.0;
    double x = depth - center;
    p.depths_m.push_back(depth);
    p.values.push_back(std::exp(-x * x / (2.0 * 15.0 * 15.0)));
  }
  return p;
}

void criterion_translation(Outcome& out) {
  DepthProfile base = acceptance_bump(100.0, "2000-01-01");
  std::vector<ProfilePair> pairs;
  pairs.push_back(ProfilePair{base, acceptance_bump(100.0, "2000-01-01")});
  for (int k = 1; k <= 12; ++k) {
    double s = 5.0 * k;  // 5..60 m, on-grid
    char date[16];
    std::snprintf(date, sizeof(date), "2000-01-%02d", k + 1);
    DepthProfile shifted = acceptance_bump(100.0 + s, date);
    double dist = w2_1d_closed_form(base, shifted);
    REQUIRE_MSG(std::abs(dist - s) <= 2.5,
                "shift " + format_double(s) + " gave w2 " + format_double(dist));
    pairs.push_back(ProfilePair{acceptance_bump(100.0, date), shifted});
  }
  SeriesComparison sc = compare_series(pairs);
  REQUIRE_MSG(std::abs(sc.w2_fit.r_squared - 1.0) <= 1e-9,
              "W2 regression R^2 " + format_double(sc.w2_fit.r_squared));
  REQUIRE_MSG(std::abs(sc.w2_fit.slope - 1.0) <= 1e-6,
              "W2 regression slope " + format_double(sc.w2_fit.slope));
  REQUIRE_MSG(!sc.rmse_fit.degenerate, "RMSE regression degenerate");
  REQUIRE_MSG(sc.w2_fit.r_squared > sc.rmse_fit.r_squared,
              "RMSE R^2 " + format_double(sc.rmse_fit.r_squared) + " not below W2");
  note(out, "W2 R^2 " + format_double(sc.w2_fit.r_squared) + ", slope " +
                format_double(sc.w2_fit.slope) + ", RMSE R^2 " +
                format_double(sc.rmse_fit.r_squared));
}

// ------------------------------------------------------------------ 5
void criterion_mds_recovery(Outcome& out) {
  Rng rng(1005);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  double worst_entry = 0.0, worst_procrustes = 0.0;
  for (int n : {6, 12, 20}) {
    std::vector<std::array<double, 2>> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = {U(rng), U(rng)};
    DistanceMatrix dm;
    dm.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int a = 0; a < n; ++a) {
      dm.labels.push_back("p" + std::to_string(a));
      for (int b = 0; b < n; ++b) {
        dm.values[static_cast<std::size_t>(a) * n + b] =
            std::hypot(pts[a][0] - pts[b][0], pts[a][1] - pts[b][1]);
      }
    }
    MdsEmbedding e = classical_mds(dm);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double d = std::hypot(e.coords[a][0] - e.coords[b][0], e.coords[a][1] - e.coords[b][1]);
        worst_entry = std::max(worst_entry,
                               std::abs(d - dm.at(static_cast<std::size_t>(a),
                                                  static_cast<std::size_t>(b))));
      }
    }
    worst_procrustes = std::max(worst_procrustes, test::procrustes_residual(e.coords, pts));
    dm.labels.clear();
  }
  REQUIRE_MSG(worst_entry <= 1e-8, "embedded distance error " + format_double(worst_entry));
  REQUIRE_MSG(worst_procrustes <= 1e-8, "procrustes residual " + format_double(worst_procrustes));
  note(out, "worst pairwise error " + format_double(worst_entry) + ", worst procrustes " +
                format_double(worst_procrustes));
}

// ------------------------------------------------------------------ 6
DistanceMatrix trend_matrix(double beta0, double beta1, const std::array<double, 7>& beta2,
                            int n_months, double noise_sd, std::uint64_t seed) {
  DistanceMatrix dm;
  for (int k = 0; k < n_months; ++k) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", 1998 + k / 12, 1 + k % 12);
    dm.labels.emplace_back(buf);
  }
  const std::size_t N = dm.labels.size();
  dm.values.assign(N * N, 0.0);
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sd);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) {
      int ym_a = parse_year_month(dm.labels[a]);
      int ym_b = parse_year_month(dm.labels[b]);
      int lag = std::abs(ym_a - ym_b);
      int cal = calendar_month_distance(ym_a, ym_b);
      double resp = beta0 + beta1 * lag + beta2[static_cast<std::size_t>(cal)];
      if (noise_sd > 0.0) resp += noise(rng);
      dm.values[a * N + b] = dm.values[b * N + a] = resp * resp;
    }
  }
  return dm;
}

void criterion_trend_roundtrip(Outcome& out) {
  const double beta0 = 1.0, beta1 = 0.01;
  const std::array<double, 7> beta2{0.3, 0.2, 0.1, 0.0, -0.1, -0.2, -0.3};

  TrendFit clean = fit_trend(build_pairs(trend_matrix(beta0, beta1, beta2, 36, 0.0, 0)));
  double worst = std::max(std::abs(clean.beta0 - beta0), std::abs(clean.beta1 - beta1));
  for (int k = 0; k < 7; ++k) {
    worst = std::max(worst, std::abs(clean.beta2[static_cast<std::size_t>(k)] -
                                     beta2[static_cast<std::size_t>(k)]));
  }
  REQUIRE_MSG(worst <= 1e-8, "noiseless recovery error " + format_double(worst));

  // 40 months -> 780 pairs >= 500
  TrendFit noisy = fit_trend(build_pairs(trend_matrix(beta0, beta1, beta2, 40, 0.05, 7)));
  REQUIRE_MSG(noisy.n_obs >= 500, "too few noisy observations");
  REQUIRE_MSG(std::abs(noisy.beta0 - beta0) <= 3.0 * noisy.se_beta0, "beta0 outside 3 SE");
  REQUIRE_MSG(std::abs(noisy.beta1 - beta1) <= 3.0 * noisy.se_beta1, "beta1 outside 3 SE");
  for (int k = 0; k < 7; ++k) {
    REQUIRE_MSG(std::abs(noisy.beta2[static_cast<std::size_t>(k)] -
                         beta2[static_cast<std::size_t>(k)]) <=
                    3.0 * noisy.se_beta2[static_cast<std::size_t>(k)],
                "beta2[" + std::to_string(k) + "] outside 3 SE");
  }
  double sum_clean = 0.0, sum_noisy = 0.0;
  for (int k = 0; k < 7; ++k) {
    sum_clean += clean.beta2[static_cast<std::size_t>(k)];
    sum_noisy += noisy.beta2[static_cast<std::size_t>(k)];
  }
  REQUIRE_MSG(std::abs(sum_clean) <= 1e-9, "clean sum-to-zero " + format_double(sum_clean));
  REQUIRE_MSG(std::abs(sum_noisy) <= 1e-9, "noisy sum-to-zero " + format_double(sum_noisy));
  note(out, "noiseless max error " + format_double(worst) + ", noisy fit n=" +
                std::to_string(noisy.n_obs) + " within 3 SE");
}

// ------------------------------------------------------------------ 7
void criterion_kmeans_oracle(Outcome& out) {
  Rng rng(1007);
  std::uniform_int_distribution<int> size(5, 200);
  std::uniform_real_distribution<double> U(0.0, 10.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    int n = size(rng);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = U(rng);
    KmeansResult r = kmeans_1d(v, 2, 10, static_cast<std::uint64_t>(t));
    double opt = test::sorted_split_sse(v);
    worst = std::max(worst, std::abs(r.sse - opt) / std::max(1.0, opt));
  }
  REQUIRE_MSG(worst <= 1e-9, "worst SSE gap " + format_double(worst));
  note(out, "100 instances, worst relative SSE gap " + format_double(worst));
}

// ------------------------------------------------------------------ 8
MassField acceptance_front(double front_lat, double wobble) {
  std::vector<double> lon, lat, val;
  for (int iy = 0; iy < 24; ++iy) {
    for (int ix = 0; ix < 30; ++ix) {
      double x = -170.0 + ix, y = 18.0 + iy;
      lon.push_back(x);
      lat.push_back(y);
      double local = front_lat + wobble * std::sin((x + 170.0) * std::numbers::pi / 15.0);
      val.push_back(y >= local ? 8.0 : 0.4);
    }
  }
  return MassField::lonlat(lon, lat, val, "front");
}

void criterion_boundary(Outcome& out) {
  BoundaryField a = extract_boundary(acceptance_front(30.0, 0.0));
  BoundaryField b = extract_boundary(acceptance_front(31.0, 0.0));
  double one_degree = std::numbers::pi * kEarthRadiusKm / 180.0;
  double got = boundary_w2(a, b).w2;
  REQUIRE_MSG(std::abs(got - one_degree) <= 0.02 * one_degree,
              "row-shift w2 " + format_double(got) + " vs " + format_double(one_degree));

  MassField wavy = acceptance_front(30.0, 2.0);
  BoundaryField bf = extract_boundary(wavy);
  int per_column_count = 0;
  double worst_dev = 0.0;
  for (std::size_t i = 0; i < wavy.size(); ++i) {
    if (!bf.is_boundary[i]) continue;
    ++per_column_count;
    double local =
        30.0 + 2.0 * std::sin((bf.field.lon()[i] + 170.0) * std::numbers::pi / 15.0);
    worst_dev = std::max(worst_dev, std::abs(bf.field.lat()[i] - local));
  }
  REQUIRE_MSG(per_column_count == 30, "boundary cells " + std::to_string(per_column_count));
  REQUIRE_MSG(worst_dev <= 1.5, "front deviation " + format_double(worst_dev) + " deg");
  note(out, "row shift w2 " + format_double(got) + " km, sinusoid tracked within " +
                format_double(worst_dev) + " deg");
}

// ------------------------------------------------------------------ 9
void criterion_metric_properties(Outcome& out) {
  Rng rng(1009);
  double worst_sym = 0.0, worst_tri = 0.0, worst_self = 0.0;
  for (int t = 0; t < 20; ++t) {
    MassField P = test::random_grid_field(rng, 8, 8, "p");
    MassField Q = test::random_grid_field(rng, 8, 8, "q");
    MassField R = test::random_grid_field(rng, 8, 8, "r");
    CostMatrix C = build_cost(P, P);
    double pq = solve_exact(P, Q, C).w2;
    double qp = solve_exact(Q, P, C).w2;
    double qr = solve_exact(Q, R, C).w2;
    double pr = solve_exact(P, R, C).w2;
    worst_sym = std::max(worst_sym, std::abs(pq - qp));
    worst_tri = std::max(worst_tri, pr - (pq + qr));
    worst_self = std::max(worst_self, solve_exact(P, P, C).w2);
  }
  REQUIRE_MSG(worst_self <= 1e-12, "w2(P,P) " + format_double(worst_self));
  REQUIRE_MSG(worst_sym <= 1e-9, "symmetry violation " + format_double(worst_sym));
  REQUIRE_MSG(worst_tri <= 1e-9, "triangle violation " + format_double(worst_tri));
  note(out, "20 triples on an 8x8 grid; worst symmetry " + format_double(worst_sym) +
                ", worst triangle slack " + format_double(worst_tri));
}

// ------------------------------------------------------------------ 10
void criterion_sinkhorn(Outcome& out) {
  MassField P = normalize(MassField::depth({0, 1, 2, 3, 4}, {0.1, 0.3, 0.2, 0.25, 0.15}, "p"));
  MassField Q = normalize(MassField::depth({0, 1, 2, 3, 4}, {0.3, 0.1, 0.25, 0.15, 0.2}, "q"));
  CostMatrix C = build_cost(P, Q);
  double exact = solve_exact(P, Q, C).objective;
  double prev_gap = std::numeric_limits<double>::infinity();
  std::string gaps;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    SinkhornOptions o;
    o.epsilon = eps;
    o.max_iter = 500000;
    TransportPlan plan = solve_sinkhorn(P, Q, C, o);
    double resid = max_marginal_error(plan, P, Q);
    REQUIRE_MSG(resid <= 1e-8, "marginal residual " + format_double(resid));
    double gap = plan.objective - exact;
    REQUIRE_MSG(gap <= prev_gap + 1e-12,
                "gap not monotone at eps " + format_double(eps) + ": " + format_double(gap));
    gaps += format_double(gap) + " ";
    prev_gap = gap;
  }
  note(out, "objective gaps along the epsilon ladder: " + gaps);
}

// ------------------------------------------------------------------ 11
MassField seasonal_field(int month, int source, int nx, int ny) {
  // drifting, breathing blob: a crude seasonal cycle over a shared grid
  std::vector<double> lon, lat, val;
  double phase = 2.0 * std::numbers::pi * (month - 1) / 12.0;
  double cx = -160.0 + 0.4 * nx + 6.0 * std::cos(phase) + (source == 1 ? 2.0 : 0.0);
  double cy = -5.0 + 0.4 * ny + 5.0 * std::sin(phase);
  double sigma = 7.0 + 2.0 * std::sin(phase + source);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      double x = -160.0 + ix * 0.8, y = -5.0 + iy * 0.8;
      lon.push_back(x);
      lat.push_back(y);
      double dx = x - cx, dy = y - cy;
      val.push_back(0.02 + std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)));
    }
  }
  char label[32];
  std::snprintf(label, sizeof(label), "src%d-2000-%02d", source, month);
  return MassField::lonlat(lon, lat, val, label);
}

void criterion_scale(Outcome& out) {
  // dense 2000x2000 exact solve under 120 s
  Rng rng(1011);
  auto t0 = clock_type::now();
  MassField P = test::random_grid_field(rng, 50, 40, "p", -170.0, -10.0, 1.0);
  MassField Q = test::random_grid_field(rng, 50, 40, "q", -170.0, -10.0, 1.0);
  CostMatrix C = build_cost(P, Q);
  TransportPlan plan = solve_exact(P, Q, C);
  double big_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
  REQUIRE_MSG(big_seconds < 120.0,
              "2000x2000 solve took " + format_double(big_seconds) + " s");
  REQUIRE_MSG(max_marginal_error(plan, P, Q) <= 1e-9, "marginal residual too large");

  // 24-field distance matrix on 50x50 grids under 10 min with parallel pairs
  auto t1 = clock_type::now();
  std::vector<MassField> fields;
  for (int source = 0; source < 2; ++source) {
    for (int month = 1; month <= 12; ++month) {
      fields.push_back(seasonal_field(month, source, 50, 50));
    }
  }
  MetricOptions opts;
  opts.jobs = 0;  // all cores
  DistanceMatrix dm = distance_matrix(fields, Metric::W2, opts);
  double matrix_seconds = std::chrono::duration<double>(clock_type::now() - t1).count();
  REQUIRE_MSG(matrix_seconds < 600.0,
              "24-field matrix took " + format_double(matrix_seconds) + " s");
  REQUIRE_MSG(dm.n() == 24, "matrix size");
  REQUIRE_MSG(!dm.has_missing(), "matrix has holes");
  note(out, "2000x2000 in " + format_double(big_seconds) + " s (w2 " + format_double(plan.w2) +
                " km); 24x24 matrix on 2500-cell grids in " + format_double(matrix_seconds) +
                " s");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> fn;
  double budget_seconds;  // 0 = no budget
};

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {1, "solver exactness vs brute-force LP oracle", criterion_solver_exactness, 10.0},
      {2, "patch-shift: W2 linear in shift, RMSE plateaus", criterion_patch_shift, 60.0},
      {3, "1D closed-form oracle equals the exact solver", criterion_1d_oracle, 0.0},
      {4, "translation property and delta-DCM regression structure",
       criterion_translation, 0.0},
      {5, "classical MDS recovers planar configurations", criterion_mds_recovery, 0.0},
      {6, "trend regression round trip with sum-to-zero seasonality",
       criterion_trend_roundtrip, 0.0},
      {7, "k-means matches the exhaustive sorted-split optimum", criterion_kmeans_oracle, 0.0},
      {8, "boundary W2: row shift cost and sinusoid recovery", criterion_boundary, 0.0},
      {9, "W2 symmetry and triangle inequality on random fields",
       criterion_metric_properties, 0.0},
      {10, "sinkhorn gap shrinks along the epsilon ladder", criterion_sinkhorn, 0.0},
      {11, "scale: dense 2000x2000 solve and 24-field matrix", criterion_scale, 720.0},
  };

  int failures = 0;
  for (auto& c : criteria) {
    Outcome out;
    auto t0 = clock_type::now();
    try {
      c.fn(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail += std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
    if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      out.pass = false;
      out.detail += " exceeded budget of " + format_double(c.budget_seconds) + " s";
    }
    std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", out.pass ? "PASS" : "FAIL", c.id,
                c.name, seconds, out.detail.empty() ? "" : " -- ", out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}

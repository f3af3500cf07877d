#include "otgrid/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "otgrid/dates.hpp"
#include "otgrid/errors.hpp"
#include "otgrid/metrics.hpp"
#include "otgrid/util.hpp"

namespace otgrid {

namespace {

void check_profile(const DepthProfile& p) {
  if (p.depths_m.empty() || p.depths_m.size() != p.values.size()) {
    throw ValidationError("depth profile '" + p.date_iso + "' is empty or inconsistent");
  }
  for (std::size_t i = 0; i < p.depths_m.size(); ++i) {
    if (p.depths_m[i] < 0.0) throw ValidationError("depth profile: negative depth");
    if (p.values[i] < 0.0 || !std::isfinite(p.values[i])) {
      throw ValidationError("depth profile '" + p.date_iso + "': negative or non-finite value");
    }
    if (i > 0 && !(p.depths_m[i] > p.depths_m[i - 1])) {
      throw ValidationError("depth profile '" + p.date_iso +
                            "': depths must be strictly increasing");
    }
  }
}

std::vector<double> normalized_masses(const DepthProfile& p) {
  double total = 0.0;
  for (double v : p.values) total += v;
  if (total <= 0.0) {
    throw ValidationError("depth profile '" + p.date_iso + "': degenerate mass");
  }
  std::vector<double> out(p.values);
  for (double& v : out) v /= total;
  return out;
}

MassField profile_field(const DepthProfile& p) {
  return normalize(MassField::depth(p.depths_m, p.values, p.source + "-" + p.date_iso));
}

}  // namespace

ColocalizeResult colocalize(std::span<const SamplePoint> reference,
                            std::span<const SamplePoint> dense, int day_window,
                            double depth_window_m) {
  if (reference.empty() || dense.empty()) {
    throw ValidationError("colocalize: empty sample list");
  }
  // sort dense by date for windowed scans; averaging is order-invariant
  std::vector<SamplePoint> ds(dense.begin(), dense.end());
  std::sort(ds.begin(), ds.end(), [](const SamplePoint& a, const SamplePoint& b) {
    return a.date_days != b.date_days ? a.date_days < b.date_days : a.depth_m < b.depth_m;
  });

  struct Colocated {
    SamplePoint ref;
    double dense_mean;
  };
  std::map<long, std::vector<Colocated>> by_date;
  int dropped = 0;
  for (const SamplePoint& r : reference) {
    auto lo = std::lower_bound(ds.begin(), ds.end(), r.date_days - day_window,
                               [](const SamplePoint& s, long d) { return s.date_days < d; });
    double sum = 0.0;
    int count = 0;
    for (auto it = lo; it != ds.end() && it->date_days <= r.date_days + day_window; ++it) {
      if (std::abs(it->depth_m - r.depth_m) <= depth_window_m) {
        sum += it->value;
        ++count;
      }
    }
    if (count == 0) {
      ++dropped;
      continue;
    }
    by_date[r.date_days].push_back(Colocated{r, sum / count});
  }
  if (by_date.empty()) {
    throw ValidationError("colocalize: no reference point has dense data within the window");
  }

  ColocalizeResult out;
  out.dropped_points = dropped;
  for (auto& [date, pts] : by_date) {
    std::sort(pts.begin(), pts.end(),
              [](const Colocated& a, const Colocated& b) { return a.ref.depth_m < b.ref.depth_m; });
    DepthProfile a, b;
    a.date_iso = b.date_iso = pts.front().ref.date_iso;
    a.date_days = b.date_days = date;
    a.source = "reference";
    b.source = "colocalized";
    double last_depth = -1.0;
    double ref_sum = 0.0, dense_sum = 0.0;
    int dup = 0;
    for (const Colocated& c : pts) {
      if (!a.depths_m.empty() && c.ref.depth_m == last_depth) {
        // repeated reference depth on one date: average duplicates
        ref_sum += c.ref.value;
        dense_sum += c.dense_mean;
        ++dup;
        a.values.back() = ref_sum / dup;
        b.values.back() = dense_sum / dup;
        continue;
      }
      last_depth = c.ref.depth_m;
      ref_sum = c.ref.value;
      dense_sum = c.dense_mean;
      dup = 1;
      a.depths_m.push_back(c.ref.depth_m);
      a.values.push_back(c.ref.value);
      b.depths_m.push_back(c.ref.depth_m);
      b.values.push_back(c.dense_mean);
    }
    check_profile(a);
    check_profile(b);
    out.pairs.push_back(ProfilePair{std::move(a), std::move(b)});
  }
  return out;
}

double dcm(const DepthProfile& p) {
  check_profile(p);
  double best_v = 0.0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < p.depths_m.size(); ++i) {
    if (p.values[i] > best_v) {
      best_v = p.values[i];
      best_d = p.depths_m[i];
    }
  }
  if (best_d < 0.0) {
    throw ValidationError("dcm: all-zero profile at '" + p.date_iso + "'");
  }
  return best_d;
}

double w2_1d_closed_form(const DepthProfile& p, const DepthProfile& q) {
  check_profile(p);
  check_profile(q);
  std::vector<double> mp = normalized_masses(p);
  std::vector<double> mq = normalized_masses(q);

  // L2 distance between quantile functions: walk both CDFs jointly and
  // accumulate (depth gap)^2 over each probability slab.
  std::size_t i = 0, j = 0;
  double rem_p = mp[0], rem_q = mq[0];
  double acc = 0.0;
  while (i < mp.size() && j < mq.size()) {
    if (rem_p <= 0.0) {
      if (++i == mp.size()) break;
      rem_p = mp[i];
      continue;
    }
    if (rem_q <= 0.0) {
      if (++j == mq.size()) break;
      rem_q = mq[j];
      continue;
    }
    double slab = std::min(rem_p, rem_q);
    double gap = p.depths_m[i] - q.depths_m[j];
    acc += slab * gap * gap;
    rem_p -= slab;
    rem_q -= slab;
  }
  return std::sqrt(std::max(0.0, acc));
}

namespace {

SimpleFit simple_ols(const std::vector<double>& x, const std::vector<double>& y) {
  SimpleFit fit;
  fit.n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < fit.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= fit.n;
  my /= fit.n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < fit.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    fit.degenerate = true;
    fit.slope = 0.0;
    fit.intercept = my;
    fit.r_squared = std::nan("");
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace

SeriesComparison compare_series(std::span<const ProfilePair> pairs, bool raw_rmse, int jobs) {
  if (pairs.size() < 3) throw ValidationError("compare_series needs at least 3 profile pairs");
  SeriesComparison out;
  out.rows.resize(pairs.size());
  out.plans.resize(pairs.size());
  std::vector<std::string> failures(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const ProfilePair& pr = pairs[i];
    try {
      MassField fa = profile_field(pr.a);
      MassField fb = profile_field(pr.b);
      CostMatrix C = build_cost(fa, fb);
      TransportPlan plan = solve_exact(fa, fb, C);

      DepthComparison row;
      row.date_iso = pr.a.date_iso;
      row.w2_m = plan.w2;
      row.dcm_a_m = dcm(pr.a);
      row.dcm_b_m = dcm(pr.b);
      row.delta_dcm_m = std::abs(row.dcm_a_m - row.dcm_b_m);
      if (raw_rmse) {
        double acc = 0.0;
        for (std::size_t k = 0; k < pr.a.values.size(); ++k) {
          double d = pr.a.values[k] - pr.b.values[k];
          acc += d * d;
        }
        row.rmse = std::sqrt(acc / static_cast<double>(pr.a.values.size()));
      } else {
        std::vector<double> na = normalized_masses(pr.a);
        std::vector<double> nb = normalized_masses(pr.b);
        double acc = 0.0;
        for (std::size_t k = 0; k < na.size(); ++k) {
          double d = na[k] - nb[k];
          acc += d * d;
        }
        row.rmse = std::sqrt(acc / static_cast<double>(na.size()));
      }
      out.plans[i] = DatePlan{pr.a.date_iso, pr.a.depths_m, pr.b.depths_m, std::move(plan)};
      out.rows[i] = std::move(row);
    } catch (const Error& e) {
      failures[i] = "compare_series failed at date " + pr.a.date_iso + ": " + e.what();
    }
  });
  for (const std::string& f : failures) {
    if (!f.empty()) throw NumericError(f);
  }
  std::vector<double> xs, w2s, rmses;
  for (const DepthComparison& row : out.rows) {
    xs.push_back(row.delta_dcm_m);
    w2s.push_back(row.w2_m);
    rmses.push_back(row.rmse);
  }
  out.w2_fit = simple_ols(xs, w2s);
  out.rmse_fit = simple_ols(xs, rmses);
  return out;
}

TransferMatrix aggregate_transfer(std::span<const DatePlan> plans) {
  if (plans.empty()) throw ValidationError("aggregate_transfer: no plans");
  const DatePlan& first = plans[0];
  for (const DatePlan& p : plans) {
    if (p.from_depths_m != first.from_depths_m || p.to_depths_m != first.to_depths_m) {
      throw ValidationError("aggregate_transfer: plans do not share a depth grid (date " +
                            p.date_iso + " differs)");
    }
  }
  TransferMatrix tm;
  tm.from_depths_m = first.from_depths_m;
  tm.to_depths_m = first.to_depths_m;
  const std::size_t nf = tm.from_depths_m.size();
  const std::size_t nt = tm.to_depths_m.size();
  tm.mass.assign(nf * nt, 0.0);
  for (const DatePlan& p : plans) {
    for (const PlanArc& a : p.plan.arcs) {
      if (a.from < 0 || static_cast<std::size_t>(a.from) >= nf || a.to < 0 ||
          static_cast<std::size_t>(a.to) >= nt) {
        throw ValidationError("aggregate_transfer: plan arc outside the depth grid");
      }
      tm.mass[static_cast<std::size_t>(a.from) * nt + a.to] += a.mass;
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < tm.mass.size(); ++k) {
    if (tm.mass[k] > tm.mass[best]) best = k;
  }
  tm.argmax_from_m = tm.from_depths_m[best / nt];
  tm.argmax_to_m = tm.to_depths_m[best % nt];
  return tm;
}

std::vector<SamplePoint> read_samples_csv(const std::filesystem::path& path, int* dropped) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sample file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("sample file '" + path.string() + "' is empty");
  }
  auto header = split_csv_line(line);
  for (auto& h : header) h = lowercase(h);
  if (header.size() != 3 || header[0] != "date" || header[1] != "depth_m" ||
      header[2] != "value") {
    throw ValidationError("sample file '" + path.string() +
                          "': expected header date,depth_m,value");
  }
  std::vector<SamplePoint> out;
  int drop_count = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cols = split_csv_line(line);
    if (cols.size() != 3) {
      throw ValidationError("sample file '" + path.string() + "' line " +
                            std::to_string(lineno) + ": expected 3 columns");
    }
    SamplePoint s;
    s.date_iso = cols[0];
    s.date_days = parse_iso_date(cols[0]);
    if (!parse_double(cols[1], s.depth_m)) {
      throw ValidationError("sample file '" + path.string() + "' line " +
                            std::to_string(lineno) + ": malformed depth '" + cols[1] + "'");
    }
    bool blank = cols[2].find_first_not_of(" \t\r") == std::string::npos;
    if (!blank && !parse_double(cols[2], s.value)) {
      throw ValidationError("sample file '" + path.string() + "' line " +
                            std::to_string(lineno) + ": malformed value '" + cols[2] + "'");
    }
    if (blank || std::isnan(s.value)) {
      ++drop_count;
      continue;
    }
    if (s.value < 0.0) {
      throw ValidationError("sample file '" + path.string() + "' line " +
                            std::to_string(lineno) + ": negative value");
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw ValidationError("sample file '" + path.string() + "' has no valid rows");
  if (dropped) *dropped = drop_count;
  return out;
}

}  // namespace otgrid

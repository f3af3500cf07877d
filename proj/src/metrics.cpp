#include "otgrid/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "otgrid/errors.hpp"
#include "otgrid/util.hpp"

namespace otgrid {

const char* metric_name(Metric m) { return m == Metric::W2 ? "w2" : "rmse"; }

Metric metric_from_name(const std::string& name) {
  std::string n = lowercase(name);
  if (n == "w2") return Metric::W2;
  if (n == "rmse") return Metric::Rmse;
  throw ValidationError("unknown metric '" + name + "' (expected w2 or rmse)");
}

namespace {

void check_aligned(const MassField& P, const MassField& Q) {
  bool aligned = P.geometry() == Q.geometry() && P.size() == Q.size();
  if (aligned) {
    for (std::size_t i = 0; i < P.size() && aligned; ++i) {
      if (P.geometry() == Geometry::LonLat) {
        aligned = P.lon()[i] == Q.lon()[i] && P.lat()[i] == Q.lat()[i];
      } else {
        aligned = P.depth_m()[i] == Q.depth_m()[i];
      }
    }
  }
  if (!aligned) {
    throw ValidationError("rmse requires fields on the identical cell list ('" + P.label() +
                          "' vs '" + Q.label() + "'); W2 does not share this restriction");
  }
}

MassField ensure_normalized(const MassField& f) { return f.normalized() ? f : normalize(f); }

}  // namespace

double rmse(const MassField& P, const MassField& Q, bool raw_values) {
  check_aligned(P, Q);
  MassField an = raw_values ? P : ensure_normalized(P);
  MassField bn = raw_values ? Q : ensure_normalized(Q);
  double acc = 0.0;
  for (std::size_t i = 0; i < an.size(); ++i) {
    double d = an.values()[i] - bn.values()[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(an.size()));
}

double w2(const MassField& P, const MassField& Q, const MetricOptions& opts) {
  // zero-mass cells can never carry transport; dropping them up front keeps
  // the cost matrix at the size of the supports
  MassField pn = ensure_normalized(drop_zero_mass(ensure_normalized(P)));
  MassField qn = ensure_normalized(drop_zero_mass(ensure_normalized(Q)));
  CostMatrix C = build_cost(pn, qn, opts.cutoff);
  if (opts.sinkhorn_epsilon) {
    SinkhornOptions so;
    so.epsilon = *opts.sinkhorn_epsilon;
    so.max_iter = opts.sinkhorn_max_iter;
    so.tol = opts.sinkhorn_tol;
    return solve_sinkhorn(pn, qn, C, so).w2;
  }
  return solve_exact(pn, qn, C).w2;
}

bool DistanceMatrix::has_missing() const {
  for (double v : values) {
    if (std::isnan(v)) return true;
  }
  return false;
}

DistanceMatrix distance_matrix(std::span<const MassField> fields, Metric metric,
                               const MetricOptions& opts) {
  if (fields.size() < 2) throw ValidationError("distance matrix needs at least 2 fields");
  const std::size_t N = fields.size();
  for (std::size_t i = 1; i < N; ++i) {
    if (fields[i].geometry() != fields[0].geometry()) {
      throw ValidationError("distance matrix: fields mix geometry modes");
    }
  }

  std::vector<MassField> prepared;
  prepared.reserve(N);
  for (const MassField& f : fields) {
    prepared.push_back(metric == Metric::Rmse && opts.rmse_raw_values ? f
                                                                      : ensure_normalized(f));
  }

  if (metric == Metric::Rmse) {
    for (std::size_t i = 1; i < N; ++i) check_aligned(prepared[0], prepared[i]);
  }

  // Fields on a shared cell list reuse one cost matrix across every pair.
  bool shared_cells = true;
  for (std::size_t i = 1; i < N && shared_cells; ++i) {
    shared_cells = prepared[i].size() == prepared[0].size();
    for (std::size_t c = 0; c < prepared[0].size() && shared_cells; ++c) {
      if (prepared[0].geometry() == Geometry::LonLat) {
        shared_cells = prepared[i].lon()[c] == prepared[0].lon()[c] &&
                       prepared[i].lat()[c] == prepared[0].lat()[c];
      } else {
        shared_cells = prepared[i].depth_m()[c] == prepared[0].depth_m()[c];
      }
    }
  }
  std::optional<CostMatrix> shared_cost;
  if (metric == Metric::W2 && shared_cells) {
    shared_cost = build_cost(prepared[0], prepared[0], opts.cutoff);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) pairs.emplace_back(a, b);
  }

  DistanceMatrix dm;
  dm.metric = metric;
  dm.geometry = fields[0].geometry();
  for (const MassField& f : fields) dm.labels.push_back(f.label());
  dm.values.assign(N * N, 0.0);

  std::vector<std::exception_ptr> failures(pairs.size());
  parallel_for(pairs.size(), opts.jobs, [&](std::size_t k) {
    auto [a, b] = pairs[k];
    double d;
    try {
      if (metric == Metric::Rmse) {
        d = rmse(prepared[a], prepared[b], opts.rmse_raw_values);
      } else if (shared_cost) {
        if (opts.sinkhorn_epsilon) {
          SinkhornOptions so;
          so.epsilon = *opts.sinkhorn_epsilon;
          so.max_iter = opts.sinkhorn_max_iter;
          so.tol = opts.sinkhorn_tol;
          d = solve_sinkhorn(prepared[a], prepared[b], *shared_cost, so).w2;
        } else {
          d = solve_exact(prepared[a], prepared[b], *shared_cost).w2;
        }
      } else {
        MetricOptions pair_opts = opts;
        pair_opts.jobs = 1;
        d = w2(prepared[a], prepared[b], pair_opts);
      }
    } catch (const Error&) {
      if (!opts.skip_errors) {
        // keep the original error class so exit codes survive; add the pair
        std::string context =
            "pair (" + prepared[a].label() + ", " + prepared[b].label() + "): ";
        try {
          throw;
        } catch (const InfeasibleError& e) {
          failures[k] = std::make_exception_ptr(
              InfeasibleError(context + e.what(), e.stranded_mass()));
        } catch (const ValidationError& e) {
          failures[k] = std::make_exception_ptr(ValidationError(context + e.what()));
        } catch (const Error& e) {
          failures[k] = std::make_exception_ptr(NumericError(context + e.what()));
        }
        return;
      }
      d = std::nan("");
    }
    dm.values[a * N + b] = d;
    dm.values[b * N + a] = d;
  });
  for (const std::exception_ptr& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return dm;
}

void write_distance_matrix_csv(std::ostream& os, const DistanceMatrix& dm) {
  os << "label";
  for (const auto& l : dm.labels) os << ',' << l;
  os << '\n';
  const std::size_t N = dm.n();
  for (std::size_t a = 0; a < N; ++a) {
    os << dm.labels[a];
    for (std::size_t b = 0; b < N; ++b) os << ',' << format_double(dm.at(a, b));
    os << '\n';
  }
}

void write_distance_matrix_csv(const std::filesystem::path& path, const DistanceMatrix& dm) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write distance matrix '" + path.string() + "'");
  write_distance_matrix_csv(os, dm);
}

DistanceMatrix read_distance_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open distance matrix '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("distance matrix '" + path.string() + "' is empty");
  }
  auto header = split_csv_line(line);
  if (header.size() < 3) {
    throw ValidationError("distance matrix '" + path.string() + "': too few columns");
  }
  DistanceMatrix dm;
  dm.labels.assign(header.begin() + 1, header.end());
  const std::size_t N = dm.labels.size();
  dm.values.assign(N * N, std::nan(""));
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (row >= N) throw ValidationError("distance matrix '" + path.string() + "': extra rows");
    auto cols = split_csv_line(line);
    if (cols.size() != N + 1) {
      throw ValidationError("distance matrix '" + path.string() + "' row " +
                            std::to_string(row + 2) + ": wrong column count");
    }
    if (cols[0] != dm.labels[row]) {
      throw ValidationError("distance matrix '" + path.string() +
                            "': row/column label order differs at '" + cols[0] + "'");
    }
    for (std::size_t b = 0; b < N; ++b) {
      double v;
      if (!parse_double(cols[b + 1], v)) {
        throw ValidationError("distance matrix '" + path.string() + "' row " +
                              std::to_string(row + 2) + ": malformed number '" + cols[b + 1] +
                              "'");
      }
      dm.values[row * N + b] = v;
    }
    ++row;
  }
  if (row != N) throw ValidationError("distance matrix '" + path.string() + "': missing rows");

  for (std::size_t a = 0; a < N; ++a) {
    if (std::isnan(dm.at(a, a)) || dm.at(a, a) != 0.0) {
      throw ValidationError("distance matrix '" + path.string() + "': nonzero diagonal");
    }
    for (std::size_t b = a + 1; b < N; ++b) {
      double x = dm.at(a, b), y = dm.at(b, a);
      if (std::isnan(x) != std::isnan(y) ||
          (!std::isnan(x) && std::abs(x - y) > 1e-12 * std::max(1.0, std::abs(x)))) {
        throw ValidationError("distance matrix '" + path.string() + "': asymmetric entries at (" +
                              dm.labels[a] + ", " + dm.labels[b] + ")");
      }
    }
  }
  return dm;
}

}  // namespace otgrid

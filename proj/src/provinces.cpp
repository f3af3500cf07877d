#include "otgrid/provinces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "otgrid/errors.hpp"
#include "otgrid/util.hpp"

namespace otgrid {

namespace {

double lloyd_once(std::span<const double> values, int k, Rng& rng, std::vector<int>& labels,
                  std::vector<double>& centers) {
  const std::size_t n = values.size();
  // k-means++ seeding
  centers.clear();
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  centers.push_back(values[first(rng)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (values[i] - c) * (values[i] - c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      // all remaining points coincide with a center; place duplicates
      centers.push_back(centers.back());
      continue;
    }
    std::uniform_real_distribution<double> U(0.0, total);
    double r = U(rng);
    std::size_t pick = n - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc >= r) {
        pick = i;
        break;
      }
    }
    centers.push_back(values[pick]);
  }

  labels.assign(n, 0);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double d = (values[i] - centers[c]) * (values[i] - centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    std::vector<double> sum(k, 0.0);
    std::vector<int> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[labels[i]] += values[i];
      ++count[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) centers[c] = sum[c] / count[c];
    }
    if (!changed && iter > 0) break;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sse += (values[i] - centers[labels[i]]) * (values[i] - centers[labels[i]]);
  }
  return sse;
}

}  // namespace

namespace {

// For k = 2 the optimal clusters are contiguous in sorted order and the
// optimum is itself a Lloyd fixed point, so scanning the Lloyd-stable splits
// (those whose center midpoint separates the two sides) finds it. Plain
// best-of-restarts provably misses it on a fraction of flat instances.
bool best_stable_split(std::span<const double> values, KmeansResult& best) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> pref(n + 1, 0.0), pref2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = values[order[i]];
    pref[i + 1] = pref[i] + v;
    pref2[i + 1] = pref2[i] + v * v;
  }
  double found_sse = std::numeric_limits<double>::infinity();
  std::size_t found_split = 0;
  for (std::size_t s = 1; s < n; ++s) {
    double nl = static_cast<double>(s), nr = static_cast<double>(n - s);
    double ml = pref[s] / nl, mr = (pref[n] - pref[s]) / nr;
    double mid = 0.5 * (ml + mr);
    if (!(values[order[s - 1]] <= mid && mid <= values[order[s]])) continue;
    double sse = (pref2[s] - pref[s] * pref[s] / nl) +
                 ((pref2[n] - pref2[s]) - (pref[n] - pref[s]) * (pref[n] - pref[s]) / nr);
    if (sse < found_sse) {
      found_sse = sse;
      found_split = s;
    }
  }
  if (found_split == 0 || found_sse >= best.sse) return false;
  best.sse = found_sse;
  best.labels.assign(n, 0);
  for (std::size_t i = found_split; i < n; ++i) best.labels[order[i]] = 1;
  best.centers = {pref[found_split] / static_cast<double>(found_split),
                  (pref[n] - pref[found_split]) / static_cast<double>(n - found_split)};
  return true;
}

}  // namespace

KmeansResult kmeans_1d(std::span<const double> values, int k, int restarts,
                       std::uint64_t seed) {
  if (k < 1) throw ValidationError("kmeans_1d: k must be positive");
  if (values.size() < static_cast<std::size_t>(k)) {
    throw ValidationError("kmeans_1d: fewer values than clusters");
  }
  std::set<double> distinct(values.begin(), values.end());
  if (distinct.size() < 2) {
    throw ValidationError("kmeans_1d: all values identical; clustering is degenerate");
  }
  if (restarts < 1) restarts = 1;

  Rng rng(seed);
  KmeansResult best;
  best.sse = std::numeric_limits<double>::infinity();
  std::vector<int> labels;
  std::vector<double> centers;
  for (int r = 0; r < restarts; ++r) {
    double sse = lloyd_once(values, k, rng, labels, centers);
    if (sse < best.sse) {
      best.sse = sse;
      best.labels = labels;
      best.centers = centers;
    }
  }
  if (k == 2 && best_stable_split(values, best)) {
    // labels/centers already ordered low -> high; skip the relabel below
    return best;
  }

  // relabel so that label order follows center means (label 1 = higher mean for k=2)
  std::vector<int> order(k);
  for (int c = 0; c < k; ++c) order[c] = c;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return best.centers[a] < best.centers[b]; });
  std::vector<int> rank(k);
  for (int pos = 0; pos < k; ++pos) rank[order[pos]] = pos;
  for (int& l : best.labels) l = rank[l];
  std::vector<double> sorted_centers(k);
  for (int c = 0; c < k; ++c) sorted_centers[rank[c]] = best.centers[c];
  best.centers = sorted_centers;
  return best;
}

namespace {

// Snap coordinates onto a sorted axis, requiring near-exact matches.
std::vector<double> axis_values(std::span<const double> coords) {
  std::vector<double> axis(coords.begin(), coords.end());
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             axis.end());
  return axis;
}

std::size_t axis_index(const std::vector<double>& axis, double v) {
  auto it = std::lower_bound(axis.begin(), axis.end(), v - 1e-9);
  if (it == axis.end() || std::abs(*it - v) > 1e-9) {
    throw ValidationError("coordinate does not lie on the grid axis");
  }
  return static_cast<std::size_t>(it - axis.begin());
}

}  // namespace

BoundaryField extract_boundary(const MassField& map, const BoundaryOptions& opts) {
  if (map.geometry() != Geometry::LonLat) {
    throw ValidationError("boundary extraction needs a lon/lat field");
  }
  const std::size_t n = map.size();
  std::vector<double> lon_axis = axis_values(map.lon());
  std::vector<double> lat_axis = axis_values(map.lat());

  // regular-grid validation: spacing of each axis must be uniform
  for (const auto& axis : {lon_axis, lat_axis}) {
    if (axis.size() >= 3) {
      double step = axis[1] - axis[0];
      for (std::size_t i = 2; i < axis.size(); ++i) {
        if (std::abs((axis[i] - axis[i - 1]) - step) > 1e-6 * std::max(1.0, std::abs(step))) {
          throw ValidationError("boundary extraction: cells do not form a regular lon/lat grid");
        }
      }
    }
  }

  const std::size_t ncols = lon_axis.size();
  std::vector<std::vector<std::size_t>> columns(ncols);  // cell ids per column
  for (std::size_t i = 0; i < n; ++i) {
    columns[axis_index(lon_axis, map.lon()[i])].push_back(i);
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (columns[c].size() < 2) {
      throw ValidationError("boundary extraction: longitude column " +
                            format_double(lon_axis[c]) + " has fewer than 2 unmasked cells");
    }
    std::sort(columns[c].begin(), columns[c].end(), [&](std::size_t a, std::size_t b) {
      return map.lat()[a] < map.lat()[b];
    });
    for (std::size_t id : columns[c]) {
      auto key = std::make_pair(c, axis_index(lat_axis, map.lat()[id]));
      if (!seen.insert(key).second) {
        throw ValidationError("boundary extraction: duplicate cell on the grid");
      }
    }
  }

  auto transform = [&](double v) { return opts.log_transform ? std::log10(v + 1e-5) : v; };

  std::vector<int> cell_label(n, 0);
  std::vector<std::string> degenerate;
  if (opts.whole_map) {
    std::vector<double> tv(n);
    for (std::size_t i = 0; i < n; ++i) tv[i] = transform(map.values()[i]);
    KmeansResult km = kmeans_1d(tv, 2, opts.restarts, opts.seed);
    cell_label = km.labels;
  } else {
    std::vector<int> column_failed(ncols, 0);
    std::vector<std::vector<int>> col_labels(ncols);
    parallel_for(ncols, opts.jobs, [&](std::size_t c) {
      std::vector<double> tv(columns[c].size());
      for (std::size_t r = 0; r < columns[c].size(); ++r) {
        tv[r] = transform(map.values()[columns[c][r]]);
      }
      try {
        // column-specific seed keeps restarts independent and reproducible
        KmeansResult km = kmeans_1d(tv, 2, opts.restarts, opts.seed * 0x9e3779b9ULL + c);
        col_labels[c] = km.labels;
      } catch (const ValidationError&) {
        column_failed[c] = 1;
      }
    });
    for (std::size_t c = 0; c < ncols; ++c) {
      if (column_failed[c]) degenerate.push_back(format_double(lon_axis[c]));
    }
    if (!degenerate.empty()) {
      std::string list;
      for (const auto& s : degenerate) list += (list.empty() ? "" : ", ") + s;
      throw ValidationError("boundary extraction: degenerate columns at longitudes " + list);
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      for (std::size_t r = 0; r < columns[c].size(); ++r) {
        cell_label[columns[c][r]] = col_labels[c][r];
      }
    }
  }

  // transitions per column: adjacent (by latitude) cells with different labels
  struct Transition {
    std::size_t low_cell, high_cell;  // row below / above the change
    double mid_lat;
  };
  std::vector<std::vector<Transition>> transitions(ncols);
  for (std::size_t c = 0; c < ncols; ++c) {
    for (std::size_t r = 0; r + 1 < columns[c].size(); ++r) {
      std::size_t a = columns[c][r], b = columns[c][r + 1];
      if (cell_label[a] != cell_label[b]) {
        transitions[c].push_back(Transition{a, b, 0.5 * (map.lat()[a] + map.lat()[b])});
      }
    }
    if (transitions[c].empty()) {
      degenerate.push_back(format_double(lon_axis[c]));
    }
  }
  if (!degenerate.empty()) {
    std::string list;
    for (const auto& s : degenerate) list += (list.empty() ? "" : ", ") + s;
    throw ValidationError("boundary extraction: no label transition in columns at longitudes " +
                          list);
  }

  // second pass: median transition latitude across columns anchors noisy
  // columns with several transitions
  std::vector<double> single_lats;
  for (const auto& ts : transitions) {
    if (ts.size() == 1) single_lats.push_back(ts[0].mid_lat);
  }
  if (single_lats.empty()) {
    for (const auto& ts : transitions) {
      for (const auto& t : ts) single_lats.push_back(t.mid_lat);
    }
  }
  std::sort(single_lats.begin(), single_lats.end());
  double median_lat = single_lats[single_lats.size() / 2];

  std::vector<std::uint8_t> is_boundary(n, 0);
  for (std::size_t c = 0; c < ncols; ++c) {
    const Transition* chosen = &transitions[c][0];
    double best = std::abs(chosen->mid_lat - median_lat);
    for (const auto& t : transitions[c]) {
      double d = std::abs(t.mid_lat - median_lat);
      if (d < best) {
        best = d;
        chosen = &t;
      }
    }
    // boundary cell sits on the high-mean side of the change
    std::size_t cell = cell_label[chosen->high_cell] == 1 ? chosen->high_cell : chosen->low_cell;
    is_boundary[cell] = 1;
  }

  std::vector<double> mass(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) mass[i] = is_boundary[i] ? 1.0 : 0.0;
  BoundaryField out{
      MassField::lonlat(std::vector<double>(map.lon().begin(), map.lon().end()),
                        std::vector<double>(map.lat().begin(), map.lat().end()),
                        std::move(mass), map.label() + "-boundary"),
      std::move(cell_label), std::move(is_boundary)};
  return out;
}

BoundaryW2 boundary_w2(const BoundaryField& a, const BoundaryField& b) {
  MassField pa = normalize(a.field);
  MassField pb = normalize(b.field);
  CostMatrix C = build_cost(pa, pb);
  TransportPlan plan = solve_exact(pa, pb, C);
  return BoundaryW2{plan.w2, std::move(plan)};
}

}  // namespace otgrid

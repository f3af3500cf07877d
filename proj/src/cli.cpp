#include "otgrid/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>

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

namespace otgrid::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  Geometry geometry = Geometry::LonLat;
  Metric metric = Metric::W2;
  MetricOptions options;
  double top_fraction = 0.1;
  bool raw_response = false;
  std::uint64_t seed = 0;
  fs::path out_dir;
  std::string plan_csv;
  // provinces
  BoundaryOptions boundary;
  // depth
  int day_window = 2;
  double depth_window_m = 5.0;
  bool raw_rmse = false;
  // generator
  PatchShiftOptions patch;
};

fs::path ensure_out_dir(const fs::path& dir) {
  if (dir.empty()) throw ValidationError("an output directory is required (--out)");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw ValidationError("cannot create output directory '" + dir.string() + "'");
  }
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write '" + path.string() + "'");
  os << j.dump(2) << '\n';
}

json base_metadata(const RunConfig& cfg) {
  json j;
  j["tool"] = "otgrid";
  j["version"] = kVersion;
  j["command"] = cfg.subcommand;
  j["seed"] = cfg.seed;
  j["geometry"] = geometry_name(cfg.geometry);
  return j;
}

const char* distance_units(Geometry g, Metric m, bool raw_rmse = false) {
  if (m == Metric::Rmse) return raw_rmse ? "raw value units" : "probability";
  return g == Geometry::LonLat ? "km" : "m";
}

MassField load_input(const std::string& path, Geometry geometry) {
  return load_field(fs::path(path), geometry);
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  MassField a = load_input(cfg.inputs[0], cfg.geometry);
  MassField b = load_input(cfg.inputs[1], cfg.geometry);
  double value;
  json meta = base_metadata(cfg);
  meta["metric"] = metric_name(cfg.metric);
  meta["units"] = distance_units(cfg.geometry, cfg.metric, cfg.options.rmse_raw_values);
  meta["inputs"] = {cfg.inputs[0], cfg.inputs[1]};
  if (cfg.options.cutoff) meta["cutoff"] = *cfg.options.cutoff;
  if (cfg.options.sinkhorn_epsilon) meta["sinkhorn_epsilon"] = *cfg.options.sinkhorn_epsilon;

  if (cfg.metric == Metric::Rmse) {
    value = rmse(a, b, cfg.options.rmse_raw_values);
  } else if (!cfg.plan_csv.empty()) {
    MassField pn = normalize(a);
    MassField qn = normalize(b);
    CostMatrix C = build_cost(pn, qn, cfg.options.cutoff);
    TransportPlan plan;
    if (cfg.options.sinkhorn_epsilon) {
      SinkhornOptions so;
      so.epsilon = *cfg.options.sinkhorn_epsilon;
      so.max_iter = cfg.options.sinkhorn_max_iter;
      so.tol = cfg.options.sinkhorn_tol;
      plan = solve_sinkhorn(pn, qn, C, so);
    } else {
      plan = solve_exact(pn, qn, C);
    }
    value = plan.w2;
    std::ofstream os(cfg.plan_csv);
    if (!os) throw ValidationError("cannot write plan CSV '" + cfg.plan_csv + "'");
    write_plan_csv(os, pn, qn, plan, cfg.top_fraction);
    meta["plan_csv"] = cfg.plan_csv;
    meta["top_fraction"] = cfg.top_fraction;
    write_json(fs::path(cfg.plan_csv).concat(".meta.json"), meta);
  } else {
    value = w2(a, b, cfg.options);
  }
  out << format_double(value) << '\n';
  return 0;
}

int cmd_distmat(const RunConfig& cfg, std::ostream&) {
  fs::path dir = ensure_out_dir(cfg.out_dir);
  std::vector<MassField> fields;
  for (const std::string& p : cfg.inputs) fields.push_back(load_input(p, cfg.geometry));
  DistanceMatrix dm = distance_matrix(fields, cfg.metric, cfg.options);
  write_distance_matrix_csv(dir / "distmat.csv", dm);

  json meta = base_metadata(cfg);
  meta["metric"] = metric_name(cfg.metric);
  meta["units"] = distance_units(cfg.geometry, cfg.metric, cfg.options.rmse_raw_values);
  meta["labels"] = dm.labels;
  meta["n_fields"] = dm.labels.size();
  meta["jobs"] = cfg.options.jobs;
  meta["skip_errors"] = cfg.options.skip_errors;
  if (cfg.options.cutoff) meta["cutoff"] = *cfg.options.cutoff;
  if (cfg.options.sinkhorn_epsilon) meta["sinkhorn_epsilon"] = *cfg.options.sinkhorn_epsilon;
  if (dm.has_missing()) {
    json holes = json::array();
    for (std::size_t a = 0; a < dm.n(); ++a) {
      for (std::size_t b = a + 1; b < dm.n(); ++b) {
        if (std::isnan(dm.at(a, b))) holes.push_back({dm.labels[a], dm.labels[b]});
      }
    }
    meta["missing_pairs"] = holes;
  }
  meta["outputs"] = {"distmat.csv"};
  write_json(dir / "distmat.meta.json", meta);
  return 0;
}

int cmd_mds(const RunConfig& cfg, std::ostream&) {
  fs::path dir = ensure_out_dir(cfg.out_dir);
  DistanceMatrix dm = read_distance_matrix_csv(cfg.inputs[0]);
  MdsEmbedding emb = classical_mds(dm);

  std::ofstream os(dir / "embedding.csv");
  if (!os) throw ValidationError("cannot write embedding.csv");
  os << "label,x,y\n";
  for (std::size_t i = 0; i < emb.labels.size(); ++i) {
    os << emb.labels[i] << ',' << format_double(emb.coords[i][0]) << ','
       << format_double(emb.coords[i][1]) << '\n';
  }

  json meta = base_metadata(cfg);
  meta["input"] = cfg.inputs[0];
  meta["eigenvalues"] = emb.eigenvalues;
  meta["n_positive"] = emb.n_positive;
  meta["top2_mass_ratio"] = emb.top2_mass_ratio;
  meta["outputs"] = {"embedding.csv"};
  write_json(dir / "embedding.meta.json", meta);
  return 0;
}

int cmd_trend(const RunConfig& cfg, std::ostream&) {
  fs::path dir = ensure_out_dir(cfg.out_dir);
  DistanceMatrix dm = read_distance_matrix_csv(cfg.inputs[0]);
  std::vector<PairObservation> obs = build_pairs(dm, cfg.raw_response);
  TrendFit fit = fit_trend(obs);

  json fit_json = base_metadata(cfg);
  fit_json["input"] = cfg.inputs[0];
  fit_json["response"] = cfg.raw_response ? "raw" : "sqrt";
  fit_json["beta0"] = fit.beta0;
  fit_json["beta1"] = fit.beta1;
  fit_json["beta2"] = fit.beta2;
  fit_json["se_beta0"] = fit.se_beta0;
  fit_json["se_beta1"] = fit.se_beta1;
  fit_json["se_beta2"] = fit.se_beta2;
  fit_json["r_squared"] = fit.r_squared;
  fit_json["n_obs"] = fit.n_obs;
  write_json(dir / "trend_fit.json", fit_json);

  std::ofstream os(dir / "trend_curve.csv");
  if (!os) throw ValidationError("cannot write trend_curve.csv");
  os << "lag,seasonal_pred,trend_pred\n";
  for (const TrendCurvePoint& pt : trend_curve(fit, obs)) {
    os << pt.lag << ',' << format_double(pt.seasonal_pred) << ','
       << format_double(pt.trend_pred) << '\n';
  }
  return 0;
}

void write_boundary_csv(const fs::path& path, const BoundaryField& bf) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write '" + path.string() + "'");
  os << "lon,lat,province_label,is_boundary\n";
  const MassField& f = bf.field;
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << format_double(f.lon()[i]) << ',' << format_double(f.lat()[i]) << ','
       << bf.province_label[i] << ',' << int(bf.is_boundary[i]) << '\n';
  }
}

int cmd_provinces(const RunConfig& cfg, std::ostream& out) {
  fs::path dir = ensure_out_dir(cfg.out_dir);
  json meta = base_metadata(cfg);
  meta["log_transform"] = cfg.boundary.log_transform;
  meta["whole_map"] = cfg.boundary.whole_map;
  meta["restarts"] = cfg.boundary.restarts;
  json outputs = json::array();

  MassField map_a = load_input(cfg.inputs[0], Geometry::LonLat);
  BoundaryField ba = extract_boundary(map_a, cfg.boundary);
  write_boundary_csv(dir / "boundary_a.csv", ba);
  outputs.push_back("boundary_a.csv");

  if (cfg.inputs.size() == 2) {
    MassField map_b = load_input(cfg.inputs[1], Geometry::LonLat);
    BoundaryField bb = extract_boundary(map_b, cfg.boundary);
    write_boundary_csv(dir / "boundary_b.csv", bb);
    outputs.push_back("boundary_b.csv");

    BoundaryW2 bw = boundary_w2(ba, bb);
    std::ofstream os(dir / "boundary_plan.csv");
    if (!os) throw ValidationError("cannot write boundary_plan.csv");
    write_plan_csv(os, normalize(ba.field), normalize(bb.field), bw.plan, cfg.top_fraction);
    outputs.push_back("boundary_plan.csv");
    meta["w2_km"] = bw.w2;
    meta["top_fraction"] = cfg.top_fraction;
    out << format_double(bw.w2) << '\n';
  }
  meta["units"] = "km";
  meta["outputs"] = outputs;
  write_json(dir / "provinces.meta.json", meta);
  return 0;
}

int cmd_depth(const RunConfig& cfg, std::ostream&) {
  fs::path dir = ensure_out_dir(cfg.out_dir);
  int dropped_ref_rows = 0, dropped_dense_rows = 0;
  std::vector<SamplePoint> reference = read_samples_csv(cfg.inputs[0], &dropped_ref_rows);
  std::vector<SamplePoint> dense = read_samples_csv(cfg.inputs[1], &dropped_dense_rows);
  ColocalizeResult coloc = colocalize(reference, dense, cfg.day_window, cfg.depth_window_m);
  SeriesComparison series = compare_series(coloc.pairs, cfg.raw_rmse, cfg.options.jobs);

  std::ofstream os(dir / "depth_comparisons.csv");
  if (!os) throw ValidationError("cannot write depth_comparisons.csv");
  os << "date,w2_m,rmse,dcm_a_m,dcm_b_m,delta_dcm_m\n";
  for (const DepthComparison& row : series.rows) {
    os << row.date_iso << ',' << format_double(row.w2_m) << ',' << format_double(row.rmse)
       << ',' << format_double(row.dcm_a_m) << ',' << format_double(row.dcm_b_m) << ','
       << format_double(row.delta_dcm_m) << '\n';
  }

  auto fit_json = [](const SimpleFit& f) {
    json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    if (f.degenerate) {
      j["r_squared"] = nullptr;
      j["degenerate"] = true;
    } else {
      j["r_squared"] = f.r_squared;
      j["degenerate"] = false;
    }
    j["n"] = f.n;
    return j;
  };
  json reg = base_metadata(cfg);
  reg["w2_on_delta_dcm"] = fit_json(series.w2_fit);
  reg["rmse_on_delta_dcm"] = fit_json(series.rmse_fit);
  write_json(dir / "depth_regressions.json", reg);

  json meta = base_metadata(cfg);
  meta["units"] = "m";
  meta["day_window"] = cfg.day_window;
  meta["depth_window_m"] = cfg.depth_window_m;
  meta["raw_rmse"] = cfg.raw_rmse;
  meta["n_pairs"] = series.rows.size();
  meta["dropped_reference_points"] = coloc.dropped_points;
  meta["masked_reference_rows"] = dropped_ref_rows;
  meta["masked_dense_rows"] = dropped_dense_rows;
  json outputs = {"depth_comparisons.csv", "depth_regressions.json"};

  // aggregate only when every comparison shares one depth grid
  try {
    TransferMatrix tm = aggregate_transfer(series.plans);
    std::ofstream ts(dir / "aggregate_transfer.csv");
    if (!ts) throw ValidationError("cannot write aggregate_transfer.csv");
    ts << "from_depth_m,to_depth_m,mass\n";
    for (std::size_t i = 0; i < tm.from_depths_m.size(); ++i) {
      for (std::size_t j = 0; j < tm.to_depths_m.size(); ++j) {
        ts << format_double(tm.from_depths_m[i]) << ',' << format_double(tm.to_depths_m[j])
           << ',' << format_double(tm.mass[i * tm.to_depths_m.size() + j]) << '\n';
      }
    }
    outputs.push_back("aggregate_transfer.csv");
    meta["aggregate_argmax_from_m"] = tm.argmax_from_m;
    meta["aggregate_argmax_to_m"] = tm.argmax_to_m;
  } catch (const ValidationError& e) {
    meta["aggregate_skipped"] = e.what();
  }
  meta["outputs"] = outputs;
  write_json(dir / "depth.meta.json", meta);
  return 0;
}

int cmd_gen_patch_shift(const RunConfig& cfg, std::ostream&) {
  fs::path dir = ensure_out_dir(cfg.out_dir);
  std::vector<MassField> fields = gen_patch_shift(cfg.patch);
  json outputs = json::array();
  for (const MassField& f : fields) {
    std::string name = f.label() + ".csv";
    save_field(f, dir / name);
    outputs.push_back(name);
  }
  json meta = base_metadata(cfg);
  meta["outputs"] = outputs;
  meta["shifts_deg"] = cfg.patch.shifts_deg;
  meta["sigma_deg"] = cfg.patch.sigma_deg;
  meta["amplitude"] = cfg.patch.amplitude;
  meta["background"] = cfg.patch.background;
  meta["patch_center"] = {cfg.patch.patch_lon, cfg.patch.patch_lat};
  write_json(dir / "gen-patch-shift.meta.json", meta);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"exact earth mover's distances and downstream analyses for gridded "
               "geospatial scalar fields"};
  app.require_subcommand(1);

  std::string geometry = "lonlat", metric = "w2";
  double cutoff = 0.0, sinkhorn_eps = 0.0;
  int jobs = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "seed for all randomness")->capture_default_str();
    sub->add_option("--jobs", jobs, "max worker threads (0 = all cores)")
        ->capture_default_str();
  };
  auto add_metric_opts = [&](CLI::App* sub, bool with_metric) {
    sub->add_option("--geometry", geometry, "lonlat or depth")->capture_default_str();
    if (with_metric) {
      sub->add_option("--metric", metric, "w2 or rmse")->capture_default_str();
      sub->add_flag("--raw-rmse", cfg.options.rmse_raw_values,
                    "rmse on raw values instead of normalized distributions");
    }
    sub->add_option("--cutoff-km", cutoff,
                    "omit arcs longer than this (km; meters in depth mode)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--sinkhorn-epsilon", sinkhorn_eps,
                    "entropic approximation instead of the exact solver")
        ->check(CLI::PositiveNumber);
    sub->add_option("--sinkhorn-max-iter", cfg.options.sinkhorn_max_iter)
        ->capture_default_str();
    sub->add_option("--sinkhorn-tol", cfg.options.sinkhorn_tol,
                    "L1 marginal residual at convergence")
        ->capture_default_str();
  };

  auto* compare = app.add_subcommand("compare", "distance between two fields");
  compare->add_option("fieldA", cfg.inputs, "field CSV files")->required()->expected(2);
  add_metric_opts(compare, true);
  compare->add_option("--plan-csv", cfg.plan_csv, "write the transport plan here (w2 only)");
  compare->add_option("--top-fraction", cfg.top_fraction,
                      "mass fraction marked major in the plan CSV")
      ->check(CLI::Range(1e-12, 1.0))
      ->capture_default_str();
  add_common(compare);

  auto* distmat = app.add_subcommand("distmat", "pairwise distance matrix");
  distmat->add_option("fields", cfg.inputs, "field CSV files")->required()->expected(-2);
  add_metric_opts(distmat, true);
  distmat->add_flag("--skip-errors", cfg.options.skip_errors,
                    "record failed pairs as missing instead of aborting");
  distmat->add_option("--out", cfg.out_dir, "output directory")->required();
  add_common(distmat);

  auto* mds = app.add_subcommand("mds", "classical MDS of a distance matrix");
  mds->add_option("matrix", cfg.inputs, "distance matrix CSV")->required()->expected(1);
  mds->add_option("--out", cfg.out_dir, "output directory")->required();
  add_common(mds);

  auto* trend = app.add_subcommand("trend", "seasonality-decomposed trend regression");
  trend->add_option("matrix", cfg.inputs, "distance matrix CSV with YYYY-MM labels")
      ->required()
      ->expected(1);
  trend->add_flag("--raw-response", cfg.raw_response, "regress raw distances, not sqrt");
  trend->add_option("--out", cfg.out_dir, "output directory")->required();
  add_common(trend);

  auto* provinces = app.add_subcommand("provinces",
                                       "2-means province boundaries and boundary W2");
  provinces->add_option("maps", cfg.inputs, "one or two lon/lat field CSVs")
      ->required()
      ->expected(1, 2);
  provinces->add_flag("--no-log10", [&cfg](std::int64_t) { cfg.boundary.log_transform = false; },
                      "cluster raw values instead of log10(value + 1e-5)");
  provinces->add_flag("--whole-map", cfg.boundary.whole_map,
                      "cluster the whole map instead of per longitude column");
  provinces->add_option("--restarts", cfg.boundary.restarts, "k-means restarts")
      ->capture_default_str();
  provinces->add_option("--top-fraction", cfg.top_fraction,
                        "mass fraction marked major in the plan CSV")
      ->capture_default_str();
  provinces->add_option("--out", cfg.out_dir, "output directory")->required();
  add_common(provinces);

  auto* depth = app.add_subcommand("depth", "depth-profile comparison pipeline");
  depth->add_option("samples", cfg.inputs, "reference and dense sample CSVs")
      ->required()
      ->expected(2);
  depth->add_option("--day-window", cfg.day_window, "colocalization day window")
      ->capture_default_str();
  depth->add_option("--depth-window-m", cfg.depth_window_m, "colocalization depth window")
      ->capture_default_str();
  depth->add_flag("--raw-rmse", cfg.raw_rmse, "rmse on raw concentrations");
  depth->add_option("--out", cfg.out_dir, "output directory")->required();
  add_common(depth);

  auto* gen = app.add_subcommand("gen-patch-shift", "synthetic patch-shift field family");
  gen->add_option("--lon-min", cfg.patch.lon_min)->capture_default_str();
  gen->add_option("--lon-max", cfg.patch.lon_max)->capture_default_str();
  gen->add_option("--lat-min", cfg.patch.lat_min)->capture_default_str();
  gen->add_option("--lat-max", cfg.patch.lat_max)->capture_default_str();
  gen->add_option("--step", cfg.patch.step_deg, "grid spacing in degrees")
      ->capture_default_str();
  gen->add_option("--patch-lon", cfg.patch.patch_lon)->capture_default_str();
  gen->add_option("--patch-lat", cfg.patch.patch_lat)->capture_default_str();
  gen->add_option("--sigma", cfg.patch.sigma_deg, "patch sigma in degrees")
      ->capture_default_str();
  gen->add_option("--amplitude", cfg.patch.amplitude)->capture_default_str();
  gen->add_option("--background", cfg.patch.background,
                  "constant background mass on every cell")
      ->capture_default_str();
  gen->add_option("--shifts", cfg.patch.shifts_deg, "eastward shifts in degrees")
      ->delimiter(',');
  gen->add_option("--out", cfg.out_dir, "output directory")->required();
  add_common(gen);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    json j;
    j["error"] = {{"kind", "usage"}, {"code", 2}, {"message", e.what()}};
    err << j.dump() << '\n';
    return 2;
  }

  try {
    cfg.geometry = geometry_from_name(geometry);
    cfg.metric = metric_from_name(metric);
    if (cutoff > 0.0) cfg.options.cutoff = cutoff;
    if (sinkhorn_eps > 0.0) cfg.options.sinkhorn_epsilon = sinkhorn_eps;
    cfg.options.jobs = jobs;
    cfg.boundary.jobs = jobs;
    cfg.boundary.seed = cfg.seed;
    cfg.patch.seed = cfg.seed;

    if (compare->parsed()) {
      cfg.subcommand = "compare";
      return cmd_compare(cfg, out);
    }
    if (distmat->parsed()) {
      cfg.subcommand = "distmat";
      return cmd_distmat(cfg, out);
    }
    if (mds->parsed()) {
      cfg.subcommand = "mds";
      return cmd_mds(cfg, out);
    }
    if (trend->parsed()) {
      cfg.subcommand = "trend";
      return cmd_trend(cfg, out);
    }
    if (provinces->parsed()) {
      cfg.subcommand = "provinces";
      return cmd_provinces(cfg, out);
    }
    if (depth->parsed()) {
      cfg.subcommand = "depth";
      return cmd_depth(cfg, out);
    }
    if (gen->parsed()) {
      cfg.subcommand = "gen-patch-shift";
      return cmd_gen_patch_shift(cfg, out);
    }
    throw ValidationError("no subcommand given");
  } catch (const Error& e) {
    json j;
    j["error"] = {{"kind", e.kind()}, {"code", e.exit_code()}, {"message", e.what()}};
    err << j.dump() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    json j;
    j["error"] = {{"kind", "internal"}, {"code", 3}, {"message", e.what()}};
    err << j.dump() << '\n';
    return 3;
  }
}

}  // namespace otgrid::cli

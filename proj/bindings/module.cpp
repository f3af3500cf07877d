#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "otgrid/embed.hpp"
#include "otgrid/errors.hpp"
#include "otgrid/field.hpp"
#include "otgrid/geodesy.hpp"
#include "otgrid/metrics.hpp"
#include "otgrid/profiles.hpp"
#include "otgrid/provinces.hpp"
#include "otgrid/transport.hpp"
#include "otgrid/trend.hpp"

namespace py = pybind11;
using namespace otgrid;

namespace {

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  auto r = a.unchecked<1>();
  std::vector<double> out(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) out[static_cast<std::size_t>(i)] = r(i);
  return out;
}

py::array_t<double> plan_masses(const TransportPlan& p) {
  std::vector<double> buf(p.arcs.size());
  for (std::size_t i = 0; i < p.arcs.size(); ++i) buf[i] = p.arcs[i].mass;
  return py::array_t<double>(static_cast<py::ssize_t>(buf.size()), buf.data());
}

py::array_t<int32_t> plan_ids(const TransportPlan& p, bool from_side) {
  std::vector<int32_t> buf(p.arcs.size());
  for (std::size_t i = 0; i < p.arcs.size(); ++i) {
    buf[i] = from_side ? p.arcs[i].from : p.arcs[i].to;
  }
  return py::array_t<int32_t>(static_cast<py::ssize_t>(buf.size()), buf.data());
}

MetricOptions make_options(std::optional<double> cutoff, std::optional<double> epsilon,
                           int jobs) {
  MetricOptions o;
  o.cutoff = cutoff;
  o.sinkhorn_epsilon = epsilon;
  o.jobs = jobs;
  return o;
}

}  // namespace

PYBIND11_MODULE(_otgrid, m) {
  m.doc() = "exact optimal transport distances for gridded geospatial fields";
  m.attr("__version__") = "0.1.0";
  m.attr("EARTH_RADIUS_KM") = kEarthRadiusKm;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

  py::enum_<Geometry>(m, "Geometry")
      .value("LONLAT", Geometry::LonLat)
      .value("DEPTH", Geometry::Depth);

  py::class_<MassField>(m, "MassField")
      .def_static(
          "lonlat",
          [](py::array_t<double> lon, py::array_t<double> lat, py::array_t<double> values,
             const std::string& label) {
            return MassField::lonlat(to_vector(lon), to_vector(lat), to_vector(values), label);
          },
          py::arg("lon"), py::arg("lat"), py::arg("values"), py::arg("label") = "field")
      .def_static(
          "depth",
          [](py::array_t<double> depth_m, py::array_t<double> values, const std::string& label) {
            return MassField::depth(to_vector(depth_m), to_vector(values), label);
          },
          py::arg("depth_m"), py::arg("values"), py::arg("label") = "profile")
      .def_property_readonly("size", &MassField::size)
      .def_property_readonly("label", &MassField::label)
      .def_property_readonly("normalized", &MassField::normalized)
      .def_property_readonly("geometry", &MassField::geometry)
      .def_property_readonly("values",
                             [](const MassField& f) {
                               return py::array_t<double>(
                                   static_cast<py::ssize_t>(f.size()), f.values().data());
                             })
      .def_property_readonly("lon",
                             [](const MassField& f) {
                               return py::array_t<double>(static_cast<py::ssize_t>(f.size()),
                                                          f.lon().data());
                             })
      .def_property_readonly("lat",
                             [](const MassField& f) {
                               return py::array_t<double>(static_cast<py::ssize_t>(f.size()),
                                                          f.lat().data());
                             })
      .def_property_readonly("depth_m",
                             [](const MassField& f) {
                               return py::array_t<double>(static_cast<py::ssize_t>(f.size()),
                                                          f.depth_m().data());
                             })
      .def("total_mass", &MassField::total_mass)
      .def("__repr__", [](const MassField& f) {
        return "<MassField '" + f.label() + "' n=" + std::to_string(f.size()) + ">";
      });

  m.def("load_field",
        [](const std::string& path, const std::string& geometry) {
          return load_field(path, geometry_from_name(geometry));
        },
        py::arg("path"), py::arg("geometry") = "lonlat");
  m.def("normalize", [](const MassField& f) { return normalize(f); });
  m.def(
      "restrict_lonlat",
      [](const MassField& f, double lon_min, double lon_max, double lat_min, double lat_max) {
        return restrict_to(f, LonLatBox{lon_min, lon_max, lat_min, lat_max});
      },
      py::arg("field"), py::arg("lon_min"), py::arg("lon_max"), py::arg("lat_min"),
      py::arg("lat_max"));
  m.def(
      "restrict_depth",
      [](const MassField& f, double min_m, double max_m) {
        return restrict_to(f, DepthRange{min_m, max_m});
      },
      py::arg("field"), py::arg("min_m"), py::arg("max_m"));

  m.def("great_circle_km", &great_circle_km, py::arg("lon_a"), py::arg("lat_a"),
        py::arg("lon_b"), py::arg("lat_b"));
  m.def("depth_distance_m", &depth_distance_m);

  py::class_<CostMatrix>(m, "CostMatrix")
      .def_property_readonly("n_source", &CostMatrix::n_source)
      .def_property_readonly("n_target", &CostMatrix::n_target)
      .def_property_readonly("is_dense", &CostMatrix::is_dense)
      .def_property_readonly("arc_count", &CostMatrix::arc_count)
      .def("dense",
           [](const CostMatrix& c) {
             auto span = c.dense_costs();
             return py::array_t<double>({c.n_source(), c.n_target()}, span.data());
           });
  m.def(
      "build_cost",
      [](const MassField& a, const MassField& b, std::optional<double> cutoff) {
        return build_cost(a, b, cutoff);
      },
      py::arg("source"), py::arg("target"), py::arg("cutoff") = std::nullopt);
  m.def(
      "cost_from_dense",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> costs) {
        auto r = costs.unchecked<2>();
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(r.shape(0) * r.shape(1)));
        for (py::ssize_t i = 0; i < r.shape(0); ++i) {
          for (py::ssize_t j = 0; j < r.shape(1); ++j) flat.push_back(r(i, j));
        }
        return CostMatrix::from_dense(static_cast<int>(r.shape(0)),
                                      static_cast<int>(r.shape(1)), std::move(flat));
      },
      py::arg("costs"));

  py::class_<TransportPlan>(m, "TransportPlan")
      .def_property_readonly("objective", [](const TransportPlan& p) { return p.objective; })
      .def_property_readonly("w2", [](const TransportPlan& p) { return p.w2; })
      .def_property_readonly("n_arcs", [](const TransportPlan& p) { return p.arcs.size(); })
      .def_property_readonly("from_ids", [](const TransportPlan& p) { return plan_ids(p, true); })
      .def_property_readonly("to_ids", [](const TransportPlan& p) { return plan_ids(p, false); })
      .def_property_readonly("masses", &plan_masses);

  m.def("solve_exact", &solve_exact, py::arg("p"), py::arg("q"), py::arg("cost"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "solve_sinkhorn",
      [](const MassField& p, const MassField& q, const CostMatrix& c, double epsilon,
         int max_iter, double tol) {
        SinkhornOptions o{epsilon, max_iter, tol};
        py::gil_scoped_release release;
        return solve_sinkhorn(p, q, c, o);
      },
      py::arg("p"), py::arg("q"), py::arg("cost"), py::arg("epsilon"),
      py::arg("max_iter") = 10000, py::arg("tol") = 1e-8);
  m.def("brute_force", &brute_force, py::arg("p"), py::arg("q"), py::arg("cost"));

  m.def(
      "rmse", [](const MassField& p, const MassField& q, bool raw) { return rmse(p, q, raw); },
      py::arg("p"), py::arg("q"), py::arg("raw_values") = false);
  m.def(
      "w2",
      [](const MassField& p, const MassField& q, std::optional<double> cutoff,
         std::optional<double> epsilon, int jobs) {
        MetricOptions o = make_options(cutoff, epsilon, jobs);
        py::gil_scoped_release release;
        return w2(p, q, o);
      },
      py::arg("p"), py::arg("q"), py::arg("cutoff") = std::nullopt,
      py::arg("sinkhorn_epsilon") = std::nullopt, py::arg("jobs") = 1);

  m.def(
      "distance_matrix",
      [](const std::vector<MassField>& fields, const std::string& metric,
         std::optional<double> cutoff, std::optional<double> epsilon, bool raw_rmse, int jobs) {
        MetricOptions o = make_options(cutoff, epsilon, jobs);
        o.rmse_raw_values = raw_rmse;
        DistanceMatrix dm;
        {
          py::gil_scoped_release release;
          dm = distance_matrix(fields, metric_from_name(metric), o);
        }
        py::array_t<double> values({dm.n(), dm.n()}, dm.values.data());
        return py::make_tuple(dm.labels, values);
      },
      py::arg("fields"), py::arg("metric") = "w2", py::arg("cutoff") = std::nullopt,
      py::arg("sinkhorn_epsilon") = std::nullopt, py::arg("raw_rmse") = false,
      py::arg("jobs") = 1);

  m.def(
      "classical_mds",
      [](const std::vector<std::string>& labels,
         py::array_t<double, py::array::c_style | py::array::forcecast> values) {
        auto r = values.unchecked<2>();
        DistanceMatrix dm;
        dm.labels = labels;
        dm.values.resize(static_cast<std::size_t>(r.shape(0) * r.shape(1)));
        for (py::ssize_t i = 0; i < r.shape(0); ++i) {
          for (py::ssize_t j = 0; j < r.shape(1); ++j) {
            dm.values[static_cast<std::size_t>(i) * labels.size() +
                      static_cast<std::size_t>(j)] = r(i, j);
          }
        }
        MdsEmbedding e = classical_mds(dm);
        std::vector<double> flat;
        flat.reserve(e.labels.size() * 2);
        for (const auto& c : e.coords) {
          flat.push_back(c[0]);
          flat.push_back(c[1]);
        }
        py::array_t<double> coords({static_cast<py::ssize_t>(e.labels.size()),
                                    static_cast<py::ssize_t>(2)},
                                   flat.data());
        py::dict out;
        out["labels"] = e.labels;
        out["coords"] = coords;
        out["eigenvalues"] = e.eigenvalues;
        out["n_positive"] = e.n_positive;
        out["top2_mass_ratio"] = e.top2_mass_ratio;
        return out;
      },
      py::arg("labels"), py::arg("distances"));

  m.def(
      "kmeans_1d",
      [](py::array_t<double> values, int k, int restarts, std::uint64_t seed) {
        KmeansResult r = kmeans_1d(to_vector(values), k, restarts, seed);
        py::dict out;
        out["labels"] = r.labels;
        out["sse"] = r.sse;
        out["centers"] = r.centers;
        return out;
      },
      py::arg("values"), py::arg("k") = 2, py::arg("restarts") = 10, py::arg("seed") = 0);

  m.def(
      "w2_1d",
      [](py::array_t<double> depths_p, py::array_t<double> values_p,
         py::array_t<double> depths_q, py::array_t<double> values_q) {
        DepthProfile p, q;
        p.depths_m = to_vector(depths_p);
        p.values = to_vector(values_p);
        q.depths_m = to_vector(depths_q);
        q.values = to_vector(values_q);
        return w2_1d_closed_form(p, q);
      },
      py::arg("depths_p"), py::arg("values_p"), py::arg("depths_q"), py::arg("values_q"),
      "closed-form 1D 2-Wasserstein distance between two depth profiles");

  m.def(
      "fit_trend",
      [](const std::vector<std::string>& labels,
         py::array_t<double, py::array::c_style | py::array::forcecast> values,
         bool raw_response) {
        auto r = values.unchecked<2>();
        DistanceMatrix dm;
        dm.labels = labels;
        dm.values.resize(static_cast<std::size_t>(r.shape(0) * r.shape(1)));
        for (py::ssize_t i = 0; i < r.shape(0); ++i) {
          for (py::ssize_t j = 0; j < r.shape(1); ++j) {
            dm.values[static_cast<std::size_t>(i) * labels.size() +
                      static_cast<std::size_t>(j)] = r(i, j);
          }
        }
        TrendFit f = fit_trend(build_pairs(dm, raw_response));
        py::dict out;
        out["beta0"] = f.beta0;
        out["beta1"] = f.beta1;
        out["beta2"] = f.beta2;
        out["se_beta1"] = f.se_beta1;
        out["r_squared"] = f.r_squared;
        out["n_obs"] = f.n_obs;
        return out;
      },
      py::arg("labels"), py::arg("distances"), py::arg("raw_response") = false);
}

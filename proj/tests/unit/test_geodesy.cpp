#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "otgrid/errors.hpp"
#include "otgrid/geodesy.hpp"

using namespace otgrid;

TEST_CASE("great circle closed forms") {
  CHECK(great_circle_km(0, 0, 0, 0) == 0.0);
  double pole = std::numbers::pi / 2.0 * kEarthRadiusKm;
  CHECK(great_circle_km(0, 0, 0, 90) == doctest::Approx(pole).epsilon(1e-12));
  double antipode = std::numbers::pi * kEarthRadiusKm;
  CHECK(great_circle_km(0, 0, -180, 0) == doctest::Approx(antipode).epsilon(1e-12));
  CHECK_THROWS_AS(great_circle_km(180, 0, 0, 0), ValidationError);
  CHECK_THROWS_AS(great_circle_km(0, 91, 0, 0), ValidationError);
}

TEST_CASE("great circle symmetry and triangle inequality") {
  Rng rng(5);
  std::uniform_real_distribution<double> Ulon(-180.0, 179.999);
  std::uniform_real_distribution<double> Ulat(-90.0, 90.0);
  for (int t = 0; t < 300; ++t) {
    double lon[3], lat[3];
    for (int i = 0; i < 3; ++i) {
      lon[i] = Ulon(rng);
      lat[i] = Ulat(rng);
    }
    double ab = great_circle_km(lon[0], lat[0], lon[1], lat[1]);
    double ba = great_circle_km(lon[1], lat[1], lon[0], lat[0]);
    double bc = great_circle_km(lon[1], lat[1], lon[2], lat[2]);
    double ac = great_circle_km(lon[0], lat[0], lon[2], lat[2]);
    CHECK(std::abs(ab - ba) <= 1e-9 * std::max(1.0, ab));
    CHECK(ac <= ab + bc + 1e-9 * std::max(1.0, ac));
  }
}

TEST_CASE("depth distance") {
  CHECK(depth_distance_m(96, 140) == 44.0);
  CHECK(depth_distance_m(50, 50) == 0.0);
  CHECK(depth_distance_m(0, 500) == 500.0);
}

TEST_CASE("dense cost matrix of identical fields has a zero diagonal") {
  MassField f = MassField::lonlat({-155, -150}, {20, 25}, {1, 1}, "f");
  CostMatrix C = build_cost(f, f);
  CHECK(C.is_dense());
  CHECK(C.arc_count() == 4);
  CHECK(C.at(0, 0) == 0.0);
  CHECK(C.at(1, 1) == 0.0);
  CHECK(C.at(0, 1) > 0.0);
  CHECK(C.at(0, 1) == C.at(1, 0));
}

TEST_CASE("collinear depth cells give the squared pattern") {
  MassField f = MassField::depth({0, 1, 2}, {1, 1, 1}, "f");
  CostMatrix C = build_cost(f, f);
  CHECK(C.at(0, 0) == 0.0);
  CHECK(C.at(0, 1) == 1.0);
  CHECK(C.at(0, 2) == 4.0);
  CHECK(C.at(2, 0) == 4.0);
}

TEST_CASE("cutoff below the minimum distance flags isolation") {
  MassField a = MassField::depth({0}, {1}, "a");
  MassField b = MassField::depth({1000}, {1}, "b");
  CostMatrix C = build_cost(a, b, 10.0);
  CHECK_FALSE(C.is_dense());
  CHECK(C.arc_count() == 0);
  CHECK(C.has_isolated_cell());
}

TEST_CASE("infinite-ish cutoff equals the dense build") {
  Rng rng(7);
  MassField a = test::random_grid_field(rng, 4, 3, "a");
  MassField b = test::random_grid_field(rng, 4, 3, "b", -169.5, 0.5);
  CostMatrix dense = build_cost(a, b);
  CostMatrix cut = build_cost(a, b, 1e9);
  REQUIRE(cut.arc_count() == dense.arc_count());
  std::vector<double> dv, cv;
  dense.for_each_arc([&](int, int, double c) { dv.push_back(c); });
  cut.for_each_arc([&](int, int, double c) { cv.push_back(c); });
  CHECK(dv == cv);
}

TEST_CASE("cost entries are squared great-circle distances") {
  Rng rng(9);
  MassField a = test::random_grid_field(rng, 3, 3, "a");
  MassField b = test::random_grid_field(rng, 3, 3, "b", -150.0, 10.0, 2.0);
  CostMatrix C = build_cost(a, b);
  for (int i = 0; i < C.n_source(); ++i) {
    for (int j = 0; j < C.n_target(); ++j) {
      double d = great_circle_km(a.lon()[i], a.lat()[i], b.lon()[j], b.lat()[j]);
      CHECK(C.at(i, j) == doctest::Approx(d * d).epsilon(1e-9));
    }
  }
}

TEST_CASE("mixed geometry modes are rejected") {
  MassField a = MassField::lonlat({0}, {0}, {1}, "a");
  MassField b = MassField::depth({0}, {1}, "b");
  CHECK_THROWS_AS(build_cost(a, b), ValidationError);
}

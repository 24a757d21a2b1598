#include <doctest.h>

#include <cmath>

#include "ndopt/baselines.hpp"
#include "ndopt/errors.hpp"
#include "ndopt/oracle.hpp"
#include "support.hpp"

using namespace ndopt;
using testing::dense;

TEST_CASE("Fenchel infimum at known points") {
  CHECK(oracle::fenchel_infimum(ConcaveKind::QMean, {1, 1}).value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(oracle::fenchel_infimum(ConcaveKind::GMean, {0.25, 1}).value - 0.5) <= 2e-3);
  CHECK(std::abs(oracle::fenchel_infimum(ConcaveKind::Min, {0.3, 0.7}).value - 0.3) <= 1e-3);
  CHECK(std::abs(oracle::fenchel_infimum(ConcaveKind::HMean, {0.5, 0.5}).value - 0.5) <= 1e-3);
}

TEST_CASE("Q-mean attaining points stay inside the cap") {
  const oracle::AttainmentReport r = oracle::dual_attainment(ConcaveKind::QMean, 0.0, 11, 101);
  CHECK(r.bound == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(r.ok());
}

TEST_CASE("Dinkelbach reference on a singleton") {
  const PseudoLinearMeasure m(PseudoLinearKind::Jaccard, 0, 2.0);
  const std::vector<RatePair> set{{0.6, 0.5}};
  const std::vector<double> levels = oracle::dj_scalar_reference(set, m);
  REQUIRE(levels.size() == 3);
  CHECK(levels[0] == 0.0);
  CHECK(levels[1] == doctest::Approx(m.value(set[0])).epsilon(1e-12));
  CHECK(levels[2] == levels[1]);
  CHECK(oracle::popular_value(m, set[0]) == doctest::Approx(m.value(set[0])).epsilon(1e-12));
}

TEST_CASE("finite differences") {
  auto f = [](std::span<const double> x) { return x[0] * x[0] + 3 * x[0] * x[1]; };
  auto good = [](std::span<const double> x) { return std::vector<double>{2 * x[0] + 3 * x[1], 3 * x[0]}; };
  auto bad = [](std::span<const double> x) { return std::vector<double>{2 * x[0], 3 * x[0]}; };
  const std::vector<double> p{0.7, -1.2};
  CHECK(oracle::finite_diff_check(f, good, p) <= 1e-7);
  CHECK(oracle::finite_diff_check(f, bad, p) >= 1.0);
}

TEST_CASE("1-D grid search is the best threshold in either direction") {
  testing::Gen g(91);
  const Measure m = parse_measure("fbeta:1", 1.0);
  for (int i = 0; i < 30; ++i) {
    std::vector<Sample> data;
    std::vector<double> s, neg;
    std::vector<int> y;
    for (int j = 0; j < 40; ++j) {
      data.push_back(dense({g.uniform(-1, 1)}, g.label()));
      s.push_back(data.back().features[0].value);
      neg.push_back(-s.back());
      y.push_back(data.back().label);
    }
    data[0].label = y[0] = 1;
    data[1].label = y[1] = -1;
    const double best = std::max(oracle::brute_force_threshold(s, y, m).value,
                                 oracle::brute_force_threshold(neg, y, m).value);
    const oracle::GridSearchResult r = oracle::grid_model_search(data, m);
    CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
    CHECK(metric(r.model, data, m) == doctest::Approx(r.value).epsilon(1e-12));
  }
}

TEST_CASE("2-D grid search refines monotonically") {
  testing::Gen g(92);
  const Measure m = parse_measure("gmean", 1.0);
  std::vector<Sample> data;
  for (int j = 0; j < 200; ++j) {
    const int y = g.label();
    data.push_back(dense({g.uniform(-1, 1) + 0.5 * y, g.uniform(-1, 1) - 0.3 * y}, y));
  }
  double prev = 0.0;
  for (std::size_t angles : {8, 16, 32, 64, 128}) {
    const oracle::GridSearchResult r = oracle::grid_model_search(data, m, angles);
    CHECK(r.value >= prev - 1e-12);
    CHECK(metric(r.model, data, m) == doctest::Approx(r.value).epsilon(1e-12));
    prev = r.value;
    // Any fixed direction on the grid is dominated once its threshold is tuned.
    const double a = 2 * M_PI * 3 / angles;
    const LinearModel w(std::vector<double>{std::cos(a), std::sin(a)}, 0.0);
    CHECK(r.value >= plugin_threshold(w, data, m).value - 1e-12);
  }
  CHECK_THROWS_AS(oracle::grid_model_search(std::vector<Sample>{dense({1, 2, 3}, 1), dense({0, 0, 1}, -1)}, m),
                  InvalidParameter);
}

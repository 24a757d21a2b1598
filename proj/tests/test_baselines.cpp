#include <doctest.h>

#include <cmath>
#include <limits>

#include "ndopt/baselines.hpp"
#include "ndopt/data.hpp"
#include "ndopt/errors.hpp"
#include "ndopt/oracle.hpp"
#include "support.hpp"

using namespace ndopt;
using testing::dense;

namespace {

const Measure kF1 = parse_measure("fbeta:1", 1.0);
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("threshold sweep on three scores") {
  const std::vector<double> s{0.1, 0.4, 0.9};
  const std::vector<int> y{-1, -1, 1};
  const ThresholdChoice c = plugin_threshold(s, y, parse_measure("fbeta:1", 2.0));
  CHECK(c.value == doctest::Approx(1.0));
  CHECK(c.threshold > 0.4);
  CHECK(c.threshold < 0.9);
}

TEST_CASE("identical scores leave only the constant classifiers") {
  const std::vector<double> s(6, 0.3);
  const std::vector<int> y{1, -1, 1, -1, -1, -1};
  const ThresholdChoice c = plugin_threshold(s, y, parse_measure("fbeta:1", 2.0));
  // All positive: TP = 2, FP = 4, F1 = 4 / 8.
  CHECK(c.threshold == -kInf);
  CHECK(c.value == doctest::Approx(0.5));
}

TEST_CASE("apply_threshold") {
  const LinearModel m(std::vector<double>{2.0}, 0.5);
  const Sample x = dense({1.0}, 1);
  CHECK(apply_threshold(m, 2.0).score(x) == doctest::Approx(0.5));
  CHECK(apply_threshold(m, -kInf).predict(x) == 1);
  CHECK(apply_threshold(m, kInf).predict(x) == -1);
  CHECK(apply_threshold(m, -kInf).predict(dense({-1e9}, 1)) == 1);
}

TEST_CASE("threshold sweep matches recounting at every threshold") {
  testing::Gen g(81);
  const std::vector<std::string> tokens{"fbeta:1", "fbeta:2", "jaccard", "gl:0.5", "min", "qmean",
                                        "hmean", "gmean"};
  for (int i = 0; i < 200; ++i) {
    const int n = g.integer(2, 40);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (int j = 0; j < n; ++j) {
      s[j] = std::round(g.uniform(-5, 5));  // coarse, so ties occur
      y[j] = g.label();
    }
    y[0] = 1;
    y[1] = -1;
    int pos = 0;
    for (int l : y) pos += l > 0;
    const Measure m = parse_measure(tokens[i % tokens.size()], double(n - pos) / pos);
    const ThresholdChoice fast = plugin_threshold(s, y, m);
    const ThresholdChoice slow = oracle::brute_force_threshold(s, y, m);
    CHECK(fast.value == doctest::Approx(slow.value).epsilon(1e-12));
    CHECK(fast.threshold == slow.threshold);
  }
}

TEST_CASE("tuned threshold is never worse than the raw sign rule") {
  testing::Gen g(82);
  for (int i = 0; i < 50; ++i) {
    std::vector<Sample> data;
    for (int j = 0; j < 60; ++j) data.push_back(g.sample(3));
    data[0].label = 1;
    data[1].label = -1;
    const LinearModel w = g.model(3);
    const ThresholdChoice c = plugin_threshold(w, data, kF1);
    CHECK(c.value >= metric(w, data, kF1) - 1e-12);
    CHECK(metric(apply_threshold(w, c.threshold), data, kF1) == doctest::Approx(c.value));
  }
}

TEST_CASE("threshold sweep needs both classes") {
  const std::vector<double> s{0.1, 0.2};
  const std::vector<int> y{1, 1};
  CHECK_THROWS_AS(plugin_threshold(s, y, kF1), DataError);
}

TEST_CASE("SGD separates balanced separable data") {
  SynthSpec spec;
  spec.n = 2000;
  spec.p = 0.5;
  spec.separation = 6.0;
  spec.seed = 5;
  auto data = synth_gaussian(spec);
  scale_features(data, 1.0 / max_norm(data));
  SgdConfig c;
  c.passes = 10;
  c.timing = false;
  c.seed = 5;
  const SgdResult r = sgd_baseline(data, {}, kF1, c);
  const Confusion cm = confusion(r.model, data);
  CHECK(double(cm.tp + cm.tn) / double(data.size()) >= 0.95);
  CHECK(r.model.norm() <= c.radius_w + 1e-9);
  const SgdResult again = sgd_baseline(data, {}, kF1, c);
  CHECK(again.model == r.model);
  REQUIRE(r.trace.size() == again.trace.size());
  CHECK(r.trace.back().t == 10 * data.size());
  CHECK(r.trace.back().train_metric == again.trace.back().train_metric);
  CHECK_THROWS_AS(sgd_baseline({}, {}, kF1, c), DataError);
}

TEST_CASE("SGD keeps one model per checkpoint on request") {
  std::vector<Sample> data{dense({1.0}, 1), dense({-1.0}, -1), dense({0.8}, 1), dense({-0.3}, -1)};
  SgdConfig c;
  c.passes = 3;
  c.timing = false;
  c.keep_checkpoints = true;
  c.checkpoint_every = 2;
  const SgdResult r = sgd_baseline(data, data, kF1, c);
  CHECK(r.checkpoints.size() == r.trace.size());
  CHECK(r.trace.size() == 6);
  CHECK(r.checkpoints.back() == r.model);
  for (const auto& rec : r.trace) CHECK(rec.test_metric == rec.train_metric);
}

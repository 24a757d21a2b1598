#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ndopt/data.hpp"
#include "ndopt/errors.hpp"
#include "ndopt/eval.hpp"
#include "ndopt/oracle.hpp"
#include "ndopt/stamp.hpp"
#include "support.hpp"

using namespace ndopt;
using testing::dense;

namespace {

const PseudoLinearMeasure kF1(PseudoLinearKind::FBeta, 1.0, 1.0);

std::vector<RatePair> random_set(testing::Gen& g, int size, double cap = 1.0) {
  std::vector<RatePair> set(size);
  for (auto& r : set) r = g.rates(cap);
  return set;
}

double best_value(std::span<const RatePair> set, const PseudoLinearMeasure& m) {
  double best = -INFINITY;
  for (const auto& r : set) best = std::max(best, m.value(r));
  return best;
}

StampConfig quiet(std::uint64_t seed = 0) {
  StampConfig c;
  c.seed = seed;
  c.timing = false;
  return c;
}

std::vector<Sample> synth(std::size_t n, double p, double sep, std::uint64_t seed) {
  SynthSpec s;
  s.n = n;
  s.p = p;
  s.separation = sep;
  s.seed = seed;
  auto out = synth_gaussian(s);
  scale_features(out, 1.0 / max_norm(out));
  return out;
}

}  // namespace

TEST_CASE("five classifiers, F1") {
  const std::vector<RatePair> set{{0.9, 0.1}, {0.2, 0.95}, {0.7, 0.7}, {0.5, 0.9}, {0.95, 0.4}};
  const FiniteAmTrace tr = am_finite(set, kF1);
  // Enumeration: the best F1 in the set.
  std::size_t arg = 0;
  for (std::size_t i = 1; i < set.size(); ++i) {
    if (kF1.value(set[i]) > kF1.value(set[arg])) arg = i;
  }
  CHECK(tr.optimum == kF1.value(set[arg]));
  std::size_t reached = tr.chosen.size();
  for (std::size_t i = 0; i < tr.chosen.size(); ++i) {
    if (tr.chosen[i] == arg) {
      reached = i + 1;
      break;
    }
  }
  CHECK(reached <= 4);
  for (std::size_t t = 0; t < tr.excess.size(); ++t) {
    CHECK(tr.excess[t] <= tr.excess[0] * std::pow(2.0 / 3.0, static_cast<double>(t)) + 1e-12);
  }
}

TEST_CASE("singleton set") {
  const std::vector<RatePair> set{{0.6, 0.8}};
  const FiniteAmTrace tr = am_finite(set, kF1);
  CHECK(tr.levels[1] == kF1.value(set[0]));
  CHECK(tr.levels.back() == kF1.value(set[0]));
  CHECK(tr.excess[1] == 0.0);
}

TEST_CASE("the first step maximizes the level-zero valuation") {
  testing::Gen g(71);
  for (int i = 0; i < 50; ++i) {
    const auto set = random_set(g, 10);
    const PseudoLinearMeasure m(PseudoLinearKind::FBeta, 2.0, g.uniform(0.5, 5));
    const FiniteAmTrace tr = am_finite(set, m);
    const ValuationCoeffs& k = m.coeffs();
    std::size_t arg = 0;
    for (std::size_t j = 1; j < set.size(); ++j) {
      if (k.c + k.alpha * set[j].P + k.beta * set[j].N > k.c + k.alpha * set[arg].P + k.beta * set[arg].N) arg = j;
    }
    CHECK(tr.levels[0] == 0.0);
    CHECK(tr.chosen[0] == arg);
  }
}

TEST_CASE("exact AM: geometric rate, monotone levels, fixed points, termination") {
  testing::Gen g(72);
  struct Case {
    PseudoLinearKind kind;
    double param;
  };
  for (const Case c : {Case{PseudoLinearKind::FBeta, 1.0}, Case{PseudoLinearKind::Jaccard, 0.0},
                       Case{PseudoLinearKind::GowerLegendre, 0.5},
                       Case{PseudoLinearKind::GowerLegendre, 2.0}}) {
    for (int i = 0; i < 100; ++i) {
      const double theta = g.uniform(0.25, 10);
      const PseudoLinearMeasure m(c.kind, c.param, theta);
      const auto set = random_set(g, g.integer(3, 50));
      const FiniteAmTrace tr = am_finite(set, m);
      const double opt = best_value(set, m);
      CHECK(tr.optimum == opt);
      for (std::size_t t = 0; t + 1 < tr.levels.size(); ++t) {
        CHECK(tr.levels[t + 1] >= tr.levels[t] - 1e-15);
        CHECK(opt - tr.levels[t + 1] <= m.rate() * (opt - tr.levels[t]) + 1e-12);
      }
      for (std::size_t t = 0; t < tr.chosen.size(); ++t) {
        const double v = tr.levels[t + 1];
        CHECK(std::abs(m.valuation(set[tr.chosen[t]], v) - v) <= 1e-12);
      }
      const double d0 = opt - tr.levels[0];
      if (d0 > 1e-12) {
        const double bound = std::ceil(std::log(d0 / 1e-12) / std::log(1 / m.rate())) + 1;
        CHECK(static_cast<double>(tr.iterations) <= bound);
      }
      const std::vector<double> dj = oracle::dj_scalar_reference(set, m);
      REQUIRE(dj.size() == tr.levels.size());
      for (std::size_t t = 0; t < dj.size(); ++t) CHECK(std::abs(dj[t] - tr.levels[t]) <= 1e-12);
    }
  }
}

TEST_CASE("noisy AM without noise is exact AM") {
  testing::Gen g(73);
  for (int i = 0; i < 20; ++i) {
    const auto set = random_set(g, 5);
    const std::vector<double> zeros(12, 0.0);
    const NoisyAmTrace tr = noisy_am_simulate(set, kF1, zeros, zeros);
    const double eta = 2.0 / 3.0;
    for (std::size_t t = 0; t < tr.excess.size(); ++t) {
      CHECK(tr.envelope[t] == doctest::Approx(std::pow(eta, static_cast<double>(t)) * tr.excess[0]));
    }
    CHECK(tr.violations == 0);
  }
}

TEST_CASE("noisy AM stays under the envelope") {
  testing::Gen g(74);
  for (int i = 0; i < 100; ++i) {
    const auto set = random_set(g, 5);
    std::vector<double> eps(20, 0.01);
    std::vector<double> delta(20, 0.0);
    CHECK(noisy_am_simulate(set, kF1, eps, delta, g.integer(0, 4)).violations == 0);
    for (std::size_t t = 0; t < delta.size(); ++t) {
      eps[t] = 0.0;
      delta[t] = t % 2 ? 0.02 : -0.02;
    }
    CHECK(noisy_am_simulate(set, kF1, eps, delta, g.integer(0, 4)).violations == 0);
    for (std::size_t t = 0; t < delta.size(); ++t) {
      eps[t] = g.uniform(0, 0.05);
      delta[t] = g.uniform(-0.05, 0.05);
    }
    const NoisyAmTrace tr = noisy_am_simulate(set, kF1, eps, delta, g.integer(0, 4));
    CHECK(tr.violations == 0);
    for (std::size_t t = 0; t < tr.excess.size(); ++t) CHECK(tr.excess[t] <= tr.envelope[t] + 1e-12);
  }
  const std::vector<RatePair> set{{0.5, 0.5}};
  const std::vector<double> z(3, 0.0);
  CHECK_THROWS_AS(noisy_am_simulate(set, PseudoLinearMeasure(PseudoLinearKind::Jaccard, 0, 1.0), z, z), InvalidParameter);
}

TEST_CASE("epoch schedules") {
  StampConfig c;
  c.initial = 100;
  CHECK(epoch_lengths(c, 0) == std::pair<std::size_t, std::size_t>{100, 100});
  CHECK(epoch_lengths(c, 3).first == 800);
  c.schedule = EpochSchedule::Theoretical;
  c.theory_eta = 0.8;
  c.theory_c = 10;
  std::size_t prev = 0;
  for (std::size_t e = 0; e < 10; ++e) {
    const auto [s, s2] = epoch_lengths(c, e);
    CHECK(s == static_cast<std::size_t>(std::ceil(10 * std::pow(1.25, 2.0 * e))));
    CHECK(s2 == s);
    CHECK(s >= prev);
    CHECK(s >= 1);
    prev = s;
  }
  c.theory_eta = 1.5;
  CHECK_THROWS_AS(epoch_lengths(c, 0), InvalidParameter);
}

TEST_CASE("STAMP run bookkeeping") {
  const auto data = synth(3000, 0.1, 2.0, 3);
  const PseudoLinearMeasure m(PseudoLinearKind::FBeta, 1.0, 9.0);
  const StampResult a = stamp_run(data, {}, m, 0.1, quiet(3));
  const StampResult b = stamp_run(data, {}, m, 0.1, quiet(3));
  CHECK(a.model == b.model);
  REQUIRE(a.trace.size() == b.trace.size());
  REQUIRE(a.trace.size() >= 5);
  std::uint64_t prev = 0;
  for (std::size_t e = 0; e < a.trace.size(); ++e) {
    const EpochRecord& r = a.trace[e];
    CHECK(r.epoch == e + 1);
    CHECK(r.t_total > prev);
    prev = r.t_total;
    CHECK(r.v == doctest::Approx(m.value({r.P_hat, r.N_hat})));
    CHECK(r.P_hat >= 0.0);
    CHECK(r.P_hat <= 1.0);
    CHECK(r.test_metric == r.train_metric);
    CHECK(r.v == b.trace[e].v);
  }
  CHECK(a.trace.back().t_total <= 25 * data.size());
  std::ostringstream csv;
  write_epoch_csv(csv, a.trace);
  CHECK(csv.str().rfind("epoch,t_total,elapsed_ms,v_e,P_hat,N_hat,test_metric\n1,200,0,", 0) == 0);
  CHECK_THROWS_AS(stamp_run({}, {}, m, 0.1, quiet()), DataError);
}

TEST_CASE("level windows without positives are flagged") {
  std::vector<Sample> data;
  for (int i = 0; i < 1000; ++i) data.push_back(dense({i == 0 ? 1.0 : -0.5}, i == 0 ? 1 : -1));
  const PseudoLinearMeasure m(PseudoLinearKind::FBeta, 1.0, 999.0);
  StampConfig c = quiet(4);
  c.initial = 10;
  c.passes = 2;
  const StampResult r = stamp_run(data, {}, m, 0.001, c);
  bool flagged = false;
  for (const auto& e : r.trace) {
    if (e.degenerate_level) {
      flagged = true;
      CHECK(e.P_hat == 0.0);
      CHECK(e.v == 0.0);
    }
  }
  CHECK(flagged);
}

TEST_CASE("1-D separable data reaches the threshold optimum") {
  testing::Gen g(75);
  std::vector<Sample> data;
  for (int i = 0; i < 2000; ++i) {
    const int y = i % 5 == 0 ? 1 : -1;
    data.push_back(dense({0.5 * y + g.uniform(-0.45, 0.45)}, y));
  }
  for (const char* tok : {"fbeta:1", "jaccard"}) {
    const Measure m = parse_measure(tok, 4.0);
    const double best = oracle::grid_model_search(data, m).value;
    const StampResult r = stamp_run(data, {}, std::get<PseudoLinearMeasure>(m), 0.2, quiet(2));
    CAPTURE(tok);
    CHECK(metric(r.model, data, m) >= best - 0.05);
  }
}

TEST_CASE("levels are eventually nondecreasing up to estimation noise") {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = synth(4000, 0.5, 1.0, 100 + seed);
    const PseudoLinearMeasure m(PseudoLinearKind::FBeta, 1.0, 1.0);
    const StampResult r = stamp_run(data, {}, m, 0.5, quiet(seed));
    bool ok = true;
    for (std::size_t e = 2; e + 1 < r.trace.size(); ++e) {
      const double s2 = static_cast<double>(epoch_lengths(quiet(), e).second);
      ok = ok && r.trace[e].v >= r.trace[e - 1].v - 2 / std::sqrt(s2);
    }
    good += ok;
  }
  CHECK(good >= 19);
}

TEST_CASE("STAMP and batch AM agree on the same sample") {
  const auto data = synth(4000, 0.2, 2.0, 6);
  const PseudoLinearMeasure m(PseudoLinearKind::FBeta, 1.0, 4.0);
  BatchAmConfig bc;
  const BatchAmResult batch = batch_am(data, m, RewardFn::zero_one(), bc);
  StampConfig c = quiet(6);
  c.initial = 2000;
  c.passes = 100;
  const StampResult st = stamp_run(data, {}, m, 0.2, c);
  CHECK(std::abs(st.trace.back().v - batch.levels.back()) <= 0.03);
  for (std::size_t t = 1; t < batch.levels.size(); ++t) {
    CHECK(batch.levels[t] == doctest::Approx(m.value(batch.rates[t - 1])));
  }
}

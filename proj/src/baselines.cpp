#include "ndopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ndopt/data.hpp"
#include "ndopt/errors.hpp"

namespace ndopt {
namespace {

std::size_t data_dim(std::span<const Sample> samples) {
  std::size_t dim = 0;
  for (const auto& s : samples) {
    if (!s.features.empty()) dim = std::max<std::size_t>(dim, s.features.back().index + 1);
  }
  return dim;
}

// d/ds log(1 + exp(-y s)) = -y / (1 + exp(y s)).
double logistic_descent_coeff(int label, double score) {
  const double y = label > 0 ? 1.0 : -1.0;
  const double z = y * score;
  if (z > 0) {
    const double e = std::exp(-z);
    return y * e / (1.0 + e);
  }
  return y / (1.0 + std::exp(z));
}

}  // namespace

SgdResult sgd_baseline(std::span<const Sample> train, std::span<const Sample> test,
                       const Measure& measure, const SgdConfig& config, const TraceSink& sink) {
  if (train.empty()) throw DataError("empty training stream");
  if (!(config.radius_w > 0.0)) throw InvalidParameter("R_W must be positive");
  const Stopwatch clock(config.timing);
  const std::size_t dim = data_dim(train);
  const double icpt = config.fit_intercept ? 1.0 : 0.0;
  const std::uint64_t every =
      config.checkpoint_every > 0 ? config.checkpoint_every : checkpoint_interval(train.size());

  SampleStream stream(train, config.passes, config.seed);
  LinearModel w(dim);
  ModelAverager avg(dim);
  std::uint64_t t = 0;
  SgdResult out;
  auto checkpoint = [&] {
    const LinearModel m = avg.average();
    TraceRecord rec;
    rec.t = t;
    rec.elapsed_ms = clock.elapsed_ms();
    rec.train_metric = metric(m, train, measure);
    rec.test_metric = test.empty() ? 0.0 : metric(m, test, measure);
    rec.w_norm = m.norm();
    if (sink) sink(rec);
    out.trace.push_back(rec);
    if (config.keep_checkpoints) out.checkpoints.push_back(m);
  };

  while (const Sample* s = stream.next()) {
    ++t;
    const double eta = config.step_scale / std::sqrt(static_cast<double>(t));
    w.add_scaled(s->features, icpt, eta * logistic_descent_coeff(s->label, w.score(*s)));
    w.project_to_ball(config.radius_w);
    avg.add(w);
    if (t % every == 0) checkpoint();
  }
  if (out.trace.empty() || out.trace.back().t != t) checkpoint();
  out.model = avg.average();
  return out;
}

ThresholdChoice plugin_threshold(std::span<const double> scores, std::span<const int> labels,
                                 const Measure& measure) {
  if (scores.size() != labels.size()) throw InvalidParameter("scores and labels differ in size");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Start at -inf: everything predicted positive.
  Confusion c;
  for (int y : labels) (y > 0 ? c.tp : c.fp) += 1;
  if (c.tp == 0 || c.fp == 0) throw DataError("threshold sweep needs both classes");

  const double inf = std::numeric_limits<double>::infinity();
  ThresholdChoice best{-inf, metric(c, measure)};
  std::size_t i = 0;
  while (i < order.size()) {
    // Move the whole block of equal scores to the negative side.
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]] > 0) {
        --c.tp;
        ++c.fn;
      } else {
        --c.fp;
        ++c.tn;
      }
      ++i;
    }
    double tau = inf;
    if (i < order.size()) {
      tau = s + (scores[order[i]] - s) / 2;
      if (!(tau < scores[order[i]])) tau = s;
    }
    const double v = metric(c, measure);
    if (v > best.value) best = {tau, v};
  }
  return best;
}

ThresholdChoice plugin_threshold(const LinearModel& model, std::span<const Sample> samples,
                                 const Measure& measure) {
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(samples.size());
  labels.reserve(samples.size());
  for (const auto& s : samples) {
    scores.push_back(model.score(s));
    labels.push_back(s.label);
  }
  return plugin_threshold(scores, labels, measure);
}

LinearModel apply_threshold(const LinearModel& model, double threshold) {
  if (std::isinf(threshold)) return LinearModel(model.dim(), threshold < 0 ? 1.0 : 0.0);
  LinearModel out = model;
  out.set_intercept(model.intercept() - threshold);
  return out;
}

}  // namespace ndopt
